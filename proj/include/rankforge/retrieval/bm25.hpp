#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankforge/core/types.hpp"

namespace rankforge::retrieval {

struct CorpusDoc {
  std::string docid;
  Json fields = Json::object();  // same text-field resolution as Candidate::doc
};

// Corpus JSONL: {"docid": ..., "segment"|"contents"|...: ...} per line.
std::vector<CorpusDoc> parse_corpus_jsonl(std::istream& in);
std::vector<CorpusDoc> read_corpus_file(const std::string& path);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct RetrievalConfig {
  std::string method = "bm25";
  std::size_t k = 100;
  Bm25Params bm25;

  // Throws ConfigError when out of range or the method is unknown.
  void validate() const;
};

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;
};

// Immutable after build; concurrent searches are safe.
class InvertedIndex {
 public:
  // Throws ValidationError naming the first duplicate docid.
  static InvertedIndex build(std::vector<CorpusDoc> corpus);

  std::size_t num_docs() const { return docs_.size(); }
  double avgdl() const { return avgdl_; }
  std::size_t doc_length(std::size_t doc) const { return lengths_[doc]; }
  const CorpusDoc& doc(std::size_t doc) const { return docs_[doc]; }
  std::size_t document_frequency(std::string_view term) const;
  // Empty span when the term is not indexed.
  const std::vector<Posting>& postings(std::string_view term) const;

  // Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)). Repeated query
  // terms contribute once per occurrence. Top-k by score descending, ties by
  // ascending docid; only docs matching at least one query term are returned.
  std::vector<Candidate> search(std::string_view query, std::size_t k,
                                const Bm25Params& params = {}) const;

 private:
  std::vector<CorpusDoc> docs_;
  std::vector<std::size_t> lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
};

double bm25_idf(std::size_t num_docs, std::size_t df);

struct Topic {
  std::string qid;
  std::string text;
};

// `qid<TAB>text` per line; blank lines skipped.
std::vector<Topic> parse_topics_tsv(std::string_view text);
std::vector<Topic> read_topics_file(const std::string& path);

std::vector<Request> retrieve_batch(const std::vector<Topic>& topics, const InvertedIndex& index,
                                    const RetrievalConfig& config);

}  // namespace rankforge::retrieval
