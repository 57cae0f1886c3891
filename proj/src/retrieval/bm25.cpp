#include "rankforge/retrieval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "rankforge/core/error.hpp"
#include "rankforge/retrieval/tokenizer.hpp"

namespace rankforge::retrieval {

std::vector<CorpusDoc> parse_corpus_jsonl(std::istream& in) {
  std::vector<CorpusDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
    auto id = j.find("docid");
    if (id == j.end()) throw SchemaError("docid", line_no);
    CorpusDoc doc;
    if (id->is_string()) {
      doc.docid = id->get<std::string>();
    } else if (id->is_number_integer()) {
      doc.docid = std::to_string(id->get<std::int64_t>());
    } else {
      throw ParseError("docid must be a string or an integer", line_no);
    }
    j.erase("docid");
    doc.fields = std::move(j);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<CorpusDoc> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return parse_corpus_jsonl(in);
}

void RetrievalConfig::validate() const {
  if (method != "bm25") throw ConfigError("unknown retrieval method \"" + method + "\"");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(bm25.k1 > 0.0)) throw ConfigError("bm25 k1 must be > 0");
  if (!(bm25.b >= 0.0 && bm25.b <= 1.0)) throw ConfigError("bm25 b must be in [0, 1]");
}

InvertedIndex InvertedIndex::build(std::vector<CorpusDoc> corpus) {
  InvertedIndex index;
  std::unordered_set<std::string> seen;
  std::size_t total = 0;
  index.lengths_.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (!seen.insert(corpus[d].docid).second) {
      throw ValidationError("duplicate docid \"" + corpus[d].docid + "\" in corpus");
    }
    auto tokens = tokenize(passage_text(corpus[d].fields));
    index.lengths_.push_back(tokens.size());
    total += tokens.size();
    std::unordered_map<std::string, std::uint32_t> tf;
    for (auto& t : tokens) ++tf[std::move(t)];
    for (auto& [term, count] : tf) {
      index.postings_[term].push_back({static_cast<std::uint32_t>(d), count});
    }
  }
  index.docs_ = std::move(corpus);
  index.avgdl_ = index.docs_.empty() ? 0.0 : static_cast<double>(total) / index.docs_.size();
  return index;
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
  return postings(term).size();
}

const std::vector<Posting>& InvertedIndex::postings(std::string_view term) const {
  static const std::vector<Posting> kEmpty;
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? kEmpty : it->second;
}

double bm25_idf(std::size_t num_docs, std::size_t df) {
  const double n = static_cast<double>(num_docs);
  const double f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

std::vector<Candidate> InvertedIndex::search(std::string_view query, std::size_t k,
                                             const Bm25Params& params) const {
  std::vector<Candidate> out;
  if (k == 0 || docs_.empty()) return out;

  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& term : tokenize(query)) {
    const auto& plist = postings(term);
    if (plist.empty()) continue;
    const double idf = bm25_idf(docs_.size(), plist.size());
    for (const auto& p : plist) {
      const double dl = static_cast<double>(lengths_[p.doc]);
      const double norm = params.k1 * (1.0 - params.b + params.b * dl / avgdl_);
      const double tf = static_cast<double>(p.tf);
      acc[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
    }
  }

  std::vector<std::pair<std::uint32_t, double>> scored(acc.begin(), acc.end());
  auto better = [this](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return docs_[a.first].docid < docs_[b.first].docid;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    better);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = docs_[scored[i].first];
    out.push_back({d.docid, scored[i].second, d.fields});
  }
  return out;
}

std::vector<Topic> parse_topics_tsv(std::string_view text) {
  std::vector<Topic> topics;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected qid<TAB>text", line_no);
    Topic t{std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))};
    if (t.qid.empty()) throw ParseError("empty qid", line_no);
    topics.push_back(std::move(t));
  }
  return topics;
}

std::vector<Request> retrieve_batch(const std::vector<Topic>& topics, const InvertedIndex& index,
                                    const RetrievalConfig& config) {
  config.validate();
  std::vector<Request> requests;
  requests.reserve(topics.size());
  for (const auto& t : topics) {
    requests.push_back({{t.text, t.qid}, index.search(t.text, config.k, config.bm25)});
  }
  return requests;
}

}  // namespace rankforge::retrieval
