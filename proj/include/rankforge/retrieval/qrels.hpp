#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace rankforge::retrieval {

struct Qrels {
  // qid -> docid -> grade (>= 0)
  std::map<std::string, std::map<std::string, int>> judgments;

  // 0 for unjudged pairs.
  int grade(const std::string& qid, const std::string& docid) const;
  bool has_query(const std::string& qid) const { return judgments.count(qid) > 0; }
  std::size_t size() const;
  bool empty() const { return judgments.empty(); }
};

// TREC qrels, `qid iter docid grade` per line. Later duplicates overwrite.
Qrels parse_qrels(std::string_view text);
Qrels read_qrels_file(const std::string& path);

}  // namespace rankforge::retrieval
