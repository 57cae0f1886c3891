#include "rankforge/retrieval/qrels.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"

namespace rankforge::retrieval {

int Qrels::grade(const std::string& qid, const std::string& docid) const {
  auto q = judgments.find(qid);
  if (q == judgments.end()) return 0;
  auto d = q->second.find(docid);
  return d == q->second.end() ? 0 : d->second;
}

std::size_t Qrels::size() const {
  std::size_t n = 0;
  for (const auto& [qid, docs] : judgments) n += docs.size();
  return n;
}

Qrels parse_qrels(std::string_view text) {
  Qrels qrels;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::vector<std::string_view> cols;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) cols.push_back(line.substr(i, j - i));
      i = j;
    }
    if (cols.empty()) continue;
    if (cols.size() != 4) {
      throw ParseError("expected 4 qrels columns, found " + std::to_string(cols.size()), line_no);
    }
    int grade = 0;
    auto g = cols[3];
    auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
    if (ec != std::errc{} || ptr != g.data() + g.size()) {
      throw ParseError("non-integer grade \"" + std::string(g) + "\"", line_no);
    }
    if (grade < 0) throw ParseError("negative grade " + std::string(g), line_no);
    qrels.judgments[std::string(cols[0])][std::string(cols[2])] = grade;
  }
  return qrels;
}

Qrels read_qrels_file(const std::string& path) { return parse_qrels(io::read_file(path)); }

}  // namespace rankforge::retrieval
