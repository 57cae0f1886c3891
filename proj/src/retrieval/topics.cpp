#include "rankforge/core/io.hpp"
#include "rankforge/retrieval/bm25.hpp"

namespace rankforge::retrieval {

std::vector<Topic> read_topics_file(const std::string& path) {
  return parse_topics_tsv(io::read_file(path));
}

}  // namespace rankforge::retrieval
