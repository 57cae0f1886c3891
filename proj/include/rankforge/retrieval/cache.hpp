#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/core/types.hpp"
#include "rankforge/retrieval/bm25.hpp"

namespace rankforge::retrieval {

// Hex digest over the ordered (qid, text) pairs.
std::string topics_digest(const std::vector<Topic>& topics);

// e.g. "bm25_k100_k1-0.9_b-0.4_dl19_3f2a...". Deterministic in all inputs.
std::string cache_key(const RetrievalConfig& config, std::string_view dataset,
                      std::string_view topics_digest);

struct CacheOutcome {
  std::vector<Request> requests;
  std::string path;
  bool hit = false;
  // A cache file existed but was unreadable and has been rewritten.
  bool recovered = false;
};

// Serves requests from `{cache_dir}/{key}.jsonl` when present and valid,
// otherwise calls `retrieve` and stores its output (temp file + rename).
// Corrupt files are reported on `log` and replaced.
CacheOutcome load_or_retrieve(const std::string& cache_dir, const RetrievalConfig& config,
                              std::string_view dataset, const std::vector<Topic>& topics,
                              const std::function<std::vector<Request>()>& retrieve,
                              std::ostream& log);

}  // namespace rankforge::retrieval
