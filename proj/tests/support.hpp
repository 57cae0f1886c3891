#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "rankforge/backend/oracle_backend.hpp"
#include "rankforge/core/types.hpp"

namespace rankforge::testing {

inline std::string docid_of(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%03zu", i);
  return buf;
}

// Candidates d000..d{n-1} with descending first-stage scores and short texts.
inline Request make_request(const std::string& qid, std::size_t n) {
  Request r;
  r.query = {"query for " + qid, qid};
  for (std::size_t i = 0; i < n; ++i) {
    r.candidates.push_back(
        {docid_of(i), static_cast<double>(n - i), Json{{"contents", "passage number " +
                                                                        std::to_string(i)}}});
  }
  return r;
}

// Distinct random relevance values for every candidate.
inline std::map<std::string, double> random_truth(const Request& r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> values(r.candidates.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
  std::shuffle(values.begin(), values.end(), rng);
  std::map<std::string, double> truth;
  for (std::size_t i = 0; i < values.size(); ++i) truth[r.candidates[i].docid] = values[i];
  return truth;
}

inline std::vector<std::string> docids(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.docid);
  return out;
}

// Docids ordered by descending truth.
inline std::vector<std::string> ideal_order(const std::map<std::string, double>& truth) {
  std::vector<std::pair<double, std::string>> v;
  for (const auto& [d, t] : truth) v.emplace_back(t, d);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (const auto& [_, d] : v) out.push_back(d);
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("rankforge-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string source_path(const std::string& rel) {
  return std::string(RANKFORGE_SOURCE_DIR) + "/" + rel;
}

}  // namespace rankforge::testing
