#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rankforge/core/types.hpp"

namespace rankforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RetrieveOptions {
  std::string corpus;
  std::string topics;
  std::string out;
  std::string cache_dir;
  std::string dataset;  // defaults to the corpus file stem
  std::size_t k = 100;
  double k1 = 0.9;
  double b = 0.4;
};

struct RerankOptions {
  std::string requests;
  std::string strategy = "listwise";
  std::string backend = "oracle";
  std::string model;  // defaults to "oracle" for the oracle backend
  std::size_t window = 20;
  std::size_t stride = 10;
  std::size_t passes = 1;
  std::string template_name;  // defaults per strategy
  std::string template_file;
  std::int64_t context = 4096;
  std::size_t shots = 0;
  std::string shot_pool;
  std::uint64_t seed = 0;
  std::string out_dir = "runs";
  bool populate_invocations = false;
  std::size_t parallel = 4;
  std::string timestamp;  // YYYYMMDD-HHMMSS, UTC now when empty
  std::string dataset;    // defaults to the requests file stem
  std::string retriever = "bm25";
  std::string tag = "rankforge";

  // oracle
  std::string truth;  // qrels file; first-stage scores are used when empty
  double prose_rate = 0.0;
  double repetition_rate = 0.0;
  double omission_rate = 0.0;
  double garbage_rate = 0.0;

  // http
  std::string base_url;
  std::string api_key_env = "RANKFORGE_API_KEY";
  double temperature = 0.0;
  double timeout = 60.0;
  int max_retries = 3;
};

struct RerankOutcome {
  std::vector<RankedResult> results;
  std::string run_dir;
};

// `{dataset}_{retriever}_{model}_{strategy}_M{window}_N{stride}_top{k}_{timestamp}`
// with every component reduced to [A-Za-z0-9.-].
std::string run_name(const RerankOptions& options, std::size_t top_k);

// Current UTC time as YYYYMMDD-HHMMSS.
std::string utc_timestamp();

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankforge::cli
