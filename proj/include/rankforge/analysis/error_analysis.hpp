#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rankforge/core/io.hpp"
#include "rankforge/core/types.hpp"
#include "rankforge/parse/permutation.hpp"

namespace rankforge::analysis {

struct OffendingResponse {
  std::string qid;
  std::size_t window_start = 0;
  std::size_t window_end = 0;
  parse::ErrorCategory category = parse::ErrorCategory::kOk;
  std::string response;
};

struct ErrorDistribution {
  // Indexed by parse::ErrorCategory.
  std::array<std::size_t, 4> counts{};
  std::vector<OffendingResponse> offending;  // filled when verbose

  std::size_t total() const;
  std::size_t count(parse::ErrorCategory category) const;
  // Share of `category` in percent; 0 when there are no samples.
  double percent(parse::ErrorCategory category) const;

  // Counts, or percentages rounded to one decimal when `normalize`.
  Json to_json(bool normalize) const;
  std::string to_table(bool normalize) const;
};

// Re-parses every successful listwise response with `grammar` and tallies one
// category per invocation. Failed calls and non-listwise invocations are
// skipped. Throws ValidationError when no invocation history is present.
ErrorDistribution count_errors(const std::vector<io::QueryInvocations>& histories,
                               parse::ResponseGrammar grammar, bool verbose = false);
ErrorDistribution count_errors(const std::vector<RankedResult>& results,
                               parse::ResponseGrammar grammar, bool verbose = false);

}  // namespace rankforge::analysis
