#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/backend/backend.hpp"
#include "rankforge/core/types.hpp"
#include "rankforge/prompt/render.hpp"
#include "rankforge/prompt/template.hpp"
#include "rankforge/rerank/window_plan.hpp"

namespace rankforge::rerank {

enum class Strategy { kListwise, kPointwise, kPairwise };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

struct ListwiseConfig {
  std::size_t window = 20;
  std::size_t stride = 10;
  std::size_t passes = 1;

  // 2 <= window, 1 <= stride < window, passes >= 1.
  void validate() const;
};

struct RerankConfig {
  Strategy strategy = Strategy::kListwise;
  ListwiseConfig listwise;
  // Defaults to the built-in template for the strategy (rank_gpt, pointwise, pairwise).
  std::optional<prompt::PromptTemplate> prompt_template;
  std::int64_t context_budget = prompt::kDefaultContextBudget;
  std::vector<prompt::FewShotExample> shot_pool;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  bool populate_invocations = false;
  // Worker threads across requests, and within a request for pointwise and
  // pairwise calls.
  std::size_t parallelism = 1;

  const prompt::PromptTemplate& template_for_strategy() const;
  void validate() const;
};

// Sliding-window listwise reranking. Windows run strictly in plan order; a
// window whose render or backend call fails is left as is and counted in
// RankedResult::error_count.
RankedResult rerank_listwise(const Request& request, backend::Backend& backend,
                             const RerankConfig& config);

// One call per candidate; the first integer in each reply is its score
// (unparseable -> 0, counted as malformed). Stable sort by score, descending.
RankedResult rerank_pointwise(const Request& request, backend::Backend& backend,
                              const RerankConfig& config);

// Calls both orderings of every pair: m(m-1) invocations. A candidate's score
// is the sum over opponents j of win(i,j) + 1 - win(j,i); failed or
// unparseable calls count as 0.5. Fewer than two candidates pass through.
RankedResult rerank_pairwise(const Request& request, backend::Backend& backend,
                             const RerankConfig& config);

RankedResult rerank(const Request& request, backend::Backend& backend, const RerankConfig& config);

// Results follow request order. A request that throws is returned in its
// original order with error_count set; the batch never aborts.
std::vector<RankedResult> rerank_batch(const std::vector<Request>& requests,
                                       backend::Backend& backend, const RerankConfig& config);

// First run of decimal digits in the text, if any.
std::optional<long long> first_integer(std::string_view text);

// 'A', 'B', or nullopt.
std::optional<char> pairwise_choice(std::string_view text);

}  // namespace rankforge::rerank
