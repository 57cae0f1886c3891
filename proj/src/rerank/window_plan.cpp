#include "rankforge/rerank/window_plan.hpp"

#include <algorithm>

#include "rankforge/core/error.hpp"

namespace rankforge::rerank {

std::size_t WindowPlan::total_windows() const {
  std::size_t n = 0;
  for (const auto& p : passes) n += p.size();
  return n;
}

WindowPlan plan_windows(std::size_t k, std::size_t window, std::size_t stride, std::size_t passes) {
  if (window < 2) throw ConfigError("window size must be >= 2");
  if (stride < 1 || stride >= window) throw ConfigError("stride must satisfy 1 <= stride < window");
  if (passes < 1) throw ConfigError("passes must be >= 1");

  std::vector<Window> one_pass;
  if (k > 0) {
    std::size_t start = k > window ? k - window : 0;
    one_pass.push_back({start, std::min(start + window, k)});
    while (start > 0) {
      start = start > stride ? start - stride : 0;
      one_pass.push_back({start, std::min(start + window, k)});
    }
  }
  return WindowPlan{std::vector<std::vector<Window>>(passes, one_pass)};
}

std::size_t slide_steps(std::size_t k, std::size_t window, std::size_t stride) {
  if (k <= window) return 0;
  return (k - window + stride - 1) / stride;
}

}  // namespace rankforge::rerank
