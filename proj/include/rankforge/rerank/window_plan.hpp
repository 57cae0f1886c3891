#pragma once

#include <cstddef>
#include <vector>

namespace rankforge::rerank {

struct Window {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - start; }
  bool operator==(const Window&) const = default;
};

struct WindowPlan {
  std::vector<std::vector<Window>> passes;

  std::size_t total_windows() const;
};

// Back-to-front schedule. Each pass starts at max(k - window, 0) and steps
// towards the head by `stride`, always finishing with a window at index 0.
// k = 0 yields passes with no windows.
WindowPlan plan_windows(std::size_t k, std::size_t window, std::size_t stride, std::size_t passes);

// ceil((k - window) / stride) for k > window, else 0: the number of slides
// after the first window. Invocations per pass are this plus one.
std::size_t slide_steps(std::size_t k, std::size_t window, std::size_t stride);

}  // namespace rankforge::rerank
