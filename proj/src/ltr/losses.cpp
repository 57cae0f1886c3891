#include "rankforge/ltr/losses.hpp"

#include <cmath>
#include <string>

#include "rankforge/core/error.hpp"

namespace rankforge::ltr {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossValue ranknet_loss(std::span<const double> s, std::span<const double> r) {
  if (s.size() != r.size()) {
    throw ValidationError("scores and labels differ in length (" + std::to_string(s.size()) +
                          " vs " + std::to_string(r.size()) + ")");
  }
  if (s.empty()) throw ValidationError("scores are empty");
  require_finite(s, "scores");
  require_finite(r, "labels");

  const std::size_t m = s.size();
  LossValue out;
  out.gradient.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!(r[i] < r[j])) continue;
      const double w = 1.0 / static_cast<double>(i + j + 2);
      const double d = s[i] - s[j];
      out.value += w * softplus(d);
      const double g = w * sigmoid(d);
      out.gradient[i] += g;
      out.gradient[j] -= g;
    }
  }
  return out;
}

double combined_loss(double lm_loss, double rank_loss, double lambda) {
  if (!std::isfinite(lm_loss) || !std::isfinite(rank_loss) || !std::isfinite(lambda)) {
    throw ValidationError("loss inputs must be finite");
  }
  if (lambda < 0) throw ValidationError("lambda must be non-negative");
  return lm_loss + lambda * rank_loss;
}

}  // namespace rankforge::ltr
