#pragma once

#include <span>
#include <vector>

namespace rankforge::ltr {

struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d s_i
};

// Position-weighted RankNet loss over scores `s` and labels `r`, both indexed
// by 1-based position in the current ordering:
//
//   sum_{i,j} [r_i < r_j] / (i + j) * log(1 + exp(s_i - s_j))
//
// Throws ValidationError on length mismatch, empty input or non-finite values.
LossValue ranknet_loss(std::span<const double> s, std::span<const double> r);

// lm_loss + lambda * rank_loss. Throws ValidationError on negative lambda or
// non-finite input.
double combined_loss(double lm_loss, double rank_loss, double lambda);

// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

}  // namespace rankforge::ltr
