#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rankforge/core/error.hpp"
#include "rankforge/ltr/losses.hpp"

namespace rankforge::ltr {
namespace {

// Literal double loop with naive log(1 + exp(x)); inputs kept small enough
// that the naive form is exact to double precision.
double naive_ranknet(const std::vector<double>& s, const std::vector<double>& r) {
  double total = 0;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    for (std::size_t j = 1; j <= s.size(); ++j) {
      if (r[i - 1] < r[j - 1]) {
        total += 1.0 / static_cast<double>(i + j) * std::log(1.0 + std::exp(s[i - 1] - s[j - 1]));
      }
    }
  }
  return total;
}

TEST(RankNet, ConstantLabelsGiveZero) {
  auto out = ranknet_loss(std::vector<double>{0.3, -1.0, 2.0}, std::vector<double>{1, 1, 1});
  EXPECT_EQ(out.value, 0.0);
  for (double g : out.gradient) EXPECT_EQ(g, 0.0);
}

TEST(RankNet, TwoItemClosedForm) {
  auto out = ranknet_loss(std::vector<double>{1.0, 0.0}, std::vector<double>{0, 1});
  EXPECT_NEAR(out.value, std::log(1 + std::exp(1.0)) / 3.0, 1e-15);
  EXPECT_NEAR(out.value, 0.437754, 1e-6);
}

TEST(RankNet, MatchesDoubleLoopAndFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> score(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng() % 20;
    std::vector<double> s(m), r(m);
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = score(rng);
      r[i] = static_cast<double>(rng() % 4);
    }
    auto out = ranknet_loss(s, r);
    ASSERT_NEAR(out.value, naive_ranknet(s, r), 1e-12);
    const double h = 1e-6;
    for (std::size_t i = 0; i < m; ++i) {
      auto plus = s, minus = s;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (naive_ranknet(plus, r) - naive_ranknet(minus, r)) / (2 * h);
      EXPECT_NEAR(out.gradient[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

// Only the pair (a, b) contributes noticeably: every other item shares b's
// label and sits far above a, so its pairs with a are ~softplus(-60).
double single_pair_loss(std::size_t a, std::size_t b) {
  std::vector<double> s(10, 60.0), r(10, 1.0);
  s[a] = s[b] = 0.0;
  r[a] = 0.0;
  return ranknet_loss(s, r).value;
}

TEST(RankNet, PositionWeighting) {
  EXPECT_NEAR(single_pair_loss(0, 1), std::log(2.0) / 3.0, 1e-12);
  EXPECT_NEAR(single_pair_loss(8, 9) / single_pair_loss(0, 1), 3.0 / 19.0, 1e-12);
}

TEST(RankNet, PositiveWhenAPairFires) {
  auto out = ranknet_loss(std::vector<double>{-50.0, 50.0}, std::vector<double>{0, 1});
  EXPECT_GT(out.value, 0.0);
}

TEST(RankNet, LargeGapsStayFinite) {
  auto out = ranknet_loss(std::vector<double>{700.0, 0.0, -700.0}, std::vector<double>{0, 1, 2});
  EXPECT_TRUE(std::isfinite(out.value));
  for (double g : out.gradient) EXPECT_TRUE(std::isfinite(g));
  EXPECT_NEAR(out.value, 700.0 / 3.0 + 1400.0 / 4.0 + 700.0 / 5.0, 1e-9);
}

TEST(RankNet, Validation) {
  EXPECT_THROW(ranknet_loss(std::vector<double>{1, 2}, std::vector<double>{1}), ValidationError);
  EXPECT_THROW(ranknet_loss(std::vector<double>{}, std::vector<double>{}), ValidationError);
  EXPECT_THROW(ranknet_loss(std::vector<double>{NAN}, std::vector<double>{1}), ValidationError);
}

TEST(Combined, ExamplesAndLinearity) {
  EXPECT_EQ(combined_loss(1.0, 0.5, 2.0), 2.0);
  EXPECT_EQ(combined_loss(1.25, 9.0, 0.0), 1.25);
  // Dyadic values keep every operation exact.
  const double rank = 0.375, l1 = 0.5, l2 = 1.25;
  EXPECT_EQ(combined_loss(1.0, rank, l1 + l2) - combined_loss(1.0, rank, l1), l2 * rank);
  EXPECT_THROW(combined_loss(1.0, 1.0, -0.1), ValidationError);
}

TEST(Softplus, StableForms) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-800.0), -1.0);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-15);
  EXPECT_EQ(sigmoid(-800.0), 0.0);
}

}  // namespace
}  // namespace rankforge::ltr
