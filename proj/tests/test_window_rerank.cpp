#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>

#include "rankforge/backend/oracle_backend.hpp"
#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"
#include "rankforge/rerank/reranker.hpp"
#include "rankforge/rerank/window_plan.hpp"
#include "support.hpp"

namespace rankforge::rerank {
namespace {

using testing::docids;
using testing::ideal_order;
using testing::make_request;
using testing::random_truth;

backend::OracleBackend perfect_oracle(const std::map<std::string, double>& truth,
                                      std::uint64_t seed = 0) {
  backend::OracleConfig c;
  c.truth = truth;
  c.seed = seed;
  return backend::OracleBackend(c);
}

RerankConfig listwise(std::size_t window, std::size_t stride, std::size_t passes) {
  RerankConfig c;
  c.listwise = {window, stride, passes};
  return c;
}

TEST(WindowPlan, HundredTwentyTen) {
  auto plan = plan_windows(100, 20, 10, 1);
  ASSERT_EQ(plan.passes.size(), 1u);
  const auto& w = plan.passes[0];
  ASSERT_EQ(w.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(w[i], (Window{80 - 10 * i, 100 - 10 * i}));
  EXPECT_EQ(slide_steps(100, 20, 10), 8u);
}

TEST(WindowPlan, ShortListSingleWindow) {
  auto plan = plan_windows(10, 20, 10, 1);
  ASSERT_EQ(plan.passes[0].size(), 1u);
  EXPECT_EQ(plan.passes[0][0], (Window{0, 10}));
  EXPECT_EQ(slide_steps(10, 20, 10), 0u);
}

TEST(WindowPlan, BubbleSortSchedule) {
  auto plan = plan_windows(5, 2, 1, 5);
  ASSERT_EQ(plan.passes.size(), 5u);
  for (const auto& pass : plan.passes) {
    ASSERT_EQ(pass.size(), 4u);
    EXPECT_EQ(pass.front(), (Window{3, 5}));
    EXPECT_EQ(pass.back(), (Window{0, 2}));
  }
  EXPECT_EQ(plan.total_windows(), 20u);
}

TEST(WindowPlan, InvariantsOverParameterGrid) {
  for (std::size_t k = 1; k <= 60; ++k) {
    for (std::size_t m = 2; m <= 25; ++m) {
      for (std::size_t n = 1; n < m; ++n) {
        const auto pass = plan_windows(k, m, n, 1).passes.at(0);
        ASSERT_FALSE(pass.empty());
        EXPECT_EQ(pass.back().start, 0u);
        EXPECT_EQ(pass.front().end, k);
        for (std::size_t i = 0; i < pass.size(); ++i) {
          EXPECT_LE(pass[i].size(), m);
          if (i) {
            EXPECT_LT(pass[i].start, pass[i - 1].start);
          }
          if (i && pass[i].start > 0) {
            EXPECT_EQ(pass[i - 1].start - pass[i].start, n);
          }
        }
        // Invocations per pass are the slide steps plus the first window.
        EXPECT_EQ(pass.size(), slide_steps(k, m, n) + 1);
      }
    }
  }
}

TEST(WindowPlan, InvalidConfigRejected) {
  EXPECT_THROW(plan_windows(10, 1, 1, 1), ConfigError);
  EXPECT_THROW(plan_windows(10, 5, 5, 1), ConfigError);
  EXPECT_THROW(plan_windows(10, 5, 0, 1), ConfigError);
  EXPECT_THROW(plan_windows(10, 5, 2, 0), ConfigError);
}

TEST(Listwise, SinglePassBringsTopStrideToFront) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto req = make_request("q", 30);
    auto truth = random_truth(req, seed);
    auto oracle = perfect_oracle(truth);
    auto out = rerank_listwise(req, oracle, listwise(20, 10, 1));
    auto ideal = ideal_order(truth);
    auto got = docids(out.candidates);
    EXPECT_EQ(std::vector<std::string>(got.begin(), got.begin() + 10),
              std::vector<std::string>(ideal.begin(), ideal.begin() + 10));
    EXPECT_EQ(out.error_count, 0u);
  }
}

TEST(Listwise, EnoughPassesFullySort) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto req = make_request("q", 47);
    auto truth = random_truth(req, seed + 100);
    auto oracle = perfect_oracle(truth);
    const std::size_t passes = (47 + 9) / 10;
    auto out = rerank_listwise(req, oracle, listwise(20, 10, passes));
    EXPECT_EQ(docids(out.candidates), ideal_order(truth));
  }
}

TEST(Listwise, EmptyRequest) {
  Request req{{"q", "q"}, {}};
  auto oracle = perfect_oracle({});
  auto cfg = listwise(20, 10, 1);
  cfg.populate_invocations = true;
  auto out = rerank_listwise(req, oracle, cfg);
  EXPECT_TRUE(out.candidates.empty());
  EXPECT_TRUE(out.invocations_history.empty());
}

TEST(Listwise, HistoryMatchesPlan) {
  auto req = make_request("q", 100);
  auto oracle = perfect_oracle(random_truth(req, 1));
  auto cfg = listwise(20, 10, 2);
  cfg.populate_invocations = true;
  auto out = rerank_listwise(req, oracle, cfg);
  const auto plan = plan_windows(100, 20, 10, 2);
  ASSERT_EQ(out.invocations_history.size(), plan.total_windows());
  std::size_t i = 0;
  for (const auto& pass : plan.passes) {
    for (const auto& w : pass) {
      EXPECT_EQ(out.invocations_history[i].window_start, w.start);
      EXPECT_EQ(out.invocations_history[i].window_end, w.end);
      EXPECT_FALSE(out.invocations_history[i].response.empty());
      EXPECT_GT(out.invocations_history[i].input_token_count, 0);
      ++i;
    }
  }
  cfg.populate_invocations = false;
  EXPECT_TRUE(rerank_listwise(req, oracle, cfg).invocations_history.empty());
}

// Backend whose every call throws.
class FailingBackend : public backend::Backend {
 public:
  InferenceInvocation invoke(const prompt::RenderedPrompt&) override {
    ++calls;
    throw BackendError("HTTP 503", 4);
  }
  std::string name() const override { return "failing"; }
  std::atomic<int> calls{0};
};

TEST(Listwise, BackendFailuresLeaveWindowsUnchanged) {
  auto req = make_request("q", 30);
  FailingBackend failing;
  auto cfg = listwise(20, 10, 1);
  cfg.populate_invocations = true;
  auto out = rerank_listwise(req, failing, cfg);
  EXPECT_EQ(docids(out.candidates), docids(req.candidates));
  EXPECT_EQ(out.error_count, 2u);
  ASSERT_EQ(out.invocations_history.size(), 2u);
  EXPECT_TRUE(out.invocations_history[0].error.has_value());
}

TEST(Pointwise, SortsByOracleScore) {
  auto req = make_request("q", 3);
  auto oracle = perfect_oracle({{"d000", 3}, {"d001", 1}, {"d002", 5}});
  RerankConfig cfg;
  cfg.strategy = Strategy::kPointwise;
  cfg.populate_invocations = true;
  auto out = rerank_pointwise(req, oracle, cfg);
  EXPECT_EQ(docids(out.candidates), (std::vector<std::string>{"d002", "d000", "d001"}));
  EXPECT_EQ(out.invocations_history.size(), 3u);
}

// Replies with fixed text regardless of prompt.
class ConstantBackend : public backend::Backend {
 public:
  explicit ConstantBackend(std::string reply) : reply_(std::move(reply)) {}
  InferenceInvocation invoke(const prompt::RenderedPrompt& p) override {
    InferenceInvocation inv;
    inv.prompt = p.messages;
    inv.kind = p.kind;
    inv.response = reply_;
    return inv;
  }
  std::string name() const override { return "constant"; }

 private:
  std::string reply_;
};

TEST(Pointwise, UnparseableRepliesKeepInputOrder) {
  auto req = make_request("q", 6);
  ConstantBackend junk("no idea");
  RerankConfig cfg;
  cfg.strategy = Strategy::kPointwise;
  auto out = rerank_pointwise(req, junk, cfg);
  EXPECT_EQ(docids(out.candidates), docids(req.candidates));
  EXPECT_EQ(out.malformed_count, 6u);
}

TEST(Pointwise, TiesKeepFirstStageOrder) {
  auto req = make_request("q", 4);
  auto oracle = perfect_oracle({{"d000", 1}, {"d001", 2}, {"d002", 1}, {"d003", 2}});
  RerankConfig cfg;
  cfg.strategy = Strategy::kPointwise;
  auto out = rerank_pointwise(req, oracle, cfg);
  EXPECT_EQ(docids(out.candidates), (std::vector<std::string>{"d001", "d003", "d000", "d002"}));
}

TEST(Pairwise, TwoCandidates) {
  auto req = make_request("q", 2);
  std::reverse(req.candidates.begin(), req.candidates.end());
  auto oracle = perfect_oracle({{"d000", 0.9}, {"d001", 0.1}});
  RerankConfig cfg;
  cfg.strategy = Strategy::kPairwise;
  cfg.populate_invocations = true;
  auto out = rerank_pairwise(req, oracle, cfg);
  EXPECT_EQ(docids(out.candidates), (std::vector<std::string>{"d000", "d001"}));
  EXPECT_EQ(out.invocations_history.size(), 2u);
}

// Brute-force aggregation over all m(m-1) ordered calls.
TEST(Pairwise, ThreeCandidatesMatchBruteForceScores) {
  auto req = make_request("q", 3);
  std::map<std::string, double> truth = {{"d000", 0.2}, {"d001", 0.9}, {"d002", 0.5}};
  auto oracle = perfect_oracle(truth);
  std::map<std::string, double> score;
  for (const auto& a : req.candidates) {
    for (const auto& b : req.candidates) {
      if (a.docid == b.docid) continue;
      const bool a_wins = !(truth[b.docid] > truth[a.docid]);
      score[a.docid] += a_wins ? 1.0 : 0.0;
      score[b.docid] += a_wins ? 0.0 : 1.0;
    }
  }
  EXPECT_EQ(score["d001"], 4.0);
  EXPECT_EQ(score["d002"], 2.0);
  EXPECT_EQ(score["d000"], 0.0);
  RerankConfig cfg;
  cfg.strategy = Strategy::kPairwise;
  cfg.populate_invocations = true;
  auto out = rerank_pairwise(req, oracle, cfg);
  EXPECT_EQ(docids(out.candidates), (std::vector<std::string>{"d001", "d002", "d000"}));
  EXPECT_EQ(out.invocations_history.size(), 6u);
}

TEST(Pairwise, SingleCandidatePassesThrough) {
  auto req = make_request("q", 1);
  FailingBackend failing;
  RerankConfig cfg;
  cfg.strategy = Strategy::kPairwise;
  auto out = rerank_pairwise(req, failing, cfg);
  EXPECT_EQ(docids(out.candidates), docids(req.candidates));
  EXPECT_EQ(failing.calls.load(), 0);
}

TEST(Replies, FirstIntegerAndChoice) {
  EXPECT_EQ(first_integer("score: 87/100"), 87);
  EXPECT_FALSE(first_integer("none").has_value());
  EXPECT_EQ(pairwise_choice("B"), 'B');
  EXPECT_EQ(pairwise_choice(" a "), 'A');
  EXPECT_FALSE(pairwise_choice("neither").has_value());
}

TEST(Batch, EmptyBatch) {
  auto oracle = perfect_oracle({});
  EXPECT_TRUE(rerank_batch({}, oracle, RerankConfig{}).empty());
}

TEST(Batch, ParallelismDoesNotChangeOutput) {
  std::vector<Request> reqs;
  backend::OracleConfig oc;
  oc.seed = 17;
  oc.rates = {0.1, 0.1, 0.1, 0.05};
  for (int q = 0; q < 12; ++q) {
    reqs.push_back(make_request("q" + std::to_string(q), 40));
    oc.per_query[reqs.back().query.qid] = random_truth(reqs.back(), q);
  }
  backend::OracleBackend oracle(oc);
  for (auto strategy : {Strategy::kListwise, Strategy::kPointwise, Strategy::kPairwise}) {
    RerankConfig cfg;
    cfg.strategy = strategy;
    cfg.populate_invocations = true;
    cfg.parallelism = 1;
    auto serial = rerank_batch(reqs, oracle, cfg);
    cfg.parallelism = 8;
    auto parallel = rerank_batch(reqs, oracle, cfg);
    EXPECT_EQ(io::results_to_jsonl(serial), io::results_to_jsonl(parallel));
    EXPECT_EQ(io::invocations_json_text(serial), io::invocations_json_text(parallel));
  }
}

TEST(Batch, FailingRequestIsIsolated) {
  std::vector<Request> reqs = {make_request("ok1", 25), make_request("bad", 25),
                               make_request("ok2", 25)};
  backend::OracleConfig oc;
  for (const auto& r : reqs) oc.per_query[r.query.qid] = random_truth(r, 9);
  oc.failing_qids = {"bad"};
  backend::OracleBackend oracle(oc);
  RerankConfig cfg;
  cfg.parallelism = 3;
  auto out = rerank_batch(reqs, oracle, cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(docids(out[1].candidates), docids(reqs[1].candidates));
  EXPECT_GT(out[1].error_count, 0u);
  EXPECT_EQ(out[0].error_count, 0u);
  EXPECT_EQ(docids(out[0].candidates).front(), ideal_order(oc.per_query["ok1"]).front());
  EXPECT_EQ(docids(out[2].candidates).front(), ideal_order(oc.per_query["ok2"]).front());
}

TEST(Properties, OutputIsAlwaysAPermutation) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    auto req = make_request("q", rng() % 45);
    backend::OracleConfig oc;
    oc.truth = random_truth(req, trial);
    oc.seed = trial;
    oc.rates = {0.3, 0.3, 0.3, 0.3};
    backend::OracleBackend oracle(oc);
    RerankConfig cfg;
    cfg.strategy = static_cast<Strategy>(trial % 3);
    cfg.listwise = {2 + rng() % 20, 1, 1 + rng() % 3};
    cfg.listwise.stride = 1 + rng() % (cfg.listwise.window - 1);
    auto out = rerank(req, oracle, cfg);
    EXPECT_TRUE(is_docid_permutation(req.candidates, out.candidates));
  }
}

double kendall_tau(const std::vector<std::string>& got, const std::map<std::string, double>& truth) {
  double concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    for (std::size_t j = i + 1; j < got.size(); ++j) {
      const double a = truth.at(got[i]), b = truth.at(got[j]);
      if (a > b) concordant += 1;
      if (a < b) discordant += 1;
    }
  }
  return (concordant - discordant) / (concordant + discordant);
}

// One-sided paired test at alpha = 0.01: mean tau must not rise significantly
// when malformation rates go up.
TEST(Properties, MalformationsDoNotImproveAgreement) {
  const std::vector<double> levels = {0.0, 0.15, 0.3};
  std::vector<std::vector<double>> taus(levels.size());
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto req = make_request("q", 40);
    auto truth = random_truth(req, seed);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      backend::OracleConfig oc;
      oc.truth = truth;
      oc.seed = seed;
      const double r = levels[l];
      oc.rates = {r, r, r, r};
      backend::OracleBackend oracle(oc);
      taus[l].push_back(kendall_tau(docids(rerank_listwise(req, oracle, listwise(20, 10, 1)).candidates), truth));
    }
  }
  for (std::size_t l = 1; l < levels.size(); ++l) {
    std::vector<double> d(taus[l].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = taus[l - 1][i] - taus[l][i];
    const double n = static_cast<double>(d.size());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double var = 0;
    for (double x : d) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (n - 1) / n);
    EXPECT_GE(mean, -2.326 * se) << "level " << levels[l];
  }
}

}  // namespace
}  // namespace rankforge::rerank
