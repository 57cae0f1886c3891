#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "rankforge/core/error.hpp"
#include "rankforge/prompt/render.hpp"
#include "rankforge/prompt/template.hpp"
#include "rankforge/prompt/tokens.hpp"
#include "support.hpp"

namespace rankforge::prompt {
namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::string all_text(const RenderedPrompt& p) {
  std::string s;
  for (const auto& m : p.messages) s += m.content + "\n";
  return s;
}

Candidate cand(const std::string& id, const std::string& text) {
  return {id, 0.0, Json{{"contents", text}}};
}

TEST(Tokens, Estimate) {
  EXPECT_EQ(estimate_tokens(""), 0);
  EXPECT_EQ(estimate_tokens("abcdefgh"), 2);
  EXPECT_EQ(estimate_tokens("abcdefghi"), 3);
}

TEST(Truncate, UnderBudgetUnchanged) {
  std::vector<std::string> ps = {"short one", "two"};
  EXPECT_EQ(truncate_to_budget(ps, 100), ps);
}

TEST(Truncate, LongPassageFitsAfterTruncation) {
  std::string long_text;
  for (int i = 0; i < 200; ++i) long_text += "word" + std::to_string(i) + " ";
  for (std::int64_t budget : {1, 2, 5, 17, 64}) {
    auto out = truncate_passage(long_text, budget);
    EXPECT_LE(estimate_tokens(out), budget);
    EXPECT_FALSE(out.empty());
    EXPECT_EQ(long_text.rfind(out, 0), 0u) << "must be a prefix";
  }
}

TEST(Truncate, BudgetOneKeepsFirstWord) {
  auto out = truncate_to_budget({"alpha beta gamma", "be nice to me", "abcdefgh ij"}, 1);
  // Oracle: longest whitespace-free prefix within 4 bytes (the estimator's
  // allowance for one token), or a hard 4-byte cut when the word is longer.
  EXPECT_EQ(out, (std::vector<std::string>{"alph", "be", "abcd"}));
  for (const auto& p : out) EXPECT_LE(estimate_tokens(p), 1);
}

TEST(Truncate, NeverSplitsUtf8) {
  const std::string text = "\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9";  // 10 bytes
  auto out = truncate_passage(text, 1);
  EXPECT_EQ(out, "\xC3\xA9\xC3\xA9");
  auto odd = truncate_passage("a\xE2\x9C\x93\xE2\x9C\x93", 1);
  EXPECT_EQ(odd, "a\xE2\x9C\x93");
}

TEST(Truncate, RejectsNonPositiveBudget) {
  EXPECT_THROW(truncate_passage("x", 0), BudgetError);
}

TEST(Templates, BuiltinsValidateAndResolveCaseInsensitively) {
  for (const auto& name : builtin_template_names()) EXPECT_NO_THROW(builtin_template(name).validate());
  EXPECT_EQ(builtin_template("RANK_GPT").name, "rank_gpt");
  EXPECT_EQ(builtin_template("lrl").grammar, "lrl");
  EXPECT_FALSE(builtin_template("lrl").system_message.has_value());
  EXPECT_TRUE(builtin_template("rank_gpt").system_message.has_value());
  EXPECT_THROW(builtin_template("nope"), ConfigError);
}

TEST(Templates, ParseRequiresPlaceholders) {
  EXPECT_THROW(parse_template("x", "[meta]\nmode = listwise\n[user]\nno placeholders\n"),
               ConfigError);
  auto t = parse_template("x", "[meta]\nmode = pointwise\ngrammar = integer\n[user]\n{query} {passage}\n");
  EXPECT_EQ(t.mode, InvocationKind::kPointwise);
  EXPECT_FALSE(t.system_message.has_value());
}

TEST(Templates, SubstituteIsSinglePass) {
  EXPECT_EQ(substitute("{a} {b} {c}", {{"a", "{b}"}, {"b", "x"}}), "{b} x {c}");
}

TEST(RenderListwise, LabelsEachCandidateOnce) {
  std::vector<Candidate> window = {cand("a", "first passage"), cand("b", "second passage"),
                                   cand("c", "third passage")};
  auto p = render_listwise(builtin_template("rank_gpt"), {"what is it", "q"}, window, {});
  const auto text = p.messages.back().content;
  for (const char* label : {"[1]", "[2]", "[3]"}) EXPECT_EQ(count_of(text, label), 1u) << label;
  EXPECT_EQ(count_of(text, "[4]"), 0u);
  EXPECT_EQ(p.messages.front().role, "system");
  EXPECT_EQ(p.messages.size(), 2u) << "zero shots means no example messages";
  EXPECT_EQ(p.docids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_LE(p.estimated_input_tokens, kDefaultContextBudget);
}

TEST(RenderListwise, LabelSetHasNoGapsForAllTemplates) {
  for (const char* name : {"rank_gpt", "rank_gpt_apeer", "lrl"}) {
    std::vector<Candidate> window;
    for (int i = 0; i < 20; ++i) window.push_back(cand("d" + std::to_string(i), "text " + std::to_string(i)));
    auto p = render_listwise(builtin_template(name), {"q", "q"}, window, {});
    const auto body = p.messages.back().content;
    std::regex label(R"(\[(\d+)\])");
    std::set<int> seen;
    for (auto it = std::sregex_iterator(body.begin(), body.end(), label); it != std::sregex_iterator(); ++it) {
      seen.insert(std::stoi((*it)[1]));
    }
    std::set<int> expected;
    for (int i = 1; i <= 20; ++i) expected.insert(i);
    EXPECT_EQ(seen, expected) << name;
  }
}

TEST(RenderListwise, FewShotSamplingIsSeeded) {
  std::vector<FewShotExample> pool;
  for (int i = 0; i < 5; ++i) pool.push_back({"example prompt " + std::to_string(i), "[1] > [2]"});
  auto a = sample_shots(pool, 2, 99);
  auto b = sample_shots(pool, 2, 99);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].prompt, b[0].prompt);
  EXPECT_EQ(a[1].prompt, b[1].prompt);
  EXPECT_NE(a[0].prompt, a[1].prompt);
  EXPECT_THROW(sample_shots(pool, 6, 1), ConfigError);

  std::vector<Candidate> window = {cand("a", "x"), cand("b", "y")};
  auto p = render_listwise(builtin_template("rank_gpt"), {"q", "q"}, window, a);
  ASSERT_EQ(p.messages.size(), 6u);
  EXPECT_EQ(p.messages[1].role, "user");
  EXPECT_EQ(p.messages[1].content, a[0].prompt);
  EXPECT_EQ(p.messages[2].role, "assistant");
}

TEST(RenderListwise, EstimatedTokensNeverExceedBudget) {
  std::mt19937_64 rng(5);
  const auto& tpl = builtin_template("rank_gpt");
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Candidate> window;
    const std::size_t m = 1 + rng() % 20;
    for (std::size_t i = 0; i < m; ++i) {
      std::string text;
      const std::size_t words = 1 + rng() % 120;
      for (std::size_t w = 0; w < words; ++w) text += std::string(1 + rng() % 9, 'a' + rng() % 26) + " ";
      window.push_back(cand("d" + std::to_string(i), text));
    }
    const std::int64_t budget = 50 + static_cast<std::int64_t>(rng() % 4000);
    try {
      auto p = render_listwise(tpl, {"some query text", "q"}, window, {}, budget);
      EXPECT_LE(p.estimated_input_tokens, budget);
    } catch (const BudgetError&) {
      // Budget too small for the instructions plus one token per passage.
    }
  }
}

TEST(RenderListwise, TinyBudgetIsBudgetError) {
  std::vector<Candidate> window = {cand("a", "x")};
  EXPECT_THROW(render_listwise(builtin_template("rank_gpt"), {"q", "q"}, window, {}, 10), BudgetError);
}

TEST(RenderListwise, WrongTemplateModeIsConfigError) {
  std::vector<Candidate> window = {cand("a", "x")};
  EXPECT_THROW(render_listwise(builtin_template("pointwise"), {"q", "q"}, window, {}), ConfigError);
}

TEST(RenderPointwise, ContainsQueryAndPassage) {
  auto p = render_pointwise(builtin_template("pointwise"), {"flea lifespan", "q"},
                            cand("a", "fleas live for months"));
  const auto text = all_text(p);
  EXPECT_NE(text.find("flea lifespan"), std::string::npos);
  EXPECT_NE(text.find("fleas live for months"), std::string::npos);
  EXPECT_EQ(p.kind, InvocationKind::kPointwise);
}

TEST(RenderPointwise, LongPassageTruncatedToFit) {
  std::string long_text;
  for (int i = 0; i < 5000; ++i) long_text += "token ";
  auto p = render_pointwise(builtin_template("pointwise"), {"q", "q"}, cand("a", long_text), 300);
  EXPECT_LE(p.estimated_input_tokens, 300);
}

TEST(RenderPointwise, EmptyPassageIsValidationError) {
  EXPECT_THROW(render_pointwise(builtin_template("pointwise"), {"q", "q"}, cand("a", "   ")),
               ValidationError);
}

TEST(RenderPairwise, BothPassagesAndLabelsOnce) {
  auto p = render_pairwise(builtin_template("pairwise"), {"q", "q"}, cand("a", "alpha text"),
                           cand("b", "beta text"));
  const auto text = p.messages.back().content;
  EXPECT_NE(text.find("alpha text"), std::string::npos);
  EXPECT_NE(text.find("beta text"), std::string::npos);
  EXPECT_EQ(count_of(text, "Passage A:"), 1u);
  EXPECT_EQ(count_of(text, "Passage B:"), 1u);
  EXPECT_EQ(p.docids, (std::vector<std::string>{"a", "b"}));
}

TEST(RenderPairwise, TruncationSplitsBudgetEqually) {
  std::string long_a, long_b;
  for (int i = 0; i < 3000; ++i) {
    long_a += "aaa ";
    long_b += "bbb ";
  }
  const std::int64_t budget = 400;
  const auto& tpl = builtin_template("pairwise");
  auto p = render_pairwise(tpl, {"q", "q"}, cand("a", long_a), cand("b", long_b), budget);
  EXPECT_LE(p.estimated_input_tokens, budget);
  const auto body = p.messages.back().content;
  EXPECT_EQ(count_of(body, "aaa"), count_of(body, "bbb"));
}

}  // namespace
}  // namespace rankforge::prompt
