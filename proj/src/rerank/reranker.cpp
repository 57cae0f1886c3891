#include "rankforge/rerank/reranker.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "rankforge/core/error.hpp"
#include "rankforge/parse/permutation.hpp"
#include "rankforge/util/hash.hpp"
#include "rankforge/util/parallel.hpp"

namespace rankforge::rerank {

namespace {

InferenceInvocation failed_invocation(const prompt::RenderedPrompt* prompt, InvocationKind kind,
                                      std::size_t start, std::size_t end, const std::exception& e) {
  InferenceInvocation inv;
  if (prompt) {
    inv.prompt = prompt->messages;
    inv.input_token_count = prompt->estimated_input_tokens;
  }
  inv.kind = kind;
  inv.window_start = start;
  inv.window_end = end;
  inv.error = e.what();
  return inv;
}

// Outcome of one independent pointwise or pairwise call.
struct CallSlot {
  std::optional<InferenceInvocation> invocation;
  bool failed = false;
};

template <typename Render>
CallSlot call(backend::Backend& backend, Render&& render, InvocationKind kind, std::size_t start,
              std::size_t end) {
  CallSlot slot;
  std::optional<prompt::RenderedPrompt> rendered;
  try {
    rendered = render();
    InferenceInvocation inv = backend.invoke(*rendered);
    inv.window_start = start;
    inv.window_end = end;
    slot.invocation = std::move(inv);
  } catch (const std::exception& e) {
    slot.failed = true;
    slot.invocation = failed_invocation(rendered ? &*rendered : nullptr, kind, start, end, e);
  }
  return slot;
}

}  // namespace

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kListwise:
      return "listwise";
    case Strategy::kPointwise:
      return "pointwise";
    case Strategy::kPairwise:
      return "pairwise";
  }
  return "listwise";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "listwise") return Strategy::kListwise;
  if (name == "pointwise") return Strategy::kPointwise;
  if (name == "pairwise") return Strategy::kPairwise;
  throw ConfigError("unknown strategy \"" + std::string(name) +
                    "\" (expected listwise, pointwise or pairwise)");
}

void ListwiseConfig::validate() const {
  if (window < 2) throw ConfigError("window size must be >= 2");
  if (stride < 1 || stride >= window) throw ConfigError("stride must satisfy 1 <= stride < window");
  if (passes < 1) throw ConfigError("passes must be >= 1");
}

const prompt::PromptTemplate& RerankConfig::template_for_strategy() const {
  if (prompt_template) return *prompt_template;
  switch (strategy) {
    case Strategy::kPointwise:
      return prompt::builtin_template("pointwise");
    case Strategy::kPairwise:
      return prompt::builtin_template("pairwise");
    case Strategy::kListwise:
      break;
  }
  return prompt::builtin_template("rank_gpt");
}

void RerankConfig::validate() const {
  if (strategy == Strategy::kListwise) listwise.validate();
  if (context_budget <= 0) throw ConfigError("context budget must be positive");
  if (shots > shot_pool.size()) {
    throw ConfigError("requested " + std::to_string(shots) + " shots but the pool has " +
                      std::to_string(shot_pool.size()));
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  const auto& tpl = template_for_strategy();
  const InvocationKind want = strategy == Strategy::kListwise    ? InvocationKind::kListwise
                              : strategy == Strategy::kPointwise ? InvocationKind::kPointwise
                                                                 : InvocationKind::kPairwise;
  if (tpl.mode != want) {
    throw ConfigError("template \"" + tpl.name + "\" cannot drive " + to_string(strategy) +
                      " reranking");
  }
  if (strategy == Strategy::kListwise) parse::grammar_from_name(tpl.grammar);
}

RankedResult rerank_listwise(const Request& request, backend::Backend& backend,
                             const RerankConfig& config) {
  config.validate();
  const auto& tpl = config.template_for_strategy();
  const auto grammar = parse::grammar_from_name(tpl.grammar);
  // Examples are drawn once per request and reused by all of its windows.
  const auto shots = config.shots == 0
                         ? std::vector<prompt::FewShotExample>{}
                         : prompt::sample_shots(config.shot_pool, config.shots,
                                                util::derive_seed(config.seed, request.query.qid));

  std::vector<Candidate> cands = request.candidates;
  std::vector<InferenceInvocation> history;
  std::size_t errors = 0;
  const auto plan = plan_windows(cands.size(), config.listwise.window, config.listwise.stride,
                                 config.listwise.passes);
  for (const auto& pass : plan.passes) {
    for (const auto& w : pass) {
      std::span<const Candidate> slice(cands.data() + w.start, w.size());
      std::optional<prompt::RenderedPrompt> rendered;
      InferenceInvocation inv;
      try {
        rendered = prompt::render_listwise(tpl, request.query, slice, shots, config.context_budget);
        inv = backend.invoke(*rendered);
      } catch (const std::exception& e) {
        ++errors;
        if (config.populate_invocations) {
          history.push_back(failed_invocation(rendered ? &*rendered : nullptr,
                                              InvocationKind::kListwise, w.start, w.end, e));
        }
        continue;
      }
      const auto outcome = parse::extract_permutation(inv.response, w.size(), grammar);
      std::vector<Candidate> reordered;
      reordered.reserve(w.size());
      for (auto idx : outcome.permutation) reordered.push_back(cands[w.start + idx - 1]);
      std::move(reordered.begin(), reordered.end(),
                cands.begin() + static_cast<std::ptrdiff_t>(w.start));
      if (config.populate_invocations) {
        inv.kind = InvocationKind::kListwise;
        inv.window_start = w.start;
        inv.window_end = w.end;
        history.push_back(std::move(inv));
      }
    }
  }
  return make_ranked_result(request, std::move(cands), std::move(history), errors);
}

std::optional<long long> first_integer(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
    long long v = 0;
    std::size_t j = i;
    for (; j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])); ++j) {
      if (v < 1'000'000'000'000LL) v = v * 10 + (text[j] - '0');
    }
    return v;
  }
  return std::nullopt;
}

std::optional<char> pairwise_choice(std::string_view text) {
  std::string core;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) core.push_back(c);
  }
  if (core == "A" || core == "a") return 'A';
  if (core == "B" || core == "b") return 'B';
  // Otherwise the first standalone capital A or B.
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != 'A' && c != 'B') continue;
    const bool left = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    const bool right = i + 1 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 1]));
    if (left && right) return c;
  }
  return std::nullopt;
}

RankedResult rerank_pointwise(const Request& request, backend::Backend& backend,
                              const RerankConfig& config) {
  config.validate();
  const auto& tpl = config.template_for_strategy();
  const std::size_t m = request.candidates.size();
  std::vector<CallSlot> slots(m);
  util::parallel_for(m, config.parallelism, [&](std::size_t i) {
    slots[i] = call(
        backend,
        [&] {
          return prompt::render_pointwise(tpl, request.query, request.candidates[i],
                                          config.context_budget);
        },
        InvocationKind::kPointwise, i, i + 1);
  });

  std::vector<Candidate> cands = request.candidates;
  std::vector<InferenceInvocation> history;
  std::size_t errors = 0, malformed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double score = 0.0;
    if (slots[i].failed) {
      ++errors;
    } else if (auto v = first_integer(slots[i].invocation->response)) {
      score = static_cast<double>(*v);
    } else {
      ++malformed;
    }
    cands[i].score = score;
    if (config.populate_invocations) history.push_back(std::move(*slots[i].invocation));
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  auto result = make_ranked_result(request, std::move(cands), std::move(history), errors);
  result.malformed_count = malformed;
  return result;
}

RankedResult rerank_pairwise(const Request& request, backend::Backend& backend,
                             const RerankConfig& config) {
  config.validate();
  const std::size_t m = request.candidates.size();
  if (m < 2) return make_ranked_result(request, request.candidates);
  const auto& tpl = config.template_for_strategy();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m - 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::vector<CallSlot> slots(pairs.size());
  util::parallel_for(pairs.size(), config.parallelism, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    slots[p] = call(
        backend,
        [&] {
          return prompt::render_pairwise(tpl, request.query, request.candidates[i],
                                         request.candidates[j], config.context_budget);
        },
        InvocationKind::kPairwise, i, j);
  });

  // win[i][j]: how strongly the (i, j) call preferred i.
  std::vector<std::vector<double>> win(m, std::vector<double>(m, 0.0));
  std::vector<InferenceInvocation> history;
  std::size_t errors = 0, malformed = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    double w = 0.5;
    if (slots[p].failed) {
      ++errors;
    } else if (auto choice = pairwise_choice(slots[p].invocation->response)) {
      w = *choice == 'A' ? 1.0 : 0.0;
    } else {
      ++malformed;
    }
    win[i][j] = w;
    if (config.populate_invocations) history.push_back(std::move(*slots[p].invocation));
  }

  std::vector<Candidate> cands = request.candidates;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) s += win[i][j] + (1.0 - win[j][i]);
    }
    cands[i].score = s;
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  auto result = make_ranked_result(request, std::move(cands), std::move(history), errors);
  result.malformed_count = malformed;
  return result;
}

RankedResult rerank(const Request& request, backend::Backend& backend,
                    const RerankConfig& config) {
  switch (config.strategy) {
    case Strategy::kPointwise:
      return rerank_pointwise(request, backend, config);
    case Strategy::kPairwise:
      return rerank_pairwise(request, backend, config);
    case Strategy::kListwise:
      break;
  }
  return rerank_listwise(request, backend, config);
}

std::vector<RankedResult> rerank_batch(const std::vector<Request>& requests,
                                       backend::Backend& backend, const RerankConfig& config) {
  config.validate();
  std::vector<RankedResult> results(requests.size());
  RerankConfig inner = config;
  // Spread threads across requests; only a lone request fans out internally.
  if (requests.size() > 1) inner.parallelism = 1;
  util::parallel_for(requests.size(), config.parallelism, [&](std::size_t i) {
    try {
      results[i] = rerank(requests[i], backend, inner);
    } catch (const std::exception&) {
      results[i] = RankedResult{requests[i].query, requests[i].candidates, {}, 1, 0};
    }
  });
  return results;
}

}  // namespace rankforge::rerank
