#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/core/types.hpp"
#include "rankforge/prompt/template.hpp"

namespace rankforge::prompt {

inline constexpr std::int64_t kDefaultContextBudget = 4096;

struct FewShotExample {
  std::string prompt;
  std::string response;
};

// JSONL of {"prompt": ..., "response": ...}.
std::vector<FewShotExample> parse_few_shot_jsonl(std::string_view text);
std::vector<FewShotExample> read_few_shot_file(const std::string& path);

// Seeded sampling without replacement. Throws ConfigError when n exceeds the
// pool. The same (pool, n, seed) always yields the same examples in the same
// order.
std::vector<FewShotExample> sample_shots(const std::vector<FewShotExample>& pool, std::size_t n,
                                         std::uint64_t seed);

struct RenderedPrompt {
  std::vector<Message> messages;
  std::int64_t estimated_input_tokens = 0;

  // Routing metadata for test backends; wire backends only read `messages`.
  InvocationKind kind = InvocationKind::kListwise;
  std::string qid;
  std::vector<std::string> docids;  // in label order
};

std::int64_t estimate_message_tokens(const std::vector<Message>& messages);

// Labels the window [1]..[m] in the given order. Few-shot examples become
// user/assistant pairs after the system message. Passages are truncated to
// floor((budget - instruction tokens - few-shot tokens) / m) tokens each.
RenderedPrompt render_listwise(const PromptTemplate& tpl, const Query& query,
                               std::span<const Candidate> window,
                               std::span<const FewShotExample> shots,
                               std::int64_t context_budget = kDefaultContextBudget);

RenderedPrompt render_pointwise(const PromptTemplate& tpl, const Query& query,
                                const Candidate& candidate,
                                std::int64_t context_budget = kDefaultContextBudget);

// Passage A and B share the remaining budget equally.
RenderedPrompt render_pairwise(const PromptTemplate& tpl, const Query& query,
                               const Candidate& a, const Candidate& b,
                               std::int64_t context_budget = kDefaultContextBudget);

}  // namespace rankforge::prompt
