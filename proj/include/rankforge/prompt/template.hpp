#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankforge/core/types.hpp"

namespace rankforge::prompt {

// A named prompt template. Assets are plain text with [meta], [system] and
// [user] sections; the user body uses {query}, {num}, {passages} (listwise),
// {passage} (pointwise) or {passage_a}, {passage_b} (pairwise).
struct PromptTemplate {
  std::string name;
  InvocationKind mode = InvocationKind::kListwise;
  std::optional<std::string> system_message;
  std::string body;
  // Response grammar identifier: rank_gpt | lrl for listwise templates,
  // integer for pointwise, letter for pairwise.
  std::string grammar = "rank_gpt";

  // Throws ConfigError if the body lacks a placeholder its mode requires.
  void validate() const;
};

PromptTemplate parse_template(std::string_view name, std::string_view asset);
PromptTemplate load_template_file(const std::string& path);

// Built-in templates: rank_gpt (default), rank_gpt_apeer, lrl, pointwise,
// pairwise. Lookup is case-insensitive, so RANK_GPT works too.
const PromptTemplate& builtin_template(std::string_view name);
std::vector<std::string> builtin_template_names();

// Single-pass placeholder substitution; unknown {names} are left as-is and
// substituted values are never rescanned.
std::string substitute(std::string_view body,
                       const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace rankforge::prompt
