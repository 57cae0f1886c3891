#include "rankforge/prompt/tokens.hpp"

#include <cctype>

#include "rankforge/core/error.hpp"

namespace rankforge::prompt {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::int64_t estimate_tokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::string truncate_passage(std::string_view text, std::int64_t budget) {
  if (budget < 1) throw BudgetError("per-passage token budget must be >= 1");
  if (estimate_tokens(text) <= budget) return std::string(text);

  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  const std::size_t max_bytes = static_cast<std::size_t>(budget) * 4;
  if (text.size() <= max_bytes) return std::string(text);

  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  if (!is_space(text[cut])) {
    const std::size_t ws = text.substr(0, cut).find_last_of(" \t\r\n\f\v");
    if (ws != std::string_view::npos && ws > 0) cut = ws;
  }
  std::string_view kept = text.substr(0, cut);
  while (!kept.empty() && is_space(kept.back())) kept.remove_suffix(1);
  return std::string(kept);
}

std::vector<std::string> truncate_to_budget(std::vector<std::string> passages,
                                            std::int64_t per_passage_budget) {
  for (auto& p : passages) p = truncate_passage(p, per_passage_budget);
  return passages;
}

}  // namespace rankforge::prompt
