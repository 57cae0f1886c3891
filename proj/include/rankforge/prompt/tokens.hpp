#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rankforge::prompt {

// ceil(bytes / 4). Backends with an exact tokenizer report their own counts.
std::int64_t estimate_tokens(std::string_view text);

// Cuts `text` so estimate_tokens(result) <= budget, preferring the last
// whitespace boundary inside the allowance and never splitting a UTF-8
// sequence. Leading whitespace is dropped; text already within budget is
// returned unchanged.
std::string truncate_passage(std::string_view text, std::int64_t budget);

// Applies truncate_passage to each passage independently; order unchanged.
std::vector<std::string> truncate_to_budget(std::vector<std::string> passages,
                                            std::int64_t per_passage_budget);

}  // namespace rankforge::prompt
