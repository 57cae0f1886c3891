#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rankforge::parse {

enum class ErrorCategory { kOk, kWrongFormat, kRepetition, kMissing };

inline constexpr ErrorCategory kAllCategories[] = {ErrorCategory::kOk, ErrorCategory::kWrongFormat,
                                                   ErrorCategory::kRepetition,
                                                   ErrorCategory::kMissing};

// "OK", "WRONG_FORMAT", "REPETITION", "MISSING"
std::string to_string(ErrorCategory category);

// Identifier grammars for listwise responses.
//   rank_gpt: "[2] > [1] > [3]"; separators are '>', ',' and whitespace.
//   lrl:      "[2], [1], [3]"; separators are ',' and whitespace only.
// In both, integers may be bracketed or bare; once any bracketed identifier
// appears, bare integers count as stray text.
enum class ResponseGrammar { kRankGpt, kLrl };

// Accepts grammar ids and template names (rank_gpt, rank_gpt_apeer, lrl).
ResponseGrammar grammar_from_name(std::string_view name);

struct ParseOutcome {
  std::vector<std::size_t> permutation;  // 1-based window indices, always 1..m
  ErrorCategory category = ErrorCategory::kOk;
  std::size_t removed_token_count = 0;  // stray words plus out-of-range identifiers
  std::size_t duplicate_count = 0;
  std::size_t missing_count = 0;
  bool had_identifier = false;     // at least one in-range identifier
  bool out_of_range = false;       // some identifier fell outside 1..m
  bool grammar_violation = false;  // stray text between identifiers
};

struct ClassifyInputs {
  std::size_t duplicate_count = 0;
  std::size_t missing_count = 0;
  bool had_identifier = false;
  bool out_of_range = false;
  bool grammar_violation = false;
};

// WRONG_FORMAT > REPETITION > MISSING > OK.
ErrorCategory classify(const ClassifyInputs& in);

// Repairs a listwise response into a full permutation of 1..m:
// strip non-identifier tokens, keep the first occurrence of each id, then
// append absent ids in window order. Never throws for any input text.
ParseOutcome extract_permutation(std::string_view response, std::size_t m,
                                 ResponseGrammar grammar = ResponseGrammar::kRankGpt);

// "[a] > [b] > ..." (rank_gpt) or "[a], [b], ..." (lrl).
std::string format_permutation(const std::vector<std::size_t>& permutation,
                               ResponseGrammar grammar = ResponseGrammar::kRankGpt);

}  // namespace rankforge::parse
