#include "rankforge/parse/permutation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>

#include "rankforge/core/error.hpp"

namespace rankforge::parse {

namespace {

struct Token {
  enum Kind { kBracketed, kBare, kSeparator, kStray } kind;
  std::size_t value = 0;  // SIZE_MAX when the digits overflow
  std::string_view text;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t to_number(std::string_view digits) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc{} || v > std::numeric_limits<std::size_t>::max()) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(v);
}

std::vector<Token> lex(std::string_view s, ResponseGrammar grammar) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push_stray = [&](std::size_t from, std::size_t to) {
    if (!out.empty() && out.back().kind == Token::kStray &&
        out.back().text.data() + out.back().text.size() == s.data() + from) {
      out.back().text = s.substr(out.back().text.data() - s.data(),
                                 to - static_cast<std::size_t>(out.back().text.data() - s.data()));
    } else {
      out.push_back({Token::kStray, 0, s.substr(from, to - from)});
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '[') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] == ' ') ++j;
      std::size_t d = j;
      while (d < s.size() && is_digit(s[d])) ++d;
      std::size_t k = d;
      while (k < s.size() && s[k] == ' ') ++k;
      if (d > j && k < s.size() && s[k] == ']') {
        out.push_back({Token::kBracketed, to_number(s.substr(j, d - j)), s.substr(i, k + 1 - i)});
        i = k + 1;
        continue;
      }
      push_stray(i, i + 1);
      ++i;
    } else if (is_digit(c)) {
      std::size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      const bool glued = (i > 0 && (is_alnum(s[i - 1]) || s[i - 1] == '.')) ||
                         (j < s.size() && (is_alnum(s[j]) || s[j] == '.'));
      if (glued) {
        push_stray(i, j);
      } else {
        out.push_back({Token::kBare, to_number(s.substr(i, j - i)), s.substr(i, j - i)});
      }
      i = j;
    } else if (is_space(c) || c == ',' || (c == '>' && grammar == ResponseGrammar::kRankGpt)) {
      out.push_back({Token::kSeparator, 0, s.substr(i, 1)});
      ++i;
    } else {
      push_stray(i, i + 1);
      ++i;
    }
  }
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

}  // namespace

std::string to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kOk:
      return "OK";
    case ErrorCategory::kWrongFormat:
      return "WRONG_FORMAT";
    case ErrorCategory::kRepetition:
      return "REPETITION";
    case ErrorCategory::kMissing:
      return "MISSING";
  }
  return "OK";
}

ResponseGrammar grammar_from_name(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "rank_gpt" || n == "rank_gpt_apeer" || n == "rankgpt" || n == "apeer") {
    return ResponseGrammar::kRankGpt;
  }
  if (n == "lrl") return ResponseGrammar::kLrl;
  throw ConfigError("unknown response grammar \"" + std::string(name) + "\"");
}

ErrorCategory classify(const ClassifyInputs& in) {
  if (!in.had_identifier || in.out_of_range || in.grammar_violation) {
    return ErrorCategory::kWrongFormat;
  }
  if (in.duplicate_count > 0) return ErrorCategory::kRepetition;
  if (in.missing_count > 0) return ErrorCategory::kMissing;
  return ErrorCategory::kOk;
}

ParseOutcome extract_permutation(std::string_view response, std::size_t m,
                                 ResponseGrammar grammar) {
  ParseOutcome out;
  auto tokens = lex(response, grammar);
  const bool bracketed_mode = std::any_of(tokens.begin(), tokens.end(), [](const Token& t) {
    return t.kind == Token::kBracketed;
  });
  const auto id_kind = bracketed_mode ? Token::kBracketed : Token::kBare;
  for (auto& t : tokens) {
    if (t.kind == Token::kBare && bracketed_mode) t.kind = Token::kStray;
  }

  // Stage 1: keep identifiers, drop everything else.
  std::vector<std::size_t> ids;
  std::size_t first_id = tokens.size(), last_id = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == id_kind) {
      first_id = std::min(first_id, i);
      last_id = i;
      if (t.value >= 1 && t.value <= m) {
        ids.push_back(t.value);
      } else {
        out.out_of_range = true;
        ++out.removed_token_count;
      }
    } else if (t.kind == Token::kStray) {
      out.removed_token_count += count_words(t.text);
    }
  }
  for (std::size_t i = first_id; i < last_id && first_id < tokens.size(); ++i) {
    if (tokens[i].kind == Token::kStray) out.grammar_violation = true;
  }
  out.had_identifier = !ids.empty();

  // Stage 2: first occurrence wins.
  std::vector<bool> seen(m + 1, false);
  for (auto id : ids) {
    if (seen[id]) {
      ++out.duplicate_count;
    } else {
      seen[id] = true;
      out.permutation.push_back(id);
    }
  }

  // Stage 3: append what is missing, in window order.
  for (std::size_t id = 1; id <= m; ++id) {
    if (!seen[id]) {
      out.permutation.push_back(id);
      ++out.missing_count;
    }
  }

  out.category = classify({out.duplicate_count, out.missing_count, out.had_identifier,
                           out.out_of_range, out.grammar_violation});
  return out;
}

std::string format_permutation(const std::vector<std::size_t>& permutation,
                               ResponseGrammar grammar) {
  const char* sep = grammar == ResponseGrammar::kRankGpt ? " > " : ", ";
  std::string out;
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (i) out += sep;
    out += "[" + std::to_string(permutation[i]) + "]";
  }
  return out;
}

}  // namespace rankforge::parse
