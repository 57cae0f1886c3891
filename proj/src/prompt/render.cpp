#include "rankforge/prompt/render.hpp"

#include <random>

#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"
#include "rankforge/prompt/tokens.hpp"
#include "rankforge/util/hash.hpp"

namespace rankforge::prompt {

namespace {

using Values = std::vector<std::pair<std::string, std::string>>;

void require_mode(const PromptTemplate& tpl, InvocationKind mode) {
  if (tpl.mode != mode) {
    throw ConfigError("template \"" + tpl.name + "\" is a " + to_string(tpl.mode) +
                      " template, not " + to_string(mode));
  }
}

std::string require_passage(const Candidate& c) {
  std::string text = passage_text(c.doc);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("candidate " + c.docid + " has empty passage text");
  }
  return text;
}

// Builds the message list around a rendered user body.
RenderedPrompt assemble(const PromptTemplate& tpl, std::span<const FewShotExample> shots,
                        std::string user_body) {
  RenderedPrompt out;
  if (tpl.system_message) out.messages.push_back({"system", *tpl.system_message});
  for (const auto& s : shots) {
    out.messages.push_back({"user", s.prompt});
    out.messages.push_back({"assistant", s.response});
  }
  out.messages.push_back({"user", std::move(user_body)});
  out.estimated_input_tokens = estimate_message_tokens(out.messages);
  return out;
}

std::string passages_block(const std::vector<std::string>& passages) {
  std::string block;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    block += "[" + std::to_string(i + 1) + "] " + passages[i] + "\n";
  }
  return block;
}

std::int64_t per_passage_allowance(std::int64_t budget, std::int64_t fixed, std::size_t m,
                                   const std::string& what) {
  if (budget <= 0) throw BudgetError("context budget must be positive");
  const std::int64_t remaining = budget - fixed;
  const std::int64_t each = remaining > 0 ? remaining / static_cast<std::int64_t>(m) : 0;
  if (each < 1) {
    throw BudgetError("context budget " + std::to_string(budget) + " cannot fit the " + what +
                      " prompt: instructions need " + std::to_string(fixed) + " tokens plus " +
                      std::to_string(m) + " passage token(s)");
  }
  return each;
}

}  // namespace

std::vector<FewShotExample> parse_few_shot_jsonl(std::string_view text) {
  std::vector<FewShotExample> pool;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.contains("prompt")) throw SchemaError("prompt", line_no);
    if (!j.contains("response")) throw SchemaError("response", line_no);
    pool.push_back({j["prompt"].get<std::string>(), j["response"].get<std::string>()});
  }
  return pool;
}

std::vector<FewShotExample> read_few_shot_file(const std::string& path) {
  return parse_few_shot_jsonl(io::read_file(path));
}

std::vector<FewShotExample> sample_shots(const std::vector<FewShotExample>& pool, std::size_t n,
                                         std::uint64_t seed) {
  if (n > pool.size()) {
    throw ConfigError("requested " + std::to_string(n) + " shots from a pool of " +
                      std::to_string(pool.size()));
  }
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n slots are the sample.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + util::bounded(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<FewShotExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
  return out;
}

std::int64_t estimate_message_tokens(const std::vector<Message>& messages) {
  std::int64_t total = 0;
  for (const auto& m : messages) total += estimate_tokens(m.content);
  return total;
}

RenderedPrompt render_listwise(const PromptTemplate& tpl, const Query& query,
                               std::span<const Candidate> window,
                               std::span<const FewShotExample> shots,
                               std::int64_t context_budget) {
  require_mode(tpl, InvocationKind::kListwise);
  if (window.empty()) throw ValidationError("listwise prompt needs at least one candidate");
  const std::size_t m = window.size();
  std::vector<std::string> passages;
  passages.reserve(m);
  for (const auto& c : window) passages.push_back(require_passage(c));

  const std::string num = std::to_string(m);
  auto body_for = [&](const std::vector<std::string>& ps) {
    return substitute(tpl.body, Values{{"query", query.text}, {"num", num}, {"passages", passages_block(ps)}});
  };
  const std::int64_t fixed =
      assemble(tpl, shots, body_for(std::vector<std::string>(m))).estimated_input_tokens;
  const std::int64_t each = per_passage_allowance(context_budget, fixed, m, "listwise");

  RenderedPrompt out = assemble(tpl, shots, body_for(truncate_to_budget(std::move(passages), each)));
  out.kind = InvocationKind::kListwise;
  out.qid = query.qid;
  for (const auto& c : window) out.docids.push_back(c.docid);
  return out;
}

RenderedPrompt render_pointwise(const PromptTemplate& tpl, const Query& query,
                                const Candidate& candidate, std::int64_t context_budget) {
  require_mode(tpl, InvocationKind::kPointwise);
  std::string passage = require_passage(candidate);
  auto body_for = [&](const std::string& p) {
    return substitute(tpl.body, Values{{"query", query.text}, {"passage", p}});
  };
  const std::int64_t fixed = assemble(tpl, {}, body_for("")).estimated_input_tokens;
  const std::int64_t each = per_passage_allowance(context_budget, fixed, 1, "pointwise");
  RenderedPrompt out = assemble(tpl, {}, body_for(truncate_passage(passage, each)));
  out.kind = InvocationKind::kPointwise;
  out.qid = query.qid;
  out.docids = {candidate.docid};
  return out;
}

RenderedPrompt render_pairwise(const PromptTemplate& tpl, const Query& query,
                               const Candidate& a, const Candidate& b,
                               std::int64_t context_budget) {
  require_mode(tpl, InvocationKind::kPairwise);
  std::string pa = require_passage(a);
  std::string pb = require_passage(b);
  auto body_for = [&](const std::string& x, const std::string& y) {
    return substitute(tpl.body, Values{{"query", query.text}, {"passage_a", x}, {"passage_b", y}});
  };
  const std::int64_t fixed = assemble(tpl, {}, body_for("", "")).estimated_input_tokens;
  const std::int64_t each = per_passage_allowance(context_budget, fixed, 2, "pairwise");
  RenderedPrompt out =
      assemble(tpl, {}, body_for(truncate_passage(pa, each), truncate_passage(pb, each)));
  out.kind = InvocationKind::kPairwise;
  out.qid = query.qid;
  out.docids = {a.docid, b.docid};
  return out;
}

}  // namespace rankforge::prompt
