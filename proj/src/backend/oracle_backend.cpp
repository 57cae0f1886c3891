#include "rankforge/backend/oracle_backend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankforge/core/error.hpp"
#include "rankforge/prompt/tokens.hpp"
#include "rankforge/util/hash.hpp"

namespace rankforge::backend {

namespace {

constexpr const char* kGarbage[] = {
    "I'm sorry, but I cannot determine a ranking for these passages.",
    "All of the passages seem equally relevant to the query.",
    "Ranking unavailable: the passages could not be compared.",
};
constexpr const char* kProsePrefix = "Sure! Here is the ranking of the passages:\n";
constexpr const char* kProseSuffix = "\nThe most relevant passages are listed first.";

void check_rate(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ConfigError(std::string("oracle ") + name + " rate must be in [0, 1]");
  }
}

std::pair<double, double> value_range(const std::map<std::string, double>& values,
                                      const std::optional<double>& fallback) {
  double lo = fallback.value_or(INFINITY), hi = fallback.value_or(-INFINITY);
  for (const auto& [_, v] : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::string render_ids(const std::vector<std::size_t>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += " > ";
    out += "[" + std::to_string(labels[i]) + "]";
  }
  return out;
}

}  // namespace

void OracleConfig::validate() const {
  check_rate(rates.extra_prose, "extra_prose");
  check_rate(rates.repetition, "repetition");
  check_rate(rates.omission, "omission");
  check_rate(rates.garbage, "garbage");
  if (rates.garbage + rates.repetition + rates.omission > 1.0 + 1e-12) {
    throw ConfigError("oracle garbage + repetition + omission rates must not exceed 1");
  }
}

OracleBackend::OracleBackend(OracleConfig config) : config_(std::move(config)) {
  config_.validate();
}

double OracleBackend::relevance(std::string_view qid, const std::string& docid) const {
  if (auto q = config_.per_query.find(std::string(qid)); q != config_.per_query.end()) {
    if (auto d = q->second.find(docid); d != q->second.end()) return d->second;
  }
  if (auto d = config_.truth.find(docid); d != config_.truth.end()) return d->second;
  if (config_.default_relevance) return *config_.default_relevance;
  throw ConfigError("oracle has no relevance for docid \"" + docid + "\"");
}

double OracleBackend::normalized(std::string_view qid, const std::string& docid) const {
  const double v = relevance(qid, docid);
  auto q = config_.per_query.find(std::string(qid));
  auto [lo, hi] = q != config_.per_query.end()
                      ? value_range(q->second, config_.default_relevance)
                      : value_range(config_.truth, config_.default_relevance);
  if (!(hi > lo)) return 0.0;
  return (v - lo) / (hi - lo);
}

std::string OracleBackend::respond(InvocationKind kind, std::string_view qid,
                                   std::span<const std::string> docids) const {
  std::string salt = std::string(qid) + '\x1f' + to_string(kind);
  for (const auto& d : docids) salt += '\x1f' + d;
  std::mt19937_64 rng(util::derive_seed(config_.seed, salt));
  const double structural = util::unit(rng);
  const bool prose = util::unit(rng) < config_.rates.extra_prose;
  const auto& r = config_.rates;
  const bool garbage = structural < r.garbage;
  const bool repetition = !garbage && structural < r.garbage + r.repetition;
  const bool omission =
      !garbage && !repetition && structural < r.garbage + r.repetition + r.omission;

  std::string text;
  std::vector<std::size_t> labels;
  switch (kind) {
    case InvocationKind::kListwise: {
      labels.resize(docids.size());
      std::iota(labels.begin(), labels.end(), std::size_t{1});
      std::vector<double> rel;
      rel.reserve(docids.size());
      for (const auto& d : docids) rel.push_back(relevance(qid, d));
      std::stable_sort(labels.begin(), labels.end(),
                       [&](std::size_t a, std::size_t b) { return rel[a - 1] > rel[b - 1]; });
      break;
    }
    case InvocationKind::kPointwise: {
      if (docids.size() != 1) throw ConfigError("pointwise prompt must reference one docid");
      text = std::to_string(std::lround(100.0 * normalized(qid, docids[0])));
      break;
    }
    case InvocationKind::kPairwise: {
      if (docids.size() != 2) throw ConfigError("pairwise prompt must reference two docids");
      text = relevance(qid, docids[1]) > relevance(qid, docids[0]) ? "B" : "A";
      break;
    }
  }

  if (garbage) {
    text = kGarbage[util::bounded(rng, std::size(kGarbage))];
    labels.clear();
  }
  if (kind == InvocationKind::kListwise && !labels.empty()) {
    if (repetition) {
      const std::size_t src = util::bounded(rng, labels.size());
      const std::size_t dst = src + 1 + util::bounded(rng, labels.size() - src);
      labels.insert(labels.begin() + static_cast<std::ptrdiff_t>(dst), labels[src]);
    } else if (omission) {
      labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(util::bounded(rng, labels.size())));
    }
    text = render_ids(labels);
  }
  if (prose) text = kProsePrefix + text + kProseSuffix;
  return text;
}

InferenceInvocation OracleBackend::invoke(const prompt::RenderedPrompt& prompt) {
  if (prompt.messages.empty()) throw ValidationError("empty prompt");
  if (config_.failing_qids.count(prompt.qid)) {
    throw BackendError("oracle configured to fail for qid " + prompt.qid, 1);
  }
  InferenceInvocation inv;
  inv.prompt = prompt.messages;
  inv.kind = prompt.kind;
  inv.response = respond(prompt.kind, prompt.qid, prompt.docids);
  inv.input_token_count = prompt::estimate_message_tokens(prompt.messages);
  inv.output_token_count = prompt::estimate_tokens(inv.response);
  return inv;
}

}  // namespace rankforge::backend
