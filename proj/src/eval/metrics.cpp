#include "rankforge/eval/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_set>

#include "rankforge/core/error.hpp"

namespace rankforge::eval {

namespace {

constexpr const char* kGrammar = "ndcg@K | map@K[:rel=N] | recall@K[:rel=N]";

std::size_t parse_positive(std::string_view s, std::string_view whole) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
    throw ConfigError("invalid metric \"" + std::string(whole) + "\"; expected " + kGrammar);
  }
  return v;
}

int grade_of(const Judgments& judgments, const std::string& docid) {
  auto it = judgments.find(docid);
  return it == judgments.end() ? 0 : it->second;
}

std::size_t relevant_total(const Judgments& judgments, int threshold) {
  std::size_t n = 0;
  for (const auto& [_, g] : judgments) n += g >= threshold;
  return n;
}

using Ranking = std::vector<std::string>;

EvalReport evaluate_rankings(const std::map<std::string, Ranking>& run,
                             const retrieval::Qrels& qrels, const MetricSpec& spec) {
  EvalReport report;
  report.spec = spec;
  bool overlap = false;
  for (const auto& [qid, _] : run) {
    if (qrels.has_query(qid)) {
      overlap = true;
    } else {
      report.unjudged_qids.push_back(qid);
    }
  }
  if (!overlap) throw ValidationError("no run query has relevance judgments");

  double sum = 0.0;
  for (const auto& [qid, judgments] : qrels.judgments) {
    double value = 0.0;
    if (auto it = run.find(qid); it != run.end()) {
      value = compute(spec, it->second, judgments);
    } else {
      report.missing_qids.push_back(qid);
    }
    report.per_query.emplace_back(qid, value);
    sum += value;
  }
  report.mean = report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
  return report;
}

}  // namespace

MetricSpec MetricSpec::parse(std::string_view text) {
  MetricSpec spec;
  const auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw ConfigError("invalid metric \"" + std::string(text) + "\"; expected " + kGrammar);
  }
  const std::string_view name = text.substr(0, at);
  std::string_view rest = text.substr(at + 1);
  std::string_view option;
  if (auto colon = rest.find(':'); colon != std::string_view::npos) {
    option = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
  }
  if (name == "ndcg") {
    spec.kind = Kind::kNdcg;
  } else if (name == "map") {
    spec.kind = Kind::kMap;
  } else if (name == "recall") {
    spec.kind = Kind::kRecall;
  } else {
    throw ConfigError("unknown metric \"" + std::string(name) + "\"; expected " + kGrammar);
  }
  spec.cutoff = parse_positive(rest, text);
  if (!option.empty()) {
    if (spec.kind == Kind::kNdcg || option.substr(0, 4) != "rel=") {
      throw ConfigError("invalid metric option in \"" + std::string(text) + "\"; expected " +
                        kGrammar);
    }
    spec.rel_threshold = static_cast<int>(parse_positive(option.substr(4), text));
  }
  return spec;
}

std::string MetricSpec::str() const {
  std::string out;
  switch (kind) {
    case Kind::kNdcg:
      out = "ndcg";
      break;
    case Kind::kMap:
      out = "map";
      break;
    case Kind::kRecall:
      out = "recall";
      break;
  }
  out += "@" + std::to_string(cutoff);
  if (kind != Kind::kNdcg && rel_threshold != 1) out += ":rel=" + std::to_string(rel_threshold);
  return out;
}

double ndcg_at_k(std::span<const std::string> ranking, const Judgments& judgments, std::size_t k) {
  double dcg = 0.0;
  const std::size_t n = std::min(k, ranking.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int g = grade_of(judgments, ranking[i]);
    if (g > 0) dcg += (std::exp2(g) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> ideal;
  ideal.reserve(judgments.size());
  for (const auto& [_, g] : judgments) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    if (ideal[i] > 0) idcg += (std::exp2(ideal[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double map_at_k(std::span<const std::string> ranking, const Judgments& judgments, std::size_t k,
                int rel_threshold) {
  const std::size_t total = relevant_total(judgments, rel_threshold);
  if (total == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranking.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (grade_of(judgments, ranking[i]) >= rel_threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total);
}

double recall_at_k(std::span<const std::string> ranking, const Judgments& judgments,
                   std::size_t k, int rel_threshold) {
  const std::size_t total = relevant_total(judgments, rel_threshold);
  if (total == 0) return 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranking.size());
  for (std::size_t i = 0; i < n; ++i) hits += grade_of(judgments, ranking[i]) >= rel_threshold;
  return static_cast<double>(hits) / static_cast<double>(total);
}

double compute(const MetricSpec& spec, std::span<const std::string> ranking,
               const Judgments& judgments) {
  switch (spec.kind) {
    case MetricSpec::Kind::kNdcg:
      return ndcg_at_k(ranking, judgments, spec.cutoff);
    case MetricSpec::Kind::kMap:
      return map_at_k(ranking, judgments, spec.cutoff, spec.rel_threshold);
    case MetricSpec::Kind::kRecall:
      return recall_at_k(ranking, judgments, spec.cutoff, spec.rel_threshold);
  }
  return 0.0;
}

std::vector<std::string> ranking_from_records(std::vector<RunRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.docid > b.docid;
  });
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& r : records) {
    if (seen.insert(r.docid).second) out.push_back(std::move(r.docid));
  }
  return out;
}

EvalReport evaluate(const std::vector<RunRecord>& run, const retrieval::Qrels& qrels,
                    const MetricSpec& spec) {
  std::map<std::string, std::vector<RunRecord>> grouped;
  for (const auto& r : run) grouped[r.qid].push_back(r);
  std::map<std::string, Ranking> rankings;
  for (auto& [qid, records] : grouped) rankings[qid] = ranking_from_records(std::move(records));
  return evaluate_rankings(rankings, qrels, spec);
}

EvalReport evaluate(const std::vector<RankedResult>& results, const retrieval::Qrels& qrels,
                    const MetricSpec& spec) {
  std::map<std::string, Ranking> rankings;
  for (const auto& r : results) {
    Ranking ranking;
    for (const auto& c : r.candidates) ranking.push_back(c.docid);
    rankings[r.query.qid] = std::move(ranking);
  }
  return evaluate_rankings(rankings, qrels, spec);
}

EvalReport evaluate(const std::vector<Request>& requests, const retrieval::Qrels& qrels,
                    const MetricSpec& spec) {
  std::map<std::string, Ranking> rankings;
  for (const auto& r : requests) {
    Ranking ranking;
    for (const auto& c : r.candidates) ranking.push_back(c.docid);
    rankings[r.query.qid] = std::move(ranking);
  }
  return evaluate_rankings(rankings, qrels, spec);
}

}  // namespace rankforge::eval
