#include "rankforge/analysis/error_analysis.hpp"

#include <cmath>
#include <cstdio>

#include "rankforge/core/error.hpp"

namespace rankforge::analysis {

namespace {

std::size_t index_of(parse::ErrorCategory c) { return static_cast<std::size_t>(c); }

double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

std::size_t ErrorDistribution::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::size_t ErrorDistribution::count(parse::ErrorCategory category) const {
  return counts[index_of(category)];
}

double ErrorDistribution::percent(parse::ErrorCategory category) const {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  return 100.0 * static_cast<double>(count(category)) / static_cast<double>(n);
}

Json ErrorDistribution::to_json(bool normalize) const {
  Json out = Json::object();
  for (auto c : parse::kAllCategories) {
    if (normalize) {
      out[parse::to_string(c)] = round1(percent(c));
    } else {
      out[parse::to_string(c)] = count(c);
    }
  }
  return out;
}

std::string ErrorDistribution::to_table(bool normalize) const {
  std::string out;
  char line[96];
  std::snprintf(line, sizeof line, "%-14s %10s\n", "category", normalize ? "percent" : "count");
  out += line;
  for (auto c : parse::kAllCategories) {
    if (normalize) {
      std::snprintf(line, sizeof line, "%-14s %10.1f\n", parse::to_string(c).c_str(), percent(c));
    } else {
      std::snprintf(line, sizeof line, "%-14s %10zu\n", parse::to_string(c).c_str(), count(c));
    }
    out += line;
  }
  std::snprintf(line, sizeof line, "%-14s %10zu\n", "total", total());
  out += line;
  return out;
}

ErrorDistribution count_errors(const std::vector<io::QueryInvocations>& histories,
                               parse::ResponseGrammar grammar, bool verbose) {
  bool any = false;
  for (const auto& h : histories) any = any || !h.invocations.empty();
  if (!any) {
    throw ValidationError(
        "no invocation history to analyze; rerun with --populate-invocations to record it");
  }
  ErrorDistribution dist;
  for (const auto& h : histories) {
    for (const auto& inv : h.invocations) {
      if (inv.kind != InvocationKind::kListwise || inv.error) continue;
      if (inv.window_end <= inv.window_start) continue;
      const auto outcome = parse::extract_permutation(inv.response, inv.window_size(), grammar);
      ++dist.counts[index_of(outcome.category)];
      if (verbose && outcome.category != parse::ErrorCategory::kOk) {
        dist.offending.push_back(
            {h.query.qid, inv.window_start, inv.window_end, outcome.category, inv.response});
      }
    }
  }
  return dist;
}

ErrorDistribution count_errors(const std::vector<RankedResult>& results,
                               parse::ResponseGrammar grammar, bool verbose) {
  return count_errors(io::invocations_of(results), grammar, verbose);
}

}  // namespace rankforge::analysis
