#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "rankforge/backend/backend.hpp"

namespace rankforge::backend {

struct MalformationRates {
  double extra_prose = 0.0;
  double repetition = 0.0;
  double omission = 0.0;
  double garbage = 0.0;
};

struct OracleConfig {
  // docid -> relevance. `per_query` entries take precedence for their qid.
  std::map<std::string, double> truth;
  std::map<std::string, std::map<std::string, double>> per_query;
  // Relevance for docids missing from the truth maps; unset means such a
  // docid is a configuration error.
  std::optional<double> default_relevance;
  MalformationRates rates;
  std::uint64_t seed = 0;
  // Every invocation for these qids throws BackendError.
  std::set<std::string> failing_qids;

  // Rates must lie in [0, 1]; garbage + repetition + omission must not exceed 1.
  void validate() const;
};

// Deterministic test double that answers from known relevance values.
//
// Listwise: the window sorted by descending truth (ties keep window order),
// rendered "[a] > [b] > ...". Pointwise: round(100 * min-max normalised
// truth). Pairwise: "A" unless B is strictly more relevant.
//
// Malformations are drawn from a stream seeded by (seed, qid, kind, docids),
// so replies do not depend on call order or thread interleaving. One uniform
// draw selects at most one structural malformation (garbage, repetition or
// omission) with the configured probabilities; extra prose is an independent
// coin. They are applied in the order garbage, prose, repetition, omission.
class OracleBackend : public Backend {
 public:
  explicit OracleBackend(OracleConfig config);

  InferenceInvocation invoke(const prompt::RenderedPrompt& prompt) override;
  std::string name() const override { return "oracle"; }

  std::string respond(InvocationKind kind, std::string_view qid,
                      std::span<const std::string> docids) const;

  double relevance(std::string_view qid, const std::string& docid) const;
  const OracleConfig& config() const { return config_; }

 private:
  double normalized(std::string_view qid, const std::string& docid) const;

  OracleConfig config_;
};

}  // namespace rankforge::backend
