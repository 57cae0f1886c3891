#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rankforge/core/types.hpp"
#include "rankforge/retrieval/qrels.hpp"

namespace rankforge::eval {

using Judgments = std::map<std::string, int>;  // docid -> grade, one query

struct MetricSpec {
  enum class Kind { kNdcg, kMap, kRecall };

  Kind kind = Kind::kNdcg;
  std::size_t cutoff = 10;
  // Minimum grade counted as relevant by map and recall.
  int rel_threshold = 1;

  // Grammar: ndcg@10 | map@100[:rel=2] | recall@20[:rel=N]. Throws ConfigError.
  static MetricSpec parse(std::string_view text);
  std::string str() const;
};

// Gain 2^grade - 1, discount log2(rank + 1); ideal ordering from all judged
// grades of the query. 0 when the ideal DCG is 0.
double ndcg_at_k(std::span<const std::string> ranking, const Judgments& judgments, std::size_t k);

// Sum of precision@i over relevant ranks i <= k, divided by the total number
// of relevant judged documents.
double map_at_k(std::span<const std::string> ranking, const Judgments& judgments, std::size_t k,
                int rel_threshold);

double recall_at_k(std::span<const std::string> ranking, const Judgments& judgments,
                   std::size_t k, int rel_threshold);

double compute(const MetricSpec& spec, std::span<const std::string> ranking,
               const Judgments& judgments);

struct EvalReport {
  MetricSpec spec;
  std::vector<std::pair<std::string, double>> per_query;  // sorted by qid
  double mean = 0.0;
  // Run qids absent from the qrels, excluded from the mean.
  std::vector<std::string> unjudged_qids;
  // Qrels qids absent from the run, scored 0 and included.
  std::vector<std::string> missing_qids;
};

// Orders one query's records by score descending, then docid descending;
// repeated docids keep their first occurrence.
std::vector<std::string> ranking_from_records(std::vector<RunRecord> records);

// Mean over every qrels qid (absent run qids score 0). Throws ValidationError
// when no run qid has judgments.
EvalReport evaluate(const std::vector<RunRecord>& run, const retrieval::Qrels& qrels,
                    const MetricSpec& spec);
// Uses each result's list order.
EvalReport evaluate(const std::vector<RankedResult>& results, const retrieval::Qrels& qrels,
                    const MetricSpec& spec);
EvalReport evaluate(const std::vector<Request>& requests, const retrieval::Qrels& qrels,
                    const MetricSpec& spec);

}  // namespace rankforge::eval
