#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rankforge/core/types.hpp"

namespace rankforge::io {

// Request JSONL: one {"query":{...},"candidates":[...]} object per line.
// qids and docids are stringified when given as integers. Blank lines are
// skipped. Throws ParseError / SchemaError (with line numbers) and
// ValidationError for duplicate docids.
std::vector<Request> parse_requests_jsonl(std::istream& in);
std::vector<Request> parse_requests_jsonl(std::string_view text);
std::vector<Request> read_requests_file(const std::string& path);

Json request_to_json(const Query& query, const std::vector<Candidate>& candidates);

// Results are written in the request schema so they can be reranked again.
// Invocation histories are not part of this file.
void write_results_jsonl(std::ostream& out, const std::vector<RankedResult>& results);
std::string results_to_jsonl(const std::vector<RankedResult>& results);
void write_requests_jsonl(std::ostream& out, const std::vector<Request>& requests);
std::string requests_to_jsonl(const std::vector<Request>& requests);

// `qid Q0 docid rank score tag`, rank 1-based in list order, score = 1/rank.
void write_trec_run(std::ostream& out, const std::vector<RankedResult>& results,
                    std::string_view tag);
std::string trec_run_text(const std::vector<RankedResult>& results, std::string_view tag);

std::vector<RunRecord> parse_trec_run(std::string_view text);
std::vector<RunRecord> read_trec_run_file(const std::string& path);

// Groups records by qid in order of first appearance; record order within a
// qid follows the file.
std::vector<std::pair<std::string, std::vector<RunRecord>>> group_by_qid(
    const std::vector<RunRecord>& records);

struct QueryInvocations {
  Query query;
  std::vector<InferenceInvocation> invocations;
};

Json invocation_to_json(const InferenceInvocation& invocation);
InferenceInvocation invocation_from_json(const Json& j);

void write_invocations_json(std::ostream& out, const std::vector<RankedResult>& results);
std::string invocations_json_text(const std::vector<RankedResult>& results);
std::vector<QueryInvocations> parse_invocations_json(std::string_view text);
std::vector<QueryInvocations> read_invocations_file(const std::string& path);

std::vector<QueryInvocations> invocations_of(const std::vector<RankedResult>& results);

// Whole-file helpers. Writes go through a temporary file and a rename.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace rankforge::io
