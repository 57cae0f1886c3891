#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rankforge {

using Json = nlohmann::json;

struct Query {
  std::string text;
  std::string qid;
};

// Document fields are kept as raw JSON so unknown keys survive a round trip.
struct Candidate {
  std::string docid;
  double score = 0.0;
  Json doc = Json::object();
};

// Resolves the passage text of a document: the first present field among
// segment, contents, content, text, body; a "title" is prepended when present.
// Returns an empty string when no text field is present.
std::string passage_text(const Json& doc);

bool has_text_field(const Json& doc);

struct Request {
  Query query;
  std::vector<Candidate> candidates;
};

// Throws ValidationError on an empty qid or duplicate docid.
void validate_request(const Request& request);

struct Message {
  std::string role;
  std::string content;

  bool operator==(const Message&) const = default;
};

enum class InvocationKind { kListwise, kPointwise, kPairwise };

std::string to_string(InvocationKind kind);
InvocationKind invocation_kind_from_string(const std::string& name);

struct InferenceInvocation {
  std::vector<Message> prompt;
  std::string response;
  std::int64_t input_token_count = 0;
  std::int64_t output_token_count = 0;

  InvocationKind kind = InvocationKind::kListwise;
  // Half-open slice of the candidate list the call covered (listwise), or
  // the candidate positions involved (pointwise: start only; pairwise: both).
  std::size_t window_start = 0;
  std::size_t window_end = 0;
  // Set when the backend failed; the response is then empty.
  std::optional<std::string> error;

  std::size_t window_size() const { return window_end - window_start; }
};

struct RankedResult {
  Query query;
  std::vector<Candidate> candidates;
  std::vector<InferenceInvocation> invocations_history;
  // Backend failures absorbed while producing this result.
  std::size_t error_count = 0;
  // Replies that needed a fallback (unparseable score or choice).
  std::size_t malformed_count = 0;
};

// Builds a result after checking that `reordered` is a docid-permutation of
// the request's candidates. Throws ValidationError otherwise.
RankedResult make_ranked_result(const Request& source, std::vector<Candidate> reordered,
                                std::vector<InferenceInvocation> history = {},
                                std::size_t error_count = 0);

bool is_docid_permutation(const std::vector<Candidate>& a, const std::vector<Candidate>& b);

struct RunRecord {
  std::string qid;
  int rank = 0;
  std::string docid;
  double score = 0.0;
  std::string tag;
};

}  // namespace rankforge
