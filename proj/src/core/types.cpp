#include "rankforge/core/types.hpp"

#include <algorithm>
#include <array>
#include <string_view>
#include <unordered_set>

#include "rankforge/core/error.hpp"

namespace rankforge {

namespace {

constexpr std::array<std::string_view, 5> kBodyFields = {"segment", "contents", "content",
                                                         "text", "body"};

std::string string_field(const Json& doc, std::string_view key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

}  // namespace

std::string passage_text(const Json& doc) {
  if (!doc.is_object()) return {};
  std::string body;
  for (auto key : kBodyFields) {
    if (doc.contains(key)) {
      body = string_field(doc, key);
      break;
    }
  }
  std::string title = string_field(doc, "title");
  if (title.empty()) return body;
  if (body.empty()) return title;
  return title + " " + body;
}

bool has_text_field(const Json& doc) {
  if (!doc.is_object()) return false;
  if (doc.contains("title")) return true;
  return std::any_of(kBodyFields.begin(), kBodyFields.end(),
                     [&](std::string_view key) { return doc.contains(key); });
}

void validate_request(const Request& request) {
  if (request.query.qid.empty()) throw ValidationError("request has an empty qid");
  std::unordered_set<std::string> seen;
  seen.reserve(request.candidates.size());
  for (const auto& c : request.candidates) {
    if (!seen.insert(c.docid).second) {
      throw ValidationError("duplicate docid \"" + c.docid + "\" in request qid " +
                            request.query.qid);
    }
  }
}

std::string to_string(InvocationKind kind) {
  switch (kind) {
    case InvocationKind::kListwise:
      return "listwise";
    case InvocationKind::kPointwise:
      return "pointwise";
    case InvocationKind::kPairwise:
      return "pairwise";
  }
  return "listwise";
}

InvocationKind invocation_kind_from_string(const std::string& name) {
  if (name == "listwise") return InvocationKind::kListwise;
  if (name == "pointwise") return InvocationKind::kPointwise;
  if (name == "pairwise") return InvocationKind::kPairwise;
  throw ValidationError("unknown invocation kind \"" + name + "\"");
}

bool is_docid_permutation(const std::vector<Candidate>& a, const std::vector<Candidate>& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::string_view> lhs, rhs;
  lhs.reserve(a.size());
  rhs.reserve(b.size());
  for (const auto& c : a) lhs.push_back(c.docid);
  for (const auto& c : b) rhs.push_back(c.docid);
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  return lhs == rhs;
}

RankedResult make_ranked_result(const Request& source, std::vector<Candidate> reordered,
                                std::vector<InferenceInvocation> history,
                                std::size_t error_count) {
  if (!is_docid_permutation(source.candidates, reordered)) {
    throw ValidationError("reranked candidates for qid " + source.query.qid +
                          " are not a permutation of the request's candidates");
  }
  return RankedResult{source.query, std::move(reordered), std::move(history), error_count};
}

}  // namespace rankforge
