#include "rankforge/core/io.hpp"

#include <atomic>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "rankforge/core/error.hpp"

namespace rankforge::io {

namespace {

std::string id_string(const Json& value, std::string_view what, std::size_t line) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  throw ParseError(std::string(what) + " must be a string or an integer", line);
}

const Json& required(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(key, line);
  return *it;
}

Request request_from_json(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  const Json& q = required(j, "query", line);
  if (!q.is_object()) throw ParseError("\"query\" must be an object", line);
  Request request;
  const Json& text = required(q, "text", line);
  if (!text.is_string()) throw ParseError("query text must be a string", line);
  request.query.text = text.get<std::string>();
  request.query.qid = id_string(required(q, "qid", line), "qid", line);
  if (request.query.qid.empty()) throw ValidationError("line " + std::to_string(line) + ": empty qid");

  const Json& cands = required(j, "candidates", line);
  if (!cands.is_array()) throw ParseError("\"candidates\" must be an array", line);
  request.candidates.reserve(cands.size());
  for (const auto& c : cands) {
    if (!c.is_object()) throw ParseError("candidate must be an object", line);
    Candidate cand;
    cand.docid = id_string(required(c, "docid", line), "docid", line);
    const Json& score = required(c, "score", line);
    if (!score.is_number()) throw ParseError("candidate score must be a number", line);
    cand.score = score.get<double>();
    if (!std::isfinite(cand.score)) throw ParseError("candidate score must be finite", line);
    cand.doc = required(c, "doc", line);
    if (!has_text_field(cand.doc)) {
      throw ValidationError("line " + std::to_string(line) + ": candidate " + cand.docid +
                            " has no text field");
    }
    request.candidates.push_back(std::move(cand));
  }
  try {
    validate_request(request);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
  return request;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    fn(text.substr(pos, end - pos), line_no);
    pos = end + 1;
  }
}

}  // namespace

std::vector<Request> parse_requests_jsonl(std::istream& in) {
  std::vector<Request> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    out.push_back(request_from_json(j, line_no));
  }
  return out;
}

std::vector<Request> parse_requests_jsonl(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_requests_jsonl(in);
}

std::vector<Request> read_requests_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return parse_requests_jsonl(in);
}

Json request_to_json(const Query& query, const std::vector<Candidate>& candidates) {
  Json cands = Json::array();
  for (const auto& c : candidates) {
    cands.push_back(Json{{"doc", c.doc}, {"docid", c.docid}, {"score", c.score}});
  }
  return Json{{"query", {{"text", query.text}, {"qid", query.qid}}}, {"candidates", std::move(cands)}};
}

void write_results_jsonl(std::ostream& out, const std::vector<RankedResult>& results) {
  for (const auto& r : results) out << request_to_json(r.query, r.candidates).dump() << '\n';
  if (!out) throw IoError("failed to write results");
}

std::string results_to_jsonl(const std::vector<RankedResult>& results) {
  std::ostringstream out;
  write_results_jsonl(out, results);
  return out.str();
}

void write_requests_jsonl(std::ostream& out, const std::vector<Request>& requests) {
  for (const auto& r : requests) out << request_to_json(r.query, r.candidates).dump() << '\n';
  if (!out) throw IoError("failed to write requests");
}

std::string requests_to_jsonl(const std::vector<Request>& requests) {
  std::ostringstream out;
  write_requests_jsonl(out, requests);
  return out.str();
}

void write_trec_run(std::ostream& out, const std::vector<RankedResult>& results,
                    std::string_view tag) {
  if (tag.empty() || tag.find_first_of(" \t\r\n") != std::string_view::npos) {
    throw ValidationError("run tag must be non-empty and contain no whitespace");
  }
  char score[32];
  for (const auto& r : results) {
    int rank = 0;
    for (const auto& c : r.candidates) {
      ++rank;
      std::snprintf(score, sizeof(score), "%.6f", 1.0 / rank);
      out << r.query.qid << " Q0 " << c.docid << ' ' << rank << ' ' << score << ' ' << tag
          << '\n';
    }
  }
  if (!out) throw IoError("failed to write TREC run");
}

std::string trec_run_text(const std::vector<RankedResult>& results, std::string_view tag) {
  std::ostringstream out;
  write_trec_run(out, results, tag);
  return out.str();
}

std::vector<RunRecord> parse_trec_run(std::string_view text) {
  std::vector<RunRecord> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto cols = split_ws(line);
    if (cols.empty()) return;
    if (cols.size() != 6) {
      throw ParseError("expected 6 columns, found " + std::to_string(cols.size()), line_no);
    }
    RunRecord rec;
    rec.qid = std::string(cols[0]);
    rec.docid = std::string(cols[2]);
    rec.tag = std::string(cols[5]);
    std::string rank(cols[3]);
    char* end = nullptr;
    errno = 0;
    long r = std::strtol(rank.c_str(), &end, 10);
    if (end != rank.c_str() + rank.size() || errno != 0) {
      throw ParseError("non-integer rank \"" + rank + "\"", line_no);
    }
    rec.rank = static_cast<int>(r);
    std::string score(cols[4]);
    errno = 0;
    rec.score = std::strtod(score.c_str(), &end);
    if (end != score.c_str() + score.size() || errno == ERANGE || !std::isfinite(rec.score)) {
      throw ParseError("non-numeric score \"" + score + "\"", line_no);
    }
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<RunRecord> read_trec_run_file(const std::string& path) {
  return parse_trec_run(read_file(path));
}

std::vector<std::pair<std::string, std::vector<RunRecord>>> group_by_qid(
    const std::vector<RunRecord>& records) {
  std::vector<std::pair<std::string, std::vector<RunRecord>>> groups;
  std::map<std::string, std::size_t> slot;
  for (const auto& rec : records) {
    auto [it, inserted] = slot.emplace(rec.qid, groups.size());
    if (inserted) groups.emplace_back(rec.qid, std::vector<RunRecord>{});
    groups[it->second].second.push_back(rec);
  }
  return groups;
}

Json invocation_to_json(const InferenceInvocation& inv) {
  Json prompt = Json::array();
  for (const auto& m : inv.prompt) prompt.push_back({{"role", m.role}, {"content", m.content}});
  Json j{{"prompt", std::move(prompt)},
         {"response", inv.response},
         {"input_token_count", inv.input_token_count},
         {"output_token_count", inv.output_token_count},
         {"kind", to_string(inv.kind)},
         {"window", {inv.window_start, inv.window_end}}};
  if (inv.error) j["error"] = *inv.error;
  return j;
}

InferenceInvocation invocation_from_json(const Json& j) {
  InferenceInvocation inv;
  const Json& prompt = j.at("prompt");
  if (prompt.is_string()) {
    inv.prompt.push_back({"user", prompt.get<std::string>()});
  } else {
    for (const auto& m : prompt) {
      inv.prompt.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
  }
  inv.response = j.at("response").get<std::string>();
  inv.input_token_count = j.at("input_token_count").get<std::int64_t>();
  inv.output_token_count = j.at("output_token_count").get<std::int64_t>();
  if (inv.input_token_count < 0 || inv.output_token_count < 0) {
    throw ValidationError("negative token count in invocation history");
  }
  inv.kind = invocation_kind_from_string(j.value("kind", std::string("listwise")));
  if (auto w = j.find("window"); w != j.end()) {
    inv.window_start = w->at(0).get<std::size_t>();
    inv.window_end = w->at(1).get<std::size_t>();
  }
  if (auto e = j.find("error"); e != j.end() && !e->is_null()) inv.error = e->get<std::string>();
  return inv;
}

std::vector<QueryInvocations> invocations_of(const std::vector<RankedResult>& results) {
  std::vector<QueryInvocations> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.query, r.invocations_history});
  return out;
}

void write_invocations_json(std::ostream& out, const std::vector<RankedResult>& results) {
  Json arr = Json::array();
  for (const auto& r : results) {
    Json history = Json::array();
    for (const auto& inv : r.invocations_history) history.push_back(invocation_to_json(inv));
    arr.push_back({{"query", {{"text", r.query.text}, {"qid", r.query.qid}}},
                   {"invocations_history", std::move(history)}});
  }
  out << arr.dump(2) << '\n';
  if (!out) throw IoError("failed to write invocation history");
}

std::string invocations_json_text(const std::vector<RankedResult>& results) {
  std::ostringstream out;
  write_invocations_json(out, results);
  return out.str();
}

std::vector<QueryInvocations> parse_invocations_json(std::string_view text) {
  Json arr;
  try {
    arr = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed invocation history: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError("invocation history must be a JSON array");
  std::vector<QueryInvocations> out;
  try {
    for (const auto& entry : arr) {
      QueryInvocations q;
      const Json& query = entry.at("query");
      q.query.text = query.at("text").get<std::string>();
      q.query.qid = id_string(query.at("qid"), "qid", 0);
      for (const auto& inv : entry.at("invocations_history")) {
        q.invocations.push_back(invocation_from_json(inv));
      }
      out.push_back(std::move(q));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid invocation history: ") + e.what());
  }
  return out;
}

std::vector<QueryInvocations> read_invocations_file(const std::string& path) {
  return parse_invocations_json(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  static std::atomic<unsigned> counter{0};
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

}  // namespace rankforge::io
