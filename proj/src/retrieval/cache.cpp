#include "rankforge/retrieval/cache.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"
#include "rankforge/util/hash.hpp"

namespace rankforge::retrieval {

namespace {

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    out.push_back(ok ? c : '-');
  }
  return out.empty() ? "unnamed" : out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

bool matches_topics(const std::vector<Request>& requests, const std::vector<Topic>& topics) {
  if (requests.size() != topics.size()) return false;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (requests[i].query.qid != topics[i].qid || requests[i].query.text != topics[i].text) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string topics_digest(const std::vector<Topic>& topics) {
  std::uint64_t h = util::fnv1a64("");
  for (const auto& t : topics) {
    h = util::fnv1a64(t.qid, h);
    h = util::fnv1a64(std::string_view("\t", 1), h);
    h = util::fnv1a64(t.text, h);
    h = util::fnv1a64(std::string_view("\n", 1), h);
  }
  return util::hex64(h);
}

std::string cache_key(const RetrievalConfig& config, std::string_view dataset,
                      std::string_view digest) {
  return sanitize(config.method) + "_k" + std::to_string(config.k) + "_k1-" +
         number(config.bm25.k1) + "_b-" + number(config.bm25.b) + "_" + sanitize(dataset) + "_" +
         std::string(digest);
}

CacheOutcome load_or_retrieve(const std::string& cache_dir, const RetrievalConfig& config,
                              std::string_view dataset, const std::vector<Topic>& topics,
                              const std::function<std::vector<Request>()>& retrieve,
                              std::ostream& log) {
  namespace fs = std::filesystem;
  CacheOutcome outcome;
  outcome.path =
      (fs::path(cache_dir) / (cache_key(config, dataset, topics_digest(topics)) + ".jsonl"))
          .string();

  if (fs::exists(outcome.path)) {
    try {
      auto cached = io::read_requests_file(outcome.path);
      if (!matches_topics(cached, topics)) throw ParseError("cached queries do not match topics");
      outcome.requests = std::move(cached);
      outcome.hit = true;
      return outcome;
    } catch (const Error& e) {
      log << "warning: ignoring corrupt cache file " << outcome.path << ": " << e.what() << '\n';
      outcome.recovered = true;
    }
  }

  outcome.requests = retrieve();
  io::write_file_atomic(outcome.path, io::requests_to_jsonl(outcome.requests));
  return outcome;
}

}  // namespace rankforge::retrieval
