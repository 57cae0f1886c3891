#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "rankforge/analysis/error_analysis.hpp"
#include "rankforge/backend/http_backend.hpp"
#include "rankforge/backend/oracle_backend.hpp"
#include "rankforge/core/error.hpp"
#include "rankforge/core/io.hpp"
#include "rankforge/eval/metrics.hpp"
#include "rankforge/ltr/losses.hpp"
#include "rankforge/parse/permutation.hpp"
#include "rankforge/prompt/render.hpp"
#include "rankforge/prompt/template.hpp"
#include "rankforge/rerank/reranker.hpp"
#include "rankforge/rerank/window_plan.hpp"
#include "rankforge/retrieval/bm25.hpp"
#include "rankforge/retrieval/cache.hpp"
#include "rankforge/retrieval/qrels.hpp"

namespace rankforge::cli {

namespace fs = std::filesystem;

namespace {

struct EvalOptions {
  std::string run;
  std::string qrels;
  std::vector<std::string> metrics{"ndcg@10"};
  bool per_query = false;
};

struct AnalyzeOptions {
  std::string invocations;
  std::string template_name = "rank_gpt";
  bool normalize = false;
  bool verbose = false;
  bool json = false;
};

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string timestamp;
  std::string out_dir;
  std::size_t parallel = 0;
};

struct RerankRun {
  std::vector<RankedResult> results;
  std::string run_dir;
  Json manifest;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is required");
  if (!fs::is_regular_file(path)) throw ConfigError(what + " not found: " + path);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    out += keep ? c : '-';
  }
  return out.empty() ? "none" : out;
}

bool valid_timestamp(std::string_view ts) {
  if (ts.size() != 15 || ts[8] != '-') return false;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i != 8 && !std::isdigit(static_cast<unsigned char>(ts[i]))) return false;
  }
  return true;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// ---- retrieve --------------------------------------------------------------

retrieval::RetrievalConfig retrieval_config(const RetrieveOptions& o) {
  retrieval::RetrievalConfig config;
  config.k = o.k;
  config.bm25 = {o.k1, o.b};
  config.validate();
  return config;
}

std::vector<Request> do_retrieve(const RetrieveOptions& o, std::ostream& log) {
  require_file(o.corpus, "corpus");
  require_file(o.topics, "topics");
  const auto config = retrieval_config(o);
  const auto topics = retrieval::read_topics_file(o.topics);
  auto retrieve = [&] {
    const auto index = retrieval::InvertedIndex::build(retrieval::read_corpus_file(o.corpus));
    return retrieval::retrieve_batch(topics, index, config);
  };
  if (o.cache_dir.empty()) return retrieve();
  const std::string dataset = o.dataset.empty() ? stem_of(o.corpus) : o.dataset;
  auto outcome = retrieval::load_or_retrieve(o.cache_dir, config, dataset, topics, retrieve, log);
  log << (outcome.hit ? "cache hit: " : "cache miss, stored: ") << outcome.path << '\n';
  return std::move(outcome.requests);
}

Json retrieve_manifest(const RetrieveOptions& o) {
  return {{"corpus", o.corpus},   {"topics", o.topics}, {"k", o.k},
          {"k1", o.k1},           {"b", o.b},           {"cache_dir", o.cache_dir},
          {"dataset", o.dataset}, {"method", "bm25"}};
}

// ---- rerank ----------------------------------------------------------------

std::string effective_model(const RerankOptions& o) {
  if (!o.model.empty()) return o.model;
  if (o.backend == "oracle") return "oracle";
  throw ConfigError("the http backend needs --model");
}

std::unique_ptr<backend::Backend> make_backend(const RerankOptions& o,
                                               const std::vector<Request>& requests) {
  if (o.backend == "oracle") {
    backend::OracleConfig oc;
    oc.seed = o.seed;
    oc.rates = {o.prose_rate, o.repetition_rate, o.omission_rate, o.garbage_rate};
    if (!o.truth.empty()) {
      require_file(o.truth, "truth qrels");
      for (const auto& [qid, docs] : retrieval::read_qrels_file(o.truth).judgments) {
        for (const auto& [docid, grade] : docs) oc.per_query[qid][docid] = grade;
      }
      oc.default_relevance = 0.0;
    } else {
      for (const auto& r : requests) {
        for (const auto& c : r.candidates) oc.per_query[r.query.qid][c.docid] = c.score;
      }
    }
    return std::make_unique<backend::OracleBackend>(std::move(oc));
  }
  if (o.backend == "http") {
    backend::BackendConfig bc;
    bc.base_url = o.base_url;
    bc.model = effective_model(o);
    bc.api_key_env = o.api_key_env;
    bc.temperature = o.temperature;
    bc.timeout_seconds = o.timeout;
    bc.max_retries = o.max_retries;
    bc.max_in_flight = std::max<std::size_t>(o.parallel, 1);
    return std::make_unique<backend::HttpBackend>(std::move(bc));
  }
  throw ConfigError("unknown backend \"" + o.backend + "\" (expected oracle or http)");
}

rerank::RerankConfig make_rerank_config(const RerankOptions& o) {
  rerank::RerankConfig c;
  c.strategy = rerank::strategy_from_string(o.strategy);
  c.listwise = {o.window, o.stride, o.passes};
  if (!o.template_file.empty()) {
    require_file(o.template_file, "template file");
    c.prompt_template = prompt::load_template_file(o.template_file);
  } else if (!o.template_name.empty()) {
    c.prompt_template = prompt::builtin_template(o.template_name);
  }
  c.context_budget = o.context;
  c.shots = o.shots;
  if (!o.shot_pool.empty()) {
    require_file(o.shot_pool, "shot pool");
    c.shot_pool = prompt::read_few_shot_file(o.shot_pool);
  }
  c.seed = o.seed;
  c.populate_invocations = o.populate_invocations;
  c.parallelism = o.parallel;
  c.validate();
  return c;
}

Json window_accounting(const rerank::RerankConfig& config, std::size_t top_k) {
  Json j = {{"top_k", top_k}};
  switch (config.strategy) {
    case rerank::Strategy::kListwise: {
      const auto& lw = config.listwise;
      const auto steps = rerank::slide_steps(top_k, lw.window, lw.stride);
      const auto per_pass = rerank::plan_windows(top_k, lw.window, lw.stride, 1).total_windows();
      j["slide_steps_per_pass"] = steps;
      j["invocations_per_pass"] = per_pass;
      j["invocations_per_query"] = per_pass * lw.passes;
      j["note"] =
          "slide_steps_per_pass = ceil((top_k - window) / stride) counts window moves after the "
          "first window of a pass; every pass also calls the model on that first window, so "
          "invocations_per_pass = slide_steps_per_pass + 1";
      break;
    }
    case rerank::Strategy::kPointwise:
      j["invocations_per_query"] = top_k;
      break;
    case rerank::Strategy::kPairwise:
      j["invocations_per_query"] = top_k * (top_k > 0 ? top_k - 1 : 0);
      break;
  }
  return j;
}

RerankRun do_rerank(RerankOptions o, const std::vector<Request>& requests, std::ostream& log) {
  if (o.tag.empty() || std::any_of(o.tag.begin(), o.tag.end(),
                                   [](unsigned char c) { return std::isspace(c); })) {
    throw ConfigError("run tag must be non-empty and contain no whitespace");
  }
  if (o.timestamp.empty()) {
    o.timestamp = utc_timestamp();
  } else if (!valid_timestamp(o.timestamp)) {
    throw ConfigError("timestamp \"" + o.timestamp + "\" is not YYYYMMDD-HHMMSS");
  }
  if (o.dataset.empty()) o.dataset = o.requests.empty() ? "requests" : stem_of(o.requests);
  o.model = effective_model(o);
  const auto config = make_rerank_config(o);
  auto backend = make_backend(o, requests);

  std::size_t top_k = 0;
  for (const auto& r : requests) top_k = std::max(top_k, r.candidates.size());

  RerankRun run;
  run.results = rerank::rerank_batch(requests, *backend, config);
  run.run_dir = (fs::path(o.out_dir) / run_name(o, top_k)).string();

  std::size_t errors = 0, malformed = 0, invocations = 0;
  for (const auto& r : run.results) {
    errors += r.error_count;
    malformed += r.malformed_count;
    invocations += r.invocations_history.size();
  }

  Json backend_json = {{"kind", o.backend}, {"model", o.model}};
  if (o.backend == "oracle") {
    backend_json["truth"] = o.truth;
    backend_json["seed"] = o.seed;
    backend_json["rates"] = {{"extra_prose", o.prose_rate},
                             {"repetition", o.repetition_rate},
                             {"omission", o.omission_rate},
                             {"garbage", o.garbage_rate}};
  } else {
    backend_json["base_url"] = o.base_url;
    backend_json["api_key_env"] = o.api_key_env;
    backend_json["temperature"] = o.temperature;
    backend_json["timeout_seconds"] = o.timeout;
    backend_json["max_retries"] = o.max_retries;
    backend_json["max_in_flight"] = std::max<std::size_t>(o.parallel, 1);
  }
  run.manifest = {
      {"run_name", fs::path(run.run_dir).filename().string()},
      {"timestamp", o.timestamp},
      {"requests", o.requests},
      {"dataset", o.dataset},
      {"retriever", o.retriever},
      {"rerank",
       {{"strategy", o.strategy},
        {"window", o.window},
        {"stride", o.stride},
        {"passes", o.passes},
        {"template", config.template_for_strategy().name},
        {"template_file", o.template_file},
        {"context", o.context},
        {"shots", o.shots},
        {"shot_pool", o.shot_pool},
        {"seed", o.seed},
        {"populate_invocations", o.populate_invocations},
        {"parallel", o.parallel},
        {"tag", o.tag}}},
      {"backend", backend_json},
      {"window_accounting", window_accounting(config, top_k)},
      {"summary",
       {{"queries", run.results.size()},
        {"invocations_recorded", invocations},
        {"backend_errors", errors},
        {"malformed_replies", malformed}}},
  };

  const fs::path dir(run.run_dir);
  io::write_file_atomic((dir / "rerank_results.jsonl").string(), io::results_to_jsonl(run.results));
  io::write_file_atomic((dir / "rerank_results.txt").string(), io::trec_run_text(run.results, o.tag));
  io::write_file_atomic((dir / "inference_invocations_history.json").string(),
                        io::invocations_json_text(run.results));
  io::write_file_atomic((dir / "manifest.json").string(), run.manifest.dump(2) + "\n");

  log << "reranked " << run.results.size() << " queries";
  if (errors) log << " (" << errors << " backend errors)";
  log << '\n';
  return run;
}

// ---- eval ------------------------------------------------------------------

std::vector<eval::MetricSpec> parse_metrics(const std::vector<std::string>& names) {
  std::vector<eval::MetricSpec> specs;
  for (const auto& n : names) specs.push_back(eval::MetricSpec::parse(n));
  if (specs.empty()) throw ConfigError("at least one metric is required");
  return specs;
}

void report_coverage(const eval::EvalReport& report, std::ostream& err) {
  if (!report.unjudged_qids.empty()) {
    err << "warning: " << report.unjudged_qids.size()
        << " run queries have no judgments and were skipped: " << join(report.unjudged_qids, ", ")
        << '\n';
  }
  if (!report.missing_qids.empty()) {
    err << "warning: " << report.missing_qids.size()
        << " judged queries are absent from the run and score 0: "
        << join(report.missing_qids, ", ") << '\n';
  }
}

void print_report(const eval::EvalReport& report, bool per_query, std::ostream& out) {
  const std::string name = report.spec.str();
  if (per_query) {
    for (const auto& [qid, value] : report.per_query) {
      out << name << '\t' << qid << '\t' << fixed4(value) << '\n';
    }
  }
  out << name << '\t' << "all" << '\t' << fixed4(report.mean) << '\n';
}

int do_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.run, "run");
  require_file(o.qrels, "qrels");
  const auto specs = parse_metrics(o.metrics);
  const auto qrels = retrieval::read_qrels_file(o.qrels);
  const bool jsonl = fs::path(o.run).extension() == ".jsonl";
  std::vector<Request> requests;
  std::vector<RunRecord> records;
  if (jsonl) {
    requests = io::read_requests_file(o.run);
  } else {
    records = io::read_trec_run_file(o.run);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto report = jsonl ? eval::evaluate(requests, qrels, specs[i])
                              : eval::evaluate(records, qrels, specs[i]);
    if (i == 0) report_coverage(report, err);
    print_report(report, o.per_query, out);
  }
  return kExitOk;
}

// ---- analyze / loss --------------------------------------------------------

int do_analyze(const AnalyzeOptions& o, std::ostream& out) {
  std::string path = o.invocations;
  if (fs::is_directory(path)) path = (fs::path(path) / "inference_invocations_history.json").string();
  require_file(path, "invocation history");
  const auto grammar = parse::grammar_from_name(o.template_name);
  const auto histories = io::read_invocations_file(path);
  const auto dist = analysis::count_errors(histories, grammar, o.verbose);
  if (o.json) {
    Json j = dist.to_json(o.normalize);
    if (o.verbose) {
      Json offending = Json::array();
      for (const auto& r : dist.offending) {
        offending.push_back({{"qid", r.qid},
                             {"window", {r.window_start, r.window_end}},
                             {"category", parse::to_string(r.category)},
                             {"response", r.response}});
      }
      j = {{"distribution", j}, {"offending", offending}};
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << dist.to_table(o.normalize);
  if (o.verbose) {
    for (const auto& r : dist.offending) {
      out << "\nqid " << r.qid << " window [" << r.window_start << ", " << r.window_end << ") "
          << parse::to_string(r.category) << ":\n"
          << r.response << '\n';
    }
  }
  return kExitOk;
}

std::vector<double> number_array(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(key, 0);
  if (!it->is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) throw ParseError(std::string("\"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int do_loss(const std::string& input, std::ostream& out) {
  require_file(input, "loss input");
  Json j;
  try {
    j = Json::parse(io::read_file(input));
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("loss input is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("loss input must be a JSON object");
  const auto s = number_array(j, "scores");
  const auto r = number_array(j, "labels");
  const auto loss = ltr::ranknet_loss(s, r);
  Json result = {{"ranknet", loss.value}, {"gradient", loss.gradient}};
  if (j.contains("lambda")) {
    const double lm = j.value("lm_loss", 0.0);
    result["lm_loss"] = lm;
    result["lambda"] = j["lambda"].get<double>();
    result["combined"] = ltr::combined_loss(lm, loss.value, j["lambda"].get<double>());
  }
  out << result.dump(2) << '\n';
  return kExitOk;
}

// ---- run -------------------------------------------------------------------

const std::set<std::string> kRetrieveKeys = {"corpus", "topics",    "k",      "k1",
                                             "b",      "cache_dir", "dataset"};
const std::set<std::string> kRerankKeys = {
    "strategy",   "backend",         "model",         "window",       "stride",
    "passes",     "template",        "template_file", "context",      "shots",
    "shot_pool",  "seed",            "populate_invocations",          "parallel",
    "truth",      "prose_rate",      "repetition_rate",               "omission_rate",
    "garbage_rate", "base_url",      "api_key_env",   "temperature",  "timeout",
    "max_retries"};
const std::set<std::string> kEvalKeys = {"qrels", "metric", "per_query"};
const std::set<std::string> kOutputKeys = {"dir", "tag", "timestamp"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int do_run(const RunOptions& ro, std::ostream& out, std::ostream& err) {
  auto cfg = ConfigFile::read(ro.config);
  for (const auto& o : ro.overrides) cfg.apply_override(o);
  for (const char* s : {"retrieve", "rerank", "eval", "output"}) cfg.require_section(s);
  cfg.check_keys("retrieve", kRetrieveKeys);
  cfg.check_keys("rerank", kRerankKeys);
  cfg.check_keys("eval", kEvalKeys);
  cfg.check_keys("output", kOutputKeys);

  RetrieveOptions rt;
  rt.corpus = cfg.get_path("retrieve", "corpus");
  rt.topics = cfg.get_path("retrieve", "topics");
  rt.k = cfg.get_size("retrieve", "k", rt.k);
  rt.k1 = cfg.get_double("retrieve", "k1", rt.k1);
  rt.b = cfg.get_double("retrieve", "b", rt.b);
  rt.cache_dir = cfg.get_path("retrieve", "cache_dir");
  rt.dataset = cfg.get_string("retrieve", "dataset", stem_of(rt.corpus));

  RerankOptions rr;
  rr.strategy = cfg.get_string("rerank", "strategy", rr.strategy);
  rr.backend = cfg.get_string("rerank", "backend", rr.backend);
  rr.model = cfg.get_string("rerank", "model", rr.model);
  rr.window = cfg.get_size("rerank", "window", rr.window);
  rr.stride = cfg.get_size("rerank", "stride", rr.stride);
  rr.passes = cfg.get_size("rerank", "passes", rr.passes);
  rr.template_name = cfg.get_string("rerank", "template", rr.template_name);
  rr.template_file = cfg.get_path("rerank", "template_file");
  rr.context = cfg.get_int("rerank", "context", rr.context);
  rr.shots = cfg.get_size("rerank", "shots", rr.shots);
  rr.shot_pool = cfg.get_path("rerank", "shot_pool");
  rr.seed = static_cast<std::uint64_t>(cfg.get_int("rerank", "seed", 0));
  rr.populate_invocations = cfg.get_bool("rerank", "populate_invocations", false);
  rr.parallel = ro.parallel ? ro.parallel : cfg.get_size("rerank", "parallel", rr.parallel);
  rr.prose_rate = cfg.get_double("rerank", "prose_rate", 0.0);
  rr.repetition_rate = cfg.get_double("rerank", "repetition_rate", 0.0);
  rr.omission_rate = cfg.get_double("rerank", "omission_rate", 0.0);
  rr.garbage_rate = cfg.get_double("rerank", "garbage_rate", 0.0);
  rr.base_url = cfg.get_string("rerank", "base_url", rr.base_url);
  rr.api_key_env = cfg.get_string("rerank", "api_key_env", rr.api_key_env);
  rr.temperature = cfg.get_double("rerank", "temperature", rr.temperature);
  rr.timeout = cfg.get_double("rerank", "timeout", rr.timeout);
  rr.max_retries = static_cast<int>(cfg.get_int("rerank", "max_retries", rr.max_retries));
  rr.dataset = rt.dataset;
  rr.retriever = "bm25";
  rr.out_dir = !ro.out_dir.empty() ? ro.out_dir : cfg.get_path("output", "dir", "runs");
  rr.tag = cfg.get_string("output", "tag", rr.tag);
  rr.timestamp = !ro.timestamp.empty() ? ro.timestamp : cfg.get_string("output", "timestamp", "");

  EvalOptions ev;
  ev.qrels = cfg.get_path("eval", "qrels");
  if (auto m = cfg.get("eval", "metric")) ev.metrics = split_list(*m);
  ev.per_query = cfg.get_bool("eval", "per_query", false);
  // A perfect oracle: without explicit truth the oracle answers from the qrels.
  rr.truth = cfg.get_path("rerank", "truth", rr.backend == "oracle" ? ev.qrels : "");

  const auto specs = parse_metrics(ev.metrics);
  require_file(ev.qrels, "qrels");

  std::string stage = "retrieve";
  try {
    const auto requests = do_retrieve(rt, err);
    stage = "rerank";
    auto run = do_rerank(rr, requests, err);
    stage = "eval";
    const auto qrels = retrieval::read_qrels_file(ev.qrels);
    io::write_file_atomic((fs::path(run.run_dir) / "first_stage.txt").string(),
                          io::trec_run_text(
                              [&] {
                                std::vector<RankedResult> first;
                                for (const auto& r : requests) {
                                  first.push_back(make_ranked_result(r, r.candidates));
                                }
                                return first;
                              }(),
                              rr.tag + "-first-stage"));

    Json evaluation = Json::object();
    char line[128];
    std::snprintf(line, sizeof line, "%-16s %12s %12s\n", "metric", "first-stage", "reranked");
    out << line;
    for (const auto& spec : specs) {
      const auto before = eval::evaluate(requests, qrels, spec);
      const auto after = eval::evaluate(run.results, qrels, spec);
      if (&spec == &specs.front()) report_coverage(after, err);
      std::snprintf(line, sizeof line, "%-16s %12s %12s\n", spec.str().c_str(),
                    fixed4(before.mean).c_str(), fixed4(after.mean).c_str());
      out << line;
      evaluation[spec.str()] = {{"first_stage", before.mean}, {"reranked", after.mean}};
      if (ev.per_query) {
        print_report(before, true, err);
        print_report(after, true, err);
      }
    }
    run.manifest["retrieve"] = retrieve_manifest(rt);
    run.manifest["eval"] = {{"qrels", ev.qrels}, {"metrics", ev.metrics}};
    run.manifest["evaluation"] = evaluation;
    run.manifest["config"] = ro.config;
    io::write_file_atomic((fs::path(run.run_dir) / "manifest.json").string(),
                          run.manifest.dump(2) + "\n");
    out << "run directory: " << run.run_dir << '\n';
  } catch (const Error& e) {
    err << "error: " << stage << ": " << e.what() << '\n';
    const bool usage = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const CredentialError*>(&e);
    return usage ? kExitUsage : kExitFailure;
  }
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const CredentialError*>(&e)) {
    return kExitUsage;
  }
  return kExitFailure;
}

const CLI::Validator kAtLeastOne(
    [](std::string& value) -> std::string {
      long long v = 0;
      try {
        v = std::stoll(value);
      } catch (const std::exception&) {
        return "must be an integer >= 1";
      }
      return v >= 1 ? std::string() : "must be >= 1";
    },
    ">= 1");

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::string run_name(const RerankOptions& o, std::size_t top_k) {
  return sanitize(o.dataset) + "_" + sanitize(o.retriever) + "_" +
         sanitize(o.model.empty() ? o.backend : o.model) + "_" + sanitize(o.strategy) + "_M" +
         std::to_string(o.window) + "_N" + std::to_string(o.stride) + "_top" +
         std::to_string(top_k) + "_" + sanitize(o.timestamp);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieve, rerank and evaluate ranked lists with prompt-decoder rerankers.",
               "rankforge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RetrieveOptions rt;
  auto* retrieve = app.add_subcommand("retrieve", "BM25 first-stage retrieval to request JSONL");
  retrieve->add_option("--corpus", rt.corpus, "Corpus JSONL")->required();
  retrieve->add_option("--topics", rt.topics, "Topics TSV (qid<TAB>text)")->required();
  retrieve->add_option("--k", rt.k, "Candidates per query")->check(kAtLeastOne)
      ->capture_default_str();
  retrieve->add_option("--k1", rt.k1, "BM25 k1")->capture_default_str();
  retrieve->add_option("--b", rt.b, "BM25 b")->capture_default_str();
  retrieve->add_option("--out", rt.out, "Output request JSONL")->required();
  retrieve->add_option("--cache-dir", rt.cache_dir, "Retrieval cache directory");
  retrieve->add_option("--dataset", rt.dataset, "Dataset name used in cache keys");

  RerankOptions rr;
  auto* rerank_cmd = app.add_subcommand("rerank", "Rerank request JSONL into a run directory");
  rerank_cmd->add_option("--requests", rr.requests, "Request JSONL")->required();
  rerank_cmd->add_option("--strategy", rr.strategy)
      ->check(CLI::IsMember({"listwise", "pointwise", "pairwise"}))
      ->capture_default_str();
  rerank_cmd->add_option("--backend", rr.backend)
      ->check(CLI::IsMember({"oracle", "http"}))
      ->capture_default_str();
  rerank_cmd->add_option("--model", rr.model, "Model name sent to the backend");
  rerank_cmd->add_option("--window", rr.window, "Window size M")->check(kAtLeastOne)
      ->capture_default_str();
  rerank_cmd->add_option("--stride", rr.stride, "Stride N")->check(kAtLeastOne)
      ->capture_default_str();
  rerank_cmd->add_option("--passes", rr.passes)->check(kAtLeastOne)->capture_default_str();
  rerank_cmd->add_option("--template", rr.template_name,
                         "Built-in template (rank_gpt, rank_gpt_apeer, lrl, pointwise, pairwise)");
  rerank_cmd->add_option("--template-file", rr.template_file, "Template asset file");
  rerank_cmd->add_option("--context", rr.context, "Context budget in tokens")
      ->check(kAtLeastOne)
      ->capture_default_str();
  rerank_cmd->add_option("--shots", rr.shots, "Few-shot examples per prompt")->capture_default_str();
  rerank_cmd->add_option("--shot-pool", rr.shot_pool, "Few-shot JSONL pool");
  rerank_cmd->add_option("--seed", rr.seed)->capture_default_str();
  rerank_cmd->add_option("--out-dir", rr.out_dir)->capture_default_str();
  rerank_cmd->add_flag("--populate-invocations", rr.populate_invocations,
                       "Record every prompt and response");
  rerank_cmd->add_option("--parallel", rr.parallel, "Concurrent requests / in-flight limit")
      ->check(kAtLeastOne)
      ->capture_default_str();
  rerank_cmd->add_option("--timestamp", rr.timestamp, "Run timestamp YYYYMMDD-HHMMSS (UTC)");
  rerank_cmd->add_option("--dataset", rr.dataset, "Dataset name for the run directory");
  rerank_cmd->add_option("--retriever", rr.retriever)->capture_default_str();
  rerank_cmd->add_option("--tag", rr.tag, "TREC run tag")->capture_default_str();
  rerank_cmd->add_option("--truth", rr.truth, "Oracle relevance from a qrels file");
  rerank_cmd->add_option("--prose-rate", rr.prose_rate)->check(CLI::Range(0.0, 1.0));
  rerank_cmd->add_option("--repetition-rate", rr.repetition_rate)->check(CLI::Range(0.0, 1.0));
  rerank_cmd->add_option("--omission-rate", rr.omission_rate)->check(CLI::Range(0.0, 1.0));
  rerank_cmd->add_option("--garbage-rate", rr.garbage_rate)->check(CLI::Range(0.0, 1.0));
  rerank_cmd->add_option("--base-url", rr.base_url, "Chat-completions server");
  rerank_cmd->add_option("--api-key-env", rr.api_key_env)->capture_default_str();
  rerank_cmd->add_option("--temperature", rr.temperature)->capture_default_str();
  rerank_cmd->add_option("--timeout", rr.timeout, "Request timeout in seconds")
      ->capture_default_str();
  rerank_cmd->add_option("--max-retries", rr.max_retries)->capture_default_str();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a TREC run (or request JSONL) against qrels");
  eval_cmd->add_option("--run", ev.run, "TREC run file, or .jsonl in list order")->required();
  eval_cmd->add_option("--qrels", ev.qrels)->required();
  eval_cmd->add_option("--metric", ev.metrics, "ndcg@K | map@K[:rel=N] | recall@K[:rel=N]")
      ->capture_default_str();
  eval_cmd->add_flag("--per-query", ev.per_query);

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Error distribution of listwise responses");
  analyze->add_option("--invocations", an.invocations, "History JSON or run directory")
      ->required();
  analyze->add_option("--template", an.template_name, "Grammar to re-parse with")
      ->capture_default_str();
  analyze->add_flag("--normalize", an.normalize, "Report percentages");
  analyze->add_flag("--verbose", an.verbose, "List offending responses");
  analyze->add_flag("--json", an.json, "Emit JSON");

  std::string loss_input;
  auto* loss = app.add_subcommand("loss", "RankNet and combined loss for a JSON input");
  loss->add_option("--input", loss_input, "{\"scores\", \"labels\", \"lambda\", \"lm_loss\"}")
      ->required();

  RunOptions ro;
  auto* run = app.add_subcommand("run", "retrieve -> rerank -> eval from one config file");
  run->add_option("--config", ro.config)->required();
  run->add_option("--set", ro.overrides, "Override section.key=value");
  run->add_option("--timestamp", ro.timestamp);
  run->add_option("--out-dir", ro.out_dir);
  run->add_option("--parallel", ro.parallel)->check(kAtLeastOne);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (retrieve->parsed()) {
      const auto requests = do_retrieve(rt, err);
      io::write_file_atomic(rt.out, io::requests_to_jsonl(requests));
      return kExitOk;
    }
    if (rerank_cmd->parsed()) {
      require_file(rr.requests, "requests");
      const auto requests = io::read_requests_file(rr.requests);
      const auto result = do_rerank(rr, requests, err);
      out << result.run_dir << '\n';
      return kExitOk;
    }
    if (eval_cmd->parsed()) return do_eval(ev, out, err);
    if (analyze->parsed()) return do_analyze(an, out);
    if (loss->parsed()) return do_loss(loss_input, out);
    if (run->parsed()) return do_run(ro, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace rankforge::cli
