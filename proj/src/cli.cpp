#include "mgtd/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mgtd/agents.hpp"
#include "mgtd/errors.hpp"
#include "mgtd/eval.hpp"
#include "mgtd/gateway.hpp"
#include "mgtd/guidelines.hpp"
#include "mgtd/metrics.hpp"
#include "mgtd/prompts.hpp"
#include "mgtd/util.hpp"

#ifndef MGTD_DEFAULT_DATA_DIR
#define MGTD_DEFAULT_DATA_DIR "data"
#endif

namespace mgtd {

namespace {

struct CliOptions {
  std::string backend_url;
  std::string model = "deepseek-chat-v3-0324";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string cache_path;  // empty = caching disabled
  int concurrency = 4;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  std::string mock_script;
  bool no_multi_agent = false;
  bool no_guidelines = false;
  bool no_llm_router = false;
  bool no_adaptive_routing = false;
  bool no_steer = false;
  bool deterministic_meta = false;
  int bins = 10;
  std::string out_prefix;
  std::string data_dir;

  // detect
  std::string text;
  std::string text_file;
  // eval
  std::string dataset;
  // calibrate-demo
  std::string samples_file;
  // fit-threshold
  std::string scores_file;
  // guidelines
  std::string registry_override;
  bool registry_json = false;
};

std::string default_data_dir() {
  if (const char* env = std::getenv("MGTD_DATA_DIR"); env && *env) return env;
  return MGTD_DEFAULT_DATA_DIR;
}

PipelineConfig pipeline_config(const CliOptions& opt) {
  PipelineConfig cfg;
  cfg.multi_agent = !opt.no_multi_agent;
  cfg.use_guidelines = !opt.no_guidelines;
  cfg.llm_router = !opt.no_llm_router;
  cfg.adaptive_routing = !opt.no_adaptive_routing;
  cfg.steer_calibration = !opt.no_steer;
  cfg.deterministic_meta = opt.deterministic_meta;
  cfg.concurrency_limit = opt.concurrency;
  cfg.random_seed = opt.seed;
  cfg.model = opt.model;
  cfg.temperature = opt.temperature;
  return cfg;
}

std::unique_ptr<Session> make_session(const CliOptions& opt) {
  std::shared_ptr<Backend> backend;
  if (!opt.mock_script.empty()) {
    backend = std::make_shared<MockBackend>(MockBackend::from_file(opt.mock_script));
  } else if (!opt.backend_url.empty()) {
    HttpBackendOptions http;
    http.base_url = opt.backend_url;
    http.api_key_env = opt.api_key_env;
    backend = std::make_shared<HttpBackend>(std::move(http));
  } else {
    throw ConfigError("no backend configured: pass --backend-url or --mock <script-file>");
  }
  std::shared_ptr<ResponseCache> cache;
  if (!opt.cache_path.empty()) cache = std::make_shared<ResponseCache>(opt.cache_path);
  return std::make_unique<Session>(std::move(backend), std::move(cache), opt.concurrency);
}

GuidelineRegistry load_registry(const CliOptions& opt) {
  std::filesystem::path path = opt.registry_override.empty()
                                   ? std::filesystem::path(opt.data_dir) / "guidelines.json"
                                   : std::filesystem::path(opt.registry_override);
  return GuidelineRegistry::from_file(path);
}

PromptLibrary load_prompts(const CliOptions& opt) {
  return PromptLibrary::load(std::filesystem::path(opt.data_dir) / "templates");
}

std::string read_input_text(const CliOptions& opt) {
  if (!opt.text.empty()) return opt.text;
  if (!opt.text_file.empty()) return read_file(opt.text_file);
  std::ostringstream buf;
  buf << std::cin.rdbuf();
  std::string text = buf.str();
  if (trim(text).empty())
    throw DataError("no input text: pass --text, --text-file, or pipe text on stdin");
  return text;
}

std::vector<SteeredSample> read_samples(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("samples file: malformed JSON: " + std::string(e.what()));
  }
  const nlohmann::json& list = doc.is_array() ? doc : doc.at("samples");
  if (!list.is_array() || list.empty())
    throw DataError("samples file: expected a non-empty array of steered samples");

  std::vector<SteeredSample> samples;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& j = list[i];
    SteeredSample s;
    auto decision = parse_decision(j.at("decision").get<std::string>());
    if (!decision)
      throw DataError("samples file: entry #" + std::to_string(i + 1) + " has a bad decision");
    s.decision = *decision;
    s.confidence = j.at("confidence").get<double>();
    if (s.confidence < 0.0 || s.confidence > 1.0)
      throw DataError("samples file: entry #" + std::to_string(i + 1) +
                      " confidence outside [0,1]");
    if (j.contains("level")) {
      auto level = parse_steering_level(j["level"].get<std::string>());
      if (!level)
        throw DataError("samples file: entry #" + std::to_string(i + 1) + " has a bad level");
      s.level = *level;
    } else {
      // Listed order maps onto the steering ladder.
      s.level = steering_level_at(static_cast<int>(std::min<std::size_t>(i + 1, 5)));
    }
    if (j.contains("reasoning")) s.reasoning = j["reasoning"].get<std::string>();
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<LabeledScore> read_scores(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<LabeledScore> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      LabeledScore s;
      s.score = j.at("score").get<double>();
      auto label = parse_decision(j.at("label").get<std::string>());
      if (!label) throw DataError("bad label");
      s.label = *label;
      scores.push_back(s);
    } catch (const std::exception& e) {
      throw DataError("score file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (scores.empty()) throw DataError("score file is empty: " + path);
  return scores;
}

nlohmann::ordered_json calibration_to_json(const CalibrationResult& r) {
  nlohmann::ordered_json j;
  j["kappa_ans"] = r.kappa_ans;
  j["kappa_conf"] = r.kappa_conf;
  j["mu"] = r.mu;
  j["sigma"] = r.sigma;
  j["c_cal"] = r.c_cal;
  j["chosen_level"] = std::string(to_string(r.chosen_level));
  j["final_decision"] = std::string(to_string(r.final_decision));
  j["sample_count"] = r.sample_count;
  return j;
}

int cmd_detect(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const std::string text = read_input_text(opt);
  auto registry = load_registry(opt);
  auto prompts = load_prompts(opt);
  auto session = make_session(opt);
  Pipeline pipeline(registry, prompts, *session, pipeline_config(opt));

  MetaVerdict verdict = pipeline.detect(text);
  const std::string record = verdict.to_json().dump();
  out << record << "\n";
  if (!opt.out_prefix.empty()) write_file(opt.out_prefix + ".verdict.json", record + "\n");

  auto counters = session->counters();
  err << "requests=" << counters.requests << " cache_hits=" << counters.cache_hits
      << " backend_calls=" << counters.backend_calls << " reasks=" << counters.reasks << "\n";
  return kExitOk;
}

int cmd_eval(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  auto records = load_dataset(opt.dataset);
  if (records.empty()) throw DataError("dataset is empty: " + opt.dataset);
  auto registry = load_registry(opt);
  auto prompts = load_prompts(opt);
  auto session = make_session(opt);
  Pipeline pipeline(registry, prompts, *session, pipeline_config(opt));

  RunReport report = run_batch(records, pipeline, opt.bins);

  if (!opt.out_prefix.empty()) {
    write_verdicts(report, opt.out_prefix + ".verdicts.jsonl");
    write_metrics(report, opt.out_prefix + ".metrics.json");
    err << "wrote " << opt.out_prefix << ".verdicts.jsonl and " << opt.out_prefix
        << ".metrics.json\n";
  }

  out << format_summary(report);
  out << report.metrics.to_json().dump() << "\n";

  auto counters = session->counters();
  err << "requests=" << counters.requests << " cache_hits=" << counters.cache_hits
      << " backend_calls=" << counters.backend_calls << " reasks=" << counters.reasks << "\n";
  return kExitOk;
}

int cmd_calibrate_demo(const CliOptions& opt, std::ostream& out) {
  if (opt.samples_file.empty())
    throw DataError("calibrate-demo needs --samples <file>");
  auto samples = read_samples(opt.samples_file);
  auto result = calibrate(samples);
  out << calibration_to_json(result).dump(2) << "\n";
  return kExitOk;
}

int cmd_fit_threshold(const CliOptions& opt, std::ostream& out) {
  auto scores = read_scores(opt.scores_file);
  auto fit = fit_threshold(scores);
  nlohmann::ordered_json j;
  j["threshold"] = fit.threshold;
  j["val_accuracy"] = fit.val_accuracy;
  j["n"] = scores.size();
  out << j.dump() << "\n";
  return kExitOk;
}

int cmd_guidelines(const CliOptions& opt, std::ostream& out) {
  auto registry = load_registry(opt);
  if (opt.registry_json) {
    out << registry.serialize();
    return kExitOk;
  }
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& g : registry.entries()) counts[static_cast<int>(g.dimension)]++;
  out << "guidelines: " << registry.size() << " (Semantic " << counts[0] << ", Stylistic "
      << counts[1] << ", Structural " << counts[2] << ")\n";
  for (const auto& g : registry.entries())
    out << "  " << g.id << "  " << g.title << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-shot multi-agent detector for AI-generated text"};
  app.fallthrough();

  CliOptions opt;
  opt.data_dir = default_data_dir();

  app.set_config("--config", "", "Configuration file (TOML/INI); flags override file values");
  app.add_option("--backend-url", opt.backend_url,
                 "OpenAI-compatible chat-completion base URL (e.g. https://api.deepseek.com/v1)")
      ->capture_default_str();
  app.add_option("--model", opt.model, "Model identifier sent to the backend")
      ->capture_default_str();
  app.add_option("--api-key-env", opt.api_key_env,
                 "Environment variable holding the bearer token")
      ->capture_default_str();
  app.add_option("--cache", opt.cache_path,
                 "Reply cache file (JSON lines, append-only); empty disables caching")
      ->capture_default_str();
  app.add_option("--concurrency", opt.concurrency, "Maximum simultaneous backend calls")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--temperature", opt.temperature, "Sampling temperature")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", opt.seed, "Random seed (random routing, reproducibility)")
      ->capture_default_str();
  app.add_option("--mock", opt.mock_script,
                 "Scripted mock backend file; replaces the HTTP backend")
      ->capture_default_str();
  app.add_flag("--no-multi-agent", opt.no_multi_agent,
               "Single comprehensive agent over the whole guideline corpus");
  app.add_flag("--no-guidelines", opt.no_guidelines,
               "Replace the guideline corpus with a generic instruction");
  app.add_flag("--no-llm-router", opt.no_llm_router,
               "Random guideline activation instead of the LLM router");
  app.add_flag("--no-adaptive-routing", opt.no_adaptive_routing, "Activate every guideline");
  app.add_flag("--no-steer", opt.no_steer,
               "Single vanilla call per agent; raw confidence, no calibration");
  app.add_flag("--deterministic-meta", opt.deterministic_meta,
               "Offline confidence-weighted aggregation instead of the meta agent");
  app.add_option("--bins", opt.bins, "Calibration-error bin count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out_prefix,
                 "Output path prefix (<out>.verdicts.jsonl, <out>.metrics.json)")
      ->capture_default_str();
  app.add_option("--data-dir", opt.data_dir,
                 "Directory holding guidelines.json and templates/ (env MGTD_DATA_DIR)")
      ->capture_default_str();

  auto* detect = app.add_subcommand("detect", "Classify one text (argument, file, or stdin)");
  detect->add_option("--text", opt.text, "Text to classify");
  detect->add_option("--text-file", opt.text_file, "File whose contents are classified");

  auto* eval = app.add_subcommand("eval", "Run a JSONL dataset and report metrics");
  eval->add_option("--dataset", opt.dataset, "Dataset file (JSON lines)")->required();

  auto* calibrate_demo =
      app.add_subcommand("calibrate-demo", "Calibrate steered samples read from a file");
  calibrate_demo->add_option("--samples", opt.samples_file,
                             "JSON file with decision/confidence samples");

  auto* fit = app.add_subcommand("fit-threshold", "Scan validation scores for the best threshold");
  fit->add_option("--scores", opt.scores_file, "JSONL file of {score, label} records")->required();

  auto* guidelines = app.add_subcommand("guidelines", "List or validate the guideline registry");
  guidelines->add_option("--registry", opt.registry_override,
                         "Validate this registry file instead of the bundled one");
  guidelines->add_flag("--json", opt.registry_json, "Dump the registry as JSON");

  app.require_subcommand(0, 1);

  // CLI11 wants argc/argv; rebuild them with a program name in front.
  std::vector<const char*> argv;
  argv.push_back("mgtdetect");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (detect->parsed()) return cmd_detect(opt, out, err);
    if (eval->parsed()) return cmd_eval(opt, out, err);
    if (calibrate_demo->parsed()) return cmd_calibrate_demo(opt, out);
    if (fit->parsed()) return cmd_fit_threshold(opt, out);
    if (guidelines->parsed()) return cmd_guidelines(opt, out);
    err << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const PipelineError& e) {
    err << "pipeline error: " << e.what() << "\n";
    return kExitGateway;
  } catch (const GatewayError& e) {
    err << "gateway error: " << e.what() << "\n";
    return kExitGateway;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace mgtd
