#include "mgtd/eval.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "mgtd/errors.hpp"
#include "mgtd/util.hpp"

namespace mgtd {

namespace {

struct ScoredRecord {
  Decision label;
  Decision decision;
  double confidence;
  double score;
};

// Single metric path shared by run_batch and offline recomputation, so the
// persisted report is self-consistent by construction.
MetricsReport compute_metrics(const std::vector<ScoredRecord>& rows, int ece_bins) {
  if (rows.empty()) throw DataError("metrics: no verdicts to score");

  MetricsReport m;
  m.n = static_cast<int>(rows.size());
  m.bins = ece_bins;

  std::vector<std::pair<Decision, Decision>> pairs;
  std::vector<LabeledScore> scores;
  std::vector<std::pair<double, bool>> conf_correct;
  std::vector<double> conf, correct;
  bool has_ai = false, has_human = false;
  for (const auto& r : rows) {
    pairs.emplace_back(r.decision, r.label);
    scores.push_back({r.score, r.label});
    const bool ok = r.decision == r.label;
    conf_correct.emplace_back(r.confidence, ok);
    conf.push_back(r.confidence);
    correct.push_back(ok ? 1.0 : 0.0);
    (r.label == Decision::AI ? has_ai : has_human) = true;
  }

  m.accuracy = accuracy(pairs);
  if (has_ai && has_human) m.auroc = auroc(scores);
  m.ece = ece(conf_correct, ece_bins);
  if (rows.size() >= 2) m.pearson_r = pearson_r(conf, correct);
  return m;
}

nlohmann::ordered_json verdict_line(const RecordVerdict& rv) {
  nlohmann::ordered_json j;
  j["id"] = rv.id;
  j["label"] = std::string(to_string(rv.label));
  j["score"] = rv.score;
  const nlohmann::ordered_json fields = rv.verdict.to_json();  // keep alive while iterating
  for (const auto& [key, value] : fields.items()) j[key] = value;
  return j;
}

}  // namespace

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path.string());

  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("dataset " + where + ": malformed JSON: " + e.what());
    }

    DatasetRecord rec;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
      throw DataError("dataset " + where + ": missing 'id'");
    rec.id = j["id"].get<std::string>();
    if (!j.contains("text") || !j["text"].is_string() || j["text"].get<std::string>().empty())
      throw DataError("dataset " + where + ": missing or empty 'text'");
    rec.text = j["text"].get<std::string>();
    if (!j.contains("label") || !j["label"].is_string())
      throw DataError("dataset " + where + ": missing 'label'");
    auto label = parse_decision(j["label"].get<std::string>());
    if (!label)
      throw DataError("dataset " + where + ": label must be 'AI' or 'Human', got '" +
                      j["label"].get<std::string>() + "'");
    rec.label = *label;
    if (j.contains("source_model") && j["source_model"].is_string())
      rec.source_model = j["source_model"].get<std::string>();
    if (j.contains("dataset_name") && j["dataset_name"].is_string())
      rec.dataset_name = j["dataset_name"].get<std::string>();

    if (!ids.insert(rec.id).second)
      throw DataError("dataset " + where + ": duplicate id '" + rec.id + "'");
    records.push_back(std::move(rec));
  }
  return records;
}

RunReport run_batch(const std::vector<DatasetRecord>& records, const Pipeline& pipeline,
                    int ece_bins) {
  if (records.empty()) throw std::invalid_argument("run_batch: empty record list");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::optional<RecordVerdict>> slots(records.size());
  std::vector<std::optional<RecordFailure>> failure_slots(records.size());

  parallel_for(records.size(), pipeline.config().concurrency_limit, [&](std::size_t i) {
    const auto r0 = std::chrono::steady_clock::now();
    try {
      MetaVerdict verdict = pipeline.detect(records[i].text);
      RecordVerdict rv;
      rv.id = records[i].id;
      rv.label = records[i].label;
      rv.score = verdict_to_score(verdict.decision, verdict.confidence);
      rv.verdict = std::move(verdict);
      rv.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - r0)
                           .count();
      slots[i] = std::move(rv);
    } catch (const AuthError&) {
      throw;  // configuration-level: abort the whole run
    } catch (const ConfigError&) {
      throw;
    } catch (const GatewayError& e) {
      failure_slots[i] = RecordFailure{records[i].id, e.what()};
    } catch (const PipelineError& e) {
      failure_slots[i] = RecordFailure{records[i].id, e.what()};
    }
  });

  RunReport report;
  std::vector<ScoredRecord> rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (slots[i]) {
      const auto& rv = *slots[i];
      rows.push_back({rv.label, rv.verdict.decision, rv.verdict.confidence, rv.score});
      report.verdicts.push_back(std::move(*slots[i]));
    } else if (failure_slots[i]) {
      report.failures.push_back(std::move(*failure_slots[i]));
    }
  }

  if (rows.empty()) {
    std::string detail = report.failures.empty() ? "" : " (first: " +
                         report.failures.front().message + ")";
    throw DataError("run produced no verdicts; " + std::to_string(report.failures.size()) +
                    " record(s) failed" + detail);
  }

  const auto& cfg = pipeline.config();
  report.config_snapshot = {{"model", cfg.model},
                            {"temperature", cfg.temperature},
                            {"seed", cfg.random_seed},
                            {"concurrency_limit", cfg.concurrency_limit},
                            {"bins", ece_bins},
                            {"multi_agent", cfg.multi_agent},
                            {"use_guidelines", cfg.use_guidelines},
                            {"llm_router", cfg.llm_router},
                            {"adaptive_routing", cfg.adaptive_routing},
                            {"steer_calibration", cfg.steer_calibration},
                            {"deterministic_meta", cfg.deterministic_meta}};
  report.metrics = compute_metrics(rows, ece_bins);
  report.total_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  report.timestamp = now_rfc3339();
  return report;
}

void write_verdicts(const RunReport& report, const std::filesystem::path& path) {
  std::string out;
  for (const auto& rv : report.verdicts) out += verdict_line(rv).dump() + "\n";
  write_file(path, out);
}

void write_metrics(const RunReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"id", f.id}, {"message", f.message}});

  nlohmann::ordered_json j;
  j["timestamp"] = report.timestamp;
  j["config"] = report.config_snapshot;
  j["metrics"] = report.metrics.to_json();
  j["counts"] = {{"verdicts", report.verdicts.size()}, {"failures", report.failures.size()}};
  j["failures"] = std::move(failures);
  j["timing"] = {{"total_ms", report.total_ms}};
  write_file(path, j.dump(2) + "\n");
}

MetricsReport metrics_from_verdicts_file(const std::filesystem::path& path, int ece_bins) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open verdicts file: " + path.string());
  std::vector<ScoredRecord> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ScoredRecord row{};
      row.label = *parse_decision(j.at("label").get<std::string>());
      row.decision = *parse_decision(j.at("decision").get<std::string>());
      row.confidence = j.at("confidence").get<double>();
      row.score = j.at("score").get<double>();
      rows.push_back(row);
    } catch (const std::exception& e) {
      throw DataError("verdicts " + path.filename().string() + ":" + std::to_string(lineno) +
                      ": " + e.what());
    }
  }
  return compute_metrics(rows, ece_bins);
}

std::string format_summary(const RunReport& report) {
  std::ostringstream out;
  out << "records:   " << (report.verdicts.size() + report.failures.size()) << "\n"
      << "verdicts:  " << report.verdicts.size() << "\n"
      << "failures:  " << report.failures.size() << "\n"
      << "accuracy:  " << report.metrics.accuracy << "\n"
      << "auroc:     ";
  if (report.metrics.auroc)
    out << *report.metrics.auroc;
  else
    out << "n/a (single-class labels)";
  out << "\n"
      << "ece:       " << report.metrics.ece << " (" << report.metrics.bins << " bins)\n"
      << "pearson_r: ";
  if (report.metrics.pearson_r)
    out << *report.metrics.pearson_r;
  else
    out << "undefined (constant input)";
  out << "\n"
      << "wall time: " << report.total_ms << " ms\n";
  return out.str();
}

}  // namespace mgtd
