#pragma once
// Batch evaluation harness: dataset ingestion, per-record pipeline runs
// under bounded concurrency, metric computation, and persistent reports.

#include <filesystem>
#include <string>
#include <vector>

#include "mgtd/agents.hpp"
#include "mgtd/metrics.hpp"

namespace mgtd {

struct DatasetRecord {
  std::string id;
  std::string text;
  Decision label = Decision::AI;
  std::string source_model;  // optional
  std::string dataset_name;  // optional
};

// JSON-lines dataset: {"id", "text", "label", "source_model"?,
// "dataset_name"?} per line. Throws DataError naming the offending line on
// parse failures, missing fields, or duplicate ids.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

struct RecordVerdict {
  std::string id;
  Decision label = Decision::AI;
  double score = 0.0;  // verdict_to_score of the verdict
  MetaVerdict verdict;
  long duration_ms = 0;
};

struct RecordFailure {
  std::string id;
  std::string message;
};

struct RunReport {
  nlohmann::ordered_json config_snapshot;
  std::vector<RecordVerdict> verdicts;  // dataset order, failures excluded
  std::vector<RecordFailure> failures;
  MetricsReport metrics;
  long total_ms = 0;
  std::string timestamp;  // RFC 3339; excluded from determinism comparisons
};

// Runs detect over every record (bounded by the pipeline concurrency
// limit). Records that fail land in the failure list and are excluded from
// metrics. Throws DataError when no record produced a verdict.
RunReport run_batch(const std::vector<DatasetRecord>& records, const Pipeline& pipeline,
                    int ece_bins);

// One verdict record per line; identical runs produce byte-identical files.
void write_verdicts(const RunReport& report, const std::filesystem::path& path);

// Metrics + config snapshot + failures + timing (single JSON document;
// carries the only timestamp in the persisted report).
void write_metrics(const RunReport& report, const std::filesystem::path& path);

// Recomputes the MetricsReport from a persisted verdicts file
// (self-consistency checks, offline re-scoring).
MetricsReport metrics_from_verdicts_file(const std::filesystem::path& path, int ece_bins);

// Human-readable run summary.
std::string format_summary(const RunReport& report);

}  // namespace mgtd
