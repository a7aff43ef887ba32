#pragma once
// Evaluation metrics: accuracy, rank-based AUROC (midrank ties), expected
// calibration error, Pearson confidence/correctness correlation, and the
// validation threshold scan.

#include <optional>
#include <utility>
#include <vector>

#include "mgtd/types.hpp"

#include "json.hpp"

namespace mgtd {

// A probability-of-AI score paired with the true label.
struct LabeledScore {
  double score = 0.0;  // in [0, 1]
  Decision label = Decision::AI;
};

// Maps a (decision, confidence) verdict onto the probability-of-AI scale:
// confidence for AI, 1 - confidence for Human.
double verdict_to_score(Decision decision, double confidence);

// Fraction of pairs with prediction == label. Throws on empty input.
double accuracy(const std::vector<std::pair<Decision, Decision>>& prediction_label_pairs);

// P(random AI score > random Human score) with 0.5 credit on exact ties.
// Computed via midrank rank-sum; equals the pairwise definition exactly.
// Requires at least one score of each label.
double auroc(const std::vector<LabeledScore>& scores);

// Expected calibration error over `bins` equal-width confidence bins
// (left-open right-closed, except the first bin which includes 0).
double ece(const std::vector<std::pair<double, bool>>& confidence_correct, int bins);

// Pearson product-moment correlation; nullopt when either vector is
// constant. Requires equal lengths >= 2.
std::optional<double> pearson_r(const std::vector<double>& confidence,
                                const std::vector<double>& correct);

struct ThresholdFit {
  double threshold = 0.0;
  double val_accuracy = 0.0;
};

// Scans thresholds from min to max score inclusive in steps of 1% of the
// span (a single candidate when the span is 0), classifying AI at
// score >= threshold. Returns the accuracy-maximizing threshold; ties break
// toward the smallest candidate.
ThresholdFit fit_threshold(const std::vector<LabeledScore>& validation);

struct MetricsReport {
  int n = 0;
  double accuracy = 0.0;
  std::optional<double> auroc;      // absent when a class is missing
  double ece = 0.0;
  std::optional<double> pearson_r;  // absent when either variable is constant
  std::optional<double> threshold;
  int bins = 10;

  nlohmann::ordered_json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
};

}  // namespace mgtd
