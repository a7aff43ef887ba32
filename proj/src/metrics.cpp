#include "mgtd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mgtd {

double verdict_to_score(Decision decision, double confidence) {
  if (confidence < 0.0 || confidence > 1.0)
    throw std::invalid_argument("verdict_to_score: confidence outside [0,1]");
  return decision == Decision::AI ? confidence : 1.0 - confidence;
}

double accuracy(const std::vector<std::pair<Decision, Decision>>& prediction_label_pairs) {
  if (prediction_label_pairs.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t correct = 0;
  for (const auto& [prediction, label] : prediction_label_pairs)
    if (prediction == label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(prediction_label_pairs.size());
}

double auroc(const std::vector<LabeledScore>& scores) {
  std::size_t n_ai = 0, n_human = 0;
  for (const auto& s : scores) (s.label == Decision::AI ? n_ai : n_human)++;
  if (n_ai == 0 || n_human == 0)
    throw std::invalid_argument("auroc: needs at least one score per class");

  // Midrank rank-sum; equals the pairwise definition (ties credit 0.5) exactly.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a].score < scores[b].score; });

  double rank_sum_ai = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]].score == scores[order[i]].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (scores[order[k]].label == Decision::AI) rank_sum_ai += midrank;
    i = j + 1;
  }

  const double n_ai_d = static_cast<double>(n_ai);
  const double u = rank_sum_ai - n_ai_d * (n_ai_d + 1.0) / 2.0;
  return u / (n_ai_d * static_cast<double>(n_human));
}

double ece(const std::vector<std::pair<double, bool>>& confidence_correct, int bins) {
  if (confidence_correct.empty()) throw std::invalid_argument("ece: empty input");
  if (bins < 1) throw std::invalid_argument("ece: bins must be >= 1");

  std::vector<double> conf_sum(bins, 0.0), correct_sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);

  for (const auto& [confidence, correct] : confidence_correct) {
    if (confidence < 0.0 || confidence > 1.0)
      throw std::invalid_argument("ece: confidence outside [0,1]");
    // Bins are left-open right-closed; the first also includes 0.
    int idx = static_cast<int>(std::ceil(confidence * bins)) - 1;
    if (idx < 0) idx = 0;
    if (idx >= bins) idx = bins - 1;
    conf_sum[idx] += confidence;
    correct_sum[idx] += correct ? 1.0 : 0.0;
    ++count[idx];
  }

  const double n = static_cast<double>(confidence_correct.size());
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double nb = static_cast<double>(count[b]);
    const double acc_b = correct_sum[b] / nb;
    const double conf_b = conf_sum[b] / nb;
    total += (nb / n) * std::fabs(acc_b - conf_b);
  }
  return total;
}

std::optional<double> pearson_r(const std::vector<double>& confidence,
                                const std::vector<double>& correct) {
  if (confidence.size() != correct.size())
    throw std::invalid_argument("pearson_r: length mismatch");
  if (confidence.size() < 2) throw std::invalid_argument("pearson_r: needs n >= 2");

  const double n = static_cast<double>(confidence.size());
  const double mean_x = std::accumulate(confidence.begin(), confidence.end(), 0.0) / n;
  const double mean_y = std::accumulate(correct.begin(), correct.end(), 0.0) / n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const double dx = confidence[i] - mean_x;
    const double dy = correct[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant vector: undefined
  return sxy / std::sqrt(sxx * syy);
}

ThresholdFit fit_threshold(const std::vector<LabeledScore>& validation) {
  if (validation.empty()) throw std::invalid_argument("fit_threshold: empty validation set");

  double lo = validation[0].score, hi = validation[0].score;
  for (const auto& s : validation) {
    lo = std::min(lo, s.score);
    hi = std::max(hi, s.score);
  }
  const double span = hi - lo;

  auto accuracy_at = [&](double threshold) {
    std::size_t correct = 0;
    for (const auto& s : validation) {
      const Decision predicted = s.score >= threshold ? Decision::AI : Decision::Human;
      if (predicted == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(validation.size());
  };

  ThresholdFit best{lo, accuracy_at(lo)};
  if (span == 0.0) return best;  // single candidate

  // Candidates at 1% of the span, min..max inclusive, scanned ascending so
  // ties keep the smallest threshold.
  for (int k = 1; k <= 100; ++k) {
    const double t = k == 100 ? hi : lo + span * (static_cast<double>(k) / 100.0);
    const double acc = accuracy_at(t);
    if (acc > best.val_accuracy) best = {t, acc};
  }
  return best;
}

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["accuracy"] = accuracy;
  j["auroc"] = auroc ? nlohmann::ordered_json(*auroc) : nlohmann::ordered_json(nullptr);
  j["ece"] = ece;
  j["pearson_r"] = pearson_r ? nlohmann::ordered_json(*pearson_r) : nlohmann::ordered_json(nullptr);
  if (threshold) j["threshold"] = *threshold;
  j["bins"] = bins;
  return j;
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.n = j.at("n").get<int>();
  r.accuracy = j.at("accuracy").get<double>();
  if (j.contains("auroc") && !j["auroc"].is_null()) r.auroc = j["auroc"].get<double>();
  r.ece = j.at("ece").get<double>();
  if (j.contains("pearson_r") && !j["pearson_r"].is_null())
    r.pearson_r = j["pearson_r"].get<double>();
  if (j.contains("threshold") && !j["threshold"].is_null())
    r.threshold = j["threshold"].get<double>();
  r.bins = j.at("bins").get<int>();
  return r;
}

}  // namespace mgtd
