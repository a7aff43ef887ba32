#include "mgtd/calibration.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

namespace mgtd {

double answer_consistency(const std::vector<SteeredSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("answer_consistency: empty sample list");
  std::size_t ai = 0;
  for (const auto& s : samples)
    if (s.decision == Decision::AI) ++ai;
  std::size_t majority = std::max(ai, samples.size() - ai);
  return static_cast<double>(majority) / static_cast<double>(samples.size());
}

ConfidenceConsistency confidence_consistency(const std::vector<SteeredSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("confidence_consistency: empty sample list");
  const double n = static_cast<double>(samples.size());

  double sum = 0.0;
  for (const auto& s : samples) sum += s.confidence;
  const double mu = sum / n;

  double sq = 0.0;
  for (const auto& s : samples) {
    const double d = s.confidence - mu;
    sq += d * d;
  }
  const double sigma = std::sqrt(sq / n);  // population std-dev, divisor |P|

  // sigma = 0 subsumes mu = 0: confidences in [0,1] with zero mean are all 0.
  const double kappa_conf = sigma == 0.0 ? 1.0 : 1.0 / (1.0 + sigma / mu);
  return {mu, sigma, kappa_conf};
}

CalibrationResult calibrate(const std::vector<SteeredSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("calibrate: empty sample list");

  CalibrationResult r;
  r.sample_count = static_cast<int>(samples.size());
  r.kappa_ans = answer_consistency(samples);
  const auto cc = confidence_consistency(samples);
  r.mu = cc.mu;
  r.sigma = cc.sigma;
  r.kappa_conf = cc.kappa_conf;
  r.c_cal = r.mu * r.kappa_ans * r.kappa_conf;

  // k* = argmin |c_k - c_cal|; ties prefer the level nearest Vanilla, then
  // the lower order index, then the earlier sample.
  std::size_t best = 0;
  auto rank = [&](const SteeredSample& s) {
    return std::make_tuple(std::fabs(s.confidence - r.c_cal),
                           std::abs(order_index(s.level) - order_index(SteeringLevel::Vanilla)),
                           order_index(s.level));
  };
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (rank(samples[i]) < rank(samples[best])) best = i;

  r.chosen_level = samples[best].level;
  r.final_decision = samples[best].decision;
  return r;
}

}  // namespace mgtd
