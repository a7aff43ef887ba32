#pragma once
// Steering-based confidence calibration.
//
// A text is judged once per steering level; the replies fuse into a single
// calibrated confidence:
//
//   kappa_ans  = (1/|P|) * max_y #(samples deciding y)       answer consistency
//   mu, sigma  = mean and population std-dev of confidences
//   kappa_conf = 1 / (1 + sigma/mu)                          confidence consistency
//   c_cal      = mu * kappa_ans * kappa_conf
//
// The final decision comes from the sample whose confidence is nearest to
// c_cal; ties prefer the level closest to Vanilla, then the lower index.
// kappa_conf is defined as 1 when sigma = 0, which also covers mu = 0
// (confidences in [0,1] with mu = 0 force sigma = 0).

#include <string>
#include <vector>

#include "mgtd/types.hpp"

namespace mgtd {

// One agent reply under one steering level.
struct SteeredSample {
  SteeringLevel level = SteeringLevel::Vanilla;
  Decision decision = Decision::AI;
  double confidence = 0.0;  // in [0, 1]
  std::string reasoning;
};

struct ConfidenceConsistency {
  double mu = 0.0;
  double sigma = 0.0;
  double kappa_conf = 1.0;
};

struct CalibrationResult {
  double kappa_ans = 1.0;
  double kappa_conf = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
  double c_cal = 0.0;
  SteeringLevel chosen_level = SteeringLevel::Vanilla;
  Decision final_decision = Decision::AI;
  int sample_count = 0;  // effective |P|; fewer than 5 when steering calls failed
};

// All three throw std::invalid_argument on an empty sample list.
double answer_consistency(const std::vector<SteeredSample>& samples);
ConfidenceConsistency confidence_consistency(const std::vector<SteeredSample>& samples);
CalibrationResult calibrate(const std::vector<SteeredSample>& samples);

}  // namespace mgtd
