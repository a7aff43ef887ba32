#pragma once
// Per-guideline evaluation report, the unit the meta stage aggregates.

#include <optional>
#include <string>
#include <vector>

#include "mgtd/calibration.hpp"
#include "mgtd/types.hpp"

namespace mgtd {

struct GuidelineReport {
  std::string guideline_id;
  Dimension dimension = Dimension::Semantic;
  std::vector<SteeredSample> samples;            // successful steering replies
  std::optional<CalibrationResult> calibration;  // absent iff failed
  bool failed = false;                           // true iff every call failed

  // Reasoning of the chosen sample, empty for failed reports.
  const std::string& chosen_reasoning() const;
};

}  // namespace mgtd
