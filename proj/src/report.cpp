#include "mgtd/report.hpp"

namespace mgtd {

const std::string& GuidelineReport::chosen_reasoning() const {
  static const std::string empty;
  if (!calibration) return empty;
  for (const auto& s : samples)
    if (s.level == calibration->chosen_level) return s.reasoning;
  return empty;
}

}  // namespace mgtd
