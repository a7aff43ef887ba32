#include "mgtd/types.hpp"

#include <stdexcept>

#include "mgtd/util.hpp"

namespace mgtd {

SteeringLevel steering_level_at(int order_index) {
  if (order_index < 1 || order_index > kSteeringLevelCount)
    throw std::out_of_range("steering level index out of range: " + std::to_string(order_index));
  return static_cast<SteeringLevel>(order_index);
}

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Semantic: return "Semantic";
    case Dimension::Stylistic: return "Stylistic";
    case Dimension::Structural: return "Structural";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  return d == Decision::AI ? "AI" : "Human";
}

std::string_view to_string(SteeringLevel level) {
  switch (level) {
    case SteeringLevel::VeryCautious: return "very_cautious";
    case SteeringLevel::Cautious: return "cautious";
    case SteeringLevel::Vanilla: return "vanilla";
    case SteeringLevel::Confident: return "confident";
    case SteeringLevel::VeryConfident: return "very_confident";
  }
  return "?";
}

std::string_view dimension_prefix(Dimension d) {
  switch (d) {
    case Dimension::Semantic: return "SEM";
    case Dimension::Stylistic: return "STY";
    case Dimension::Structural: return "STR";
  }
  return "?";
}

std::optional<Dimension> parse_dimension(std::string_view s) {
  std::string t = to_lower(trim(s));
  if (t == "semantic") return Dimension::Semantic;
  if (t == "stylistic") return Dimension::Stylistic;
  if (t == "structural") return Dimension::Structural;
  return std::nullopt;
}

std::optional<Decision> parse_decision(std::string_view s) {
  std::string t = to_lower(trim(s));
  if (t == "ai") return Decision::AI;
  if (t == "human") return Decision::Human;
  return std::nullopt;
}

std::optional<SteeringLevel> parse_steering_level(std::string_view s) {
  std::string t = to_lower(trim(s));
  for (SteeringLevel level : kAllSteeringLevels)
    if (t == to_string(level)) return level;
  return std::nullopt;
}

}  // namespace mgtd
