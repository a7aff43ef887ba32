#pragma once
// Core domain vocabulary shared across the pipeline.

#include <optional>
#include <string>
#include <string_view>

namespace mgtd {

// The three linguistic dimensions every detection guideline belongs to.
enum class Dimension { Semantic, Stylistic, Structural };

inline constexpr Dimension kAllDimensions[] = {Dimension::Semantic, Dimension::Stylistic,
                                               Dimension::Structural};

// Binary authorship verdict.
enum class Decision { AI, Human };

// Cautiousness-graded system prompts, ordered most cautious -> most confident.
// The numeric value is the order index (1..5); Vanilla sits in the middle.
enum class SteeringLevel {
  VeryCautious = 1,
  Cautious = 2,
  Vanilla = 3,
  Confident = 4,
  VeryConfident = 5,
};

inline constexpr int kSteeringLevelCount = 5;
inline constexpr SteeringLevel kAllSteeringLevels[] = {
    SteeringLevel::VeryCautious, SteeringLevel::Cautious, SteeringLevel::Vanilla,
    SteeringLevel::Confident, SteeringLevel::VeryConfident};

constexpr int order_index(SteeringLevel level) { return static_cast<int>(level); }

SteeringLevel steering_level_at(int order_index);  // 1..5, throws out_of_range otherwise

std::string_view to_string(Dimension d);
std::string_view to_string(Decision d);
std::string_view to_string(SteeringLevel level);         // "very_cautious", ...
std::string_view dimension_prefix(Dimension d);          // "SEM" / "STY" / "STR"
std::optional<Dimension> parse_dimension(std::string_view s);
std::optional<Decision> parse_decision(std::string_view s);  // case-insensitive "AI"/"Human"
std::optional<SteeringLevel> parse_steering_level(std::string_view s);

}  // namespace mgtd
