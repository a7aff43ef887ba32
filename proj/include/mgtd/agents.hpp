#pragma once
// The detection pipeline: router (domain/style profiling + adaptive
// guideline activation), steered per-guideline base evaluations, and
// confidence-weighted meta aggregation. Ablation modes switch individual
// stages off via PipelineConfig flags.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgtd/gateway.hpp"
#include "mgtd/guidelines.hpp"
#include "mgtd/prompts.hpp"
#include "mgtd/report.hpp"

#include "json.hpp"

namespace mgtd {

struct TextProfile {
  std::string domain;
  std::vector<std::string> stylistic_features;  // non-empty
};

struct PipelineConfig {
  // All five true = the full pipeline; each false switches one stage off.
  bool multi_agent = true;       // false: one comprehensive agent, corpus inline
  bool use_guidelines = true;    // false: generic instruction, no guidelines
  bool llm_router = true;        // false: seeded-random guideline activation
  bool adaptive_routing = true;  // false: activate every guideline
  bool steer_calibration = true; // false: single vanilla call, raw confidence

  bool deterministic_meta = false;  // offline weighted vote instead of the meta agent

  int concurrency_limit = 4;
  std::uint64_t random_seed = 0;
  std::string model = "deepseek-chat-v3-0324";
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

// Which stages ran and over which guidelines; serialized with every verdict.
struct ModeDescriptor {
  bool multi_agent = true;
  bool use_guidelines = true;
  bool llm_router = true;
  bool adaptive_routing = true;
  bool steer_calibration = true;
  bool deterministic_meta = false;
  std::vector<std::string> activated_ids;
  std::vector<std::string> failed_ids;  // reports excluded from aggregation
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const;
};

struct MetaVerdict {
  Decision decision = Decision::AI;
  double confidence = 0.0;
  std::string reasoning;
  std::optional<TextProfile> profile;
  std::vector<GuidelineReport> reports;  // includes failed ones
  ModeDescriptor mode;

  nlohmann::ordered_json to_json() const;
};

// Parsers for the router replies (shared with tests).
TextProfile parse_profile_reply(const std::string& raw);            // throws ReplyParseError
std::vector<std::string> parse_selection_reply(const std::string& raw);

class Pipeline {
 public:
  Pipeline(const GuidelineRegistry& registry, const PromptLibrary& prompts, Session& session,
           PipelineConfig config);

  // Domain + stylistic-feature inference (router, first round).
  TextProfile profile_text(const std::string& input_text) const;

  // Guideline activation for one text. `profile` is consulted only in LLM
  // routing mode; pass nullopt otherwise. Falls back to a dimension's full
  // guideline list when its selection round fails or comes back empty.
  std::vector<Guideline> select_guidelines(const std::optional<TextProfile>& profile,
                                           const std::string& input_text) const;

  // Five steered evaluations of one guideline (or a single vanilla call when
  // steering is off). Per-call failures shrink the sample set; the report is
  // marked failed only when every call failed.
  GuidelineReport evaluate_guideline(const Guideline& guideline,
                                     const std::string& input_text) const;

  // Steered meta aggregation over the non-failed reports.
  MetaVerdict aggregate(const std::string& input_text,
                        std::vector<GuidelineReport> reports) const;

  // Full pipeline for one text.
  MetaVerdict detect(const std::string& input_text) const;

  const PipelineConfig& config() const { return config_; }

 private:
  GuidelineReport evaluate_user_prompt(const std::string& report_id, Dimension dimension,
                                       const std::string& user_prompt) const;
  std::vector<SteeredSample> run_steered(const std::string& user_prompt,
                                         std::vector<std::string>* failures) const;
  CompletionRequest make_request(const std::string& system, const std::string& user) const;
  ModeDescriptor base_mode() const;

  const GuidelineRegistry& registry_;
  const PromptLibrary& prompts_;
  Session& session_;
  PipelineConfig config_;
};

// Offline fallback aggregation: S = sum of c_cal * (+1 for AI, -1 for Human)
// over non-failed reports; decision AI iff S > 0 (exact ties go Human);
// confidence = |S| / sum(c_cal), or 0 when all weights are 0.
MetaVerdict aggregate_deterministic(std::vector<GuidelineReport> reports);

}  // namespace mgtd
