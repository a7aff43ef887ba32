#include "mgtd/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "mgtd/util.hpp"

namespace mgtd {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<std::string> failed_ids_of(const std::vector<GuidelineReport>& reports) {
  std::vector<std::string> out;
  for (const auto& r : reports)
    if (r.failed) out.push_back(r.guideline_id);
  return out;
}

nlohmann::ordered_json report_to_json(const GuidelineReport& r) {
  nlohmann::ordered_json j;
  j["guideline_id"] = r.guideline_id;
  if (r.failed || !r.calibration) {
    j["failed"] = true;
    return j;
  }
  const auto& cal = *r.calibration;
  j["decision"] = std::string(to_string(cal.final_decision));
  j["c_cal"] = cal.c_cal;
  j["kappa_ans"] = cal.kappa_ans;
  j["kappa_conf"] = cal.kappa_conf;
  j["mu"] = cal.mu;
  j["sigma"] = cal.sigma;
  j["chosen_level"] = std::string(to_string(cal.chosen_level));
  j["sample_count"] = cal.sample_count;
  j["reasoning"] = r.chosen_reasoning();
  return j;
}

}  // namespace

TextProfile parse_profile_reply(const std::string& raw) {
  std::string obj = first_json_object(raw);
  if (obj.empty()) throw ReplyParseError("no JSON object found in profile reply", raw);
  nlohmann::json j = nlohmann::json::parse(obj);

  if (!j.contains("Domain") || !j["Domain"].is_string())
    throw ReplyParseError("profile reply missing 'Domain'", raw);
  if (!j.contains("Stylistic Features") || !j["Stylistic Features"].is_array())
    throw ReplyParseError("profile reply missing 'Stylistic Features'", raw);

  TextProfile profile;
  profile.domain = trim(j["Domain"].get<std::string>());
  for (const auto& f : j["Stylistic Features"]) {
    if (!f.is_string()) throw ReplyParseError("stylistic feature is not a string", raw);
    std::string feature = trim(f.get<std::string>());
    if (!feature.empty()) profile.stylistic_features.push_back(std::move(feature));
  }
  if (profile.domain.empty() || profile.stylistic_features.empty())
    throw ReplyParseError("profile reply has an empty domain or feature list", raw);
  return profile;
}

std::vector<std::string> parse_selection_reply(const std::string& raw) {
  std::string obj = first_json_object(raw);
  if (obj.empty()) throw ReplyParseError("no JSON object found in selection reply", raw);
  nlohmann::json j = nlohmann::json::parse(obj);
  if (!j.contains("Activated Guidelines") || !j["Activated Guidelines"].is_array())
    throw ReplyParseError("selection reply missing 'Activated Guidelines'", raw);
  std::vector<std::string> tokens;
  for (const auto& t : j["Activated Guidelines"]) {
    if (t.is_string())
      tokens.push_back(trim(t.get<std::string>()));
    else if (t.is_number_integer())
      tokens.push_back(std::to_string(t.get<long>()));
    else
      throw ReplyParseError("activated guideline entry is not a string", raw);
  }
  return tokens;
}

nlohmann::ordered_json ModeDescriptor::to_json() const {
  nlohmann::ordered_json j;
  j["multi_agent"] = multi_agent;
  j["use_guidelines"] = use_guidelines;
  j["llm_router"] = llm_router;
  j["adaptive_routing"] = adaptive_routing;
  j["steer_calibration"] = steer_calibration;
  j["deterministic_meta"] = deterministic_meta;
  j["activated_guidelines"] = activated_ids;
  j["failed_guidelines"] = failed_ids;
  j["notes"] = notes;
  return j;
}

nlohmann::ordered_json MetaVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["decision"] = std::string(to_string(decision));
  j["confidence"] = confidence;
  j["mode"] = mode.to_json();
  if (profile) {
    j["profile"] = {{"domain", profile->domain},
                    {"stylistic_features", profile->stylistic_features}};
  } else {
    j["profile"] = nullptr;
  }
  auto reports_json = nlohmann::ordered_json::array();
  for (const auto& r : reports) reports_json.push_back(report_to_json(r));
  j["reports"] = std::move(reports_json);
  j["meta_reasoning"] = reasoning;
  return j;
}

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(const GuidelineRegistry& registry, const PromptLibrary& prompts,
                   Session& session, PipelineConfig config)
    : registry_(registry), prompts_(prompts), session_(session), config_(std::move(config)) {}

CompletionRequest Pipeline::make_request(const std::string& system,
                                         const std::string& user) const {
  CompletionRequest req;
  req.model = config_.model;
  req.messages = {{"system", system}, {"user", user}};
  req.temperature = config_.temperature;
  req.max_tokens = config_.max_tokens;
  return req;
}

ModeDescriptor Pipeline::base_mode() const {
  ModeDescriptor mode;
  mode.multi_agent = config_.multi_agent;
  mode.use_guidelines = config_.use_guidelines;
  mode.llm_router = config_.llm_router;
  mode.adaptive_routing = config_.adaptive_routing;
  mode.steer_calibration = config_.steer_calibration;
  mode.deterministic_meta = config_.deterministic_meta;
  return mode;
}

TextProfile Pipeline::profile_text(const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("profile_text: empty input text");
  auto prompt = prompts_.render_domain_style(input_text);
  return session_.complete_parsed(make_request(prompt.system, prompt.user), parse_profile_reply);
}

std::vector<Guideline> Pipeline::select_guidelines(const std::optional<TextProfile>& profile,
                                                   const std::string& input_text) const {
  if (registry_.empty()) throw PipelineError("select_guidelines", "guideline registry is empty");
  if (!config_.adaptive_routing) return registry_.entries();  // activate everything

  std::vector<Guideline> selected;

  if (!config_.llm_router) {
    // Random activation. The per-dimension subset size is drawn uniformly in
    // 1..min(5, |dimension|). Seeding mixes the run seed with the text and
    // dimension so batches stay deterministic under any scheduling.
    for (Dimension d : kAllDimensions) {
      auto candidates = registry_.by_dimension(d);
      if (candidates.empty()) continue;
      SplitMix64 rng(config_.random_seed ^ fnv1a64(input_text) ^
                     fnv1a64(to_string(d)));
      const std::size_t cap = std::min<std::size_t>(5, candidates.size());
      const std::size_t take = 1 + static_cast<std::size_t>(rng.next_below(cap));

      std::vector<std::size_t> order(candidates.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(order.size() - i));
        std::swap(order[i], order[j]);
      }
      std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
      for (std::size_t i = 0; i < take; ++i) selected.push_back(candidates[order[i]]);
    }
    return selected;
  }

  if (!profile)
    throw std::invalid_argument("select_guidelines: LLM routing requires a text profile");

  for (Dimension d : kAllDimensions) {
    auto candidates = registry_.by_dimension(d);
    if (candidates.empty()) continue;

    std::vector<Guideline> picked;
    try {
      auto prompt = prompts_.render_guideline_selection(d, profile->domain,
                                                        profile->stylistic_features, candidates);
      auto tokens = session_.complete_parsed(make_request(prompt.system, prompt.user),
                                             parse_selection_reply);

      // Tokens arrive as "G<n>" positions or raw registry ids.
      std::vector<std::string> ids;
      for (const auto& token : tokens) {
        std::string t = token;
        if (!t.empty() && (t[0] == 'G' || t[0] == 'g') &&
            std::all_of(t.begin() + 1, t.end(),
                        [](unsigned char c) { return std::isdigit(c); }) &&
            t.size() > 1) {
          std::size_t k = std::stoul(t.substr(1));
          if (k >= 1 && k <= candidates.size()) {
            ids.push_back(candidates[k - 1].id);
            continue;
          }
        }
        ids.push_back(t);  // maybe a raw id; resolve below
      }
      auto resolved = registry_.resolve_ids(ids);
      for (const auto& unknown : resolved.unknown)
        warn("router returned unknown guideline id '" + unknown + "'; dropped");
      for (const auto& g : resolved.resolved) {
        if (g.dimension == d)
          picked.push_back(g);
        else
          warn("router returned '" + g.id + "' outside the " + std::string(to_string(d)) +
               " aspect; dropped");
      }
    } catch (const AuthError&) {
      throw;
    } catch (const GatewayError& e) {
      warn("guideline selection for " + std::string(to_string(d)) + " failed (" + e.what() +
           "); activating the whole dimension");
      picked = candidates;
    }

    if (picked.empty()) {
      warn("guideline selection for " + std::string(to_string(d)) +
           " returned nothing; activating the whole dimension");
      picked = candidates;
    }
    selected.insert(selected.end(), picked.begin(), picked.end());
  }
  return selected;
}

std::vector<SteeredSample> Pipeline::run_steered(const std::string& user_prompt,
                                                 std::vector<std::string>* failures) const {
  std::vector<SteeringLevel> levels;
  if (config_.steer_calibration)
    levels.assign(std::begin(kAllSteeringLevels), std::end(kAllSteeringLevels));
  else
    levels = {SteeringLevel::Vanilla};  // single call, raw confidence passes through

  std::vector<std::optional<SteeredSample>> slots(levels.size());
  std::mutex fail_mu;
  parallel_for(levels.size(), config_.concurrency_limit, [&](std::size_t i) {
    try {
      auto reply = session_.complete_reply(
          make_request(prompts_.render_steering_system(levels[i]), user_prompt));
      slots[i] = SteeredSample{levels[i], reply.decision, reply.confidence, reply.reasoning};
    } catch (const AuthError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const GatewayError& e) {
      warn("steering call (" + std::string(to_string(levels[i])) + ") failed: " + e.what());
      if (failures) {
        std::lock_guard<std::mutex> lock(fail_mu);
        failures->push_back(e.what());
      }
    }
  });

  std::vector<SteeredSample> samples;
  for (auto& slot : slots)
    if (slot) samples.push_back(std::move(*slot));
  return samples;
}

GuidelineReport Pipeline::evaluate_user_prompt(const std::string& report_id, Dimension dimension,
                                               const std::string& user_prompt) const {
  GuidelineReport report;
  report.guideline_id = report_id;
  report.dimension = dimension;
  report.samples = run_steered(user_prompt, nullptr);
  if (report.samples.empty()) {
    report.failed = true;
    return report;
  }
  report.calibration = calibrate(report.samples);
  return report;
}

GuidelineReport Pipeline::evaluate_guideline(const Guideline& guideline,
                                             const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("evaluate_guideline: empty input text");
  return evaluate_user_prompt(guideline.id, guideline.dimension,
                              prompts_.render_base_user(guideline, input_text));
}

MetaVerdict Pipeline::aggregate(const std::string& input_text,
                                std::vector<GuidelineReport> reports) const {
  std::vector<GuidelineReport> usable;
  for (const auto& r : reports)
    if (!r.failed && r.calibration) usable.push_back(r);
  if (usable.empty())
    throw PipelineError("aggregate", "no evidence: every guideline report failed");

  const std::string meta_user = prompts_.render_meta_user(input_text, usable);
  std::vector<std::string> failures;
  auto samples = run_steered(meta_user, &failures);
  if (samples.empty()) {
    std::string detail = failures.empty() ? "no samples" : failures.front();
    throw PipelineError("aggregate", "meta agent produced no usable reply (" + detail + ")");
  }
  auto cal = calibrate(samples);

  MetaVerdict verdict;
  verdict.decision = cal.final_decision;
  verdict.confidence = cal.c_cal;
  for (const auto& s : samples)
    if (s.level == cal.chosen_level) verdict.reasoning = s.reasoning;
  verdict.reports = std::move(reports);
  verdict.mode = base_mode();
  verdict.mode.failed_ids = failed_ids_of(verdict.reports);
  return verdict;
}

MetaVerdict Pipeline::detect(const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("detect: empty input text");
  ModeDescriptor mode = base_mode();

  // Guideline-free variant: one steered evaluation under a generic instruction.
  if (!config_.use_guidelines) {
    auto report = evaluate_user_prompt("generic", Dimension::Semantic,
                                       prompts_.render_generic_user(input_text));
    if (report.failed || !report.calibration)
      throw PipelineError("detect", "generic evaluation failed for every steering call");
    MetaVerdict verdict;
    verdict.decision = report.calibration->final_decision;
    verdict.confidence = report.calibration->c_cal;
    verdict.reasoning = report.chosen_reasoning();
    verdict.reports = {std::move(report)};
    mode.notes.push_back("generic instruction substituted for the guideline corpus");
    verdict.mode = std::move(mode);
    return verdict;
  }

  if (registry_.empty()) throw PipelineError("detect", "guideline registry is empty");

  // Single comprehensive agent: the whole corpus inline, no routing, no meta.
  if (!config_.multi_agent) {
    auto report = evaluate_user_prompt(
        "corpus", Dimension::Semantic,
        prompts_.render_corpus_user(registry_.entries(), input_text));
    if (report.failed || !report.calibration)
      throw PipelineError("detect", "comprehensive evaluation failed for every steering call");
    MetaVerdict verdict;
    verdict.decision = report.calibration->final_decision;
    verdict.confidence = report.calibration->c_cal;
    verdict.reasoning = report.chosen_reasoning();
    verdict.reports = {std::move(report)};
    for (const auto& g : registry_.entries()) mode.activated_ids.push_back(g.id);
    mode.notes.push_back("single comprehensive agent over the full guideline corpus");
    verdict.mode = std::move(mode);
    return verdict;
  }

  std::optional<TextProfile> profile;
  if (config_.llm_router && config_.adaptive_routing) {
    try {
      profile = profile_text(input_text);
    } catch (const AuthError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const GatewayError& e) {
      throw PipelineError("profile_text", e.what());
    }
  }

  auto selected = select_guidelines(profile, input_text);
  if (selected.empty()) throw PipelineError("select_guidelines", "no guidelines activated");

  std::vector<GuidelineReport> reports(selected.size());
  parallel_for(selected.size(), config_.concurrency_limit, [&](std::size_t i) {
    reports[i] = evaluate_guideline(selected[i], input_text);
  });

  MetaVerdict verdict = config_.deterministic_meta
                            ? aggregate_deterministic(std::move(reports))
                            : aggregate(input_text, std::move(reports));
  verdict.profile = std::move(profile);
  for (const auto& g : selected) mode.activated_ids.push_back(g.id);
  mode.failed_ids = failed_ids_of(verdict.reports);
  if (config_.deterministic_meta)
    mode.notes.push_back("deterministic confidence-weighted aggregation (no meta agent call)");
  verdict.mode = std::move(mode);
  return verdict;
}

MetaVerdict aggregate_deterministic(std::vector<GuidelineReport> reports) {
  double signed_sum = 0.0;
  double weight_sum = 0.0;
  std::size_t used = 0;
  std::ostringstream summary;
  summary << "Confidence-weighted vote over guideline reports:";
  for (const auto& r : reports) {
    if (r.failed || !r.calibration) continue;
    const double w = r.calibration->c_cal;
    const bool ai = r.calibration->final_decision == Decision::AI;
    signed_sum += ai ? w : -w;
    weight_sum += w;
    ++used;
    summary << " " << r.guideline_id << "=" << to_string(r.calibration->final_decision) << "("
            << fixed4(w) << ")";
  }
  if (used == 0)
    throw PipelineError("aggregate", "no evidence: every guideline report failed");

  MetaVerdict verdict;
  verdict.decision = signed_sum > 0.0 ? Decision::AI : Decision::Human;  // exact tie -> Human
  verdict.confidence = weight_sum == 0.0 ? 0.0 : std::fabs(signed_sum) / weight_sum;
  summary << "; net=" << fixed4(signed_sum) << " -> " << to_string(verdict.decision);
  verdict.reasoning = summary.str();
  verdict.mode.deterministic_meta = true;
  verdict.mode.failed_ids = failed_ids_of(reports);
  verdict.reports = std::move(reports);
  return verdict;
}

}  // namespace mgtd
