#include "mgtd/prompts.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "mgtd/errors.hpp"
#include "mgtd/util.hpp"

namespace mgtd {

namespace {

constexpr const char* kSystemMarker = "<<SYSTEM>>";
constexpr const char* kUserMarker = "<<USER>>";

const char* kRequiredTemplates[] = {
    "domain_style",        "guideline_selection",    "steering_very_cautious",
    "steering_cautious",   "steering_vanilla",       "steering_confident",
    "steering_very_confident", "base_user",          "corpus_user",
    "generic_user",        "meta_user"};

std::string strip_one_trailing_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

bool placeholder_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string format_confidence(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  for (;;) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      return out;
    }
    std::size_t name_end = open + 2;
    while (name_end < tmpl.size() && placeholder_name_char(tmpl[name_end])) ++name_end;
    if (name_end + 1 >= tmpl.size() || tmpl[name_end] != '}' || tmpl[name_end + 1] != '}' ||
        name_end == open + 2) {
      // Not a placeholder; emit the braces literally.
      out.append(tmpl, pos, open + 2 - pos);
      pos = open + 2;
      continue;
    }
    std::string name = tmpl.substr(open + 2, name_end - (open + 2));
    auto it = values.find(name);
    if (it == values.end())
      throw DataError("template placeholder {{" + name + "}} has no value");
    out.append(tmpl, pos, open - pos);
    out.append(it->second);  // inserted verbatim, never re-scanned
    pos = name_end + 2;
  }
}

bool has_placeholder(const std::string& text) {
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    std::size_t name_end = pos + 2;
    while (name_end < text.size() && placeholder_name_char(text[name_end])) ++name_end;
    if (name_end > pos + 2 && name_end + 1 < text.size() && text[name_end] == '}' &&
        text[name_end + 1] == '}')
      return true;
    pos += 2;
  }
  return false;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("prompt manifest: malformed JSON: " + std::string(e.what()));
  }
  if (!manifest.is_object()) throw DataError("prompt manifest: expected an object");

  PromptLibrary lib;
  for (auto& [name, file] : manifest.items()) {
    if (!file.is_string()) throw DataError("prompt manifest: entry '" + name + "' must be a file name");
    std::string text = read_file(dir / file.get<std::string>());

    if (text.rfind(kSystemMarker, 0) == 0) {
      std::size_t sys_begin = std::string(kSystemMarker).size();
      if (sys_begin < text.size() && text[sys_begin] == '\n') ++sys_begin;
      std::size_t user_marker = text.find(kUserMarker, sys_begin);
      if (user_marker == std::string::npos)
        throw DataError("template '" + name + "': <<SYSTEM>> without <<USER>> section");
      std::size_t sys_end = user_marker;
      if (sys_end > sys_begin && text[sys_end - 1] == '\n') --sys_end;
      std::size_t user_begin = user_marker + std::string(kUserMarker).size();
      if (user_begin < text.size() && text[user_begin] == '\n') ++user_begin;
      RenderedPrompt parts;
      parts.system = text.substr(sys_begin, sys_end - sys_begin);
      parts.user = strip_one_trailing_newline(text.substr(user_begin));
      lib.split_templates_[name] = std::move(parts);
    } else {
      lib.templates_[name] = strip_one_trailing_newline(std::move(text));
    }
  }

  for (const char* required : kRequiredTemplates) {
    if (!lib.templates_.count(required) && !lib.split_templates_.count(required))
      throw DataError("prompt manifest: missing required template '" + std::string(required) + "'");
  }
  return lib;
}

const std::string& PromptLibrary::raw(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw DataError("unknown template '" + name + "'");
  return it->second;
}

const std::string& PromptLibrary::render_steering_system(SteeringLevel level) const {
  return raw("steering_" + std::string(to_string(level)));
}

RenderedPrompt PromptLibrary::render_domain_style(const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("render_domain_style: empty input text");
  const auto& parts = split_templates_.at("domain_style");
  return {render_template(parts.system, {}),
          render_template(parts.user, {{"INPUT_TEXT", input_text}})};
}

RenderedPrompt PromptLibrary::render_guideline_selection(
    Dimension aspect, const std::string& domain, const std::vector<std::string>& features,
    const std::vector<Guideline>& candidates) const {
  if (candidates.empty())
    throw std::invalid_argument("render_guideline_selection: empty candidate list");
  if (features.empty())
    throw std::invalid_argument("render_guideline_selection: empty feature list");
  for (const auto& g : candidates)
    if (g.dimension != aspect)
      throw std::invalid_argument("render_guideline_selection: candidate '" + g.id +
                                  "' does not belong to the " +
                                  std::string(to_string(aspect)) + " aspect");

  std::string feature_lines;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i) feature_lines += "\n";
    feature_lines += "- " + features[i];
  }

  // Candidates keep registry order; ids inside the prompt are G1..Gn.
  std::string guideline_lines;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& g = candidates[i];
    if (i) guideline_lines += "\n";
    guideline_lines += "G" + std::to_string(i + 1) + ": " + g.title +
                       ". Human-written: " + g.human_trait + " AI-generated: " + g.ai_trait;
  }

  std::map<std::string, std::string> values = {{"ASPECT", std::string(to_string(aspect))},
                                               {"DOMAIN", domain},
                                               {"FEATURES", feature_lines},
                                               {"GUIDELINES", guideline_lines}};
  const auto& parts = split_templates_.at("guideline_selection");
  return {render_template(parts.system, values), render_template(parts.user, values)};
}

std::string PromptLibrary::render_base_user(const Guideline& guideline,
                                            const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("render_base_user: empty input text");
  return render_template(raw("base_user"),
                         {{"ASPECT", std::string(to_string(guideline.dimension))},
                          {"GUIDELINE_ID", guideline.id},
                          {"GUIDELINE_TITLE", guideline.title},
                          {"HUMAN_TRAIT", guideline.human_trait},
                          {"AI_TRAIT", guideline.ai_trait},
                          {"INPUT_TEXT", input_text}});
}

std::string PromptLibrary::render_corpus_user(const std::vector<Guideline>& corpus,
                                              const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("render_corpus_user: empty input text");
  if (corpus.empty()) throw std::invalid_argument("render_corpus_user: empty guideline corpus");

  std::ostringstream block;
  std::ostringstream aspects;
  bool first_dim = true;
  for (Dimension d : kAllDimensions) {
    bool any = false;
    for (const auto& g : corpus) {
      if (g.dimension != d) continue;
      if (!any) {
        if (!first_dim) block << "\n";
        block << to_string(d) << " Dimension\n";
        if (!first_dim) aspects << ", ";
        aspects << to_string(d);
        first_dim = false;
        any = true;
      }
      block << "\n" << g.id << ": " << g.title << "\nHuman-written: " << g.human_trait
            << "\nAI-generated: " << g.ai_trait << "\n";
    }
  }

  return render_template(raw("corpus_user"), {{"GUIDELINES", trim(block.str())},
                                              {"ASPECTS", aspects.str()},
                                              {"INPUT_TEXT", input_text}});
}

std::string PromptLibrary::render_generic_user(const std::string& input_text) const {
  if (input_text.empty()) throw std::invalid_argument("render_generic_user: empty input text");
  return render_template(raw("generic_user"), {{"INPUT_TEXT", input_text}});
}

std::string PromptLibrary::render_meta_user(const std::string& input_text,
                                            const std::vector<GuidelineReport>& reports) const {
  std::ostringstream blocks;
  bool first = true;
  for (const auto& report : reports) {
    if (report.failed || !report.calibration) continue;
    if (!first) blocks << "\n\n";
    first = false;
    blocks << "Aspect " << to_string(report.dimension) << " (" << report.guideline_id << "):\n"
           << "- Decision: " << to_string(report.calibration->final_decision)
           << ", Confidence: " << format_confidence(report.calibration->c_cal) << "\n"
           << "- Reasoning: \"" << report.chosen_reasoning() << "\"";
  }
  if (first) throw std::invalid_argument("render_meta_user: no non-failed reports");

  return render_template(raw("meta_user"),
                         {{"INPUT_TEXT", input_text}, {"REPORT_BLOCKS", blocks.str()}});
}

}  // namespace mgtd
