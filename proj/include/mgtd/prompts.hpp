#pragma once
// Prompt rendering. Templates are UTF-8 data files using {{NAME}}
// placeholders; a manifest.json maps template names to files. Rendering is
// pure: identical inputs produce byte-identical text, and every placeholder
// present in a template must be supplied (missing ones throw).

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mgtd/guidelines.hpp"
#include "mgtd/report.hpp"
#include "mgtd/types.hpp"

namespace mgtd {

struct RenderedPrompt {
  std::string system;
  std::string user;
};

class PromptLibrary {
 public:
  // Loads every template listed in <dir>/manifest.json. Throws DataError on
  // missing files or leftover/unknown section markers.
  static PromptLibrary load(const std::filesystem::path& dir);

  // Verbatim steering system text for a level (no placeholders).
  const std::string& render_steering_system(SteeringLevel level) const;

  // Domain / stylistic-feature inference over the input text.
  RenderedPrompt render_domain_style(const std::string& input_text) const;

  // Per-dimension guideline activation. Candidates are listed as
  // "G1: ..." lines in the given order; all must belong to `aspect`.
  RenderedPrompt render_guideline_selection(Dimension aspect, const std::string& domain,
                                            const std::vector<std::string>& features,
                                            const std::vector<Guideline>& candidates) const;

  // User part of a single-guideline evaluation (system comes from steering).
  std::string render_base_user(const Guideline& guideline, const std::string& input_text) const;

  // Comprehensive single-agent variant: the whole corpus inline.
  std::string render_corpus_user(const std::vector<Guideline>& corpus,
                                 const std::string& input_text) const;

  // Guideline-free variant with a fixed generic instruction.
  std::string render_generic_user(const std::string& input_text) const;

  // Meta aggregation body: one block per non-failed report, in the given
  // order, confidences rendered to 4 decimal places.
  std::string render_meta_user(const std::string& input_text,
                               const std::vector<GuidelineReport>& reports) const;

  // Raw template access (tests, diagnostics).
  const std::string& raw(const std::string& name) const;

 private:
  std::map<std::string, std::string> templates_;
  std::map<std::string, RenderedPrompt> split_templates_;  // templates with SYSTEM/USER parts
};

// Substitutes {{NAME}} placeholders in a single pass. Placeholder values are
// inserted verbatim and never re-scanned. Throws DataError when the template
// references a name missing from `values`.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

// True when the text still carries an unsubstituted {{NAME}} marker.
bool has_placeholder(const std::string& text);

}  // namespace mgtd
