#pragma once
// Detection-guideline registry. Each guideline contrasts a human-written
// trait with an AI-generated trait inside one of the three dimensions.
// The corpus ships as data (data/guidelines.json) so users can extend or
// replace guideline sets without rebuilding.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/types.hpp"

namespace mgtd {

struct Guideline {
  std::string id;  // "SEM-1", "STY-10", ... prefix must match the dimension
  Dimension dimension = Dimension::Semantic;
  std::string title;
  std::string human_trait;
  std::string ai_trait;
};

struct ResolvedIds {
  std::vector<Guideline> resolved;    // requested order, duplicates collapsed
  std::vector<std::string> unknown;   // ids absent from the registry
};

class GuidelineRegistry {
 public:
  GuidelineRegistry() = default;

  // Parses a JSON array of {id, dimension, title, human_trait, ai_trait}
  // records. Throws DataError naming the offending entry position on
  // malformed documents, duplicate ids, or unknown dimension tags.
  static GuidelineRegistry from_json_text(const std::string& text);
  static GuidelineRegistry from_file(const std::filesystem::path& path);

  const std::vector<Guideline>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  const Guideline* find(std::string_view id) const;  // nullptr when absent
  std::vector<Guideline> by_dimension(Dimension d) const;

  // Splits requested ids into (registered, unknown). Order-preserving;
  // duplicate requests collapse to their first occurrence. Never throws.
  ResolvedIds resolve_ids(const std::vector<std::string>& ids) const;

  // JSON text that round-trips through from_json_text.
  std::string serialize() const;

 private:
  std::vector<Guideline> entries_;
};

}  // namespace mgtd
