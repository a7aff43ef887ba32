#include "mgtd/guidelines.hpp"

#include <cctype>
#include <unordered_set>

#include "json.hpp"

#include "mgtd/errors.hpp"
#include "mgtd/util.hpp"

namespace mgtd {

namespace {

// "<DIM>-<positive integer>" with the prefix matching the dimension.
bool valid_id(const std::string& id, Dimension d) {
  std::string prefix = std::string(dimension_prefix(d)) + "-";
  if (id.rfind(prefix, 0) != 0) return false;
  std::string num = id.substr(prefix.size());
  if (num.empty() || num[0] == '0') return false;
  for (char c : num)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string entry_tag(std::size_t index) {
  return "entry #" + std::to_string(index + 1);
}

}  // namespace

GuidelineRegistry GuidelineRegistry::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("guideline registry: malformed JSON: ") + e.what());
  }
  if (!doc.is_array())
    throw DataError("guideline registry: top-level value must be an array of records");

  GuidelineRegistry reg;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_object())
      throw DataError("guideline registry: " + entry_tag(i) + " is not an object");
    for (const char* field : {"id", "dimension", "title", "human_trait", "ai_trait"}) {
      if (!rec.contains(field) || !rec[field].is_string())
        throw DataError("guideline registry: " + entry_tag(i) + " missing string field '" +
                        field + "'");
    }

    Guideline g;
    g.id = rec["id"].get<std::string>();
    auto dim = parse_dimension(rec["dimension"].get<std::string>());
    if (!dim)
      throw DataError("guideline registry: " + entry_tag(i) + " has unknown dimension tag '" +
                      rec["dimension"].get<std::string>() + "'");
    g.dimension = *dim;
    g.title = rec["title"].get<std::string>();
    g.human_trait = rec["human_trait"].get<std::string>();
    g.ai_trait = rec["ai_trait"].get<std::string>();

    if (!valid_id(g.id, g.dimension))
      throw DataError("guideline registry: " + entry_tag(i) + " id '" + g.id +
                      "' does not match <" + std::string(dimension_prefix(g.dimension)) +
                      ">-<positive integer>");
    if (g.title.empty() || g.human_trait.empty() || g.ai_trait.empty())
      throw DataError("guideline registry: " + entry_tag(i) + " ('" + g.id +
                      "') has an empty title or trait");
    if (!seen.insert(g.id).second)
      throw DataError("guideline registry: duplicate id '" + g.id + "' at " + entry_tag(i));

    reg.entries_.push_back(std::move(g));
  }
  return reg;
}

GuidelineRegistry GuidelineRegistry::from_file(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

const Guideline* GuidelineRegistry::find(std::string_view id) const {
  for (const auto& g : entries_)
    if (g.id == id) return &g;
  return nullptr;
}

std::vector<Guideline> GuidelineRegistry::by_dimension(Dimension d) const {
  std::vector<Guideline> out;
  for (const auto& g : entries_)
    if (g.dimension == d) out.push_back(g);
  return out;
}

ResolvedIds GuidelineRegistry::resolve_ids(const std::vector<std::string>& ids) const {
  ResolvedIds out;
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) continue;  // duplicates collapse to first occurrence
    if (const Guideline* g = find(id))
      out.resolved.push_back(*g);
    else
      out.unknown.push_back(id);
  }
  return out;
}

std::string GuidelineRegistry::serialize() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& g : entries_) {
    doc.push_back({{"id", g.id},
                   {"dimension", std::string(to_string(g.dimension))},
                   {"title", g.title},
                   {"human_trait", g.human_trait},
                   {"ai_trait", g.ai_trait}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace mgtd
