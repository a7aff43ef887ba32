#include "doctest.h"

#include "mgtd/errors.hpp"
#include "mgtd/guidelines.hpp"

#include "../support/helpers.hpp"

using namespace mgtd;

TEST_CASE("bundled corpus loads with the expected per-dimension counts") {
  auto reg = GuidelineRegistry::from_file(testsupport::repo_data_dir() / "guidelines.json");
  CHECK(reg.size() == 25);
  CHECK(reg.by_dimension(Dimension::Semantic).size() == 6);
  CHECK(reg.by_dimension(Dimension::Stylistic).size() == 10);
  CHECK(reg.by_dimension(Dimension::Structural).size() == 9);

  const Guideline* g = reg.find("SEM-1");
  REQUIRE(g != nullptr);
  CHECK(g->title == "Domain-Specific References");
  CHECK(g->dimension == Dimension::Semantic);
  CHECK_FALSE(g->human_trait.empty());
  CHECK_FALSE(g->ai_trait.empty());

  // Every dimension lookup over the bundled corpus is non-empty.
  for (Dimension d : kAllDimensions) CHECK_FALSE(reg.by_dimension(d).empty());
}

TEST_CASE("registry round-trips through serialize") {
  auto reg = GuidelineRegistry::from_file(testsupport::repo_data_dir() / "guidelines.json");
  auto again = GuidelineRegistry::from_json_text(reg.serialize());
  REQUIRE(again.size() == reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) {
    CHECK(again.entries()[i].id == reg.entries()[i].id);
    CHECK(again.entries()[i].dimension == reg.entries()[i].dimension);
    CHECK(again.entries()[i].title == reg.entries()[i].title);
    CHECK(again.entries()[i].human_trait == reg.entries()[i].human_trait);
    CHECK(again.entries()[i].ai_trait == reg.entries()[i].ai_trait);
  }
}

TEST_CASE("empty document loads as an empty, valid registry") {
  auto reg = GuidelineRegistry::from_json_text("[]");
  CHECK(reg.empty());
  CHECK(reg.size() == 0);
}

TEST_CASE("loader rejects malformed documents with the entry position") {
  const char* dup = R"([
    {"id":"SEM-1","dimension":"Semantic","title":"t","human_trait":"h","ai_trait":"a"},
    {"id":"SEM-1","dimension":"Semantic","title":"t2","human_trait":"h2","ai_trait":"a2"}
  ])";
  CHECK_THROWS_WITH_AS(GuidelineRegistry::from_json_text(dup),
                       doctest::Contains("duplicate id 'SEM-1'"), DataError);

  const char* bad_dim =
      R"([{"id":"SEM-1","dimension":"Syntactic","title":"t","human_trait":"h","ai_trait":"a"}])";
  CHECK_THROWS_WITH_AS(GuidelineRegistry::from_json_text(bad_dim),
                       doctest::Contains("unknown dimension"), DataError);

  const char* mismatch =
      R"([{"id":"STY-1","dimension":"Semantic","title":"t","human_trait":"h","ai_trait":"a"}])";
  CHECK_THROWS_AS(GuidelineRegistry::from_json_text(mismatch), DataError);

  const char* missing =
      R"([{"id":"SEM-1","dimension":"Semantic","title":"t","human_trait":"h"}])";
  CHECK_THROWS_WITH_AS(GuidelineRegistry::from_json_text(missing),
                       doctest::Contains("entry #1"), DataError);

  CHECK_THROWS_AS(GuidelineRegistry::from_json_text("not json"), DataError);
  CHECK_THROWS_AS(GuidelineRegistry::from_json_text("{}"), DataError);

  const char* empty_trait =
      R"([{"id":"SEM-1","dimension":"Semantic","title":"t","human_trait":"","ai_trait":"a"}])";
  CHECK_THROWS_AS(GuidelineRegistry::from_json_text(empty_trait), DataError);

  const char* zero_id =
      R"([{"id":"SEM-0","dimension":"Semantic","title":"t","human_trait":"h","ai_trait":"a"}])";
  CHECK_THROWS_AS(GuidelineRegistry::from_json_text(zero_id), DataError);
}

TEST_CASE("resolve_ids splits known from unknown, preserving order") {
  auto reg = GuidelineRegistry::from_file(testsupport::repo_data_dir() / "guidelines.json");

  auto r = reg.resolve_ids({"SEM-1", "SEM-2", "SEM-6"});
  REQUIRE(r.resolved.size() == 3);
  CHECK(r.resolved[0].id == "SEM-1");
  CHECK(r.resolved[1].id == "SEM-2");
  CHECK(r.resolved[2].id == "SEM-6");
  CHECK(r.unknown.empty());

  r = reg.resolve_ids({});
  CHECK(r.resolved.empty());
  CHECK(r.unknown.empty());

  r = reg.resolve_ids({"SEM-1", "SEM-99"});
  REQUIRE(r.resolved.size() == 1);
  CHECK(r.resolved[0].id == "SEM-1");
  REQUIRE(r.unknown.size() == 1);
  CHECK(r.unknown[0] == "SEM-99");

  // Duplicates collapse to the first occurrence on both sides.
  r = reg.resolve_ids({"STY-3", "STY-3", "NOPE-1", "NOPE-1", "STR-2"});
  REQUIRE(r.resolved.size() == 2);
  CHECK(r.resolved[0].id == "STY-3");
  CHECK(r.resolved[1].id == "STR-2");
  CHECK(r.unknown == std::vector<std::string>{"NOPE-1"});
  CHECK(r.resolved.size() + r.unknown.size() == 3);  // |ids| after de-duplication
}

TEST_CASE("resolve_ids never returns an unrequested guideline") {
  auto reg = GuidelineRegistry::from_file(testsupport::repo_data_dir() / "guidelines.json");
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ids;
    const int n = static_cast<int>(rng.next_below(8));
    for (int i = 0; i < n; ++i) {
      if (rng.next_below(3) == 0) {
        ids.push_back("BOGUS-" + std::to_string(rng.next_below(100)));
      } else {
        ids.push_back(reg.entries()[rng.next_below(reg.size())].id);
      }
    }
    auto r = reg.resolve_ids(ids);
    for (const auto& g : r.resolved)
      CHECK(std::find(ids.begin(), ids.end(), g.id) != ids.end());
  }
}
