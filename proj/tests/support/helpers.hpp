#pragma once
// Shared test plumbing: fixture paths, temp dirs, mock-script builders,
// random sample generation.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mgtd/calibration.hpp"
#include "mgtd/util.hpp"

#ifndef MGTD_REPO_DATA_DIR
#define MGTD_REPO_DATA_DIR "data"
#endif
#ifndef MGTD_TEST_DATA_DIR
#define MGTD_TEST_DATA_DIR "tests/data"
#endif

namespace testsupport {

inline std::filesystem::path repo_data_dir() { return MGTD_REPO_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return MGTD_TEST_DATA_DIR; }

// Fresh directory under the system temp root; unique per call.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("mgtd_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string agent_reply(const std::string& decision, double confidence,
                               const std::string& reasoning = "scripted") {
  nlohmann::ordered_json j;
  j["reasoning"] = reasoning;
  j["final_decision"] = decision;
  j["confidence"] = confidence;
  return j.dump();
}

// Builds mock-backend scripts rule by rule; first match wins.
class ScriptBuilder {
 public:
  ScriptBuilder& add(const std::vector<std::string>& system_contains,
                     const std::vector<std::string>& user_contains, const std::string& reply,
                     int delay_ms = 0) {
    nlohmann::ordered_json rule;
    nlohmann::ordered_json when;
    if (!system_contains.empty()) when["system_contains"] = system_contains;
    if (!user_contains.empty()) when["user_contains"] = user_contains;
    if (!when.empty()) rule["when"] = when;
    rule["reply"] = reply;
    if (delay_ms > 0) rule["delay_ms"] = delay_ms;
    rules_.push_back(std::move(rule));
    return *this;
  }

  ScriptBuilder& add_default(const std::string& reply) { return add({}, {}, reply); }

  std::string str() const {
    nlohmann::ordered_json doc;
    doc["replies"] = rules_;
    return doc.dump(2);
  }

  std::filesystem::path write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    out << str();
    return path;
  }

 private:
  nlohmann::ordered_json rules_ = nlohmann::ordered_json::array();
};

// Random steered tuples: 1..5 samples over distinct levels, random decisions,
// confidences drawn either continuously or on a coarse lattice (the lattice
// makes distance ties actually occur).
inline std::vector<mgtd::SteeredSample> random_samples(mgtd::SplitMix64& rng) {
  const int n = 1 + static_cast<int>(rng.next_below(5));
  int level_order[5] = {1, 2, 3, 4, 5};
  for (int i = 0; i < 5; ++i) {
    int j = i + static_cast<int>(rng.next_below(5 - i));
    std::swap(level_order[i], level_order[j]);
  }
  std::sort(level_order, level_order + n);

  const bool lattice = rng.next_below(2) == 0;
  std::vector<mgtd::SteeredSample> samples;
  for (int i = 0; i < n; ++i) {
    mgtd::SteeredSample s;
    s.level = mgtd::steering_level_at(level_order[i]);
    s.decision = rng.next_below(2) == 0 ? mgtd::Decision::AI : mgtd::Decision::Human;
    s.confidence = lattice ? static_cast<double>(rng.next_below(11)) / 10.0
                           : static_cast<double>(rng.next_below(1000000)) / 999999.0;
    samples.push_back(s);
  }
  return samples;
}

}  // namespace testsupport
