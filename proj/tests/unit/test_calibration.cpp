#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "mgtd/calibration.hpp"
#include "mgtd/util.hpp"

#include "../support/calibration_oracle.hpp"
#include "../support/helpers.hpp"

using namespace mgtd;
using testsupport::oracle_calibrate;

namespace {

SteeredSample sample(int level, Decision d, double c) {
  return {steering_level_at(level), d, c, ""};
}

std::vector<SteeredSample> five(std::vector<Decision> ds, std::vector<double> cs) {
  std::vector<SteeredSample> out;
  for (int i = 0; i < 5; ++i) out.push_back(sample(i + 1, ds[i], cs[i]));
  return out;
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("answer consistency counts the majority decision") {
  auto all_ai = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                     {0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(answer_consistency(all_ai) == 1.0);

  auto mixed = five({Decision::AI, Decision::AI, Decision::AI, Decision::Human, Decision::Human},
                    {0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(answer_consistency(mixed) == doctest::Approx(0.6).epsilon(kTol));

  std::vector<SteeredSample> split = {sample(1, Decision::AI, 0.5),
                                      sample(2, Decision::Human, 0.5)};
  CHECK(answer_consistency(split) == 0.5);

  CHECK_THROWS_AS(answer_consistency({}), std::invalid_argument);
}

TEST_CASE("confidence consistency: mean, population std-dev, kappa_conf") {
  auto flat = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                   {0.8, 0.8, 0.8, 0.8, 0.8});
  auto cc = confidence_consistency(flat);
  CHECK(cc.mu == doctest::Approx(0.8).epsilon(kTol));
  CHECK(cc.sigma == 0.0);
  CHECK(cc.kappa_conf == 1.0);

  // Frozen oracle values for confidences [0.9, 0.8, 0.7, 0.6, 0.5].
  auto ramp = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                   {0.9, 0.8, 0.7, 0.6, 0.5});
  cc = confidence_consistency(ramp);
  CHECK(std::fabs(cc.mu - 0.7) <= kTol);
  CHECK(std::fabs(cc.sigma - 0.14142135623730953) <= kTol);
  CHECK(std::fabs(cc.kappa_conf - 0.83192563964656033) <= kTol);

  // All-zero confidences force sigma = 0, so kappa_conf stays 1.
  auto zeros = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                    {0, 0, 0, 0, 0});
  cc = confidence_consistency(zeros);
  CHECK(cc.mu == 0.0);
  CHECK(cc.sigma == 0.0);
  CHECK(cc.kappa_conf == 1.0);

  CHECK_THROWS_AS(confidence_consistency({}), std::invalid_argument);
}

TEST_CASE("calibrate: unanimous zero-variance tuple") {
  auto samples = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                      {0.8, 0.8, 0.8, 0.8, 0.8});
  auto r = calibrate(samples);
  CHECK(r.kappa_ans == 1.0);
  CHECK(r.kappa_conf == 1.0);
  CHECK(std::fabs(r.c_cal - 0.8) <= kTol);
  CHECK(r.chosen_level == SteeringLevel::Vanilla);  // 5-way tie breaks toward Vanilla
  CHECK(r.final_decision == Decision::AI);
  CHECK(r.sample_count == 5);
}

TEST_CASE("calibrate: mixed decisions, descending confidences") {
  auto samples = five({Decision::AI, Decision::AI, Decision::AI, Decision::Human, Decision::Human},
                      {0.9, 0.8, 0.7, 0.6, 0.5});
  auto r = calibrate(samples);
  CHECK(std::fabs(r.kappa_ans - 0.6) <= kTol);
  CHECK(std::fabs(r.mu - 0.7) <= kTol);
  CHECK(std::fabs(r.kappa_conf - 0.83192563964656033) <= kTol);
  CHECK(std::fabs(r.c_cal - 0.34940876865155535) <= kTol);
  CHECK(r.chosen_level == SteeringLevel::VeryConfident);  // |0.5 - c_cal| is smallest
  CHECK(r.final_decision == Decision::Human);
}

TEST_CASE("calibrate: unanimous decisions, ascending confidences") {
  auto samples = five({Decision::AI, Decision::AI, Decision::AI, Decision::AI, Decision::AI},
                      {0.2, 0.4, 0.6, 0.8, 1.0});
  auto r = calibrate(samples);
  CHECK(r.kappa_ans == 1.0);
  CHECK(std::fabs(r.mu - 0.6) <= kTol);
  CHECK(std::fabs(r.sigma - 0.28284271247461901) <= kTol);
  CHECK(std::fabs(r.kappa_conf - 0.67962275898295921) <= kTol);
  CHECK(std::fabs(r.c_cal - 0.4077736553897755) <= kTol);
  CHECK(r.chosen_level == SteeringLevel::Cautious);  // confidence 0.4 sits closest
  CHECK(r.final_decision == Decision::AI);
}

TEST_CASE("calibrate: single sample degrades to identity") {
  std::vector<SteeredSample> one = {sample(4, Decision::Human, 0.35)};
  auto r = calibrate(one);
  CHECK(r.kappa_ans == 1.0);
  CHECK(r.kappa_conf == 1.0);
  CHECK(r.c_cal == doctest::Approx(0.35).epsilon(kTol));
  CHECK(r.chosen_level == SteeringLevel::Confident);
  CHECK(r.final_decision == Decision::Human);
  CHECK(r.sample_count == 1);

  CHECK_THROWS_AS(calibrate({}), std::invalid_argument);
}

TEST_CASE("calibrate: distance ties prefer nearest-to-Vanilla, then lower index") {
  // Equal confidences with mixed decisions: every |c_k - c_cal| ties.
  // No Vanilla present -> Cautious(2) and Confident(4) tie on vanilla
  // distance; the lower index wins.
  std::vector<SteeredSample> no_vanilla = {
      sample(1, Decision::AI, 0.8), sample(2, Decision::AI, 0.8),
      sample(4, Decision::AI, 0.8), sample(5, Decision::Human, 0.8)};
  auto r = calibrate(no_vanilla);
  CHECK(r.chosen_level == SteeringLevel::Cautious);
  CHECK(r.final_decision == Decision::AI);

  // With Vanilla present it wins the tie outright.
  auto mixed_flat = five({Decision::AI, Decision::AI, Decision::AI, Decision::Human,
                          Decision::Human},
                         {0.5, 0.5, 0.5, 0.5, 0.5});
  r = calibrate(mixed_flat);
  CHECK(r.chosen_level == SteeringLevel::Vanilla);
  CHECK(r.final_decision == Decision::AI);
}

TEST_CASE("calibrate matches the independent oracle on random tuples") {
  SplitMix64 rng(0xC0FFEE);
  for (int trial = 0; trial < 2000; ++trial) {
    auto samples = testsupport::random_samples(rng);
    auto got = calibrate(samples);
    auto want = oracle_calibrate(samples);
    CHECK(std::fabs(got.kappa_ans - want.kappa_ans) <= kTol);
    CHECK(std::fabs(got.mu - want.mu) <= kTol);
    CHECK(std::fabs(got.sigma - want.sigma) <= kTol);
    CHECK(std::fabs(got.kappa_conf - want.kappa_conf) <= kTol);
    CHECK(std::fabs(got.c_cal - want.c_cal) <= kTol);
    CHECK(got.chosen_level == samples[want.chosen_index].level);
    CHECK(got.final_decision == samples[want.chosen_index].decision);
  }
}

TEST_CASE("calibrate invariants on random tuples") {
  SplitMix64 rng(0xBADA55);
  for (int trial = 0; trial < 1000; ++trial) {
    auto samples = testsupport::random_samples(rng);
    auto r = calibrate(samples);

    CHECK(r.kappa_ans >= 0.5);
    if (samples.size() == 5) CHECK(r.kappa_ans >= 0.6);
    CHECK((r.kappa_conf == 1.0) == (r.sigma == 0.0));
    CHECK(r.c_cal >= 0.0);
    CHECK(r.c_cal <= r.mu + kTol);
    CHECK(r.mu <= 1.0 + kTol);

    // c_cal is symmetric in the samples.
    auto shuffled = samples;
    for (std::size_t i = 0; i + 1 < shuffled.size(); ++i) {
      std::size_t j = i + rng.next_below(shuffled.size() - i);
      std::swap(shuffled[i], shuffled[j]);
    }
    auto rs = calibrate(shuffled);
    CHECK(std::fabs(rs.c_cal - r.c_cal) <= kTol);
    CHECK(std::fabs(rs.kappa_ans - r.kappa_ans) <= kTol);
    CHECK(std::fabs(rs.kappa_conf - r.kappa_conf) <= kTol);

    // Scaling confidences by a common factor keeps both kappas and scales
    // c_cal linearly (checked loosely; floating-point scaling is inexact).
    const double lambda = 0.25 + static_cast<double>(rng.next_below(76)) / 100.0;
    auto scaled = samples;
    for (auto& s : scaled) s.confidence *= lambda;
    auto rl = calibrate(scaled);
    CHECK(std::fabs(rl.kappa_ans - r.kappa_ans) <= 1e-9);
    CHECK(std::fabs(rl.kappa_conf - r.kappa_conf) <= 1e-9);
    CHECK(std::fabs(rl.c_cal - lambda * r.c_cal) <= 1e-9);
  }
}
