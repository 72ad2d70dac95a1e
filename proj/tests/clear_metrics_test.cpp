// Copyright 2026 The safemetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "safemetric/clear_metrics.hpp"

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "clear_oracle.hpp"
#include "test_support.hpp"

namespace safemetric {
namespace {

using testing::detect;
using testing::make_object;

FrameTally counts(std::size_t gt, std::size_t matched, std::size_t fp, std::size_t mme = 0) {
  FrameTally t;
  t.gt_count = gt;
  t.misses = gt - matched;
  t.false_positives = fp;
  t.mismatches = mme;
  for (std::size_t i = 0; i < matched; ++i) t.matches.push_back({"o" + std::to_string(i), i, 1.0, 1.0, 1.0, 0.0});
  return t;
}

std::vector<FrameTally> tallies_for(const Fixture& fx, double threshold = 0.5) {
  std::vector<FrameTally> out;
  for (std::size_t t = 0; t < fx.scenario.frames.size(); ++t) {
    out.push_back(match_frame(fx.scenario.frames[t].objects, fx.log.frames[t], threshold, nullptr,
                              fx.scenario.frames[t].index));
  }
  count_mismatches(out, fx.log.frames);
  return out;
}

TEST(MatchFrameTest, PerfectDetectionAllTruePositives) {
  const std::vector<ObjectState> gt = {make_object("a", ObjectClass::kCar, 10, 0),
                                       make_object("b", ObjectClass::kPedestrian, 5, 3, 0, 0, 0.6, 0.6)};
  const std::vector<Detection> det = {detect(gt[1], 0), detect(gt[0], 0)};
  const FrameTally t = match_frame(gt, det);
  EXPECT_EQ(t.matches.size(), 2u);
  EXPECT_EQ(t.misses, 0u);
  EXPECT_EQ(t.false_positives, 0u);
  for (const Match& m : t.matches) {
    EXPECT_DOUBLE_EQ(m.iou, 1.0);
    EXPECT_DOUBLE_EQ(m.center_distance, 0.0);
  }
}

TEST(MatchFrameTest, NoDetectionsAllMissed) {
  const std::vector<ObjectState> gt = {make_object("a", ObjectClass::kCar, 10, 0),
                                       make_object("b", ObjectClass::kCar, 20, 0),
                                       make_object("c", ObjectClass::kCar, 30, 0)};
  const FrameTally t = match_frame(gt, {});
  EXPECT_EQ(t.misses, 3u);
  EXPECT_EQ(t.false_positives, 0u);
  EXPECT_EQ(t.gt_count, 3u);
}

TEST(MatchFrameTest, BelowThresholdIsMissPlusFalsePositive) {
  const std::vector<ObjectState> gt = {make_object("a", ObjectClass::kCar, 0, 0, 0, 0, 1, 1)};
  Detection d = detect(gt[0], 0);
  d.box.center_x = 0.5;  // IoU 1/3
  const FrameTally t = match_frame(gt, std::vector<Detection>{d});
  EXPECT_EQ(t.misses, 1u);
  EXPECT_EQ(t.false_positives, 1u);
  const FrameTally loose = match_frame(gt, std::vector<Detection>{d}, 0.3);
  EXPECT_EQ(loose.matches.size(), 1u);
}

TEST(MatchFrameTest, CrossedTrackIdsAfterSwapGiveTwoMismatches) {
  const ObjectState a = make_object("a", ObjectClass::kCar, 10, 0);
  const ObjectState b = make_object("b", ObjectClass::kCar, 10, 5);
  Fixture fx;
  fx.scenario.frames = {testing::make_frame(0, 0.0, 10, {a, b}), testing::make_frame(1, 0.1, 10, {a, b})};
  fx.log.frames = {{detect(a, 0, "1"), detect(b, 0, "2")}, {detect(a, 0.1, "2"), detect(b, 0.1, "1")}};
  const auto tallies = tallies_for(fx);
  EXPECT_EQ(tallies[0].mismatches, 0u);
  EXPECT_EQ(tallies[1].mismatches, 2u);

  const TrackAssignment prev = track_assignment(tallies[0], fx.log.frames[0]);
  const FrameTally direct = match_frame(fx.scenario.frames[1].objects, fx.log.frames[1], 0.5, &prev, 1);
  EXPECT_EQ(direct.mismatches, 2u);
}

TEST(ClearAggregateTest, ModaMotaExamples) {
  const std::vector<FrameTally> perfect = {counts(5, 5, 0), counts(5, 5, 0)};
  EXPECT_DOUBLE_EQ(*moda(perfect), 1.0);
  EXPECT_DOUBLE_EQ(*mota(perfect), 1.0);

  const std::vector<FrameTally> errs = {counts(5, 3, 1), counts(5, 5, 0)};
  EXPECT_NEAR(*moda(errs), 0.7, 1e-12);
  std::vector<FrameTally> with_mme = errs;
  with_mme[1].mismatches = 1;
  EXPECT_NEAR(*mota(with_mme), 0.6, 1e-12);

  const std::vector<FrameTally> mme_only = {counts(5, 5, 0, 1), counts(5, 5, 0, 1)};
  EXPECT_NEAR(*mota(mme_only), 0.8, 1e-12);
  EXPECT_NEAR(*moda(mme_only), 1.0, 1e-12);

  const std::vector<FrameTally> all_missed = {counts(10, 0, 0)};
  EXPECT_DOUBLE_EQ(*moda(all_missed), 0.0);

  const std::vector<FrameTally> negative = {counts(2, 0, 5)};
  EXPECT_NEAR(*moda(negative), -2.5, 1e-12);

  EXPECT_FALSE(moda(std::vector<FrameTally>{counts(0, 0, 3)}).has_value());
  EXPECT_FALSE(mota(std::vector<FrameTally>{}).has_value());
}

TEST(ClearAggregateTest, ModpExamples) {
  FrameTally f = counts(2, 2, 0);
  f.matches[0].iou = 0.5;
  f.matches[1].iou = 0.7;
  EXPECT_NEAR(*modp(std::vector<FrameTally>{f}), 0.6, 1e-12);
  EXPECT_NEAR(*modp(std::vector<FrameTally>{f, counts(3, 0, 1)}), 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(*modp(std::vector<FrameTally>{counts(2, 2, 0)}), 1.0);
  EXPECT_FALSE(modp(std::vector<FrameTally>{counts(3, 0, 0)}).has_value());
}

TEST(ClearAggregateTest, MotpExamples) {
  FrameTally f = counts(2, 2, 0);
  EXPECT_DOUBLE_EQ(*motp(std::vector<FrameTally>{f}), 0.0);
  f.matches[0].center_distance = 1.0;
  f.matches[1].center_distance = 2.0;
  EXPECT_NEAR(*motp(std::vector<FrameTally>{f}), 1.5, 1e-12);
  FrameTally single = counts(1, 1, 0);
  single.matches[0].center_distance = 6.83;
  EXPECT_DOUBLE_EQ(*motp(std::vector<FrameTally>{single}), 6.83);
  EXPECT_FALSE(motp(std::vector<FrameTally>{counts(1, 0, 0)}).has_value());
}

TEST(NormalizationTest, FnormExamples) {
  const NormalizationThresholds th{0.8, 2.5};
  EXPECT_DOUBLE_EQ(f_norm(0.5, th), 1.0);
  EXPECT_DOUBLE_EQ(f_norm(2.5, th), 0.0);
  EXPECT_NEAR(f_norm(1.65, th), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(motp_s(0.8), 1.0);
  EXPECT_DOUBLE_EQ(motp_s(2.5), 0.0);
  EXPECT_NEAR(motp_s(1.65), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(motp_s(9.0), 0.0);
  EXPECT_THROW(validate(NormalizationThresholds{2.0, 2.0}), ConfigError);
}

TEST(DetectionScoresTest, ExemplarySceneRecallAndPrecision) {
  std::vector<ObjectState> gt;
  for (int i = 0; i < 9; ++i) gt.push_back(make_object("o" + std::to_string(i), ObjectClass::kCar, 10.0 * i, 0));
  std::vector<Detection> det;
  for (int i = 0; i < 5; ++i) det.push_back(detect(gt[static_cast<std::size_t>(i)], 0));
  const std::vector<Frame> frames = {testing::make_frame(0, 0, 10, gt)};
  const std::vector<std::vector<Detection>> dets = {det};
  const std::vector<FrameTally> tallies = {match_frame(gt, det)};
  const DetectionScores s = precision_recall_map(tallies, frames, dets);
  EXPECT_NEAR(*s.recall, 5.0 / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(*s.precision, 1.0);
}

TEST(DetectionScoresTest, NoDetectionsAndPerfectMap) {
  const std::vector<ObjectState> gt = {make_object("a", ObjectClass::kCar, 10, 0),
                                       make_object("b", ObjectClass::kCar, 20, 0)};
  const std::vector<Frame> frames = {testing::make_frame(0, 0, 10, gt)};
  {
    const std::vector<std::vector<Detection>> dets = {{}};
    const std::vector<FrameTally> tallies = {match_frame(gt, dets[0])};
    const DetectionScores s = precision_recall_map(tallies, frames, dets);
    EXPECT_FALSE(s.precision.has_value());
    EXPECT_DOUBLE_EQ(*s.recall, 0.0);
    EXPECT_DOUBLE_EQ(*s.mean_average_precision, 0.0);
  }
  {
    const std::vector<std::vector<Detection>> dets = {{detect(gt[0], 0), detect(gt[1], 0)}};
    const std::vector<FrameTally> tallies = {match_frame(gt, dets[0])};
    EXPECT_DOUBLE_EQ(*precision_recall_map(tallies, frames, dets).mean_average_precision, 1.0);
  }
}

TEST(DetectionScoresTest, AveragePrecisionHandTraced) {
  // Ranked TP, FP, TP with 3 positives: 1/3 * 1 + 1/3 * 2/3.
  const std::vector<char> hits = {1, 0, 1};
  EXPECT_NEAR(average_precision(hits, 3), 1.0 / 3.0 + 2.0 / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<char>{}, 2), 0.0);
}

TEST(ClearProperty, MatchingEqualsExhaustiveSearch) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> n(0, 6);
  for (int i = 0; i < 1000; ++i) {
    std::vector<ObjectState> gt;
    std::vector<Detection> det;
    const int ng = n(rng), nd = n(rng);
    for (int k = 0; k < ng; ++k) {
      ObjectState o;
      o.id = std::to_string(k);
      o.box = testing::random_box(rng, 2.5);
      gt.push_back(o);
    }
    for (int k = 0; k < nd; ++k) {
      Detection d;
      d.box = gt.empty() || k % 3 == 2 ? testing::random_box(rng, 2.5)
                                       : testing::perturb_box(rng, gt[static_cast<std::size_t>(k) % gt.size()].box, 0.4);
      det.push_back(d);
    }
    const FrameTally t = match_frame(gt, det);
    const auto pairs = oracle::best_matching(gt, det, 0.5);
    double lib = 0, ref = 0;
    for (const Match& m : t.matches) lib += m.iou;
    for (const auto& p : pairs) ref += iou(det[p.det].box, gt[p.gt].box);
    EXPECT_NEAR(lib, ref, 1e-9) << "case " << i;
    EXPECT_EQ(t.matches.size(), pairs.size()) << "case " << i;
    EXPECT_EQ(t.gt_count, t.matches.size() + t.misses);
    EXPECT_EQ(det.size(), t.matches.size() + t.false_positives);
  }
}

TEST(ClearProperty, AggregatesMatchOracleOnRandomScenarios) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 100; ++i) {
    const Fixture fx = testing::random_fixture(rng);
    const auto tallies = tallies_for(fx);
    const auto ref = oracle::evaluate(fx.scenario, fx.log);
    auto same = [&](std::optional<double> a, std::optional<double> b, const char* what) {
      ASSERT_EQ(a.has_value(), b.has_value()) << what << " case " << i;
      if (a) {
        EXPECT_NEAR(*a, *b, 1e-9) << what << " case " << i;
      }
    };
    same(moda(tallies), ref.moda, "MODA");
    same(mota(tallies), ref.mota, "MOTA");
    same(modp(tallies), ref.modp, "MODP");
    same(motp(tallies), ref.motp, "MOTP");
    const auto scores = precision_recall_map(tallies, fx.scenario.frames, fx.log.frames);
    same(scores.precision, ref.precision, "precision");
    same(scores.recall, ref.recall, "recall");
    same(scores.mean_average_precision, ref.map, "mAP");
    for (const FrameTally& t : tallies) EXPECT_LE(t.mismatches, t.matches.size());
  }
}

TEST(ClearProperty, ModaEqualsMotaWithoutMismatches) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 1000; ++i) {
    Fixture fx = testing::random_fixture(rng, 5, 8);
    for (auto& frame : fx.log.frames)
      for (auto& d : frame) d.track_id.reset();
    const auto tallies = tallies_for(fx);
    const auto a = moda(tallies), b = mota(tallies);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_DOUBLE_EQ(*a, *b);
    }
  }
}

TEST(ClearProperty, InjectedErrorsNeverRaiseModaOrMota) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 1000; ++i) {
    const Fixture fx = testing::random_fixture(rng, 5, 8);
    const auto base = tallies_for(fx);
    const auto m0 = moda(base), t0 = mota(base);
    if (!m0) continue;
    std::uniform_int_distribution<std::size_t> frame(0, base.size() - 1);
    for (int kind = 0; kind < 3; ++kind) {
      auto changed = base;
      FrameTally& f = changed[frame(rng)];
      if (kind == 0) {
        // The perception system loses a matched object; the world is unchanged.
        if (f.matches.empty()) continue;
        f.matches.pop_back();
        ++f.misses;
        f.mismatches = std::min(f.mismatches, f.matches.size());
      } else if (kind == 1) {
        ++f.false_positives;
      } else if (!f.matches.empty()) {
        f.mismatches = std::min(f.mismatches + 1, f.matches.size());
      }
      EXPECT_LE(*moda(changed), *m0 + 1e-12);
      EXPECT_LE(*mota(changed), *t0 + 1e-12);
    }
  }
}

TEST(ClearProperty, MotpSafetyMonotoneWithExactPlateaus) {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_GE(motp_s(std::min(a, b)), motp_s(std::max(a, b)));
    if (a < 0.8) {
      EXPECT_EQ(motp_s(a), 1.0);
    }
    if (a > 2.5) {
      EXPECT_EQ(motp_s(a), 0.0);
    }
  }
}

}  // namespace
}  // namespace safemetric
