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

#include "safemetric/collision_relevance.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace safemetric {
namespace {

using testing::make_frame;
using testing::make_object;

RssParams params(double rho, double accel, double brake_min, double brake_max) {
  RssParams p;
  p.response_time = rho;
  p.a_accel_max = accel;
  p.a_brake_min = brake_min;
  p.a_brake_max = brake_max;
  return p;
}

TEST(RssTest, LongitudinalSameExamples) {
  EXPECT_DOUBLE_EQ(rss_longitudinal_same(12, 12, params(0, 2, 6, 6)), 0.0);
  EXPECT_DOUBLE_EQ(rss_longitudinal_same(0, 10, params(0, 2, 4, 8)), 0.0);
  EXPECT_NEAR(rss_longitudinal_same(20, 10, params(1, 2, 4, 8)), 75.25, 1e-12);
  // Defaults: 7.5 + 0.25 + 16^2 / 8.
  EXPECT_NEAR(rss_longitudinal_same(15, 0, RssParams{}), 39.75, 1e-12);
}

TEST(RssTest, LongitudinalOppositeExamples) {
  const RssParams p = params(0, 2, 4, 8);
  EXPECT_DOUBLE_EQ(rss_longitudinal_opposite(0, 0, p), 0.0);
  EXPECT_NEAR(rss_longitudinal_opposite(10, 10, p), 25.0, 1e-12);
  EXPECT_DOUBLE_EQ(rss_longitudinal_opposite(3, 7, RssParams{}), rss_longitudinal_opposite(7, 3, RssParams{}));
}

TEST(RssTest, LateralExamples) {
  RssParams p;
  p.response_time = 0.0;
  EXPECT_DOUBLE_EQ(rss_lateral(0, 0, p), 0.2);
  EXPECT_DOUBLE_EQ(rss_lateral(-5, 5, RssParams{}), 0.2);
  // travel1 = 2.5*0.25 + 1.5^2/2 = 1.75; travel2 = -1.75.
  EXPECT_NEAR(rss_lateral(1, -1, RssParams{}), 0.2 + 3.5, 1e-12);
}

TEST(BrakingTest, HorizonIsBufferedBrakingTime) {
  const BrakingModel b{20.0, 8.0};
  EXPECT_DOUBLE_EQ(b.braking_time(), 2.5);
  EXPECT_DOUBLE_EQ(b.prediction_horizon(), 1.1 * 2.5);
  EXPECT_DOUBLE_EQ((BrakingModel{0.0, 8.0}).prediction_horizon(), 0.0);
  EXPECT_NEAR(EnvironmentParams{}.brake_deceleration(), 0.8 * 9.81, 1e-12);
}

TEST(PredictTest, ConstantVelocityExtrapolation) {
  Frame f = make_frame(0, 0, 10, {make_object("a", ObjectClass::kCar, 10, 0, -1, 0)});
  const TrajectorySet tr = predict_positions(f, BrakingModel{10.0, 11.0}, 0.1);
  ASSERT_EQ(tr.offsets.size(), 11u);
  EXPECT_NEAR(tr.offsets.back(), 1.0, 1e-12);
  EXPECT_NEAR(tr.objects[0].back().x, 9.0, 1e-12);
  EXPECT_NEAR(tr.objects[0].back().y, 0.0, 1e-12);
  EXPECT_NEAR(tr.ego.back().x, 10.0, 1e-12);

  Frame still = make_frame(0, 0, 0, {make_object("a", ObjectClass::kCar, 10, 0)});
  const TrajectorySet one = predict_positions(still, BrakingModel{0.0, 7.0});
  ASSERT_EQ(one.offsets.size(), 1u);
  EXPECT_EQ(one.objects[0][0], (Vec2{10, 0}));
  EXPECT_THROW(predict_positions(still, BrakingModel{1.0, 7.0}, 0.0), ConfigError);
}

std::set<std::string> critical_ids(const Frame& f, const EnvironmentParams& env = {}) {
  const TrajectorySet tr = predict_positions(f, BrakingModel{f.ego.speed, env.brake_deceleration()});
  return mark_critical(f, tr, env.rss);
}

TEST(MarkCriticalTest, Examples) {
  EXPECT_TRUE(critical_ids(make_frame(0, 0, 3, {make_object("far", ObjectClass::kCar, 200, 0, 2, 0)})).empty());
  EXPECT_EQ(critical_ids(make_frame(0, 0, 15, {make_object("stop", ObjectClass::kCar, 5, 0)})),
            std::set<std::string>{"stop"});
  EXPECT_TRUE(critical_ids(make_frame(0, 0, 10, {make_object("behind", ObjectClass::kCar, -20, 0, -5, 0)})).empty());
  // Adjacent lane, no lateral motion: lateral gap 3.5 - 1.8 > 0.2.
  EXPECT_TRUE(critical_ids(make_frame(0, 0, 15, {make_object("side", ObjectClass::kCar, 5, 3.5)})).empty());
}

// Axis-aligned reference for the criticality predicate, stepping time directly.
bool oracle_critical(const Frame& f, const ObjectState& o, const EnvironmentParams& env) {
  const double tp = 1.1 * f.ego.speed / env.brake_deceleration();
  const RssParams& p = env.rss;
  for (int k = 0; k <= static_cast<int>(std::ceil(tp / 0.1 - 1e-9)); ++k) {
    const double t = 0.1 * k;
    const double ex = f.ego.position.x + f.ego.speed * t;
    const double ox = o.box.center_x + o.velocity.x * t;
    const double oy = o.box.center_y + o.velocity.y * t;
    const double gap_long = std::abs(ox - ex) - (f.ego.length + o.box.length) / 2;
    const double gap_lat = std::abs(oy - f.ego.position.y) - (f.ego.width + o.box.width) / 2;
    double need_long;
    if (ox >= ex) {
      need_long = o.velocity.x >= 0 ? rss_longitudinal_same(f.ego.speed, o.velocity.x, p)
                                    : rss_longitudinal_opposite(f.ego.speed, -o.velocity.x, p);
    } else {
      need_long = rss_longitudinal_same(std::max(0.0, o.velocity.x), f.ego.speed, p);
    }
    // Object to the left moving right closes the gap, and vice versa.
    const double closing = oy >= f.ego.position.y ? -o.velocity.y : o.velocity.y;
    const double rho = p.response_time, a = p.a_lat_accel_max, b = p.a_lat_brake_min;
    const double vr = closing + rho * a;
    const double travel = (2 * closing + rho * a) * rho / 2 + vr * std::abs(vr) / (2 * b) -
                          (-rho * a) * rho / 2 + rho * a * rho * a / (2 * b);
    const double need_lat = p.lateral_fluctuation + std::max(0.0, travel);
    if (gap_long < need_long && gap_lat < need_lat) return true;
  }
  return false;
}

TEST(MarkCriticalTest, MatchesStepwiseOracle) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> x(-40, 120), y(-10, 10), v(-20, 30), vy(-3, 3), ego(0, 35);
  int critical = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<ObjectState> objs;
    for (int k = 0; k < 4; ++k) {
      objs.push_back(make_object("o" + std::to_string(k), ObjectClass::kCar, x(rng), y(rng), v(rng), vy(rng)));
    }
    const Frame f = make_frame(0, 0, ego(rng), objs, {5.0, 0.0});
    const EnvironmentParams env;
    const auto got = critical_ids(f, env);
    for (const ObjectState& o : objs) {
      EXPECT_EQ(got.contains(o.id), oracle_critical(f, o, env)) << "case " << i << " " << o.id;
      critical += got.contains(o.id) ? 1 : 0;
    }
  }
  EXPECT_GT(critical, 100);
}

TEST(MarkCriticalTest, RotatedSceneGivesSameResult) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> x(-40, 120), y(-10, 10), v(-20, 30), ang(-3, 3);
  for (int i = 0; i < 300; ++i) {
    const Frame f = make_frame(0, 0, 20, {make_object("a", ObjectClass::kCar, x(rng), y(rng), v(rng), 0)});
    const double th = ang(rng);
    const double c = std::cos(th), s = std::sin(th);
    Frame r = f;
    r.ego.yaw = th;
    ObjectState& o = r.objects[0];
    const Vec2 p = f.objects[0].box.center(), vel = f.objects[0].velocity;
    o.box.center_x = c * p.x - s * p.y;
    o.box.center_y = s * p.x + c * p.y;
    o.box.yaw = th;
    o.velocity = {c * vel.x - s * vel.y, s * vel.x + c * vel.y};
    EXPECT_EQ(critical_ids(f), critical_ids(r)) << "case " << i;
  }
}

TEST(SeverityTest, Examples) {
  EgoState ego;
  ego.speed = 10;
  ObjectState same = make_object("a", ObjectClass::kCar, 10, 0, 10, 0);
  ImpactAssessment ia = impact_severity(ego, same);
  EXPECT_EQ(ia.geometry, CollisionGeometry::kRearEnd);
  EXPECT_DOUBLE_EQ(ia.impact_speed, 0.0);
  EXPECT_DOUBLE_EQ(ia.severity, 0.9);

  ego.speed = 15;
  const ObjectState ped = make_object("p", ObjectClass::kPedestrian, 10, 0, 0, 0, 0.6, 0.6);
  EXPECT_DOUBLE_EQ(impact_severity(ego, ped).severity, 0.5);
  ego.speed = 16;
  EXPECT_DOUBLE_EQ(impact_severity(ego, ped).severity, 0.0);

  ego.speed = 10;
  const ObjectState oncoming = make_object("o", ObjectClass::kCar, 30, 0, -10, 0, 4.5, 1.8, std::numbers::pi);
  ia = impact_severity(ego, oncoming);
  EXPECT_EQ(ia.geometry, CollisionGeometry::kHeadOn);
  EXPECT_DOUBLE_EQ(ia.impact_speed, 20.0);
  EXPECT_DOUBLE_EQ(ia.severity, 0.5);
}

TEST(SeverityTest, ScoreLookupAndValidation) {
  EXPECT_DOUBLE_EQ(severity_score(2.0, RoadUserCategory::kVru), 0.9);
  EXPECT_DOUBLE_EQ(severity_score(5.0, RoadUserCategory::kVru), 0.75);
  EXPECT_DOUBLE_EQ(severity_score(5.0, RoadUserCategory::kCrumpleZone), 0.75);
  EXPECT_DOUBLE_EQ(severity_score(22.2, RoadUserCategory::kCrumpleZone), 0.0);
  EXPECT_THROW(validate(SeverityThresholds{{3, 2, 5}, {1, 2, 3}}), ConfigError);
}

TEST(GeometryClassTest, HeadingDifferenceBands) {
  constexpr double kPi = std::numbers::pi;
  EXPECT_EQ(collision_geometry(0, 0.1), CollisionGeometry::kRearEnd);
  EXPECT_EQ(collision_geometry(0, kPi), CollisionGeometry::kHeadOn);
  EXPECT_EQ(collision_geometry(1.0, 1.0 - kPi / 2), CollisionGeometry::kSideOn);
  EXPECT_EQ(collision_geometry(0, kPi / 3), CollisionGeometry::kDiagonal);
  EXPECT_EQ(collision_geometry(0, -2 * kPi / 3), CollisionGeometry::kDiagonal);
}

TEST(RelevanceTest, FrameFactorExamples) {
  EXPECT_DOUBLE_EQ(frame_relevance_factor(std::vector<CriticalityRecord>{}), 1.0);
  std::vector<CriticalityRecord> recs(3);
  recs[0].severity = 0.75;
  recs[1].severity = 0.5;
  EXPECT_DOUBLE_EQ(frame_relevance_factor(recs), 0.5);
}

TEST(RelevanceTest, UndetectedFatalVruGivesZero) {
  // Ego at 17 m/s, cyclist ahead at 1 m/s: impact 16 m/s.
  const ObjectState cyclist = make_object("c", ObjectClass::kCyclist, 18, 0.5, 1, 0, 1.8, 0.6);
  const Frame f = make_frame(0, 0, 17, {cyclist});
  const auto missed = assess_frame(f, match_frame(f.objects, std::vector<Detection>{}), EnvironmentParams{});
  ASSERT_EQ(missed.size(), 1u);
  EXPECT_TRUE(missed[0].critical);
  EXPECT_TRUE(missed[0].undetected);
  EXPECT_DOUBLE_EQ(frame_relevance_factor(missed), 0.0);

  const std::vector<Detection> det = {testing::detect(cyclist, 0)};
  const auto seen = assess_frame(f, match_frame(f.objects, det), EnvironmentParams{});
  EXPECT_TRUE(seen[0].critical);
  EXPECT_FALSE(seen[0].severity.has_value());
  EXPECT_DOUBLE_EQ(frame_relevance_factor(seen), 1.0);
}

Frame random_scene(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> x(-30, 80), y(-8, 8), v(-15, 25), vy(-2, 2), ego(0, 30);
  std::uniform_int_distribution<int> cls(0, 6);
  std::vector<ObjectState> objs;
  for (int k = 0; k < n; ++k) {
    ObjectState o = make_object("o" + std::to_string(k), static_cast<ObjectClass>(cls(rng)), x(rng), y(rng), v(rng), vy(rng));
    o.box.yaw = std::atan2(o.velocity.y, o.velocity.x);
    objs.push_back(o);
  }
  return make_frame(0, 0, ego(rng), objs);
}

TEST(RelevanceProperty, RssDistancesNonNegativeAndMonotone) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> sp(0, 40), lat(-5, 5), rho(0, 2), acc(0.5, 10);
  for (int i = 0; i < 1000; ++i) {
    RssParams p = params(rho(rng), acc(rng), acc(rng), acc(rng));
    p.a_lat_accel_max = acc(rng);
    p.a_lat_brake_min = acc(rng);
    const double a = sp(rng), b = sp(rng), c = sp(rng);
    EXPECT_GE(rss_longitudinal_same(a, b, p), 0.0);
    EXPECT_GE(rss_longitudinal_opposite(a, b, p), 0.0);
    EXPECT_GE(rss_lateral(lat(rng), lat(rng), p), p.lateral_fluctuation);
    EXPECT_LE(rss_longitudinal_same(std::min(a, c), b, p), rss_longitudinal_same(std::max(a, c), b, p) + 1e-12);
    EXPECT_GE(rss_longitudinal_same(a, std::min(b, c), p) + 1e-12, rss_longitudinal_same(a, std::max(b, c), p));
    RssParams q = p;
    q.response_time = p.response_time + rho(rng);
    EXPECT_LE(rss_longitudinal_same(a, b, p), rss_longitudinal_same(a, b, q) + 1e-12);
    EXPECT_LE(rss_longitudinal_opposite(a, b, p), rss_longitudinal_opposite(a, b, q) + 1e-12);
    const double v1 = std::abs(lat(rng)), v2 = -std::abs(lat(rng));
    EXPECT_LE(rss_lateral(v1, v2, p), rss_lateral(v1, v2, q) + 1e-12);
  }
}

TEST(RelevanceProperty, BrakingHorizonScaling) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> v(0, 50), a(0.5, 12);
  for (int i = 0; i < 1000; ++i) {
    const BrakingModel b{v(rng), a(rng)};
    EXPECT_NEAR(b.prediction_horizon(), 1.1 * b.speed / b.deceleration, 1e-12);
    const BrakingModel doubled{b.speed, 2 * b.deceleration};
    EXPECT_NEAR(doubled.braking_time(), b.braking_time() / 2, 1e-12);
    EXPECT_NEAR(doubled.prediction_horizon(), b.prediction_horizon() / 2, 1e-12);
  }
}

TEST(RelevanceProperty, FactorValuesDetectionAndInjection) {
  std::mt19937_64 rng(55);
  const std::set<double> allowed = {1.0, 0.9, 0.75, 0.5, 0.0};
  for (int i = 0; i < 1000; ++i) {
    Frame f = random_scene(rng, 5);
    std::vector<Detection> det;
    for (std::size_t k = 0; k < f.objects.size(); k += 2) det.push_back(testing::detect(f.objects[k], 0));
    const auto recs = assess_frame(f, match_frame(f.objects, det), EnvironmentParams{});
    const double fc = frame_relevance_factor(recs);
    EXPECT_TRUE(allowed.contains(fc)) << fc;
    for (const auto& r : recs) {
      if (!r.undetected) {
        EXPECT_FALSE(r.severity.has_value());
      }
      EXPECT_EQ(r.severity.has_value(), r.critical && r.undetected);
      EXPECT_GE(r.impact_speed, 0.0);
    }
    // Stopped obstacle right in front of the ego is always critical when missed.
    Frame injected = f;
    injected.objects.push_back(make_object("inj", ObjectClass::kPedestrian, 2.6, 0.0, 0, 0, 0.6, 0.6));
    const auto recs2 = assess_frame(injected, match_frame(injected.objects, det), EnvironmentParams{});
    EXPECT_TRUE(recs2.back().critical);
    EXPECT_LE(frame_relevance_factor(recs2), fc);
  }
}

TEST(RelevanceProperty, LowerFrictionNeverShrinksCriticalSet) {
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> mu(0.1, 1.2);
  for (int i = 0; i < 1000; ++i) {
    const Frame f = random_scene(rng, 5);
    EnvironmentParams hi, lo;
    hi.friction = mu(rng);
    lo.friction = hi.friction * 0.7;
    const auto a = critical_ids(f, hi);
    const auto b = critical_ids(f, lo);
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end())) << "case " << i;
  }
}

}  // namespace
}  // namespace safemetric
