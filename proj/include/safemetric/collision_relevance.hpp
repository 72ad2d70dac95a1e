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

// Collision relevance of ground-truth objects.
//
// Ego and objects are extrapolated at constant velocity over the ego's
// braking horizon; an object is safety critical when at some predicted step
// it sits inside both the longitudinal and the lateral RSS safety distance.
// Critical objects the perception system missed are rated by approximate
// impact speed and road-user category; the worst rating in a frame is the
// frame's relevance factor.

#ifndef SAFEMETRIC_COLLISION_RELEVANCE_HPP_
#define SAFEMETRIC_COLLISION_RELEVANCE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "safemetric/clear_metrics.hpp"
#include "safemetric/error.hpp"
#include "safemetric/geometry.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

/// Ego braking to standstill at a constant deceleration.
struct BrakingModel {
  double speed = 0.0;         // m/s
  double deceleration = 7.848;  // m/s^2

  double braking_time() const { return speed / deceleration; }
  /// Braking time plus a ten percent buffer.
  double prediction_horizon() const { return 1.1 * braking_time(); }
};

// RSS minimum safe distances. All results are clearances in metres.

/// Same direction of travel, rear vehicle behind front vehicle.
inline double rss_longitudinal_same(double v_rear, double v_front, const RssParams& p) {
  const double rho = p.response_time;
  const double v_rho = v_rear + rho * p.a_accel_max;
  const double d = v_rear * rho + 0.5 * p.a_accel_max * rho * rho +
                   v_rho * v_rho / (2.0 * p.a_brake_min) -
                   v_front * v_front / (2.0 * p.a_brake_max);
  return std::max(0.0, d);
}

/// Opposite directions of travel, approaching each other.
inline double rss_longitudinal_opposite(double v1, double v2_abs, const RssParams& p) {
  const double rho = p.response_time;
  const double a = p.a_accel_max;
  const double v1_rho = v1 + rho * a;
  const double v2_rho = v2_abs + rho * a;
  const double d = (2.0 * v1 + rho * a) * rho / 2.0 + v1_rho * v1_rho / (2.0 * p.a_brake_min) +
                   (2.0 * v2_abs + rho * a) * rho / 2.0 + v2_rho * v2_rho / (2.0 * p.a_brake_min);
  return std::max(0.0, d);
}

/// Lateral distance; object 1 is left of object 2 and both velocities are
/// measured along the axis pointing from 1 towards 2.
///
/// The braking terms keep the sign of the velocity (v|v| rather than v^2), so
/// the closed form is unchanged for approaching objects while diverging
/// objects reduce the requirement to the fluctuation margin.
inline double rss_lateral(double v1_lat, double v2_lat, const RssParams& p) {
  const double rho = p.response_time;
  const double a = p.a_lat_accel_max;
  const double b = p.a_lat_brake_min;
  const double v1_rho = v1_lat + rho * a;
  const double v2_rho = v2_lat - rho * a;
  const double travel1 = (2.0 * v1_lat + rho * a) * rho / 2.0 + v1_rho * std::abs(v1_rho) / (2.0 * b);
  const double travel2 = (2.0 * v2_lat - rho * a) * rho / 2.0 + v2_rho * std::abs(v2_rho) / (2.0 * b);
  return p.lateral_fluctuation + std::max(0.0, travel1 - travel2);
}

/// Constant-velocity positions at t_a + k*dt, k = 0 .. ceil(t_p / dt).
struct TrajectorySet {
  std::vector<double> offsets;
  std::vector<Vec2> ego;
  /// Indexed like Frame::objects, then by step.
  std::vector<std::vector<Vec2>> objects;
};

inline TrajectorySet predict_positions(const Frame& frame, const BrakingModel& braking,
                                       double dt = 0.1) {
  if (!(dt > 0.0)) throw ConfigError("prediction.dt must be > 0");
  const double horizon = braking.prediction_horizon();
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  TrajectorySet out;
  out.objects.resize(frame.objects.size());
  const Vec2 ego_velocity = frame.ego.velocity();
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.offsets.push_back(t);
    out.ego.push_back(frame.ego.position + t * ego_velocity);
    for (std::size_t i = 0; i < frame.objects.size(); ++i) {
      const ObjectState& o = frame.objects[i];
      out.objects[i].push_back(o.box.center() + t * o.velocity);
    }
  }
  return out;
}

/// Edge-to-edge gaps and RSS requirements of one object at one step, in the
/// ego frame (x forward, y left).
struct RssCheck {
  double longitudinal_gap = 0.0;
  double lateral_gap = 0.0;
  double longitudinal_required = 0.0;
  double lateral_required = 0.0;

  bool violated() const {
    return longitudinal_gap < longitudinal_required && lateral_gap < lateral_required;
  }
};

inline RssCheck rss_check(const EgoState& ego, Vec2 ego_pos, const ObjectState& obj, Vec2 obj_pos,
                          const RssParams& p) {
  const Vec2 h = ego.heading();
  const Vec2 rel = obj_pos - ego_pos;
  const double x = dot(rel, h);
  const double y = cross(h, rel);
  const double dyaw = obj.box.yaw - ego.yaw;
  const double c = std::abs(std::cos(dyaw));
  const double s = std::abs(std::sin(dyaw));
  const double ext_long = 0.5 * (c * obj.box.length + s * obj.box.width);
  const double ext_lat = 0.5 * (s * obj.box.length + c * obj.box.width);

  RssCheck out;
  out.longitudinal_gap = std::abs(x) - 0.5 * ego.length - ext_long;
  out.lateral_gap = std::abs(y) - 0.5 * ego.width - ext_lat;

  const double v_long = dot(obj.velocity, h);
  const double v_lat = cross(h, obj.velocity);
  if (x >= 0.0) {
    out.longitudinal_required = v_long >= 0.0 ? rss_longitudinal_same(ego.speed, v_long, p)
                                              : rss_longitudinal_opposite(ego.speed, -v_long, p);
  } else {
    out.longitudinal_required = rss_longitudinal_same(std::max(0.0, v_long), ego.speed, p);
  }
  // Lateral axis points from the left object to the right one (-y).
  out.lateral_required = y >= 0.0 ? rss_lateral(-v_lat, 0.0, p) : rss_lateral(0.0, -v_lat, p);
  return out;
}

/// Ids of objects that violate both RSS distances at some predicted step.
inline std::set<std::string> mark_critical(const Frame& frame, const TrajectorySet& predictions,
                                           const RssParams& p) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < frame.objects.size(); ++i) {
    for (std::size_t k = 0; k < predictions.offsets.size(); ++k) {
      if (rss_check(frame.ego, predictions.ego[k], frame.objects[i], predictions.objects[i][k], p)
              .violated()) {
        out.insert(frame.objects[i].id);
        break;
      }
    }
  }
  return out;
}

enum class CollisionGeometry { kHeadOn, kRearEnd, kSideOn, kDiagonal };

inline std::string_view to_string(CollisionGeometry g) {
  switch (g) {
    case CollisionGeometry::kHeadOn: return "head_on";
    case CollisionGeometry::kRearEnd: return "rear_end";
    case CollisionGeometry::kSideOn: return "side_on";
    case CollisionGeometry::kDiagonal: return "diagonal";
  }
  return "diagonal";
}

/// Impact-speed cut points (m/s) separating the four severity classes.
struct SeverityThresholds {
  std::array<double, 3> vru = {2.8, 6.9, 15.3};
  std::array<double, 3> crumple_zone = {4.2, 13.9, 22.2};
};

inline void validate(const SeverityThresholds& th) {
  for (const auto& cuts : {th.vru, th.crumple_zone}) {
    if (!(0.0 <= cuts[0] && cuts[0] < cuts[1] && cuts[1] < cuts[2])) {
      throw ConfigError("severity cut points must be non-negative and strictly ascending");
    }
  }
}

inline constexpr std::array<double, 4> kSeverityScores = {0.9, 0.75, 0.5, 0.0};

inline double severity_score(double impact_speed, RoadUserCategory category,
                             const SeverityThresholds& th = {}) {
  const auto& cuts = category == RoadUserCategory::kVru ? th.vru : th.crumple_zone;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (impact_speed < cuts[i]) return kSeverityScores[i];
  }
  return kSeverityScores.back();
}

inline CollisionGeometry collision_geometry(double ego_yaw, double obj_yaw) {
  const double d = std::abs(normalize_angle(obj_yaw - ego_yaw));
  constexpr double kPi = std::numbers::pi;
  if (d < kPi / 4.0) return CollisionGeometry::kRearEnd;
  if (d > 3.0 * kPi / 4.0) return CollisionGeometry::kHeadOn;
  if (std::abs(d - kPi / 2.0) <= kPi / 8.0) return CollisionGeometry::kSideOn;
  return CollisionGeometry::kDiagonal;
}

struct ImpactAssessment {
  CollisionGeometry geometry = CollisionGeometry::kRearEnd;
  double impact_speed = 0.0;
  double severity = 1.0;
};

/// Impact speed is the magnitude of the relative velocity for every geometry.
inline ImpactAssessment impact_severity(const EgoState& ego, const ObjectState& obj,
                                        const SeverityThresholds& th = {}) {
  ImpactAssessment out;
  out.geometry = collision_geometry(ego.yaw, obj.box.yaw);
  out.impact_speed = norm(ego.velocity() - obj.velocity);
  out.severity = severity_score(out.impact_speed, obj.category(), th);
  return out;
}

struct CriticalityRecord {
  std::int64_t frame_index = 0;
  std::string object_id;
  bool critical = false;
  bool undetected = false;
  CollisionGeometry geometry = CollisionGeometry::kRearEnd;
  double impact_speed = 0.0;
  /// Set only for critical, undetected objects.
  std::optional<double> severity;

  friend bool operator==(const CriticalityRecord&, const CriticalityRecord&) = default;
};

struct RelevanceConfig {
  SeverityThresholds severity;
  double prediction_dt = 0.1;
};

/// One record per GT object of `frame`. "Undetected" means not matched in
/// `tally`.
inline std::vector<CriticalityRecord> assess_frame(const Frame& frame, const FrameTally& tally,
                                                   const EnvironmentParams& env,
                                                   const RelevanceConfig& cfg = {}) {
  const BrakingModel braking{frame.ego.speed, env.brake_deceleration()};
  const TrajectorySet predictions = predict_positions(frame, braking, cfg.prediction_dt);
  const std::set<std::string> critical = mark_critical(frame, predictions, env.rss);
  std::set<std::string> matched;
  for (const Match& m : tally.matches) matched.insert(m.gt_id);

  std::vector<CriticalityRecord> out;
  out.reserve(frame.objects.size());
  for (const ObjectState& o : frame.objects) {
    CriticalityRecord r;
    r.frame_index = frame.index;
    r.object_id = o.id;
    r.critical = critical.contains(o.id);
    r.undetected = !matched.contains(o.id);
    const ImpactAssessment impact = impact_severity(frame.ego, o, cfg.severity);
    r.geometry = impact.geometry;
    r.impact_speed = impact.impact_speed;
    if (r.critical && r.undetected) r.severity = impact.severity;
    out.push_back(std::move(r));
  }
  return out;
}

/// Worst (minimum) severity among undetected critical objects; 1 if none.
inline double frame_relevance_factor(std::span<const CriticalityRecord> records) {
  double f = 1.0;
  for (const CriticalityRecord& r : records) {
    if (r.severity) f = std::min(f, *r.severity);
  }
  return f;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_COLLISION_RELEVANCE_HPP_
