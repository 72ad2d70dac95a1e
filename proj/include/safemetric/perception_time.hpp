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

// Perception time: how long after entering the safety-critical area an
// object is first perceived (negative when perceived before entering), the
// weighted mean over objects and the resulting time factor f_t.

#ifndef SAFEMETRIC_PERCEPTION_TIME_HPP_
#define SAFEMETRIC_PERCEPTION_TIME_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "safemetric/clear_metrics.hpp"
#include "safemetric/collision_relevance.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

struct PerceptionTiming {
  std::string object_id;
  std::int64_t entry_frame = 0;
  double t_enter = 0.0;
  /// Ego braking time v0 / a in the entry frame.
  double braking_time = 0.0;
  /// Earliest matched detection timestamp; empty if never perceived.
  std::optional<double> t_perceive;

  std::optional<double> perception_time() const {
    if (!t_perceive) return std::nullopt;
    return *t_perceive - t_enter;
  }
  friend bool operator==(const PerceptionTiming&, const PerceptionTiming&) = default;
};

/// One timing per GT object that is critical in at least one frame, ordered
/// by entry frame and then id.
inline std::vector<PerceptionTiming> perception_times(
    std::span<const Frame> frames, std::span<const std::vector<Detection>> detections,
    std::span<const std::set<std::string>> critical, std::span<const FrameTally> tallies,
    const EnvironmentParams& env) {
  std::map<std::string, PerceptionTiming> by_id;
  std::vector<std::string> order;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (const std::string& id : critical[t]) {
      if (by_id.contains(id)) continue;
      PerceptionTiming timing;
      timing.object_id = id;
      timing.entry_frame = frames[t].index;
      timing.t_enter = frames[t].timestamp;
      timing.braking_time = BrakingModel{frames[t].ego.speed, env.brake_deceleration()}.braking_time();
      by_id.emplace(id, std::move(timing));
      order.push_back(id);
    }
  }
  for (std::size_t t = 0; t < tallies.size(); ++t) {
    for (const Match& m : tallies[t].matches) {
      auto it = by_id.find(m.gt_id);
      if (it == by_id.end()) continue;
      const double ts = detections[t][m.detection_index].detection_timestamp;
      auto& first = it->second.t_perceive;
      first = first ? std::min(*first, ts) : ts;
    }
  }
  std::vector<PerceptionTiming> out;
  out.reserve(order.size());
  for (const std::string& id : order) out.push_back(by_id.at(id));
  return out;
}

enum class TimeWeighting {
  kObjectCount,  // divide by the number of objects
  kWeightSum,    // divide by the summed weights (true weighted mean)
};

/// Mean where times above the plain mean count twice.
inline std::optional<double> weighted_perception_time(
    std::span<const double> times, TimeWeighting mode = TimeWeighting::kObjectCount) {
  if (times.empty()) return std::nullopt;
  double mean = 0.0;
  for (double t : times) mean += t;
  mean /= static_cast<double>(times.size());
  double sum = 0.0;
  double weights = 0.0;
  for (double t : times) {
    const double w = t <= mean ? 1.0 : 2.0;
    sum += w * t;
    weights += w;
  }
  const double m = mode == TimeWeighting::kObjectCount ? static_cast<double>(times.size()) : weights;
  return sum / m;
}

struct TimeFactor {
  double value = 1.0;
  /// Braking time did not exceed the lower threshold; a step function was used.
  bool degenerate = false;
};

/// f_norm of the weighted perception time between `lower` and the braking time.
inline TimeFactor time_factor(double t_dw, double braking_time, double lower = 0.1) {
  if (braking_time <= lower) return {t_dw <= lower ? 1.0 : 0.0, true};
  return {f_norm(t_dw, {lower, braking_time}), false};
}

}  // namespace safemetric

#endif  // SAFEMETRIC_PERCEPTION_TIME_HPP_
