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

// Distance-based IoU verification. Matched IoUs are scaled by a factor that
// combines how well the detection covers the ground truth with how close the
// object is to the ego vehicle; near objects are judged more strictly.

#ifndef SAFEMETRIC_IOU_VERIFICATION_HPP_
#define SAFEMETRIC_IOU_VERIFICATION_HPP_

#include <cmath>
#include <numbers>
#include <span>

#include "safemetric/clear_metrics.hpp"
#include "safemetric/error.hpp"
#include "safemetric/geometry.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

struct VerificationConfig {
  double min_cover = 0.5;            // mC
  double over_tolerance = 1.5;       // oT
  double max_over_detection = 3.0;   // mO
  EvaluationRange range;
};

inline void validate(const VerificationConfig& cfg) {
  if (!(0.0 < cfg.min_cover && cfg.min_cover < 1.0 && 1.0 < cfg.over_tolerance &&
        cfg.over_tolerance < cfg.max_over_detection)) {
    throw ConfigError("verification requires 0 < mC < 1 < oT < mO");
  }
  if (!(cfg.range.max_distance > 0.0)) throw ConfigError("verification.max_distance must be > 0");
}

/// Safety function of the cover ratio. Jumps from 0 to (1+mC)/2 just above mC.
inline double cover_safety(double c, const VerificationConfig& cfg) {
  const double mc = cfg.min_cover;
  const double ot = cfg.over_tolerance;
  const double mo = cfg.max_over_detection;
  if (c > mc && c <= 1.0) {
    return (1.0 + mc + (1.0 - mc) * std::sin(std::numbers::pi * (c - 0.5))) / 2.0;
  }
  if (c > 1.0 && c <= ot) return 1.0;
  if (c > ot && c <= mo) {
    return (1.0 + std::cos(std::numbers::pi / (mo - ot) * (c - ot))) / 2.0;
  }
  return 0.0;
}

/// g(x, y) = x - (1 - x)(1 - y), mapping [0,1]^2 to [-1, 1].
inline double distance_combiner(double x, double y) { return x - (1.0 - x) * (1.0 - y); }

/// Distance-based detection precision factor in [0, 1].
inline double verification_factor(double cover_ratio, double normalized_dist,
                                  const VerificationConfig& cfg) {
  return (distance_combiner(cover_safety(cover_ratio, cfg), normalized_dist) + 1.0) / 2.0;
}

/// Returns `tally` with every matched IoU multiplied by its f_v. Counts are
/// untouched; the TP threshold was applied to the raw IoU.
inline FrameTally scale_matched_ious(const FrameTally& tally, const Frame& frame,
                                     std::span<const Detection> det,
                                     const VerificationConfig& cfg) {
  FrameTally out = tally;
  for (Match& m : out.matches) {
    const ObjectState* gt = nullptr;
    for (const ObjectState& o : frame.objects) {
      if (o.id == m.gt_id) {
        gt = &o;
        break;
      }
    }
    if (gt == nullptr) throw InputError("scale_matched_ious: unknown gt id '" + m.gt_id + "'");
    const double c = cover(det[m.detection_index].box, gt->box);
    const double d = normalized_distance(frame.ego.position, gt->box.center(), cfg.range);
    m.verification_factor = verification_factor(c, d, cfg);
    m.iou = m.raw_iou * m.verification_factor;
  }
  return out;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_IOU_VERIFICATION_HPP_
