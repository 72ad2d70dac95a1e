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

// Frame-by-frame IoU matching and the detection / CLEAR tracking metrics
// built on it: precision, recall, mAP, MODA, MODP, MOTA, MOTP and MOTP_s.
//
// Aggregates are scenario-cumulative and return std::nullopt where the
// underlying ratio is 0/0.

#ifndef SAFEMETRIC_CLEAR_METRICS_HPP_
#define SAFEMETRIC_CLEAR_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "safemetric/assignment.hpp"
#include "safemetric/error.hpp"
#include "safemetric/geometry.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

inline constexpr double kDefaultIouThreshold = 0.5;

struct Match {
  std::string gt_id;
  std::size_t detection_index = 0;
  /// IoU consumed by MODP; equals raw_iou unless verification scaled it.
  double iou = 0.0;
  double raw_iou = 0.0;
  /// Distance-based verification factor f_v (1 when not applied).
  double verification_factor = 1.0;
  /// Ground-plane distance between box centres.
  double center_distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct FrameTally {
  std::int64_t frame_index = 0;
  std::vector<Match> matches;
  std::size_t misses = 0;
  std::size_t false_positives = 0;
  std::size_t mismatches = 0;
  std::size_t gt_count = 0;

  std::size_t mapped_count() const { return matches.size(); }
  friend bool operator==(const FrameTally&, const FrameTally&) = default;
};

/// gt_id -> track_id of the detection it was matched to.
using TrackAssignment = std::map<std::string, std::string>;

/// Optimal one-to-one matching maximizing summed IoU over pairs with
/// IoU >= threshold. With `previous`, a GT matched in the previous frame to a
/// different track id counts as a mismatch.
inline FrameTally match_frame(std::span<const ObjectState> gt, std::span<const Detection> det,
                              double iou_threshold = kDefaultIouThreshold,
                              const TrackAssignment* previous = nullptr,
                              std::int64_t frame_index = 0) {
  FrameTally tally;
  tally.frame_index = frame_index;
  tally.gt_count = gt.size();

  WeightMatrix weights(gt.size(), det.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < det.size(); ++j) {
      const double v = iou(det[j].box, gt[i].box);
      weights(i, j) = (v > 0.0 && v >= iou_threshold) ? v : 0.0;
    }
  }
  const std::vector<long> assignment = max_weight_assignment(weights);
  std::vector<char> det_used(det.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const long j = assignment[i];
    if (j == kUnassigned || weights(i, static_cast<std::size_t>(j)) <= 0.0) continue;
    const auto dj = static_cast<std::size_t>(j);
    det_used[dj] = 1;
    const double v = weights(i, dj);
    tally.matches.push_back({gt[i].id, dj, v, v, 1.0, center_distance(det[dj].box, gt[i].box)});
  }
  tally.misses = gt.size() - tally.matches.size();
  tally.false_positives =
      static_cast<std::size_t>(std::count(det_used.begin(), det_used.end(), 0));

  if (previous != nullptr) {
    for (const Match& m : tally.matches) {
      const auto& track = det[m.detection_index].track_id;
      if (!track) continue;
      auto it = previous->find(m.gt_id);
      if (it != previous->end() && it->second != *track) ++tally.mismatches;
    }
  }
  return tally;
}

/// Track ids assigned to each matched GT in this frame.
inline TrackAssignment track_assignment(const FrameTally& tally, std::span<const Detection> det) {
  TrackAssignment out;
  for (const Match& m : tally.matches) {
    if (const auto& track = det[m.detection_index].track_id) out[m.gt_id] = *track;
  }
  return out;
}

/// Sequential ID-continuity sweep: recomputes mismatches for every frame from
/// the previous frame's assignment.
inline void count_mismatches(std::span<FrameTally> tallies,
                             std::span<const std::vector<Detection>> detections) {
  TrackAssignment previous;
  for (std::size_t t = 0; t < tallies.size(); ++t) {
    FrameTally& tally = tallies[t];
    tally.mismatches = 0;
    for (const Match& m : tally.matches) {
      const auto& track = detections[t][m.detection_index].track_id;
      if (!track) continue;
      auto it = previous.find(m.gt_id);
      if (it != previous.end() && it->second != *track) ++tally.mismatches;
    }
    previous = track_assignment(tally, detections[t]);
  }
}

namespace detail {

struct ClearSums {
  double misses = 0, false_positives = 0, mismatches = 0, gt = 0, mapped = 0, distance = 0;
};

inline ClearSums clear_sums(std::span<const FrameTally> tallies) {
  ClearSums s;
  for (const FrameTally& t : tallies) {
    s.misses += static_cast<double>(t.misses);
    s.false_positives += static_cast<double>(t.false_positives);
    s.mismatches += static_cast<double>(t.mismatches);
    s.gt += static_cast<double>(t.gt_count);
    s.mapped += static_cast<double>(t.mapped_count());
    for (const Match& m : t.matches) s.distance += m.center_distance;
  }
  return s;
}

}  // namespace detail

/// 1 - sum(m_t + fp_t) / sum(g_t). May be negative.
inline std::optional<double> moda(std::span<const FrameTally> tallies) {
  const auto s = detail::clear_sums(tallies);
  if (s.gt <= 0) return std::nullopt;
  return 1.0 - (s.misses + s.false_positives) / s.gt;
}

/// 1 - sum(m_t + fp_t + mme_t) / sum(g_t). May be negative.
inline std::optional<double> mota(std::span<const FrameTally> tallies) {
  const auto s = detail::clear_sums(tallies);
  if (s.gt <= 0) return std::nullopt;
  return 1.0 - (s.misses + s.false_positives + s.mismatches) / s.gt;
}

inline std::optional<double> modp_frame(const FrameTally& tally) {
  if (tally.matches.empty()) return std::nullopt;
  double sum = 0.0;
  for (const Match& m : tally.matches) sum += m.iou;
  return sum / static_cast<double>(tally.matches.size());
}

/// Per-frame mean matched IoU, averaged over frames with at least one match.
inline std::optional<double> modp(std::span<const FrameTally> tallies) {
  double sum = 0.0;
  std::size_t frames = 0;
  for (const FrameTally& t : tallies) {
    if (auto v = modp_frame(t)) {
      sum += *v;
      ++frames;
    }
  }
  if (frames == 0) return std::nullopt;
  return sum / static_cast<double>(frames);
}

/// Mean centre distance over all matches, in metres.
inline std::optional<double> motp(std::span<const FrameTally> tallies) {
  const auto s = detail::clear_sums(tallies);
  if (s.mapped <= 0) return std::nullopt;
  return s.distance / s.mapped;
}

struct NormalizationThresholds {
  double lower = 0.8;
  double upper = 2.5;
};

inline void validate(const NormalizationThresholds& th) {
  if (!(th.lower < th.upper)) throw ConfigError("normalization thresholds require T_l < T_u");
}

/// 1 below the lower threshold, 0 above the upper one, linear in between.
inline double f_norm(double x, const NormalizationThresholds& th) {
  if (x < th.lower) return 1.0;
  if (x > th.upper) return 0.0;
  return 1.0 - (x - th.lower) / (th.upper - th.lower);
}

inline double motp_s(double motp_value, const NormalizationThresholds& th = {}) {
  return f_norm(motp_value, th);
}

struct DetectionScores {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> mean_average_precision;
};

/// Area under the precision/recall curve with all-point interpolation.
/// `hits` are TP flags sorted by descending detection score.
inline double average_precision(std::span<const char> hits, std::size_t positives) {
  if (positives == 0) return 0.0;
  std::vector<double> rec{0.0}, prec{0.0};
  double tp = 0.0, fp = 0.0;
  for (char hit : hits) {
    (hit ? tp : fp) += 1.0;
    rec.push_back(tp / static_cast<double>(positives));
    prec.push_back(tp / (tp + fp));
  }
  rec.push_back(1.0);
  prec.push_back(0.0);
  for (std::size_t i = prec.size() - 1; i > 0; --i) prec[i - 1] = std::max(prec[i - 1], prec[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (rec[i] != rec[i - 1]) ap += (rec[i] - rec[i - 1]) * prec[i];
  }
  return ap;
}

/// Precision and recall over the scenario; mAP averaged over the classes
/// present in the ground truth. A detection is a TP for its class when it
/// was matched to a GT object of that class.
inline DetectionScores precision_recall_map(std::span<const FrameTally> tallies,
                                            std::span<const Frame> gt_frames,
                                            std::span<const std::vector<Detection>> detections) {
  DetectionScores out;
  const auto s = detail::clear_sums(tallies);
  if (s.mapped + s.false_positives > 0) out.precision = s.mapped / (s.mapped + s.false_positives);
  if (s.gt > 0) out.recall = s.mapped / s.gt;

  struct Ranked {
    double score;
    std::size_t frame;
    std::size_t index;
    char hit;
  };
  std::map<ObjectClass, std::size_t> positives;
  std::map<ObjectClass, std::vector<Ranked>> ranked;
  for (std::size_t t = 0; t < tallies.size(); ++t) {
    std::map<std::string, ObjectClass> gt_class;
    for (const ObjectState& o : gt_frames[t].objects) {
      gt_class[o.id] = o.class_label;
      ++positives[o.class_label];
    }
    std::vector<char> hit(detections[t].size(), 0);
    for (const Match& m : tallies[t].matches) {
      if (gt_class.at(m.gt_id) == detections[t][m.detection_index].class_label) {
        hit[m.detection_index] = 1;
      }
    }
    for (std::size_t j = 0; j < detections[t].size(); ++j) {
      ranked[detections[t][j].class_label].push_back({detections[t][j].score, t, j, hit[j]});
    }
  }
  if (positives.empty()) return out;
  double sum = 0.0;
  for (const auto& [cls, npos] : positives) {
    std::vector<Ranked>& list = ranked[cls];
    std::stable_sort(list.begin(), list.end(),
                     [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    std::vector<char> hits;
    hits.reserve(list.size());
    for (const Ranked& r : list) hits.push_back(r.hit);
    sum += average_precision(hits, npos);
  }
  out.mean_average_precision = sum / static_cast<double>(positives.size());
  return out;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_CLEAR_METRICS_HPP_
