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

// Safety aggregation: detection and tracking safety scores, the weighted
// overall score S in [0, 1], its five-level classification, and the
// end-to-end scenario evaluation pipeline
//   matching -> IoU verification -> CLEAR -> collision relevance
//   -> perception time -> aggregation.

#ifndef SAFEMETRIC_SAFETY_HPP_
#define SAFEMETRIC_SAFETY_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "safemetric/clear_metrics.hpp"
#include "safemetric/collision_relevance.hpp"
#include "safemetric/config.hpp"
#include "safemetric/error.hpp"
#include "safemetric/iou_verification.hpp"
#include "safemetric/parallel.hpp"
#include "safemetric/perception_time.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

enum class SafetyLabel { kInsufficient, kBad, kGood, kVeryGood, kExcellent };

inline std::string_view to_string(SafetyLabel label) {
  switch (label) {
    case SafetyLabel::kInsufficient: return "insufficient";
    case SafetyLabel::kBad: return "bad";
    case SafetyLabel::kGood: return "good";
    case SafetyLabel::kVeryGood: return "very good";
    case SafetyLabel::kExcellent: return "excellent";
  }
  return "insufficient";
}

inline std::optional<SafetyLabel> parse_safety_label(std::string_view text) {
  for (SafetyLabel l : {SafetyLabel::kInsufficient, SafetyLabel::kBad, SafetyLabel::kGood,
                        SafetyLabel::kVeryGood, SafetyLabel::kExcellent}) {
    if (text == to_string(l)) return l;
  }
  return std::nullopt;
}

/// Bands [0,0.2], (0.2,0.4], (0.4,0.6], (0.6,0.8], (0.8,1].
inline SafetyLabel classify(double s) {
  if (s <= 0.2) return SafetyLabel::kInsufficient;
  if (s <= 0.4) return SafetyLabel::kBad;
  if (s <= 0.6) return SafetyLabel::kGood;
  if (s <= 0.8) return SafetyLabel::kVeryGood;
  return SafetyLabel::kExcellent;
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// S_D = f_t * f_c * (MODA + MODP) / 2 with MODA clamped to [0, 1].
inline double detection_safety(double moda_value, double modp_value, double f_c, double f_t) {
  return f_t * f_c * (clamp_unit(moda_value) + clamp_unit(modp_value)) / 2.0;
}

/// S_T = f_t * f_c * (MOTA + MOTP_s) / 2 with MOTA clamped to [0, 1].
inline double tracking_safety(double mota_value, double motp_s_value, double f_c, double f_t) {
  return f_t * f_c * (clamp_unit(mota_value) + clamp_unit(motp_s_value)) / 2.0;
}

inline double safety_score(double s_d, double s_t, const MetricWeights& w) {
  if (std::abs(w.detection + w.tracking - 1.0) > 1e-12) {
    throw ConfigError("weights: w_D + w_T must equal 1");
  }
  return clamp_unit(w.detection * s_d + w.tracking * s_t);
}

struct FrameBreakdown {
  std::int64_t index = 0;
  double timestamp = 0.0;
  std::size_t gt = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t misses = 0;
  std::size_t mismatches = 0;
  std::size_t critical = 0;
  std::optional<double> modp;
  double relevance = 1.0;

  friend bool operator==(const FrameBreakdown&, const FrameBreakdown&) = default;
};

struct SafetyReport {
  std::string scenario;
  std::optional<double> precision, recall, mean_average_precision;
  std::optional<double> moda, modp, mota, motp, motp_s;
  double relevance_factor = 1.0;  // f_c
  double time_factor = 1.0;       // f_t
  std::optional<double> weighted_perception_time;
  std::optional<double> detection_safety, tracking_safety, safety;
  std::optional<SafetyLabel> label;
  double weight_detection = 0.5;
  double weight_tracking = 0.5;
  std::vector<FrameBreakdown> frames;
  std::vector<std::string> warnings;

  friend bool operator==(const SafetyReport&, const SafetyReport&) = default;
};

/// Intermediate per-frame results of a scenario evaluation.
struct EvaluationTrace {
  /// Raw-IoU tallies with mismatches counted.
  std::vector<FrameTally> tallies;
  /// Same tallies with verification-scaled IoUs (identical when disabled).
  std::vector<FrameTally> scored;
  std::vector<std::vector<CriticalityRecord>> records;
  std::vector<std::set<std::string>> critical;
  std::vector<PerceptionTiming> timings;
};

inline EnvironmentParams effective_environment(const Scenario& scenario,
                                               const EvaluationConfig& cfg) {
  EnvironmentParams env = scenario.environment;
  env.rss = cfg.rss.apply(env.rss);
  try {
    validate_environment(env);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return env;
}

inline EvaluationTrace trace_scenario(const Scenario& scenario, const PerceptionLog& log,
                                      const EvaluationConfig& cfg) {
  validate(cfg);
  if (log.frames.size() != scenario.frames.size()) {
    throw InputError("perception log frame count does not match scenario");
  }
  const EnvironmentParams env = effective_environment(scenario, cfg);
  const std::size_t n = scenario.frames.size();
  EvaluationTrace tr;
  tr.tallies.resize(n);
  tr.scored.resize(n);
  tr.records.resize(n);
  tr.critical.resize(n);

  parallel_for(n, cfg.threads, [&](std::size_t t) {
    const Frame& f = scenario.frames[t];
    tr.tallies[t] = match_frame(f.objects, log.frames[t], cfg.iou_threshold, nullptr, f.index);
  });
  if (log.has_track_ids) count_mismatches(tr.tallies, log.frames);

  parallel_for(n, cfg.threads, [&](std::size_t t) {
    const Frame& f = scenario.frames[t];
    tr.scored[t] = cfg.verification_enabled
                       ? scale_matched_ious(tr.tallies[t], f, log.frames[t], cfg.verification)
                       : tr.tallies[t];
    tr.records[t] = assess_frame(f, tr.tallies[t], env, cfg.relevance);
    for (const CriticalityRecord& r : tr.records[t]) {
      if (r.critical) tr.critical[t].insert(r.object_id);
    }
  });
  tr.timings = perception_times(scenario.frames, log.frames, tr.critical, tr.tallies, env);
  return tr;
}

namespace detail {

inline double per_frame_moda(const FrameTally& t, bool with_mismatches) {
  const double errors = static_cast<double>(t.misses + t.false_positives +
                                            (with_mismatches ? t.mismatches : 0));
  return 1.0 - errors / static_cast<double>(t.gt_count);
}

}  // namespace detail

/// Computes every report value from an evaluation trace.
inline SafetyReport aggregate(const Scenario& scenario, const PerceptionLog& log,
                              const EvaluationTrace& tr, const EvaluationConfig& cfg) {
  SafetyReport rep;
  rep.scenario = scenario.meta.name;
  rep.warnings = scenario.warnings;
  rep.warnings.insert(rep.warnings.end(), log.warnings.begin(), log.warnings.end());

  const DetectionScores ds = precision_recall_map(tr.tallies, scenario.frames, log.frames);
  rep.precision = ds.precision;
  rep.recall = ds.recall;
  rep.mean_average_precision = ds.mean_average_precision;
  rep.moda = moda(tr.scored);
  rep.modp = modp(tr.scored);
  rep.mota = mota(tr.scored);
  rep.motp = motp(tr.scored);
  if (rep.motp) rep.motp_s = motp_s(*rep.motp, cfg.motp_thresholds);

  std::vector<double> relevance(tr.records.size(), 1.0);
  for (std::size_t t = 0; t < tr.records.size(); ++t) {
    relevance[t] = frame_relevance_factor(tr.records[t]);
    rep.relevance_factor = std::min(rep.relevance_factor, relevance[t]);
  }

  std::vector<double> times;
  double braking_sum = 0.0;
  std::size_t never_perceived = 0;
  for (const PerceptionTiming& timing : tr.timings) {
    if (auto td = timing.perception_time()) {
      times.push_back(*td);
      braking_sum += timing.braking_time;
    } else {
      ++never_perceived;
    }
  }
  rep.weighted_perception_time = weighted_perception_time(times, cfg.time_weighting);
  if (rep.weighted_perception_time) {
    const double braking_time = braking_sum / static_cast<double>(times.size());
    const TimeFactor tf = time_factor(*rep.weighted_perception_time, braking_time, cfg.time_lower);
    rep.time_factor = tf.value;
    if (tf.degenerate) {
      rep.warnings.push_back("time factor: braking time <= T_l, step function used");
    }
  }
  if (never_perceived > 0) {
    rep.warnings.push_back("time factor: " + std::to_string(never_perceived) +
                           " critical object(s) never perceived, excluded from t_dw");
  }
  if (log.timestamps_defaulted) {
    rep.warnings.push_back("perception log lacks t_detect; frame timestamps used");
  }

  rep.weight_detection = cfg.weights.detection;
  rep.weight_tracking = cfg.weights.tracking;
  if (!log.has_track_ids && rep.weight_tracking != 0.0) {
    rep.weight_detection = 1.0;
    rep.weight_tracking = 0.0;
    rep.warnings.push_back("no track ids in perception log; w_T forced to 0");
  }

  for (std::size_t t = 0; t < tr.scored.size(); ++t) {
    const FrameTally& tally = tr.scored[t];
    FrameBreakdown fb;
    fb.index = tally.frame_index;
    fb.timestamp = scenario.frames[t].timestamp;
    fb.gt = tally.gt_count;
    fb.true_positives = tally.mapped_count();
    fb.false_positives = tally.false_positives;
    fb.misses = tally.misses;
    fb.mismatches = tally.mismatches;
    fb.critical = tr.critical[t].size();
    fb.modp = modp_frame(tally);
    fb.relevance = relevance[t];
    rep.frames.push_back(fb);
  }

  if (!rep.moda) {
    rep.warnings.push_back("scenario has no ground-truth objects; safety score undefined");
    return rep;
  }

  if (cfg.aggregation == AggregationMode::kCumulative) {
    rep.detection_safety = detection_safety(*rep.moda, rep.modp.value_or(0.0),
                                            rep.relevance_factor, rep.time_factor);
    rep.tracking_safety = tracking_safety(*rep.mota, rep.motp_s.value_or(0.0),
                                          rep.relevance_factor, rep.time_factor);
  } else {
    double sd = 0.0, st = 0.0;
    std::size_t counted = 0;
    for (std::size_t t = 0; t < tr.scored.size(); ++t) {
      const FrameTally& tally = tr.scored[t];
      if (tally.gt_count == 0) continue;
      const double modp_t = modp_frame(tally).value_or(0.0);
      std::optional<double> motp_t = motp(std::span<const FrameTally>(&tally, 1));
      const double motp_s_t = motp_t ? motp_s(*motp_t, cfg.motp_thresholds) : 0.0;
      sd += detection_safety(detail::per_frame_moda(tally, false), modp_t, relevance[t], 1.0);
      st += tracking_safety(detail::per_frame_moda(tally, true), motp_s_t, relevance[t], 1.0);
      ++counted;
    }
    rep.detection_safety = rep.time_factor * sd / static_cast<double>(counted);
    rep.tracking_safety = rep.time_factor * st / static_cast<double>(counted);
  }
  rep.safety = safety_score(*rep.detection_safety, *rep.tracking_safety,
                            {rep.weight_detection, rep.weight_tracking});
  rep.label = classify(*rep.safety);
  return rep;
}

/// Runs the full pipeline. Results are bit-identical for any thread count.
inline SafetyReport evaluate_scenario(const Scenario& scenario, const PerceptionLog& log,
                                      const EvaluationConfig& cfg = {}) {
  return aggregate(scenario, log, trace_scenario(scenario, log, cfg), cfg);
}

}  // namespace safemetric

#endif  // SAFEMETRIC_SAFETY_HPP_
