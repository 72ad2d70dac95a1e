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

// Importer for KITTI raw recordings: tracklet_labels.xml annotations plus
// OXTS odometry rows (one whitespace-separated row of 30 values per frame,
// i.e. the concatenated contents of oxts/data/*.txt).
//
// Everything is moved into a local east/north frame anchored at the first
// odometry row (Mercator projection, as in the KITTI devkit). Tracklet poses
// live in the Velodyne frame; the IMU-to-Velodyne offset is ignored and boxes
// are projected to the ground plane.

#ifndef SAFEMETRIC_KITTI_HPP_
#define SAFEMETRIC_KITTI_HPP_

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "safemetric/error.hpp"
#include "safemetric/scenario.hpp"

namespace safemetric {

struct OxtsRow {
  double lat = 0.0;  // deg
  double lon = 0.0;  // deg
  double yaw = 0.0;  // rad, 0 = east, counter-clockwise
  double vn = 0.0;   // m/s north
  double ve = 0.0;   // m/s east
};

inline std::vector<OxtsRow> parse_oxts_rows(const std::string& text) {
  std::vector<OxtsRow> rows;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<double> v;
    double x = 0.0;
    while (fields >> x) v.push_back(x);
    if (v.empty()) continue;
    if (v.size() < 9) {
      throw InputError("odometry row " + std::to_string(line_no) + ": expected >= 9 values, got " +
                       std::to_string(v.size()));
    }
    rows.push_back({v[0], v[1], v[5], v[6], v[7]});
  }
  return rows;
}

namespace detail {

inline ObjectClass kitti_class(const std::string& type, bool& known) {
  known = true;
  if (type == "Car") return ObjectClass::kCar;
  if (type == "Van") return ObjectClass::kVan;
  if (type == "Truck") return ObjectClass::kTruck;
  if (type == "Pedestrian" || type == "Person_sitting" || type == "Person (sitting)") {
    return ObjectClass::kPedestrian;
  }
  if (type == "Cyclist") return ObjectClass::kCyclist;
  if (type == "Tram") return ObjectClass::kTram;
  if (type == "Misc") return ObjectClass::kMisc;
  known = false;
  return ObjectClass::kMisc;
}

struct TrackletPose {
  std::size_t frame;
  double tx, ty, rz;
};

struct Tracklet {
  std::string type;
  double length = 0.0;
  double width = 0.0;
  std::vector<TrackletPose> poses;
};

inline std::vector<Tracklet> parse_tracklets(const std::string& xml) {
  namespace pt = boost::property_tree;
  std::vector<Tracklet> out;
  if (xml.find_first_not_of(" \t\r\n") == std::string::npos) return out;
  pt::ptree tree;
  std::istringstream in(xml);
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw InputError(std::string("tracklet xml: ") + e.what());
  }
  const auto root = tree.get_child_optional("boost_serialization.tracklets");
  if (!root) throw InputError("tracklet xml: missing boost_serialization.tracklets");
  try {
    for (const auto& [key, item] : *root) {
      if (key != "item") continue;
      Tracklet t;
      t.type = item.get<std::string>("objectType");
      t.length = item.get<double>("l");
      t.width = item.get<double>("w");
      const auto first = item.get<std::size_t>("first_frame");
      std::size_t k = 0;
      if (auto poses = item.get_child_optional("poses")) {
        for (const auto& [pkey, pose] : *poses) {
          if (pkey != "item") continue;
          t.poses.push_back({first + k, pose.get<double>("tx"), pose.get<double>("ty"),
                             pose.get<double>("rz")});
          ++k;
        }
      }
      out.push_back(std::move(t));
    }
  } catch (const pt::ptree_error& e) {
    throw InputError(std::string("tracklet xml: ") + e.what());
  }
  return out;
}

}  // namespace detail

/// Velocity by central differences over neighbouring samples, one-sided at
/// the ends. Samples must be time-ordered; a single sample gets zero.
inline std::vector<Vec2> finite_difference_velocities(const std::vector<double>& t,
                                                      const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  std::vector<Vec2> v(n);
  if (n < 2) return v;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    v[i] = (1.0 / (t[hi] - t[lo])) * (p[hi] - p[lo]);
  }
  return v;
}

inline Scenario parse_kitti(const std::string& tracklet_xml, const std::string& odometry_text,
                            double frame_rate_hz = 10.0) {
  const std::vector<OxtsRow> rows = parse_oxts_rows(odometry_text);
  if (rows.empty()) throw InputError("odometry: no rows");
  const std::vector<detail::Tracklet> tracklets = detail::parse_tracklets(tracklet_xml);

  Scenario sc;
  sc.meta.name = "kitti";
  sc.meta.frame_rate_hz = frame_rate_hz;

  constexpr double kEarthRadius = 6378137.0;
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double scale = std::cos(rows.front().lat * kDeg);
  auto mercator = [&](const OxtsRow& r) {
    return Vec2{scale * r.lon * kDeg * kEarthRadius,
                scale * kEarthRadius * std::log(std::tan((90.0 + r.lat) * std::numbers::pi / 360.0))};
  };
  const Vec2 origin = mercator(rows.front());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    Frame f;
    f.index = static_cast<std::int64_t>(i);
    f.timestamp = static_cast<double>(i) / frame_rate_hz;
    f.ego.position = mercator(rows[i]) - origin;
    f.ego.yaw = normalize_angle(rows[i].yaw);
    f.ego.speed = std::hypot(rows[i].vn, rows[i].ve);
    sc.frames.push_back(std::move(f));
  }

  for (std::size_t ti = 0; ti < tracklets.size(); ++ti) {
    const detail::Tracklet& trk = tracklets[ti];
    bool known = true;
    const ObjectClass cls = detail::kitti_class(trk.type, known);
    const std::string id = std::to_string(ti);
    if (!known) {
      sc.warnings.push_back("tracklet " + id + ": unsupported object type '" + trk.type +
                            "' mapped to misc");
    }
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<std::size_t> frames;
    std::vector<double> yaws;
    for (const detail::TrackletPose& pose : trk.poses) {
      if (pose.frame >= sc.frames.size()) {
        sc.warnings.push_back("tracklet " + id + ": pose at frame " + std::to_string(pose.frame) +
                              " beyond odometry, dropped");
        continue;
      }
      const EgoState& ego = sc.frames[pose.frame].ego;
      const double c = std::cos(ego.yaw);
      const double s = std::sin(ego.yaw);
      positions.push_back(ego.position + Vec2{c * pose.tx - s * pose.ty, s * pose.tx + c * pose.ty});
      times.push_back(sc.frames[pose.frame].timestamp);
      frames.push_back(pose.frame);
      yaws.push_back(normalize_angle(pose.rz + ego.yaw));
    }
    const std::vector<Vec2> vel = finite_difference_velocities(times, positions);
    for (std::size_t k = 0; k < positions.size(); ++k) {
      ObjectState o;
      o.id = id;
      o.class_label = cls;
      o.box = {positions[k].x, positions[k].y, trk.length, trk.width, yaws[k]};
      o.velocity = vel[k];
      sc.frames[frames[k]].objects.push_back(std::move(o));
    }
  }
  validate_frames(sc.frames);
  return sc;
}

inline Scenario import_kitti_tracklets(const std::string& tracklet_path,
                                       const std::string& odometry_path,
                                       double frame_rate_hz = 10.0) {
  return parse_kitti(detail::read_file(tracklet_path), detail::read_file(odometry_path),
                     frame_rate_hz);
}

}  // namespace safemetric

#endif  // SAFEMETRIC_KITTI_HPP_
