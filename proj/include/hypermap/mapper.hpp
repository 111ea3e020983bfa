#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypermap/errors.hpp"
#include "hypermap/geometry.hpp"
#include "hypermap/grid.hpp"
#include "hypermap/hypermap.hpp"
#include "hypermap/semantic.hpp"

namespace hypermap {

/// Planar rigid transform from the sensor frame into the map frame.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, normalized to (-pi, pi]

  Pose2D() = default;
  Pose2D(double px, double py, double ptheta) : x(px), y(py), theta(normalize_angle(ptheta)) {}

  static double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
  }

  WorldPoint position() const { return {x, y}; }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

/// Sensor-frame point; z is carried through parsing but dropped on
/// projection.
struct SensorPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const SensorPoint&, const SensorPoint&) = default;
};

struct Detection {
  std::string label;
  std::vector<SensorPoint> points;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// One sensor snapshot: the pose it was taken from, footprint points sampling
/// the full visible cloud, and per-detection labeled point sets. Detections
/// arrive background-filtered; segmentation is an upstream concern.
struct DetectionFrame {
  long seq = 0;
  Pose2D pose;
  std::vector<SensorPoint> footprint;
  std::vector<Detection> detections;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

enum class DropReason { TooFewPoints, Degenerate };

inline const char* to_string(DropReason r) {
  return r == DropReason::TooFewPoints ? "too_few_points" : "degenerate";
}

/// What one frame did to the map.
struct FrameReport {
  long seq = 0;
  std::optional<ConvexPolygon> visibility;
  struct Integrated {
    std::string label;
    int id = 0;
    bool created = false;
  };
  std::vector<Integrated> integrated;
  std::vector<std::pair<std::string, DropReason>> dropped;
  std::vector<int> decayed_removed;
  int newly_explored = 0;
};

/// Projects sensor-frame points to the map x-y plane: drop z, rotate by
/// theta, translate by (x, y).
inline std::vector<WorldPoint> project_points(const Pose2D& pose,
                                              const std::vector<SensorPoint>& pts) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  std::vector<WorldPoint> out;
  out.reserve(pts.size());
  for (const SensorPoint& p : pts) {
    out.push_back({pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y});
  }
  return out;
}

/// Convex hull of the projected footprint plus the sensor origin; absent when
/// the cloud is too degenerate to span an area.
inline std::optional<ConvexPolygon> visibility_area(const DetectionFrame& frame) {
  std::vector<WorldPoint> pts = project_points(frame.pose, frame.footprint);
  pts.push_back(frame.pose.position());
  try {
    return convex_hull(std::move(pts));
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

/// Pipeline parameters beyond the merge rules.
inline constexpr int kDefaultMinPoints = 5;

/// Runs one frame through the map: detections become hull evidence on the
/// semantic layer, then the visibility area decays unobserved objects and
/// marks exploration cells. The hypermap must hold exactly one semantic and
/// one exploration layer; an occupancy layer is optional and never touched.
inline FrameReport process_frame(Hypermap& map, const DetectionFrame& frame,
                                 int min_points = kDefaultMinPoints) {
  SemanticLayer* semantic = nullptr;
  ExplorationGrid* exploration = nullptr;
  int semantic_count = 0, exploration_count = 0;
  for (LayerEntry& entry : map.layers()) {
    if (auto* sem = std::get_if<SemanticLayer>(&entry.payload)) {
      semantic = sem;
      ++semantic_count;
    } else if (auto* expl = std::get_if<ExplorationGrid>(&entry.payload)) {
      exploration = expl;
      ++exploration_count;
    }
  }
  if (semantic_count != 1 || exploration_count != 1)
    throw MissingLayer("pipeline needs exactly one semantic and one exploration layer");

  FrameReport report;
  report.seq = frame.seq;
  std::vector<int> evidenced;
  for (const Detection& det : frame.detections) {
    if (static_cast<int>(det.points.size()) < min_points) {
      report.dropped.emplace_back(det.label, DropReason::TooFewPoints);
      continue;
    }
    std::optional<ConvexPolygon> hull;
    try {
      hull = convex_hull(project_points(frame.pose, det.points));
    } catch (const DegenerateInput&) {
      report.dropped.emplace_back(det.label, DropReason::Degenerate);
      continue;
    }
    const auto [id, created] = semantic->integrate_evidence(det.label, *hull, frame.seq);
    report.integrated.push_back({det.label, id, created});
    evidenced.push_back(id);
  }

  report.visibility = visibility_area(frame);
  if (report.visibility) {
    report.decayed_removed = semantic->decay_unobserved(*report.visibility, evidenced);
    report.newly_explored = mark_explored(*exploration, *report.visibility);
  }
  return report;
}

/// Batch driver over a recorded frame sequence. Frames must arrive in
/// strictly increasing seq order; the result is deterministic in the input.
inline std::vector<FrameReport> run_log(Hypermap& map, const std::vector<DetectionFrame>& frames,
                                        int min_points = kDefaultMinPoints) {
  std::vector<FrameReport> reports;
  reports.reserve(frames.size());
  long last_seq = -1;
  bool first = true;
  for (const DetectionFrame& frame : frames) {
    if (!first && frame.seq <= last_seq)
      throw OutOfOrderFrame("frame seq " + std::to_string(frame.seq) + " after " +
                            std::to_string(last_seq));
    first = false;
    last_seq = frame.seq;
    reports.push_back(process_frame(map, frame, min_points));
  }
  return reports;
}

}  // namespace hypermap
