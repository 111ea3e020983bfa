#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypermap/errors.hpp"
#include "hypermap/geometry.hpp"

namespace hypermap {

/// Existence belief is kept as log-odds with additive hit/miss updates,
/// clamped to this magnitude.
inline constexpr double kLogOddsClamp = 4.0;

inline double probability_from_log_odds(double log_odds) {
  return 1.0 / (1.0 + std::exp(-log_odds));
}

inline double log_odds_from_probability(double p) { return std::log(p / (1.0 - p)); }

/// Merge/maintenance parameters for the semantic layer. The Jaccard threshold
/// is deliberately low: detections often cover only part of an object.
struct MergeParams {
  double jaccard_threshold = 0.2;
  double l_hit = 0.9;
  double l_miss = -0.4;
  double display_threshold = 0.75;
  double delete_threshold = 0.2;

  void validate() const {
    if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0))
      throw BadThresholds("jaccard_threshold must be in (0, 1]");
    if (!(delete_threshold < display_threshold))
      throw BadThresholds("delete_threshold must be below display_threshold");
    if (!(l_hit > 0.0) || !(l_miss < 0.0))
      throw BadThresholds("l_hit must be positive and l_miss negative");
  }

  friend bool operator==(const MergeParams&, const MergeParams&) = default;
};

/// One accumulated observation of an object.
struct Evidence {
  ConvexPolygon area;
  long frame = 0;

  friend bool operator==(const Evidence& a, const Evidence& b) {
    return a.frame == b.frame && a.area == b.area;
  }
};

/// Labeled object with its evidence-area list and existence belief. The
/// display area is the evidence polygon whose centroid lies closest to the
/// mean of all evidence centroids (earliest on ties); it is derived data,
/// recomputed whenever evidence changes.
struct SemanticObject {
  int id = 0;
  std::string label;
  std::vector<Evidence> evidence;
  double log_odds = 0.0;
  size_t display_index = 0;

  const ConvexPolygon& display_area() const { return evidence[display_index].area; }
  double probability() const { return probability_from_log_odds(log_odds); }

  void select_display_area() {
    WorldPoint mean{0.0, 0.0};
    std::vector<WorldPoint> centroids;
    centroids.reserve(evidence.size());
    for (const Evidence& e : evidence) {
      const WorldPoint c = polygon_centroid(e.area);
      centroids.push_back(c);
      mean.x += c.x;
      mean.y += c.y;
    }
    mean.x /= static_cast<double>(evidence.size());
    mean.y /= static_cast<double>(evidence.size());
    size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < centroids.size(); ++i) {
      const double d = distance(centroids[i], mean);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    display_index = best;
  }

  friend bool operator==(const SemanticObject& a, const SemanticObject& b) {
    return a.id == b.id && a.label == b.label && a.evidence == b.evidence &&
           a.log_odds == b.log_odds;
  }
};

/// Polygonal semantic layer: a set of labeled objects maintained through
/// evidence integration and visibility-driven decay.
class SemanticLayer {
public:
  SemanticLayer() = default;
  explicit SemanticLayer(MergeParams params) : params_(params) { params_.validate(); }

  const MergeParams& params() const { return params_; }
  const std::vector<SemanticObject>& objects() const { return objects_; }
  int next_id() const { return next_id_; }

  bool displayed(const SemanticObject& o) const {
    return o.probability() >= params_.display_threshold;
  }

  /// Integrates one labeled area. Among same-label objects whose display area
  /// overlaps it, the one with maximal Jaccard wins (lowest id on ties); a
  /// match at or above the threshold appends evidence and raises the belief,
  /// anything else creates a new object. Returns (object id, created).
  std::pair<int, bool> integrate_evidence(const std::string& label, const ConvexPolygon& area,
                                          long frame) {
    SemanticObject* best = nullptr;
    double best_j = 0.0;
    for (SemanticObject& obj : objects_) {
      if (obj.label != label) continue;
      const double j = jaccard(obj.display_area(), area);
      if (j > best_j) {
        best_j = j;
        best = &obj;
      }
    }
    if (best != nullptr && best_j >= params_.jaccard_threshold) {
      best->evidence.push_back({area, frame});
      best->log_odds = std::clamp(best->log_odds + params_.l_hit, -kLogOddsClamp, kLogOddsClamp);
      best->select_display_area();
      return {best->id, false};
    }
    SemanticObject obj;
    obj.id = next_id_++;
    obj.label = label;
    obj.evidence.push_back({area, frame});
    obj.log_odds = std::clamp(params_.l_hit, -kLogOddsClamp, kLogOddsClamp);
    obj.display_index = 0;
    objects_.push_back(std::move(obj));
    return {objects_.back().id, true};
  }

  /// Lowers the belief of every object inside the visibility polygon (display
  /// centroid test) that received no evidence this pass, then deletes objects
  /// whose probability fell to the delete threshold. Returns deleted ids.
  std::vector<int> decay_unobserved(const SimplePolygon& visibility,
                                    const std::vector<int>& evidenced) {
    std::vector<int> removed;
    for (SemanticObject& obj : objects_) {
      if (std::find(evidenced.begin(), evidenced.end(), obj.id) != evidenced.end()) continue;
      if (!point_in_polygon(polygon_centroid(obj.display_area()), visibility)) continue;
      obj.log_odds = std::clamp(obj.log_odds + params_.l_miss, -kLogOddsClamp, kLogOddsClamp);
      if (obj.probability() <= params_.delete_threshold) removed.push_back(obj.id);
    }
    std::erase_if(objects_, [&](const SemanticObject& o) {
      return std::find(removed.begin(), removed.end(), o.id) != removed.end();
    });
    return removed;
  }

  /// Objects whose existence probability reaches the display threshold,
  /// id order.
  std::vector<const SemanticObject*> displayed_objects() const {
    std::vector<const SemanticObject*> out;
    for (const SemanticObject& obj : objects_) {
      if (displayed(obj)) out.push_back(&obj);
    }
    return out;
  }

  /// Display areas of displayed objects carrying exactly this label.
  std::vector<ConvexPolygon> search(const std::string& label) const {
    std::vector<ConvexPolygon> out;
    for (const SemanticObject* obj : displayed_objects()) {
      if (obj->label == label) out.push_back(obj->display_area());
    }
    return out;
  }

  /// Displayed objects whose display area contains the point.
  std::vector<std::pair<std::string, int>> content(const WorldPoint& at) const {
    std::vector<std::pair<std::string, int>> out;
    for (const SemanticObject* obj : displayed_objects()) {
      if (point_in_polygon(at, obj->display_area())) out.emplace_back(obj->label, obj->id);
    }
    return out;
  }

  /// Displayed objects whose display area overlaps the query polygon.
  std::vector<std::pair<std::string, int>> content(const SimplePolygon& at) const {
    std::vector<std::pair<std::string, int>> out;
    for (const SemanticObject* obj : displayed_objects()) {
      if (polygons_intersect(at, obj->display_area())) out.emplace_back(obj->label, obj->id);
    }
    return out;
  }

  friend bool operator==(const SemanticLayer& a, const SemanticLayer& b) {
    return a.objects_ == b.objects_ && a.next_id_ == b.next_id_;
  }

  /// Restores a layer from persisted state; display areas are recomputed.
  static SemanticLayer restore(std::vector<SemanticObject> objects, MergeParams params) {
    SemanticLayer layer(params);
    int max_id = -1;
    for (SemanticObject& obj : objects) {
      obj.select_display_area();
      max_id = std::max(max_id, obj.id);
    }
    std::sort(objects.begin(), objects.end(),
              [](const SemanticObject& a, const SemanticObject& b) { return a.id < b.id; });
    layer.objects_ = std::move(objects);
    layer.next_id_ = max_id + 1;
    return layer;
  }

private:
  std::vector<SemanticObject> objects_;
  int next_id_ = 0;
  MergeParams params_;
};

}  // namespace hypermap
