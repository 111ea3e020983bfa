#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "hypermap/errors.hpp"

namespace hypermap {

/// Point in the global map frame, meters.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const WorldPoint& a, const WorldPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend WorldPoint operator+(const WorldPoint& a, const WorldPoint& b) {
    return {a.x + b.x, a.y + b.y};
  }
  friend WorldPoint operator-(const WorldPoint& a, const WorldPoint& b) {
    return {a.x - b.x, a.y - b.y};
  }
};

inline bool is_finite(const WorldPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

inline double distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// z-component of (a - o) x (b - o). Positive when o->a->b turns left.
inline double cross(const WorldPoint& o, const WorldPoint& a, const WorldPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Cross-product magnitudes below this (m^2) count as collinear; double
/// precision noise floor for meter-scale maps.
inline constexpr double kCollinearEps = 1e-12;

/// Intersection areas below this (m^2) count as empty.
inline constexpr double kAreaEps = 1e-12;

namespace detail {

inline double signed_area(const std::vector<WorldPoint>& v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const WorldPoint& a = v[i];
    const WorldPoint& b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

inline bool on_segment(const WorldPoint& p, const WorldPoint& a, const WorldPoint& b) {
  if (std::abs(cross(a, b, p)) > kCollinearEps) return false;
  return p.x >= std::min(a.x, b.x) - kCollinearEps && p.x <= std::max(a.x, b.x) + kCollinearEps &&
         p.y >= std::min(a.y, b.y) - kCollinearEps && p.y <= std::max(a.y, b.y) + kCollinearEps;
}

// Proper crossing test for the simplicity check: segments that merely share
// an endpoint do not count.
inline bool segments_cross(const WorldPoint& a, const WorldPoint& b,
                           const WorldPoint& c, const WorldPoint& d) {
  const double d1 = cross(a, b, c);
  const double d2 = cross(a, b, d);
  const double d3 = cross(c, d, a);
  const double d4 = cross(c, d, b);
  return ((d1 > kCollinearEps && d2 < -kCollinearEps) || (d1 < -kCollinearEps && d2 > kCollinearEps)) &&
         ((d3 > kCollinearEps && d4 < -kCollinearEps) || (d3 < -kCollinearEps && d4 > kCollinearEps));
}

}  // namespace detail

/// Simple (non-self-intersecting) polygon, vertices normalized to CCW order.
/// Inputs given in CW order are reversed silently; anything else that breaks
/// the invariants throws InvalidPolygon.
class SimplePolygon {
public:
  explicit SimplePolygon(std::vector<WorldPoint> vertices) : verts_(std::move(vertices)) {
    if (verts_.size() < 3) throw InvalidPolygon("polygon needs at least 3 vertices");
    for (const WorldPoint& p : verts_) {
      if (!is_finite(p)) throw InvalidPolygon("polygon vertex not finite");
    }
    for (size_t i = 0; i < verts_.size(); ++i) {
      if (verts_[i] == verts_[(i + 1) % verts_.size()])
        throw InvalidPolygon("consecutive polygon vertices coincide");
    }
    const double area2 = detail::signed_area(verts_);
    if (std::abs(area2) <= kAreaEps) throw InvalidPolygon("polygon area is zero");
    if (area2 < 0.0) std::reverse(verts_.begin(), verts_.end());
    const size_t n = verts_.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;       // shared endpoint
        if (j == i + 1) continue;                 // adjacent edges
        if (detail::segments_cross(verts_[i], verts_[(i + 1) % n],
                                   verts_[j], verts_[(j + 1) % n]))
          throw InvalidPolygon("polygon is self-intersecting");
      }
    }
  }

  const std::vector<WorldPoint>& vertices() const { return verts_; }
  size_t size() const { return verts_.size(); }

  friend bool operator==(const SimplePolygon& a, const SimplePolygon& b) {
    return a.verts_ == b.verts_;
  }

protected:
  struct unchecked_t {};
  SimplePolygon(unchecked_t, std::vector<WorldPoint> vertices) : verts_(std::move(vertices)) {}

  std::vector<WorldPoint> verts_;
};

/// Strictly convex polygon: CCW, every vertex a hull vertex, no three
/// retained vertices collinear.
class ConvexPolygon : public SimplePolygon {
public:
  explicit ConvexPolygon(std::vector<WorldPoint> vertices) : SimplePolygon(std::move(vertices)) {
    const size_t n = verts_.size();
    for (size_t i = 0; i < n; ++i) {
      if (cross(verts_[i], verts_[(i + 1) % n], verts_[(i + 2) % n]) <= kCollinearEps)
        throw InvalidPolygon("polygon is not strictly convex");
    }
  }

private:
  friend std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon&,
                                                          const ConvexPolygon&);
  ConvexPolygon(unchecked_t tag, std::vector<WorldPoint> vertices)
      : SimplePolygon(tag, std::move(vertices)) {}
};

/// Minimal convex polygon containing all inputs (monotone chain), CCW with
/// collinear boundary points removed. Throws DegenerateInput when fewer than
/// three distinct points remain or all points are collinear.
inline ConvexPolygon convex_hull(std::vector<WorldPoint> points) {
  for (const WorldPoint& p : points) {
    if (!is_finite(p)) throw DegenerateInput("hull input point not finite");
  }
  std::sort(points.begin(), points.end(), [](const WorldPoint& a, const WorldPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const size_t n = points.size();
  if (n < 3) throw DegenerateInput("hull needs at least 3 distinct points");

  std::vector<WorldPoint> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(h[k - 2], h[k - 1], points[i]) <= kCollinearEps) --k;
    h[k++] = points[i];
  }
  for (size_t i = n - 1, lo = k + 1; i-- > 0;) {  // upper chain
    while (k >= lo && cross(h[k - 2], h[k - 1], points[i]) <= kCollinearEps) --k;
    h[k++] = points[i];
  }
  h.resize(k - 1);  // last point equals the first
  if (h.size() < 3) throw DegenerateInput("hull input is collinear");
  return ConvexPolygon(std::move(h));
}

/// Shoelace area; positive for any valid polygon.
inline double polygon_area(const SimplePolygon& p) {
  return detail::signed_area(p.vertices());
}

/// Area centroid (first moment over area), not the vertex mean.
inline WorldPoint polygon_centroid(const SimplePolygon& p) {
  const std::vector<WorldPoint>& v = p.vertices();
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const WorldPoint& s = v[i];
    const WorldPoint& t = v[(i + 1) % v.size()];
    const double w = s.x * t.y - t.x * s.y;
    a += w;
    cx += (s.x + t.x) * w;
    cy += (s.y + t.y) * w;
  }
  a *= 0.5;
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

/// Even-odd ray crossing test; points on the boundary count as inside.
inline bool point_in_polygon(const WorldPoint& pt, const SimplePolygon& p) {
  const std::vector<WorldPoint>& v = p.vertices();
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    if (detail::on_segment(pt, v[i], v[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > pt.y) != (v[j].y > pt.y)) {
      const double xi = v[j].x + (pt.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (pt.x < xi) inside = !inside;
    }
  }
  return inside;
}

/// True when two simple polygons share at least one point
/// (boundary-inclusive, consistent with point_in_polygon).
inline bool polygons_intersect(const SimplePolygon& a, const SimplePolygon& b) {
  for (const WorldPoint& v : a.vertices())
    if (point_in_polygon(v, b)) return true;
  for (const WorldPoint& v : b.vertices())
    if (point_in_polygon(v, a)) return true;
  const std::vector<WorldPoint>& va = a.vertices();
  const std::vector<WorldPoint>& vb = b.vertices();
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j)
      if (detail::segments_cross(va[i], va[(i + 1) % va.size()], vb[j], vb[(j + 1) % vb.size()]))
        return true;
  return false;
}

/// Convex-convex clipping (Sutherland-Hodgman); nullopt when the overlap is
/// empty or degenerates to a point/segment.
inline std::optional<ConvexPolygon> convex_intersection(const ConvexPolygon& a,
                                                        const ConvexPolygon& b) {
  std::vector<WorldPoint> out = a.vertices();
  const std::vector<WorldPoint>& clip = b.vertices();
  for (size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const WorldPoint& ca = clip[e];
    const WorldPoint& cb = clip[(e + 1) % clip.size()];
    std::vector<WorldPoint> in;
    in.swap(out);
    for (size_t i = 0; i < in.size(); ++i) {
      const WorldPoint& s = in[i];
      const WorldPoint& t = in[(i + 1) % in.size()];
      const double ds = cross(ca, cb, s);
      const double dt = cross(ca, cb, t);
      if (ds >= -kCollinearEps) out.push_back(s);
      if ((ds > kCollinearEps && dt < -kCollinearEps) || (ds < -kCollinearEps && dt > kCollinearEps)) {
        const double f = ds / (ds - dt);
        out.push_back({s.x + f * (t.x - s.x), s.y + f * (t.y - s.y)});
      }
    }
  }
  // Clean up duplicates and collinear runs introduced by clipping.
  std::vector<WorldPoint> clean;
  for (const WorldPoint& p : out) {
    if (clean.empty() || distance(clean.back(), p) > 1e-12) clean.push_back(p);
  }
  while (clean.size() > 1 && distance(clean.front(), clean.back()) <= 1e-12) clean.pop_back();
  bool removed = true;
  while (removed && clean.size() >= 3) {
    removed = false;
    for (size_t i = 0; i < clean.size(); ++i) {
      const WorldPoint& prev = clean[(i + clean.size() - 1) % clean.size()];
      const WorldPoint& next = clean[(i + 1) % clean.size()];
      if (cross(prev, clean[i], next) <= kCollinearEps) {
        clean.erase(clean.begin() + static_cast<std::ptrdiff_t>(i));
        removed = true;
        break;
      }
    }
  }
  if (clean.size() < 3 || detail::signed_area(clean) <= kAreaEps) return std::nullopt;
  return ConvexPolygon(SimplePolygon::unchecked_t{}, std::move(clean));
}

/// Jaccard index |A n B| / (|A| + |B| - |A n B|); the union expanded by
/// inclusion-exclusion. Result clamped to [0, 1].
inline double jaccard(const ConvexPolygon& a, const ConvexPolygon& b) {
  const std::optional<ConvexPolygon> inter = convex_intersection(a, b);
  if (!inter) return 0.0;
  const double ai = polygon_area(*inter);
  const double u = polygon_area(a) + polygon_area(b) - ai;
  return std::clamp(ai / u, 0.0, 1.0);
}

/// Jaccard over the sets of raster cells (size `cell`, covering both bounding
/// boxes) whose centers fall inside each polygon. Works for any simple
/// polygon; the oracle counterpart of jaccard() and the shape metric for
/// non-convex ground truth. Throws EmptyRaster when neither polygon covers a
/// single cell center.
inline double rasterized_jaccard(const SimplePolygon& a, const SimplePolygon& b, double cell) {
  if (!(cell > 0.0)) throw EmptyRaster("raster cell size must be positive");
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const SimplePolygon* p : {&a, &b}) {
    for (const WorldPoint& v : p->vertices()) {
      min_x = std::min(min_x, v.x);
      min_y = std::min(min_y, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
  }
  const long cols = std::max<long>(1, static_cast<long>(std::ceil((max_x - min_x) / cell)));
  const long rows = std::max<long>(1, static_cast<long>(std::ceil((max_y - min_y) / cell)));
  long in_a = 0, in_b = 0, in_both = 0;
  for (long r = 0; r < rows; ++r) {
    const double y = min_y + (static_cast<double>(r) + 0.5) * cell;
    for (long c = 0; c < cols; ++c) {
      const WorldPoint center{min_x + (static_cast<double>(c) + 0.5) * cell, y};
      const bool ia = point_in_polygon(center, a);
      const bool ib = point_in_polygon(center, b);
      in_a += ia;
      in_b += ib;
      in_both += ia && ib;
    }
  }
  if (in_a == 0 && in_b == 0) throw EmptyRaster("no cell center falls inside either polygon");
  const long uni = in_a + in_b - in_both;
  return static_cast<double>(in_both) / static_cast<double>(uni);
}

}  // namespace hypermap
