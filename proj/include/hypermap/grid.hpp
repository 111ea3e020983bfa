#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "hypermap/errors.hpp"
#include "hypermap/geometry.hpp"

namespace hypermap {

/// Cell address as a row/column pair. Row 0 is the bottom row of the map:
/// y grows with the row index.
struct GridIndex {
  int row = 0;
  int col = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Axis-aligned raster geometry. `origin` is the world position of the outer
/// corner of cell (0,0).
struct GridGeometry {
  double resolution = 0.05;  // meters per cell
  WorldPoint origin{0.0, 0.0};
  int rows = 1;
  int cols = 1;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

  bool in_bounds(const GridIndex& idx) const {
    return idx.row >= 0 && idx.row < rows && idx.col >= 0 && idx.col < cols;
  }

  bool contains(const WorldPoint& pt) const {
    return pt.x >= origin.x && pt.y >= origin.y &&
           pt.x < origin.x + static_cast<double>(cols) * resolution &&
           pt.y < origin.y + static_cast<double>(rows) * resolution;
  }

  size_t offset(const GridIndex& idx) const {
    return static_cast<size_t>(idx.row) * static_cast<size_t>(cols) + static_cast<size_t>(idx.col);
  }

  size_t cell_count() const { return static_cast<size_t>(rows) * static_cast<size_t>(cols); }
};

/// World position -> containing cell (floor division). Throws OutOfBounds for
/// points outside the raster.
inline GridIndex world_to_grid(const GridGeometry& g, const WorldPoint& pt) {
  if (!g.contains(pt)) throw OutOfBounds("point outside grid bounds");
  return {static_cast<int>(std::floor((pt.y - g.origin.y) / g.resolution)),
          static_cast<int>(std::floor((pt.x - g.origin.x) / g.resolution))};
}

/// Cell -> world position of its center. Throws OutOfBounds for invalid
/// indices.
inline WorldPoint grid_to_world(const GridGeometry& g, const GridIndex& idx) {
  if (!g.in_bounds(idx)) throw OutOfBounds("grid index outside bounds");
  return {g.origin.x + (static_cast<double>(idx.col) + 0.5) * g.resolution,
          g.origin.y + (static_cast<double>(idx.row) + 0.5) * g.resolution};
}

/// Occupancy probability, or nullopt for unknown cells.
using CellState = std::optional<double>;

enum class OccupancyClass { Free, Occupied, Unknown };

inline const char* to_string(OccupancyClass c) {
  switch (c) {
    case OccupancyClass::Free: return "free";
    case OccupancyClass::Occupied: return "occupied";
    default: return "unknown";
  }
}

/// Probability grid with unknown cells. Thresholds ride along from the YAML
/// sidecar so classification queries have their defaults in one place.
struct OccupancyGrid {
  GridGeometry geometry;
  std::vector<CellState> cells;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;

  OccupancyGrid() : cells(1) {}
  explicit OccupancyGrid(const GridGeometry& g, CellState fill = std::nullopt)
      : geometry(g), cells(g.cell_count(), fill) {}

  CellState& at(const GridIndex& idx) { return cells[geometry.offset(idx)]; }
  const CellState& at(const GridIndex& idx) const { return cells[geometry.offset(idx)]; }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;
};

/// Raster of explored (1) / unexplored (0) cells.
struct ExplorationGrid {
  GridGeometry geometry;
  std::vector<uint8_t> cells;

  ExplorationGrid() : cells(1, 0) {}
  explicit ExplorationGrid(const GridGeometry& g) : geometry(g), cells(g.cell_count(), 0) {}

  uint8_t& at(const GridIndex& idx) { return cells[geometry.offset(idx)]; }
  uint8_t at(const GridIndex& idx) const { return cells[geometry.offset(idx)]; }

  friend bool operator==(const ExplorationGrid&, const ExplorationGrid&) = default;
};

/// Three-way classification of one occupancy cell: occupied at or above
/// `occupied_thresh`, free at or below `free_thresh`, unknown otherwise and
/// for cells with no probability at all.
inline OccupancyClass classify(const OccupancyGrid& occ, const GridIndex& idx,
                               double occupied_thresh, double free_thresh) {
  if (!(free_thresh >= 0.0 && free_thresh < occupied_thresh && occupied_thresh <= 1.0))
    throw BadThresholds("need 0 <= free_thresh < occupied_thresh <= 1");
  if (!occ.geometry.in_bounds(idx)) throw OutOfBounds("grid index outside bounds");
  const CellState& cell = occ.at(idx);
  if (!cell) return OccupancyClass::Unknown;
  if (*cell >= occupied_thresh) return OccupancyClass::Occupied;
  if (*cell <= free_thresh) return OccupancyClass::Free;
  return OccupancyClass::Unknown;
}

inline OccupancyClass classify(const OccupancyGrid& occ, const GridIndex& idx) {
  return classify(occ, idx, occ.occupied_thresh, occ.free_thresh);
}

/// All in-bounds cells whose centers lie inside the polygon
/// (boundary-inclusive). May be empty.
inline std::vector<GridIndex> rasterize_polygon(const GridGeometry& g, const SimplePolygon& p) {
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const WorldPoint& v : p.vertices()) {
    min_x = std::min(min_x, v.x);
    min_y = std::min(min_y, v.y);
    max_x = std::max(max_x, v.x);
    max_y = std::max(max_y, v.y);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor((min_y - g.origin.y) / g.resolution)));
  const int c0 = std::max(0, static_cast<int>(std::floor((min_x - g.origin.x) / g.resolution)));
  const int r1 = std::min(g.rows - 1, static_cast<int>(std::floor((max_y - g.origin.y) / g.resolution)));
  const int c1 = std::min(g.cols - 1, static_cast<int>(std::floor((max_x - g.origin.x) / g.resolution)));
  std::vector<GridIndex> out;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const GridIndex idx{r, c};
      if (point_in_polygon(grid_to_world(g, idx), p)) out.push_back(idx);
    }
  }
  return out;
}

/// Marks every cell covered by the polygon as explored; returns the number of
/// 0->1 transitions. Idempotent on repeat calls.
inline int mark_explored(ExplorationGrid& e, const SimplePolygon& p) {
  int newly = 0;
  for (const GridIndex& idx : rasterize_polygon(e.geometry, p)) {
    uint8_t& cell = e.at(idx);
    newly += cell == 0;
    cell = 1;
  }
  return newly;
}

/// Fraction of free cells inside the boundary that are explored; 1.0 when the
/// boundary contains no free cell at all.
inline double coverage(const ExplorationGrid& e, const OccupancyGrid& occ,
                       const SimplePolygon& boundary) {
  if (e.geometry != occ.geometry) throw GeometryMismatch("exploration/occupancy geometry differs");
  long free_cells = 0, explored_free = 0;
  for (const GridIndex& idx : rasterize_polygon(occ.geometry, boundary)) {
    if (classify(occ, idx) != OccupancyClass::Free) continue;
    ++free_cells;
    explored_free += e.at(idx) != 0;
  }
  if (free_cells == 0) return 1.0;
  return static_cast<double>(explored_free) / static_cast<double>(free_cells);
}

}  // namespace hypermap
