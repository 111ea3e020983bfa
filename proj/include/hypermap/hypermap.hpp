#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypermap/errors.hpp"
#include "hypermap/geometry.hpp"
#include "hypermap/grid.hpp"
#include "hypermap/semantic.hpp"

namespace hypermap {

enum class LayerKind { Occupancy, Exploration, Semantic };

inline const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Occupancy: return "occupancy";
    case LayerKind::Exploration: return "exploration";
    default: return "semantic";
  }
}

/// Named, typed layer. The payload variant realizes the per-layer conversion
/// functions: grid layers convert global positions to cell indices and back,
/// the semantic layer works on global coordinates directly.
struct LayerEntry {
  std::string name;
  std::variant<OccupancyGrid, ExplorationGrid, SemanticLayer> payload;

  LayerKind kind() const { return static_cast<LayerKind>(payload.index()); }
};

/// Content of one occupancy cell.
struct OccupancyCellValue {
  GridIndex cell;
  OccupancyClass state = OccupancyClass::Unknown;
  std::optional<double> probability;
};

struct ExplorationCellValue {
  GridIndex cell;
  bool explored = false;
};

/// Per-layer content: for point queries on grids either one cell or the
/// out-of-bounds marker; area queries list every covered cell. Semantic
/// layers report (label, id) pairs.
struct OccupancyContent {
  std::vector<OccupancyCellValue> cells;
  bool out_of_bounds = false;
};

struct ExplorationContent {
  std::vector<ExplorationCellValue> cells;
  bool out_of_bounds = false;
};

struct SemanticContent {
  std::vector<std::pair<std::string, int>> objects;  // (label, id)
};

struct ContentEntry {
  std::string layer;
  std::variant<OccupancyContent, ExplorationContent, SemanticContent> value;
};

using ContentResult = std::vector<ContentEntry>;

/// Per-layer search results: cell centers for grids, display polygons for the
/// semantic layer.
struct SearchEntry {
  std::string layer;
  LayerKind kind = LayerKind::Occupancy;
  std::vector<WorldPoint> positions;    // grid layers
  std::vector<ConvexPolygon> polygons;  // semantic layers
};

using SearchResult = std::vector<SearchEntry>;

/// Query target: a point or a polygonal area in the global frame.
using QueryLocation = std::variant<WorldPoint, SimplePolygon>;

/// Multi-layer map container with unified content/search access. Layer order
/// is insertion order and is stable across save/load.
class Hypermap {
public:
  const std::vector<LayerEntry>& layers() const { return layers_; }
  std::vector<LayerEntry>& layers() { return layers_; }

  void add_layer(LayerEntry entry) {
    if (find(entry.name) != nullptr)
      throw DuplicateName("layer '" + entry.name + "' already exists");
    layers_.push_back(std::move(entry));
  }

  void remove_layer(const std::string& name) {
    const LayerEntry* entry = find(name);
    if (entry == nullptr) throw UnknownLayer("no layer named '" + name + "'");
    layers_.erase(layers_.begin() + (entry - layers_.data()));
  }

  std::vector<std::pair<std::string, LayerKind>> list_layers() const {
    std::vector<std::pair<std::string, LayerKind>> out;
    for (const LayerEntry& entry : layers_) out.emplace_back(entry.name, entry.kind());
    return out;
  }

  LayerEntry& layer(const std::string& name) {
    LayerEntry* entry = const_cast<LayerEntry*>(find(name));
    if (entry == nullptr) throw UnknownLayer("no layer named '" + name + "'");
    return *entry;
  }

  const LayerEntry& layer(const std::string& name) const {
    const LayerEntry* entry = find(name);
    if (entry == nullptr) throw UnknownLayer("no layer named '" + name + "'");
    return *entry;
  }

  bool has_layer(const std::string& name) const { return find(name) != nullptr; }

  /// Unified content access: reports what each selected layer stores at the
  /// given point or area. A point outside a grid layer yields that layer's
  /// out-of-bounds marker rather than a global error. An empty selection
  /// means all layers, in layer order.
  ContentResult content(const QueryLocation& at, const std::vector<std::string>& names = {}) const {
    ContentResult result;
    for (const LayerEntry* entry : select(names)) {
      ContentEntry ce;
      ce.layer = entry->name;
      if (const auto* occ = std::get_if<OccupancyGrid>(&entry->payload)) {
        ce.value = occupancy_content(*occ, at);
      } else if (const auto* expl = std::get_if<ExplorationGrid>(&entry->payload)) {
        ce.value = exploration_content(*expl, at);
      } else {
        const auto& sem = std::get<SemanticLayer>(entry->payload);
        SemanticContent sc;
        if (const auto* pt = std::get_if<WorldPoint>(&at)) {
          sc.objects = sem.content(*pt);
        } else {
          sc.objects = sem.content(std::get<SimplePolygon>(at));
        }
        ce.value = std::move(sc);
      }
      result.push_back(std::move(ce));
    }
    return result;
  }

  /// Unified value search: each selected layer maps the global string into
  /// its own vocabulary and reports global positions of matches. Values a
  /// layer does not recognize yield an empty entry for that layer.
  SearchResult search(const std::string& value, const std::vector<std::string>& names = {}) const {
    SearchResult result;
    for (const LayerEntry* entry : select(names)) {
      SearchEntry se;
      se.layer = entry->name;
      se.kind = entry->kind();
      if (const auto* occ = std::get_if<OccupancyGrid>(&entry->payload)) {
        std::optional<OccupancyClass> wanted;
        if (value == "occupied") wanted = OccupancyClass::Occupied;
        else if (value == "free") wanted = OccupancyClass::Free;
        else if (value == "unknown") wanted = OccupancyClass::Unknown;
        if (wanted) {
          for (int r = 0; r < occ->geometry.rows; ++r)
            for (int c = 0; c < occ->geometry.cols; ++c)
              if (classify(*occ, {r, c}) == *wanted)
                se.positions.push_back(grid_to_world(occ->geometry, {r, c}));
        }
      } else if (const auto* expl = std::get_if<ExplorationGrid>(&entry->payload)) {
        if (value == "explored" || value == "unexplored") {
          const uint8_t wanted = value == "explored" ? 1 : 0;
          for (int r = 0; r < expl->geometry.rows; ++r)
            for (int c = 0; c < expl->geometry.cols; ++c)
              if (expl->at({r, c}) == wanted)
                se.positions.push_back(grid_to_world(expl->geometry, {r, c}));
        }
      } else {
        se.polygons = std::get<SemanticLayer>(entry->payload).search(value);
      }
      result.push_back(std::move(se));
    }
    return result;
  }

private:
  const LayerEntry* find(const std::string& name) const {
    for (const LayerEntry& entry : layers_) {
      if (entry.name == name) return &entry;
    }
    return nullptr;
  }

  std::vector<const LayerEntry*> select(const std::vector<std::string>& names) const {
    std::vector<const LayerEntry*> out;
    if (names.empty()) {
      for (const LayerEntry& entry : layers_) out.push_back(&entry);
    } else {
      for (const std::string& name : names) out.push_back(&layer(name));
    }
    return out;
  }

  template <typename Grid, typename Value, typename Fill>
  static auto grid_content(const Grid& grid, const QueryLocation& at, Fill&& fill) {
    struct Result {
      std::vector<Value> cells;
      bool out_of_bounds = false;
    } res;
    if (const auto* pt = std::get_if<WorldPoint>(&at)) {
      if (!grid.geometry.contains(*pt)) {
        res.out_of_bounds = true;
      } else {
        res.cells.push_back(fill(world_to_grid(grid.geometry, *pt)));
      }
    } else {
      for (const GridIndex& idx : rasterize_polygon(grid.geometry, std::get<SimplePolygon>(at)))
        res.cells.push_back(fill(idx));
    }
    return res;
  }

  static OccupancyContent occupancy_content(const OccupancyGrid& occ, const QueryLocation& at) {
    auto res = grid_content<OccupancyGrid, OccupancyCellValue>(occ, at, [&](const GridIndex& idx) {
      return OccupancyCellValue{idx, classify(occ, idx), occ.at(idx)};
    });
    return {std::move(res.cells), res.out_of_bounds};
  }

  static ExplorationContent exploration_content(const ExplorationGrid& expl,
                                                const QueryLocation& at) {
    auto res =
        grid_content<ExplorationGrid, ExplorationCellValue>(expl, at, [&](const GridIndex& idx) {
          return ExplorationCellValue{idx, expl.at(idx) != 0};
        });
    return {std::move(res.cells), res.out_of_bounds};
  }

  std::vector<LayerEntry> layers_;
};

}  // namespace hypermap
