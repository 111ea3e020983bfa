#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hypermap/detail/zip.hpp"
#include "hypermap/errors.hpp"
#include "hypermap/grid_io.hpp"
#include "hypermap/hypermap.hpp"
#include "hypermap/semantic_io.hpp"

namespace hypermap {

/// Writes the map as a `.hmap` archive: a ZIP container holding a
/// `hypermap.yaml` manifest plus each layer in its native format
/// (PGM+YAML for grids, JSON for semantic layers).
inline void save_hypermap(const Hypermap& map, const std::filesystem::path& path) {
  std::vector<detail::ZipEntry> entries;
  YAML::Emitter manifest;
  manifest << YAML::BeginMap;
  manifest << YAML::Key << "version" << YAML::Value << 1;
  manifest << YAML::Key << "layers" << YAML::Value << YAML::BeginSeq;
  for (const LayerEntry& layer : map.layers()) {
    manifest << YAML::BeginMap;
    manifest << YAML::Key << "name" << YAML::Value << layer.name;
    manifest << YAML::Key << "kind" << YAML::Value << to_string(layer.kind());
    manifest << YAML::Key << "files" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    if (layer.kind() == LayerKind::Semantic) {
      manifest << layer.name + ".json";
    } else {
      manifest << layer.name + ".pgm" << layer.name + ".yaml";
    }
    manifest << YAML::EndSeq << YAML::EndMap;

    if (const auto* occ = std::get_if<OccupancyGrid>(&layer.payload)) {
      detail::GridMeta meta;
      meta.image = layer.name + ".pgm";
      meta.resolution = occ->geometry.resolution;
      meta.origin = occ->geometry.origin;
      meta.occupied_thresh = occ->occupied_thresh;
      meta.free_thresh = occ->free_thresh;
      entries.push_back({layer.name + ".pgm",
                         detail::encode_pgm(occ->geometry.cols, occ->geometry.rows,
                                            detail::encode_occupancy_pixels(*occ))});
      entries.push_back({layer.name + ".yaml", detail::encode_grid_meta(meta)});
    } else if (const auto* expl = std::get_if<ExplorationGrid>(&layer.payload)) {
      const GridGeometry& g = expl->geometry;
      std::vector<uint8_t> pixels(g.cell_count());
      for (int r = 0; r < g.rows; ++r) {
        uint8_t* dst = pixels.data() + static_cast<size_t>(g.rows - 1 - r) * g.cols;
        for (int c = 0; c < g.cols; ++c) dst[c] = expl->at({r, c}) ? 255 : 0;
      }
      detail::GridMeta meta;
      meta.image = layer.name + ".pgm";
      meta.resolution = g.resolution;
      meta.origin = g.origin;
      entries.push_back({layer.name + ".pgm", detail::encode_pgm(g.cols, g.rows, pixels)});
      entries.push_back({layer.name + ".yaml", detail::encode_grid_meta(meta)});
    } else {
      entries.push_back(
          {layer.name + ".json", encode_semantic(std::get<SemanticLayer>(layer.payload))});
    }
  }
  manifest << YAML::EndSeq << YAML::EndMap;
  entries.insert(entries.begin(),
                 {"hypermap.yaml", std::string(manifest.c_str()) + "\n"});
  detail::write_zip(path, entries);
}

inline Hypermap load_hypermap(const std::filesystem::path& path, MergeParams params = {}) {
  const std::vector<detail::ZipEntry> entries = detail::read_zip(path);
  const std::string what = path.string();
  std::map<std::string, const std::string*> files;
  for (const detail::ZipEntry& entry : entries) files[entry.name] = &entry.data;

  const auto manifest_it = files.find("hypermap.yaml");
  if (manifest_it == files.end()) throw FormatError(what + ": archive has no hypermap.yaml");
  YAML::Node manifest;
  try {
    manifest = YAML::Load(*manifest_it->second);
  } catch (const YAML::Exception& e) {
    throw FormatError(what + ": " + e.what());
  }

  auto fetch = [&](const std::string& name) -> const std::string& {
    const auto it = files.find(name);
    if (it == files.end()) throw FormatError(what + ": manifest references missing file " + name);
    return *it->second;
  };

  Hypermap map;
  try {
    for (const YAML::Node& node : manifest["layers"]) {
      const std::string name = node["name"].as<std::string>();
      const std::string kind = node["kind"].as<std::string>();
      if (kind == "occupancy") {
        const detail::GridMeta meta = detail::parse_grid_meta(fetch(name + ".yaml"), what);
        const detail::Pgm pgm = detail::parse_pgm(fetch(name + ".pgm"), what);
        map.add_layer({name, detail::decode_occupancy(pgm, meta)});
      } else if (kind == "exploration") {
        const detail::GridMeta meta = detail::parse_grid_meta(fetch(name + ".yaml"), what);
        const detail::Pgm pgm = detail::parse_pgm(fetch(name + ".pgm"), what);
        ExplorationGrid grid(GridGeometry{meta.resolution, meta.origin, pgm.rows, pgm.cols});
        for (int r = 0; r < pgm.rows; ++r) {
          const uint8_t* src = pgm.pixels.data() + static_cast<size_t>(pgm.rows - 1 - r) * pgm.cols;
          for (int c = 0; c < pgm.cols; ++c) grid.at({r, c}) = src[c] != 0;
        }
        map.add_layer({name, std::move(grid)});
      } else if (kind == "semantic") {
        map.add_layer({name, decode_semantic(fetch(name + ".json"), what, params)});
      } else {
        throw FormatError(what + ": unknown layer kind '" + kind + "'");
      }
    }
  } catch (const YAML::Exception& e) {
    throw FormatError(what + ": " + e.what());
  }
  return map;
}

}  // namespace hypermap
