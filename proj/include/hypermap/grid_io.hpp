#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hypermap/errors.hpp"
#include "hypermap/grid.hpp"

namespace hypermap {

namespace detail {

/// Pixel value reserved for unknown occupancy cells (trinary map convention).
inline constexpr int kUnknownPixel = 205;

struct Pgm {
  int cols = 0;
  int rows = 0;
  std::vector<uint8_t> pixels;  // raster order: top row first
};

inline Pgm parse_pgm(const std::string& bytes, const std::string& what) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw FormatError(what + ": not a binary PGM (P5) file");
  auto next_int = [&](const char* field) {
    // Skip whitespace and '#' comment lines between header tokens.
    for (int c = in.peek(); c != EOF; c = in.peek()) {
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (!in || v < 0) throw FormatError(what + ": bad PGM header field " + field);
    return static_cast<int>(v);
  };
  Pgm pgm;
  pgm.cols = next_int("width");
  pgm.rows = next_int("height");
  const int maxval = next_int("maxval");
  if (maxval != 255) throw FormatError(what + ": PGM pixel depth is not 8-bit");
  if (pgm.cols < 1 || pgm.rows < 1) throw FormatError(what + ": empty PGM raster");
  in.get();  // single whitespace byte after maxval
  const size_t count = static_cast<size_t>(pgm.cols) * static_cast<size_t>(pgm.rows);
  pgm.pixels.resize(count);
  in.read(reinterpret_cast<char*>(pgm.pixels.data()), static_cast<std::streamsize>(count));
  if (static_cast<size_t>(in.gcount()) != count)
    throw FormatError(what + ": truncated PGM pixel data");
  return pgm;
}

inline std::string encode_pgm(int cols, int rows, const std::vector<uint8_t>& pixels) {
  std::ostringstream out;
  out << "P5\n" << cols << " " << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  return out.str();
}

struct GridMeta {
  std::string image;
  double resolution = 0.05;
  WorldPoint origin{0.0, 0.0};
  bool negate = false;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
};

inline GridMeta parse_grid_meta(const std::string& text, const std::string& what) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw FormatError(what + ": " + e.what());
  }
  try {
    GridMeta meta;
    meta.image = node["image"] ? node["image"].as<std::string>() : "";
    meta.resolution = node["resolution"].as<double>();
    const YAML::Node origin = node["origin"];
    if (!origin || origin.size() < 2) throw FormatError(what + ": missing origin");
    meta.origin = {origin[0].as<double>(), origin[1].as<double>()};
    if (origin.size() >= 3 && origin[2].as<double>() != 0.0)
      throw FormatError(what + ": rotated grids are not supported (origin yaw must be 0)");
    if (node["negate"]) meta.negate = node["negate"].as<int>() != 0;
    if (node["occupied_thresh"]) meta.occupied_thresh = node["occupied_thresh"].as<double>();
    if (node["free_thresh"]) meta.free_thresh = node["free_thresh"].as<double>();
    if (!(meta.resolution > 0.0)) throw FormatError(what + ": resolution must be positive");
    return meta;
  } catch (const YAML::Exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline std::string encode_grid_meta(const GridMeta& meta) {
  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em << YAML::BeginMap;
  em << YAML::Key << "image" << YAML::Value << meta.image;
  em << YAML::Key << "resolution" << YAML::Value << meta.resolution;
  em << YAML::Key << "origin" << YAML::Value << YAML::Flow << YAML::BeginSeq << meta.origin.x
     << meta.origin.y << 0.0 << YAML::EndSeq;
  em << YAML::Key << "negate" << YAML::Value << (meta.negate ? 1 : 0);
  em << YAML::Key << "occupied_thresh" << YAML::Value << meta.occupied_thresh;
  em << YAML::Key << "free_thresh" << YAML::Value << meta.free_thresh;
  em << YAML::EndMap;
  return std::string(em.c_str()) + "\n";
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("cannot read " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw IoError("cannot write " + path.string());
}

/// Occupancy decode from raster bytes + metadata. Map row 0 is the bottom row,
/// PGM stores the top row first.
inline OccupancyGrid decode_occupancy(const Pgm& pgm, const GridMeta& meta) {
  OccupancyGrid grid(GridGeometry{meta.resolution, meta.origin, pgm.rows, pgm.cols});
  grid.occupied_thresh = meta.occupied_thresh;
  grid.free_thresh = meta.free_thresh;
  for (int r = 0; r < pgm.rows; ++r) {
    const uint8_t* src = pgm.pixels.data() + static_cast<size_t>(pgm.rows - 1 - r) * pgm.cols;
    for (int c = 0; c < pgm.cols; ++c) {
      const int v = src[c];
      CellState& cell = grid.at({r, c});
      if (v == kUnknownPixel)
        cell = std::nullopt;
      else
        cell = meta.negate ? v / 255.0 : (255 - v) / 255.0;
    }
  }
  return grid;
}

inline std::vector<uint8_t> encode_occupancy_pixels(const OccupancyGrid& grid) {
  const GridGeometry& g = grid.geometry;
  std::vector<uint8_t> pixels(g.cell_count());
  for (int r = 0; r < g.rows; ++r) {
    uint8_t* dst = pixels.data() + static_cast<size_t>(g.rows - 1 - r) * g.cols;
    for (int c = 0; c < g.cols; ++c) {
      const CellState& cell = grid.at({r, c});
      if (!cell) {
        dst[c] = kUnknownPixel;
        continue;
      }
      int v = static_cast<int>(std::lround(255.0 * (1.0 - *cell)));
      v = std::clamp(v, 0, 255);
      if (v == kUnknownPixel) v = kUnknownPixel - 1;  // reserved pixel
      dst[c] = static_cast<uint8_t>(v);
    }
  }
  return pixels;
}

}  // namespace detail

/// Reads an occupancy grid from a PGM raster plus its YAML sidecar.
inline OccupancyGrid load_grid(const std::filesystem::path& pgm_path,
                               const std::filesystem::path& yaml_path) {
  const detail::GridMeta meta = detail::parse_grid_meta(detail::read_file(yaml_path),
                                                        yaml_path.string());
  const detail::Pgm pgm = detail::parse_pgm(detail::read_file(pgm_path), pgm_path.string());
  return detail::decode_occupancy(pgm, meta);
}

/// Writes PGM + YAML with negate=0; unknown cells use the reserved pixel 205.
inline void save_grid(const OccupancyGrid& grid, const std::filesystem::path& pgm_path,
                      const std::filesystem::path& yaml_path) {
  detail::GridMeta meta;
  meta.image = pgm_path.filename().string();
  meta.resolution = grid.geometry.resolution;
  meta.origin = grid.geometry.origin;
  meta.negate = false;
  meta.occupied_thresh = grid.occupied_thresh;
  meta.free_thresh = grid.free_thresh;
  detail::write_file(pgm_path, detail::encode_pgm(grid.geometry.cols, grid.geometry.rows,
                                                  detail::encode_occupancy_pixels(grid)));
  detail::write_file(yaml_path, detail::encode_grid_meta(meta));
}

/// Exploration grids persist as P5 PGM with 0 = unexplored, 255 = explored.
inline ExplorationGrid load_exploration(const std::filesystem::path& pgm_path,
                                        const std::filesystem::path& yaml_path) {
  const detail::GridMeta meta = detail::parse_grid_meta(detail::read_file(yaml_path),
                                                        yaml_path.string());
  const detail::Pgm pgm = detail::parse_pgm(detail::read_file(pgm_path), pgm_path.string());
  ExplorationGrid grid(GridGeometry{meta.resolution, meta.origin, pgm.rows, pgm.cols});
  for (int r = 0; r < pgm.rows; ++r) {
    const uint8_t* src = pgm.pixels.data() + static_cast<size_t>(pgm.rows - 1 - r) * pgm.cols;
    for (int c = 0; c < pgm.cols; ++c) grid.at({r, c}) = src[c] != 0;
  }
  return grid;
}

inline void save_exploration(const ExplorationGrid& grid, const std::filesystem::path& pgm_path,
                             const std::filesystem::path& yaml_path) {
  const GridGeometry& g = grid.geometry;
  std::vector<uint8_t> pixels(g.cell_count());
  for (int r = 0; r < g.rows; ++r) {
    uint8_t* dst = pixels.data() + static_cast<size_t>(g.rows - 1 - r) * g.cols;
    for (int c = 0; c < g.cols; ++c) dst[c] = grid.at({r, c}) ? 255 : 0;
  }
  detail::GridMeta meta;
  meta.image = pgm_path.filename().string();
  meta.resolution = g.resolution;
  meta.origin = g.origin;
  detail::write_file(pgm_path, detail::encode_pgm(g.cols, g.rows, pixels));
  detail::write_file(yaml_path, detail::encode_grid_meta(meta));
}

}  // namespace hypermap
