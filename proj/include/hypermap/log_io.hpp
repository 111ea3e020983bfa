#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermap/errors.hpp"
#include "hypermap/mapper.hpp"

namespace hypermap {

namespace detail {

inline std::vector<SensorPoint> sensor_points_from_json(const nlohmann::json& arr,
                                                        const std::string& what) {
  if (!arr.is_array()) throw FormatError(what + ": points must be an array");
  std::vector<SensorPoint> pts;
  pts.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() < 2 || item.size() > 3)
      throw FormatError(what + ": point must be [x, y] or [x, y, z]");
    SensorPoint p{item[0].get<double>(), item[1].get<double>(),
                  item.size() == 3 ? item[2].get<double>() : 0.0};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw FormatError(what + ": non-finite point coordinate");
    pts.push_back(p);
  }
  return pts;
}

inline nlohmann::ordered_json sensor_points_to_json(const std::vector<SensorPoint>& pts) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SensorPoint& p : pts) {
    if (p.z == 0.0)
      arr.push_back({p.x, p.y});
    else
      arr.push_back({p.x, p.y, p.z});
  }
  return arr;
}

}  // namespace detail

/// Parses one JSONL detection-log line.
inline DetectionFrame decode_frame(const std::string& line, const std::string& what) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
  try {
    DetectionFrame frame;
    frame.seq = doc.at("seq").get<long>();
    const auto& pose = doc.at("pose");
    frame.pose = Pose2D(pose.at("x").get<double>(), pose.at("y").get<double>(),
                        pose.at("theta").get<double>());
    if (!std::isfinite(frame.pose.x) || !std::isfinite(frame.pose.y) ||
        !std::isfinite(frame.pose.theta))
      throw FormatError(what + ": non-finite pose");
    frame.footprint = detail::sensor_points_from_json(doc.at("footprint"), what);
    for (const auto& jd : doc.at("detections")) {
      frame.detections.push_back({jd.at("label").get<std::string>(),
                                  detail::sensor_points_from_json(jd.at("points"), what)});
    }
    return frame;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline std::string encode_frame(const DetectionFrame& frame) {
  nlohmann::ordered_json doc;
  doc["seq"] = frame.seq;
  doc["pose"] = {{"x", frame.pose.x}, {"y", frame.pose.y}, {"theta", frame.pose.theta}};
  doc["footprint"] = detail::sensor_points_to_json(frame.footprint);
  doc["detections"] = nlohmann::ordered_json::array();
  for (const Detection& det : frame.detections) {
    doc["detections"].push_back(
        {{"label", det.label}, {"points", detail::sensor_points_to_json(det.points)}});
  }
  return doc.dump();
}

/// Detection log: JSON Lines, one frame per line.
inline std::vector<DetectionFrame> load_detection_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<DetectionFrame> frames;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    frames.push_back(decode_frame(line, path.string() + ":" + std::to_string(line_no)));
  }
  return frames;
}

inline void save_detection_log(const std::vector<DetectionFrame>& frames,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const DetectionFrame& frame : frames) out << encode_frame(frame) << "\n";
  if (!out.good()) throw IoError("cannot write " + path.string());
}

}  // namespace hypermap
