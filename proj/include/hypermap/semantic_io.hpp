#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypermap/errors.hpp"
#include "hypermap/grid_io.hpp"
#include "hypermap/semantic.hpp"

namespace hypermap {

namespace detail {

inline nlohmann::ordered_json polygon_to_json(const SimplePolygon& p) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const WorldPoint& v : p.vertices()) arr.push_back({v.x, v.y});
  return arr;
}

inline std::vector<WorldPoint> points_from_json(const nlohmann::json& arr,
                                                const std::string& what) {
  if (!arr.is_array()) throw FormatError(what + ": polygon must be an array of [x, y] pairs");
  std::vector<WorldPoint> pts;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() < 2) throw FormatError(what + ": bad polygon vertex");
    pts.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  return pts;
}

}  // namespace detail

inline std::string encode_semantic(const SemanticLayer& layer) {
  nlohmann::ordered_json doc;
  doc["objects"] = nlohmann::ordered_json::array();
  for (const SemanticObject& obj : layer.objects()) {
    nlohmann::ordered_json jo;
    jo["id"] = obj.id;
    jo["label"] = obj.label;
    jo["log_odds"] = obj.log_odds;
    jo["evidence"] = nlohmann::ordered_json::array();
    for (const Evidence& e : obj.evidence) {
      jo["evidence"].push_back({{"frame", e.frame}, {"polygon", detail::polygon_to_json(e.area)}});
    }
    doc["objects"].push_back(std::move(jo));
  }
  return doc.dump(2) + "\n";
}

inline SemanticLayer decode_semantic(const std::string& text, const std::string& what,
                                     MergeParams params = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
  try {
    std::vector<SemanticObject> objects;
    std::set<int> seen_ids;
    for (const auto& jo : doc.at("objects")) {
      SemanticObject obj;
      obj.id = jo.at("id").get<int>();
      obj.label = jo.at("label").get<std::string>();
      obj.log_odds = jo.at("log_odds").get<double>();
      if (!seen_ids.insert(obj.id).second)
        throw FormatError(what + ": duplicate object id " + std::to_string(obj.id));
      for (const auto& je : jo.at("evidence")) {
        obj.evidence.push_back(
            {ConvexPolygon(detail::points_from_json(je.at("polygon"), what)),
             je.at("frame").get<long>()});
      }
      if (obj.evidence.empty()) throw FormatError(what + ": object without evidence");
      objects.push_back(std::move(obj));
    }
    return SemanticLayer::restore(std::move(objects), params);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  } catch (const InvalidPolygon& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline void save_semantic(const SemanticLayer& layer, const std::filesystem::path& path) {
  detail::write_file(path, encode_semantic(layer));
}

inline SemanticLayer load_semantic(const std::filesystem::path& path, MergeParams params = {}) {
  return decode_semantic(detail::read_file(path), path.string(), params);
}

}  // namespace hypermap
