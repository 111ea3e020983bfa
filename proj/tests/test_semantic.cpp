#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hypermap/semantic.hpp"
#include "hypermap/semantic_io.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace hypermap;
using testsupport::TempDir;

namespace {

ConvexPolygon square_at(double x, double y, double side = 1.0) {
  return ConvexPolygon({{x, y}, {x + side, y}, {x + side, y + side}, {x, y + side}});
}

const ConvexPolygon kUnitSquare = square_at(0, 0);

}  // namespace

TEST_CASE("integrate_evidence creates and merges by Jaccard threshold") {
  SemanticLayer layer;

  const auto [id0, created0] = layer.integrate_evidence("chair", kUnitSquare, 0);
  CHECK(created0);
  REQUIRE(layer.objects().size() == 1);
  CHECK(layer.objects()[0].log_odds == Catch::Approx(0.9));
  CHECK(layer.objects()[0].probability() == Catch::Approx(0.711).margin(0.001));

  const auto [id1, created1] = layer.integrate_evidence("chair", kUnitSquare, 1);
  CHECK_FALSE(created1);
  CHECK(id1 == id0);
  REQUIRE(layer.objects().size() == 1);
  CHECK(layer.objects()[0].evidence.size() == 2);
  CHECK(layer.objects()[0].log_odds == Catch::Approx(1.8));

  // J = 1/3 >= 0.2: merges
  const auto [id2, created2] = layer.integrate_evidence("chair", square_at(0.5, 0), 2);
  CHECK_FALSE(created2);
  CHECK(id2 == id0);

  // J = 1/19 < 0.2: new object (0.9 beyond the display area picked above)
  SemanticLayer fresh;
  fresh.integrate_evidence("chair", kUnitSquare, 0);
  const auto [id3, created3] = fresh.integrate_evidence("chair", square_at(0.9, 0), 1);
  CHECK(created3);
  CHECK(id3 != 0);
  CHECK(fresh.objects().size() == 2);
}

TEST_CASE("labels never merge across classes") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", kUnitSquare, 0);
  const auto [id, created] = layer.integrate_evidence("table", kUnitSquare, 1);
  CHECK(created);
  CHECK(layer.objects().size() == 2);
  CHECK(id == 1);
}

TEST_CASE("best match wins when several objects pass the threshold") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", square_at(0.0, 0), 0);   // id 0
  layer.integrate_evidence("chair", square_at(0.9, 0), 1);   // id 1 (J=1/19 -> new)
  // area overlapping both, but much closer to id 1
  const auto [id, created] = layer.integrate_evidence("chair", square_at(0.8, 0), 2);
  CHECK_FALSE(created);
  CHECK(id == 1);
}

TEST_CASE("display area follows the centroid closest to the evidence mean") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", square_at(0.0, 0), 0);
  layer.integrate_evidence("chair", square_at(0.5, 0), 1);
  layer.integrate_evidence("chair", square_at(0.4, 0), 2);
  REQUIRE(layer.objects().size() == 1);
  const SemanticObject& obj = layer.objects()[0];
  // centroids: 0.5, 1.0, 0.9 -> mean 0.8 -> closest is the third (0.9)
  CHECK(obj.display_index == 2);
  CHECK(obj.display_area() == obj.evidence[2].area);

  // earliest index wins ties
  SemanticLayer tie;
  tie.integrate_evidence("chair", square_at(0.0, 0), 0);
  tie.integrate_evidence("chair", square_at(0.5, 0), 1);  // mean 0.75, both at 0.25
  CHECK(tie.objects()[0].display_index == 0);
}

TEST_CASE("decay lowers belief and deletes at the threshold") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", kUnitSquare, 0);
  const SimplePolygon visibility({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});

  CHECK(layer.decay_unobserved(visibility, {}).empty());
  CHECK(layer.objects()[0].log_odds == Catch::Approx(0.5));

  // 0.9 - 6*0.4 = -1.5 <= ln(0.2/0.8); deletion on the 6th miss overall
  for (int miss = 2; miss <= 5; ++miss) {
    CHECK(layer.decay_unobserved(visibility, {}).empty());
  }
  const std::vector<int> removed = layer.decay_unobserved(visibility, {});
  CHECK(removed == std::vector<int>{0});
  CHECK(layer.objects().empty());
}

TEST_CASE("decay skips evidenced and non-visible objects") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", square_at(0, 0), 0);    // id 0, inside visibility
  layer.integrate_evidence("table", square_at(10, 10), 1);  // id 1, outside
  const SimplePolygon visibility({{-1, -1}, {3, -1}, {3, 3}, {-1, 3}});

  layer.decay_unobserved(visibility, {0});
  CHECK(layer.objects()[0].log_odds == Catch::Approx(0.9));  // evidenced
  CHECK(layer.objects()[1].log_odds == Catch::Approx(0.9));  // not visible

  layer.decay_unobserved(visibility, {});
  CHECK(layer.objects()[0].log_odds == Catch::Approx(0.5));
  CHECK(layer.objects()[1].log_odds == Catch::Approx(0.9));
}

TEST_CASE("deletion miss count matches the closed form for random parameters") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> hit(0.3, 2.0);
  std::uniform_real_distribution<double> miss(-0.8, -0.1);
  std::uniform_real_distribution<double> del(0.05, 0.4);
  const SimplePolygon visibility({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});
  for (int iter = 0; iter < 20; ++iter) {
    MergeParams params;
    params.l_hit = hit(rng);
    params.l_miss = miss(rng);
    params.delete_threshold = del(rng);
    params.display_threshold = params.delete_threshold + 0.3;
    const int expected = static_cast<int>(std::ceil(
        (params.l_hit - log_odds_from_probability(params.delete_threshold)) / -params.l_miss));

    SemanticLayer layer(params);
    layer.integrate_evidence("chair", kUnitSquare, 0);
    int misses = 0;
    while (!layer.objects().empty()) {
      layer.decay_unobserved(visibility, {});
      ++misses;
      REQUIRE(misses < 1000);
    }
    CHECK(misses == expected);
  }
}

TEST_CASE("log odds clamp to +/-4") {
  SemanticLayer layer;
  for (int i = 0; i < 20; ++i) layer.integrate_evidence("chair", kUnitSquare, i);
  CHECK(layer.objects()[0].log_odds == 4.0);

  MergeParams params;
  params.delete_threshold = 0.001;  // effectively disable deletion
  SemanticLayer floor(params);
  floor.integrate_evidence("chair", kUnitSquare, 0);
  const SimplePolygon visibility({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});
  for (int i = 0; i < 40; ++i) floor.decay_unobserved(visibility, {});
  CHECK(floor.objects()[0].log_odds >= -4.0);
}

TEST_CASE("displayed_objects applies the display threshold") {
  SemanticLayer layer;
  layer.integrate_evidence("chair", kUnitSquare, 0);
  CHECK(layer.displayed_objects().empty());  // p ~ 0.711 < 0.75
  layer.integrate_evidence("chair", kUnitSquare, 1);
  REQUIRE(layer.displayed_objects().size() == 1);  // p ~ 0.858
  CHECK(layer.displayed_objects()[0]->id == 0);

  CHECK(SemanticLayer().displayed_objects().empty());
}

TEST_CASE("search returns display polygons for exact labels in id order") {
  SemanticLayer layer;
  for (int i = 0; i < 2; ++i) {
    layer.integrate_evidence("chair", square_at(0, 0), i);
    layer.integrate_evidence("chair", square_at(5, 0), i);
    layer.integrate_evidence("couch", square_at(10, 0), i);
  }
  const std::vector<ConvexPolygon> chairs = layer.search("chair");
  REQUIRE(chairs.size() == 2);
  CHECK(polygon_centroid(chairs[0]).x == Catch::Approx(0.5));
  CHECK(polygon_centroid(chairs[1]).x == Catch::Approx(5.5));
  CHECK(layer.search("plant").empty());
  CHECK(layer.search("cha").empty());  // exact match only
}

TEST_CASE("content queries by point and by area") {
  SemanticLayer layer;
  for (int i = 0; i < 2; ++i) {
    layer.integrate_evidence("chair", square_at(0, 0), i);
    layer.integrate_evidence("table", square_at(2, 0), i);
  }
  const auto at_chair = layer.content(WorldPoint{0.5, 0.5});
  REQUIRE(at_chair.size() == 1);
  CHECK(at_chair[0] == std::pair<std::string, int>{"chair", 0});
  CHECK(layer.content(WorldPoint{50, 50}).empty());

  const auto both = layer.content(SimplePolygon({{0.5, 0.2}, {2.5, 0.2}, {2.5, 0.8}, {0.5, 0.8}}));
  REQUIRE(both.size() == 2);
  CHECK(both[0].first == "chair");
  CHECK(both[1].first == "table");

  // search/content duality at returned centroids
  for (const ConvexPolygon& p : layer.search("chair")) {
    bool found = false;
    for (const auto& [label, id] : layer.content(polygon_centroid(p))) found |= label == "chair";
    CHECK(found);
  }
}

TEST_CASE("semantic JSON round trip") {
  std::mt19937 rng(77);
  SemanticLayer layer;
  for (int i = 0; i < 6; ++i) {
    const ConvexPolygon area = oracles::random_convex(rng, 8, 0.0, 3.0);
    layer.integrate_evidence(i % 2 ? "chair" : "plant", area, i);
  }
  const SimplePolygon visibility({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});
  layer.decay_unobserved(visibility, {0});

  TempDir dir;
  save_semantic(layer, dir.file("sem.json"));
  const SemanticLayer back = load_semantic(dir.file("sem.json"));
  CHECK(back == layer);
  REQUIRE(back.objects().size() == layer.objects().size());
  for (size_t i = 0; i < back.objects().size(); ++i) {
    CHECK(back.objects()[i].display_index == layer.objects()[i].display_index);
  }
  CHECK(back.next_id() == layer.next_id());
}

TEST_CASE("empty layer round trips") {
  TempDir dir;
  save_semantic(SemanticLayer(), dir.file("empty.json"));
  CHECK(load_semantic(dir.file("empty.json")).objects().empty());
}

TEST_CASE("duplicate ids are rejected") {
  TempDir dir;
  {
    std::ofstream out(dir.file("dup.json"));
    out << R"({"objects":[
      {"id":1,"label":"chair","log_odds":0.9,
       "evidence":[{"frame":0,"polygon":[[0,0],[1,0],[1,1],[0,1]]}]},
      {"id":1,"label":"table","log_odds":0.9,
       "evidence":[{"frame":0,"polygon":[[2,0],[3,0],[3,1],[2,1]]}]}]})";
  }
  CHECK_THROWS_AS(load_semantic(dir.file("dup.json")), FormatError);
  CHECK_THROWS_AS(load_semantic(dir.file("nonexistent.json")), IoError);
}

TEST_CASE("bad merge params are rejected") {
  MergeParams params;
  params.delete_threshold = 0.8;  // >= display_threshold
  CHECK_THROWS_AS(SemanticLayer(params), BadThresholds);
  params = MergeParams{};
  params.jaccard_threshold = 0.0;
  CHECK_THROWS_AS(SemanticLayer(params), BadThresholds);
}
