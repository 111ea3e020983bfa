#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hypermap/hypermap.hpp"
#include "hypermap/hypermap_io.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace hypermap;
using testsupport::TempDir;

namespace {

// 4x4 map at 0.5 m: column 3 occupied, cell (2,2) unknown, rest free;
// half explored; one displayed chair around (0.75, 0.75). Probabilities are
// exact 8-bit values so PGM persistence is lossless.
const double kFreeP = 25.0 / 255.0;
const double kOccupiedP = 230.0 / 255.0;

Hypermap fixture_map() {
  const GridGeometry g{0.5, {0, 0}, 4, 4};
  OccupancyGrid occ(g, CellState(kFreeP));
  for (int r = 0; r < 4; ++r) occ.at({r, 3}) = kOccupiedP;
  occ.at({2, 2}) = std::nullopt;
  ExplorationGrid expl(g);
  mark_explored(expl, SimplePolygon({{0, 0}, {1, 0}, {1, 2}, {0, 2}}));
  SemanticLayer sem;
  const ConvexPolygon chair({{0.5, 0.5}, {1, 0.5}, {1, 1}, {0.5, 1}});
  sem.integrate_evidence("chair", chair, 0);
  sem.integrate_evidence("chair", chair, 1);

  Hypermap map;
  map.add_layer({"occupancy", std::move(occ)});
  map.add_layer({"exploration", std::move(expl)});
  map.add_layer({"semantic", std::move(sem)});
  return map;
}

}  // namespace

TEST_CASE("layer management") {
  Hypermap map = fixture_map();
  const auto listed = map.list_layers();
  REQUIRE(listed.size() == 3);
  CHECK(listed[0] == std::pair<std::string, LayerKind>{"occupancy", LayerKind::Occupancy});
  CHECK(listed[1] == std::pair<std::string, LayerKind>{"exploration", LayerKind::Exploration});
  CHECK(listed[2] == std::pair<std::string, LayerKind>{"semantic", LayerKind::Semantic});

  CHECK_THROWS_AS(map.add_layer({"semantic", SemanticLayer()}), DuplicateName);
  map.remove_layer("semantic");
  CHECK_FALSE(map.has_layer("semantic"));
  CHECK_THROWS_AS(map.remove_layer("semantic"), UnknownLayer);
  CHECK_THROWS_AS(map.content(WorldPoint{0, 0}, {"semantic"}), UnknownLayer);
  CHECK_THROWS_AS(map.search("chair", {"nope"}), UnknownLayer);
}

TEST_CASE("content point queries fan out across layers") {
  const Hypermap map = fixture_map();

  const ContentResult occupied = map.content(WorldPoint{1.75, 0.25}, {"occupancy"});
  REQUIRE(occupied.size() == 1);
  const auto& oc = std::get<OccupancyContent>(occupied[0].value);
  REQUIRE(oc.cells.size() == 1);
  CHECK(oc.cells[0].state == OccupancyClass::Occupied);
  CHECK(oc.cells[0].probability == CellState(kOccupiedP));

  // all layers, in layer order, at the chair centroid
  const ContentResult all = map.content(WorldPoint{0.75, 0.75});
  REQUIRE(all.size() == 3);
  CHECK(all[0].layer == "occupancy");
  CHECK(std::get<OccupancyContent>(all[0].value).cells[0].state == OccupancyClass::Free);
  CHECK(std::get<ExplorationContent>(all[1].value).cells[0].explored);
  const auto& sc = std::get<SemanticContent>(all[2].value);
  REQUIRE(sc.objects.size() == 1);
  CHECK(sc.objects[0].first == "chair");

  // out-of-bounds point marks the grid layers, not an error
  const ContentResult oob = map.content(WorldPoint{-3, -3});
  CHECK(std::get<OccupancyContent>(oob[0].value).out_of_bounds);
  CHECK(std::get<ExplorationContent>(oob[1].value).out_of_bounds);
  CHECK(std::get<SemanticContent>(oob[2].value).objects.empty());

  // unknown cell reports no probability
  const ContentResult unk = map.content(WorldPoint{1.25, 1.25}, {"occupancy"});
  CHECK(std::get<OccupancyContent>(unk[0].value).cells[0].state == OccupancyClass::Unknown);
  CHECK_FALSE(std::get<OccupancyContent>(unk[0].value).cells[0].probability.has_value());
}

TEST_CASE("content area queries list covered cells and hit objects") {
  const Hypermap map = fixture_map();
  const SimplePolygon area({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ContentResult res = map.content(QueryLocation{area});
  CHECK(std::get<OccupancyContent>(res[0].value).cells.size() == 4);
  CHECK(std::get<ExplorationContent>(res[1].value).cells.size() == 4);
  CHECK(std::get<SemanticContent>(res[2].value).objects.size() == 1);

  const SimplePolygon far({{50, 50}, {51, 50}, {51, 51}, {50, 51}});
  const ContentResult empty = map.content(QueryLocation{far});
  CHECK(std::get<OccupancyContent>(empty[0].value).cells.empty());
  CHECK_FALSE(std::get<OccupancyContent>(empty[0].value).out_of_bounds);
  CHECK(std::get<SemanticContent>(empty[2].value).objects.empty());
}

TEST_CASE("search maps vocabulary per layer") {
  const Hypermap map = fixture_map();

  const SearchResult occupied = map.search("occupied", {"occupancy"});
  REQUIRE(occupied.size() == 1);
  CHECK(occupied[0].positions.size() == 4);  // column 3
  for (const WorldPoint& p : occupied[0].positions) CHECK(p.x == Catch::Approx(1.75));

  const SearchResult unknown = map.search("unknown", {"occupancy"});
  CHECK(unknown[0].positions.size() == 1);

  const SearchResult chair = map.search("chair");
  REQUIRE(chair.size() == 3);
  CHECK(chair[0].positions.empty());  // not in grid vocabulary
  CHECK(chair[1].positions.empty());
  REQUIRE(chair[2].polygons.size() == 1);

  const SearchResult explored = map.search("explored", {"exploration"});
  CHECK(explored[0].positions.size() == 8);
  const SearchResult unexplored = map.search("unexplored", {"exploration"});
  CHECK(unexplored[0].positions.size() == 8);

  Hypermap fresh;
  fresh.add_layer({"exploration", ExplorationGrid(GridGeometry{0.5, {0, 0}, 4, 4})});
  CHECK(fresh.search("explored")[0].positions.empty());
}

TEST_CASE("search/content duality on every returned position") {
  const Hypermap map = fixture_map();
  for (const std::string& value : {"occupied", "free", "unknown", "explored", "unexplored",
                                   "chair"}) {
    for (const SearchEntry& entry : map.search(value)) {
      for (const WorldPoint& pos : entry.positions) {
        const ContentResult content = map.content(pos, {entry.layer});
        if (entry.kind == LayerKind::Occupancy) {
          const auto& oc = std::get<OccupancyContent>(content[0].value);
          CHECK(to_string(oc.cells[0].state) == value);
        } else {
          const auto& ec = std::get<ExplorationContent>(content[0].value);
          CHECK((ec.cells[0].explored ? "explored" : "unexplored") == value);
        }
      }
      for (const ConvexPolygon& p : entry.polygons) {
        const ContentResult at_centroid = map.content(polygon_centroid(p), {entry.layer});
        const auto& sc = std::get<SemanticContent>(at_centroid[0].value);
        bool found = false;
        for (const auto& [label, id] : sc.objects) found |= label == value;
        CAPTURE(value, entry.layer);
        CHECK(found);
      }
    }
  }
}

TEST_CASE("content with all layers equals concatenated single-layer calls") {
  const Hypermap map = fixture_map();
  const WorldPoint at{0.75, 0.75};
  const ContentResult all = map.content(at);
  REQUIRE(all.size() == map.layers().size());
  for (size_t i = 0; i < map.layers().size(); ++i) {
    const ContentResult single = map.content(at, {map.layers()[i].name});
    CHECK(all[i].layer == single[0].layer);
    CHECK(all[i].value.index() == single[0].value.index());
  }
}

TEST_CASE("hmap archive round trip") {
  const Hypermap map = fixture_map();
  TempDir dir;
  save_hypermap(map, dir.file("map.hmap"));
  const Hypermap back = load_hypermap(dir.file("map.hmap"));

  REQUIRE(back.layers().size() == 3);
  CHECK(back.list_layers() == map.list_layers());
  CHECK(std::get<OccupancyGrid>(back.layer("occupancy").payload) ==
        std::get<OccupancyGrid>(map.layer("occupancy").payload));
  CHECK(std::get<ExplorationGrid>(back.layer("exploration").payload) ==
        std::get<ExplorationGrid>(map.layer("exploration").payload));
  CHECK(std::get<SemanticLayer>(back.layer("semantic").payload) ==
        std::get<SemanticLayer>(map.layer("semantic").payload));
}

TEST_CASE("empty hypermap round trips") {
  TempDir dir;
  save_hypermap(Hypermap(), dir.file("empty.hmap"));
  CHECK(load_hypermap(dir.file("empty.hmap")).layers().empty());
}

TEST_CASE("identical maps produce identical archives") {
  TempDir dir;
  save_hypermap(fixture_map(), dir.file("a.hmap"));
  save_hypermap(fixture_map(), dir.file("b.hmap"));
  const std::string a = detail::read_file(dir.file("a.hmap"));
  const std::string b = detail::read_file(dir.file("b.hmap"));
  CHECK(a == b);
  CHECK(a.size() > 0);
}

TEST_CASE("archive errors") {
  TempDir dir;
  CHECK_THROWS_AS(load_hypermap(dir.file("missing.hmap")), IoError);

  detail::write_file(dir.file("junk.hmap"), "this is not a zip archive at all");
  CHECK_THROWS_AS(load_hypermap(dir.file("junk.hmap")), FormatError);

  // a valid zip without the manifest
  detail::write_zip(dir.file("nomanifest.hmap"), {{"readme.txt", "hello"}});
  CHECK_THROWS_AS(load_hypermap(dir.file("nomanifest.hmap")), FormatError);

  // manifest referencing a missing layer file
  detail::write_zip(dir.file("misref.hmap"),
                    {{"hypermap.yaml",
                      "version: 1\nlayers:\n  - name: occupancy\n    kind: occupancy\n"
                      "    files: [occupancy.pgm, occupancy.yaml]\n"}});
  CHECK_THROWS_AS(load_hypermap(dir.file("misref.hmap")), FormatError);

  // unknown layer kind
  detail::write_zip(dir.file("badkind.hmap"),
                    {{"hypermap.yaml",
                      "version: 1\nlayers:\n  - name: x\n    kind: voxel\n    files: []\n"}});
  CHECK_THROWS_AS(load_hypermap(dir.file("badkind.hmap")), FormatError);
}

TEST_CASE("zip containers round trip arbitrary payloads") {
  TempDir dir;
  std::mt19937 rng(123);
  std::vector<detail::ZipEntry> entries;
  for (int i = 0; i < 5; ++i) {
    std::string data(static_cast<size_t>(rng() % 5000), '\0');
    for (char& c : data) c = static_cast<char>(rng() % 256);
    entries.push_back({"entry_" + std::to_string(i), std::move(data)});
  }
  entries.push_back({"empty", ""});
  detail::write_zip(dir.file("t.zip"), entries);
  const auto back = detail::read_zip(dir.file("t.zip"));
  REQUIRE(back.size() == entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].name == entries[i].name);
    CHECK(back[i].data == entries[i].data);
  }
}
