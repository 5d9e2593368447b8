#include "doctest.h"

#include "flatpack/emit.hpp"
#include "flatpack/layout.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace flatpack;

namespace {

Polygon2 rect(double w, double h) {
  return {{{0, 0}, {w, 0}, {w, h}, {0, h}}, {}};
}

FabricationSpec small_sheet(double w, double h, double spacing = 5) {
  FabricationSpec s;
  s.sheet_width = w;
  s.sheet_height = h;
  s.spacing = spacing;
  return s;
}

struct Box {
  double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
};

Box bounds_of(const Polygon2& p) {
  Box b{p.outer[0].x, p.outer[0].y, p.outer[0].x, p.outer[0].y};
  for (auto v : p.outer) {
    b.lo_x = std::min(b.lo_x, v.x);
    b.lo_y = std::min(b.lo_y, v.y);
    b.hi_x = std::max(b.hi_x, v.x);
    b.hi_y = std::max(b.hi_y, v.y);
  }
  return b;
}

bool boxes_overlap(const Box& a, const Box& b, double inflate) {
  return a.lo_x - inflate < b.hi_x && b.lo_x - inflate < a.hi_x &&
         a.lo_y - inflate < b.hi_y && b.lo_y - inflate < a.hi_y;
}

size_t count_of(const std::string& text, const std::string& needle) {
  size_t n = 0;
  for (size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

template <typename Bytes>
void write_file(const std::string& path, const Bytes& data) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

template <typename Fn>
std::string expect_error(const std::string& code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code == code);
    return e.what();
  }
  FAIL("expected Error(", code, ") but nothing was thrown");
  return {};
}

}  // namespace

TEST_CASE("three small parts pack onto a single sheet") {
  std::vector<std::string> ids{"a", "b", "c"};
  std::vector<Polygon2> shapes{rect(100, 100), rect(100, 100), rect(100, 100)};
  auto layout = layout_sheets(ids, shapes, small_sheet(400, 400));
  CHECK(layout.sheet_count == 1);
  REQUIRE(layout.placements.size() == 3);
  std::vector<Box> boxes;
  for (const auto& pl : layout.placements) {
    auto placed = placed_polygon(shapes[pl.part], pl);
    auto b = bounds_of(placed);
    CHECK(b.lo_x >= -1e-9);
    CHECK(b.lo_y >= -1e-9);
    CHECK(b.hi_x <= 400 + 1e-9);
    CHECK(b.hi_y <= 400 + 1e-9);
    boxes.push_back(b);
  }
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j)
      CHECK_FALSE(boxes_overlap(boxes[i], boxes[j], 5 - 1e-9));
}

TEST_CASE("oversized part is rejected with its dimensions") {
  std::vector<std::string> ids{"tabletop"};
  std::vector<Polygon2> shapes{rect(500, 100)};
  auto msg = expect_error("PartTooLarge", [&] {
    layout_sheets(ids, shapes, small_sheet(400, 400));
  });
  CHECK(msg.find("tabletop") != std::string::npos);
  CHECK(msg.find("500") != std::string::npos);
  CHECK(msg.find("100") != std::string::npos);
  CHECK(msg.find("400") != std::string::npos);
}

TEST_CASE("quarter-turn rotation is used when only the turned orientation fits") {
  std::vector<std::string> ids{"beam"};
  std::vector<Polygon2> shapes{rect(300, 100)};
  auto layout = layout_sheets(ids, shapes, small_sheet(150, 400));
  CHECK(layout.sheet_count == 1);
  REQUIRE(layout.placements.size() == 1);
  CHECK(layout.placements[0].rotated);
  auto b = bounds_of(placed_polygon(shapes[0], layout.placements[0]));
  CHECK(b.hi_x - b.lo_x == doctest::Approx(100));
  CHECK(b.hi_y - b.lo_y == doctest::Approx(300));
  CHECK(b.lo_x >= -1e-9);
  CHECK(b.hi_x <= 150 + 1e-9);
  CHECK(b.hi_y <= 400 + 1e-9);
}

TEST_CASE("random parts never overlap, stay in bounds, and keep their area") {
  std::mt19937_64 rng(20260814);
  std::uniform_real_distribution<double> scale(2.0, 14.0);
  std::vector<std::string> ids;
  std::vector<Polygon2> shapes;
  double area_before = 0;
  for (int i = 0; i < 20; ++i) {
    auto star = oracle::random_star_polygon(rng);
    double s = scale(rng);
    for (auto& v : star.outer) v = {s * v.x, s * v.y};
    ids.push_back("part" + std::to_string(i));
    shapes.push_back(star);
    area_before += polygon_area(star);
  }
  FabricationSpec spec;  // stock sheet, spacing 10
  auto layout = layout_sheets(ids, shapes, spec);
  REQUIRE(layout.placements.size() == 20);
  double area_after = 0;
  std::vector<std::vector<Box>> per_sheet(layout.sheet_count);
  for (const auto& pl : layout.placements) {
    auto placed = placed_polygon(shapes[pl.part], pl);
    area_after += polygon_area(placed);
    auto b = bounds_of(placed);
    CHECK(b.lo_x >= -1e-9);
    CHECK(b.lo_y >= -1e-9);
    CHECK(b.hi_x <= spec.sheet_width + 1e-9);
    CHECK(b.hi_y <= spec.sheet_height + 1e-9);
    per_sheet[pl.sheet].push_back(b);
  }
  CHECK(area_after == doctest::Approx(area_before).epsilon(1e-9));
  for (const auto& boxes : per_sheet)
    for (size_t i = 0; i < boxes.size(); ++i)
      for (size_t j = i + 1; j < boxes.size(); ++j)
        CHECK_FALSE(boxes_overlap(boxes[i], boxes[j], spec.spacing - 1e-9));
}

TEST_CASE("packing order depends on geometry, not ids or input order") {
  std::vector<Polygon2> shapes{rect(30, 10), rect(20, 20), rect(15, 5), rect(40, 8)};
  std::vector<std::string> ids{"a", "b", "c", "d"};
  std::vector<Polygon2> permuted{shapes[2], shapes[0], shapes[3], shapes[1]};
  std::vector<std::string> renamed{"w", "x", "y", "z"};
  auto spec = small_sheet(120, 90, 4);
  auto svg1 = emit_svg(layout_sheets(ids, shapes, spec), shapes, spec);
  auto svg2 = emit_svg(layout_sheets(renamed, permuted, spec), permuted, spec);
  CHECK(svg1 == svg2);
}

TEST_CASE("svg for a unit square is a single closed four-segment path") {
  std::vector<std::string> ids{"sq"};
  std::vector<Polygon2> shapes{rect(1, 1)};
  auto spec = small_sheet(50, 40);
  auto docs = emit_svg(layout_sheets(ids, shapes, spec), shapes, spec);
  REQUIRE(docs.size() == 1);
  const auto& svg = docs[0];
  CHECK(svg.find("width=\"50mm\"") != std::string::npos);
  CHECK(svg.find("height=\"40mm\"") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 50 40\"") != std::string::npos);
  CHECK(count_of(svg, "<path") == 1);
  CHECK(count_of(svg, "M ") == 1);
  CHECK(count_of(svg, " L ") == 3);
  CHECK(count_of(svg, " Z") == 1);
  CHECK(svg.find("fill=\"none\"") != std::string::npos);
  CHECK(svg.find("fill-rule=\"evenodd\"") != std::string::npos);
  CHECK(svg.find("stroke") != std::string::npos);
}

TEST_CASE("svg writes holes as extra subpaths of the same part path") {
  Polygon2 plate = rect(10, 10);
  plate.holes.push_back({{4, 6}, {4, 7}, {6, 7}, {6, 6}});  // clockwise slot
  std::vector<std::string> ids{"plate"};
  std::vector<Polygon2> shapes{plate};
  auto spec = small_sheet(50, 40);
  auto docs = emit_svg(layout_sheets(ids, shapes, spec), shapes, spec);
  REQUIRE(docs.size() == 1);
  CHECK(count_of(docs[0], "<path") == 1);
  CHECK(count_of(docs[0], "M ") == 2);
  CHECK(count_of(docs[0], " Z") == 2);
}

TEST_CASE("svg emits one document per sheet, byte-identical on repeat") {
  std::vector<std::string> ids{"p1", "p2", "p3"};
  std::vector<Polygon2> shapes{rect(300, 300), rect(300, 300), rect(300, 300)};
  auto spec = small_sheet(400, 400);
  auto layout = layout_sheets(ids, shapes, spec);
  CHECK(layout.sheet_count == 3);
  auto docs = emit_svg(layout, shapes, spec);
  REQUIRE(docs.size() == 3);
  for (const auto& d : docs) CHECK(count_of(d, "<path") == 1);
  CHECK(docs == emit_svg(layout, shapes, spec));
}

TEST_CASE("dxf unit square round-trips through an independent reader") {
  std::vector<std::string> ids{"sq"};
  std::vector<Polygon2> shapes{rect(10, 10)};
  auto spec = small_sheet(50, 40);
  auto layout = layout_sheets(ids, shapes, spec);
  auto docs = emit_dxf(layout, shapes, spec);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].find("$INSUNITS") != std::string::npos);
  CHECK(docs[0].find("CUT") != std::string::npos);
  CHECK(count_of(docs[0], "POLYLINE") == 1);
  CHECK(docs == emit_dxf(layout, shapes, spec));

  auto path = temp_file("flatpack_square.dxf");
  write_file(path, docs[0]);
  auto polys = oracle::read_dxf_polylines(path);
  REQUIRE(polys.size() == 1);
  REQUIRE(polys[0].size() == 4);
  auto expected = placed_polygon(shapes[0], layout.placements[0]);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(polys[0][i].x == doctest::Approx(expected.outer[i].x).epsilon(1e-3));
    CHECK(polys[0][i].y == doctest::Approx(expected.outer[i].y).epsilon(1e-3));
  }
}

TEST_CASE("dxf emits one closed polyline per contour") {
  Polygon2 plate = rect(20, 12);
  plate.holes.push_back({{8, 5}, {8, 7}, {12, 7}, {12, 5}});
  std::vector<std::string> ids{"plate", "strip"};
  std::vector<Polygon2> shapes{plate, rect(30, 6)};
  auto spec = small_sheet(100, 80);
  auto layout = layout_sheets(ids, shapes, spec);
  auto docs = emit_dxf(layout, shapes, spec);
  REQUIRE(docs.size() == 1);
  auto path = temp_file("flatpack_contours.dxf");
  write_file(path, docs[0]);
  auto polys = oracle::read_dxf_polylines(path);
  CHECK(polys.size() == 3);
  size_t total_vertices = 0;
  for (const auto& p : polys) total_vertices += p.size();
  CHECK(total_vertices == 12);
}

TEST_CASE("stl of one unit square is sixteen triangles in 884 bytes") {
  std::vector<std::string> ids{"panel"};
  std::vector<Polygon2> shapes{rect(1, 1)};
  std::vector<Transform> poses{Transform::identity()};
  FabricationSpec spec;
  spec.thickness = 1;
  auto bytes = emit_stl(ids, shapes, poses, spec);
  // 80-byte header + count + 16 triangles (two 4-fan caps, two wall
  // triangles per outline edge) at 50 bytes each.
  CHECK(bytes.size() == 884);
  CHECK(bytes == emit_stl(ids, shapes, poses, spec));

  auto path = temp_file("flatpack_square.stl");
  write_file(path, bytes);
  auto tris = oracle::read_binary_stl(path);
  REQUIRE(tris.size() == 16);
  CHECK(oracle::stl_watertight(tris));
  CHECK(oracle::stl_signed_volume(tris) == doctest::Approx(1).epsilon(1e-6));
  // material is centred on the polygon plane
  double lo = 1, hi = -1;
  for (const auto& t : tris)
    for (const auto& v : t.v) {
      lo = std::min(lo, v.z);
      hi = std::max(hi, v.z);
    }
  CHECK(lo == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(hi == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("stl of a slotted part is watertight with the slot volume removed") {
  Polygon2 plate = rect(10, 10);
  plate.holes.push_back({{4, 4.5}, {4, 5.5}, {6, 5.5}, {6, 4.5}});
  std::vector<std::string> ids{"plate"};
  std::vector<Polygon2> shapes{plate};
  std::vector<Transform> poses{Transform::identity()};
  FabricationSpec spec;
  spec.thickness = 3;
  auto bytes = emit_stl(ids, shapes, poses, spec);
  auto path = temp_file("flatpack_slotted.stl");
  write_file(path, bytes);
  auto tris = oracle::read_binary_stl(path);
  CHECK(oracle::stl_watertight(tris));
  CHECK(oracle::stl_signed_volume(tris) ==
        doctest::Approx((100 - 2) * 3).epsilon(1e-6));
}

TEST_CASE("stl honours the assembled pose") {
  std::vector<std::string> ids{"wing"};
  std::vector<Polygon2> shapes{rect(4, 4)};
  std::vector<Transform> poses{
      compose(Transform::translation({0, 0, 5}), Transform::rotation_x(90))};
  FabricationSpec spec;
  spec.thickness = 1;
  auto bytes = emit_stl(ids, shapes, poses, spec);
  auto path = temp_file("flatpack_posed.stl");
  write_file(path, bytes);
  auto tris = oracle::read_binary_stl(path);
  CHECK(oracle::stl_watertight(tris));
  CHECK(oracle::stl_signed_volume(tris) == doctest::Approx(16).epsilon(1e-6));
  double lo_y = 1e9, hi_y = -1e9, lo_z = 1e9, hi_z = -1e9;
  for (const auto& t : tris)
    for (const auto& v : t.v) {
      lo_y = std::min(lo_y, v.y);
      hi_y = std::max(hi_y, v.y);
      lo_z = std::min(lo_z, v.z);
      hi_z = std::max(hi_z, v.z);
    }
  CHECK(lo_y == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(hi_y == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(lo_z == doctest::Approx(5).epsilon(1e-6));
  CHECK(hi_z == doctest::Approx(9).epsilon(1e-6));
}

TEST_CASE("stl rejects a self-intersecting outline, naming the part") {
  Polygon2 bowtie{{{0, 0}, {4, 4}, {4, 0}, {0, 4}}, {}};
  std::vector<std::string> ids{"twisted"};
  std::vector<Polygon2> shapes{bowtie};
  std::vector<Transform> poses{Transform::identity()};
  FabricationSpec spec;
  auto msg = expect_error("MeshError", [&] { emit_stl(ids, shapes, poses, spec); });
  CHECK(msg.find("twisted") != std::string::npos);
}
