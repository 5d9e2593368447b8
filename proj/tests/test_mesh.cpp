#include "doctest.h"

#include <random>

#include "flatpack/geometry.hpp"
#include "oracles.hpp"

using namespace flatpack;

namespace {

Polygon2 rect(double x0, double y0, double x1, double y1) {
  Polygon2 p;
  p.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return p;
}

double triangles_area(const CapTriangulation& ct) {
  double a = 0;
  for (auto t : ct.triangles)
    a += cross(ct.points[t[1]] - ct.points[t[0]], ct.points[t[2]] - ct.points[t[0]]) / 2;
  return a;
}

bool all_ccw(const CapTriangulation& ct) {
  for (auto t : ct.triangles)
    if (cross(ct.points[t[1]] - ct.points[t[0]], ct.points[t[2]] - ct.points[t[0]]) <= 0)
      return false;
  return true;
}

}  // namespace

TEST_CASE("unit square extrudes to a closed unit-volume prism") {
  auto mesh = extrude_polygon(rect(0, 0, 1, 1), 1.0, Transform::identity());
  CHECK(mesh_signed_volume(mesh) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle::edge_manifold(mesh));
}

TEST_CASE("extrusion of a frame keeps the window open") {
  auto p = rect(0, 0, 10, 6);
  p.holes.push_back({{3, 2}, {3, 4}, {7, 4}, {7, 2}});
  auto mesh = extrude_polygon(p, 3.0, Transform::identity());
  CHECK(mesh_signed_volume(mesh) == doctest::Approx(52.0 * 3.0).epsilon(1e-9));
  CHECK(oracle::edge_manifold(mesh));
}

TEST_CASE("concave outlines extrude cleanly") {
  Polygon2 ell;
  ell.outer = {{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 5}, {0, 5}};
  auto mesh = extrude_polygon(ell, 2.0, Transform::identity());
  CHECK(mesh_signed_volume(mesh) == doctest::Approx(28.0).epsilon(1e-9));
  CHECK(oracle::edge_manifold(mesh));
}

TEST_CASE("collinear outline vertices do not break the surface") {
  Polygon2 p;
  p.outer = {{0, 0}, {5, 0}, {10, 0}, {10, 6}, {0, 6}};
  auto mesh = extrude_polygon(p, 1.5, Transform::identity());
  CHECK(oracle::edge_manifold(mesh));
  CHECK(mesh_signed_volume(mesh) == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("placement moves the prism without changing its volume") {
  std::mt19937_64 rng(49);
  for (int i = 0; i < 20; ++i) {
    auto t = oracle::random_rigid(rng);
    auto mesh = extrude_polygon(rect(0, 0, 7, 3), 0.8, t);
    CHECK(oracle::edge_manifold(mesh));
    CHECK(mesh_signed_volume(mesh) == doctest::Approx(7 * 3 * 0.8).epsilon(1e-9));
  }
}

TEST_CASE("triangulation covers exactly the polygon area") {
  auto p = rect(0, 0, 10, 6);
  p.holes.push_back({{3, 2}, {3, 4}, {7, 4}, {7, 2}});
  auto ct = triangulate_polygon(p);
  CHECK(triangles_area(ct) == doctest::Approx(52.0).epsilon(1e-12));
  CHECK(all_ccw(ct));
}

TEST_CASE("random star outlines triangulate and extrude watertight") {
  std::mt19937_64 rng(50);
  for (int round = 0; round < 40; ++round) {
    auto poly = oracle::random_star_polygon(rng);
    auto ct = triangulate_polygon(poly);
    double want = ring_signed_area(poly.outer);
    CHECK(triangles_area(ct) == doctest::Approx(want).epsilon(1e-9));
    auto mesh = extrude_polygon(poly, 2.5, oracle::random_rigid(rng));
    CHECK(oracle::edge_manifold(mesh));
    CHECK(mesh_signed_volume(mesh) == doctest::Approx(want * 2.5).epsilon(1e-9));
  }
}

TEST_CASE("two-window frame keeps both openings") {
  auto p = rect(0, 0, 20, 6);
  p.holes.push_back({{2, 2}, {2, 4}, {8, 4}, {8, 2}});
  p.holes.push_back({{12, 2}, {12, 4}, {18, 4}, {18, 2}});
  auto ct = triangulate_polygon(p);
  CHECK(triangles_area(ct) == doctest::Approx(120.0 - 12.0 - 12.0).epsilon(1e-12));
  CHECK(all_ccw(ct));
  auto mesh = extrude_polygon(p, 3.0, Transform::identity());
  CHECK(oracle::edge_manifold(mesh));
  CHECK(mesh_signed_volume(mesh) == doctest::Approx(96.0 * 3.0).epsilon(1e-9));
}

TEST_CASE("zero thickness is rejected") {
  CHECK_THROWS_AS(extrude_polygon(rect(0, 0, 1, 1), 0.0, Transform::identity()), Error);
}
