#include "flatpack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace flatpack {

namespace {

// Joint cuts leave many exactly collinear and coincident features, so the cap
// triangulation avoids point-location entirely: slice the region into
// horizontal bands between consecutive vertex heights. No vertex lies strictly
// inside a band, every edge crosses its bands fully, and each band cell is
// therefore a convex trapezoid that a centroid fan triangulates safely.

// Clipping a nearly horizontal edge against a band line is ill-conditioned,
// so coincident corners from adjacent bands can disagree by well over machine
// epsilon; merge within a tolerance that still sits far below eps_len.
constexpr double merge_tol = 1e-7;

// Interns points so that coincident (within merge_tol) coordinates from
// different band clips collapse to one index.
struct PointBank {
  std::vector<Vec2> pts;
  std::map<std::pair<long long, long long>, std::vector<uint32_t>> cells;

  uint32_t id(Vec2 p) {
    long long kx = llround(p.x / merge_tol), ky = llround(p.y / merge_tol);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({kx + dx, ky + dy});
        if (it == cells.end()) continue;
        for (uint32_t i : it->second)
          if (std::abs(pts[i].x - p.x) <= merge_tol &&
              std::abs(pts[i].y - p.y) <= merge_tol)
            return i;
      }
    pts.push_back(p);
    cells[{kx, ky}].push_back(uint32_t(pts.size() - 1));
    return uint32_t(pts.size() - 1);
  }
};

struct BandCells {
  std::vector<Vec2> pts;
  std::vector<std::vector<uint32_t>> rings;  // counter-clockwise convex cells
};

std::vector<uint32_t> intern_ring(PointBank& bank, const std::vector<Vec2>& ring) {
  std::vector<uint32_t> ids;
  for (Vec2 v : ring) {
    uint32_t i = bank.id(v);
    if (ids.empty() || ids.back() != i) ids.push_back(i);
  }
  while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
  return ids;
}

// A cut channel that bottoms out exactly on a band line leaves the cell's two
// halves glued through a zero-width seam: the clipped ring then revisits the
// seam points. Split such rings at repeated points into simple loops; a loop
// degenerated to the bare seam (two points) carries no area and is dropped.
void append_simple_loops(std::vector<uint32_t> ring,
                         std::vector<std::vector<uint32_t>>& out) {
  for (size_t i = 0; i < ring.size(); ++i)
    for (size_t j = i + 1; j < ring.size(); ++j)
      if (ring[i] == ring[j]) {
        std::vector<uint32_t> inner(ring.begin() + i, ring.begin() + j);
        ring.erase(ring.begin() + i, ring.begin() + j);
        append_simple_loops(std::move(inner), out);
        append_simple_loops(std::move(ring), out);
        return;
      }
  if (ring.size() >= 3) out.push_back(std::move(ring));
}

BandCells band_cells(const Polygon2& poly) {
  std::vector<double> ys;
  for (Vec2 v : poly.outer) ys.push_back(v.y);
  for (const auto& h : poly.holes)
    for (Vec2 v : h) ys.push_back(v.y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end(),
                       [](double a, double b) { return b - a <= 1e-9; }),
           ys.end());
  if (ys.size() < 2)
    throw Error("MeshError", "polygon region has no vertical extent");

  BandCells out;
  PointBank bank;
  for (size_t k = 0; k + 1 < ys.size(); ++k) {
    for (const Polygon2& piece : polygon_band(poly, ys[k], ys[k + 1])) {
      if (!piece.holes.empty())
        throw Error("MeshError", "band cell is not simply connected");
      auto ring = intern_ring(bank, piece.outer);
      if (ring.size() >= 3) out.rings.push_back(std::move(ring));
    }
  }

  // Cells from adjacent bands subdivide their shared cut line differently;
  // split every on-line edge at every point the line carries so that edges
  // pair up exactly (no T junctions).
  std::map<long long, std::vector<uint32_t>> lines;  // quantized y -> point ids
  auto line_key = [&](uint32_t i) { return llround(bank.pts[i].y / merge_tol); };
  for (const auto& ring : out.rings)
    for (uint32_t i : ring) lines[line_key(i)].push_back(i);
  for (auto& [key, ids] : lines) {
    std::sort(ids.begin(), ids.end(),
              [&](uint32_t a, uint32_t b) { return bank.pts[a].x < bank.pts[b].x; });
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  std::vector<std::vector<uint32_t>> simple;
  for (auto& ring : out.rings) {
    std::vector<uint32_t> split;
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = ring[i], v = ring[(i + 1) % n];
      split.push_back(u);
      if (line_key(u) != line_key(v)) continue;
      double x0 = bank.pts[u].x, x1 = bank.pts[v].x;
      double lo = std::min(x0, x1), hi = std::max(x0, x1);
      std::vector<uint32_t> mid;
      for (uint32_t w : lines[line_key(u)])
        if (w != u && w != v && bank.pts[w].x > lo + merge_tol &&
            bank.pts[w].x < hi - merge_tol)
          mid.push_back(w);
      if (x1 < x0) std::reverse(mid.begin(), mid.end());
      split.insert(split.end(), mid.begin(), mid.end());
    }
    append_simple_loops(std::move(split), simple);
  }
  out.rings = std::move(simple);
  out.pts = std::move(bank.pts);
  return out;
}

Vec2 ring_centroid(const std::vector<Vec2>& pts, const std::vector<uint32_t>& ring) {
  Vec2 c{0, 0};
  for (uint32_t i : ring) {
    c.x += pts[i].x;
    c.y += pts[i].y;
  }
  return {c.x / double(ring.size()), c.y / double(ring.size())};
}

}  // namespace

CapTriangulation triangulate_polygon(const Polygon2& poly) {
  BandCells cells = band_cells(simplify_collinear(poly));
  CapTriangulation out;
  out.points = cells.pts;
  for (const auto& ring : cells.rings) {
    uint32_t c = uint32_t(out.points.size());
    out.points.push_back(ring_centroid(cells.pts, ring));
    for (size_t i = 0; i < ring.size(); ++i)
      out.triangles.push_back({c, ring[i], ring[(i + 1) % ring.size()]});
  }
  return out;
}

TriangleMesh extrude_polygon(const Polygon2& poly, double thickness,
                             const Transform& placement) {
  if (thickness <= 0) throw Error("MeshError", "extrusion thickness must be positive");
  BandCells cells = band_cells(simplify_collinear(poly));

  TriangleMesh mesh;
  // Point i at z=0 maps to vertex 2i, at z=thickness to 2i+1; cell centroids
  // are appended pairwise after.
  for (Vec2 v : cells.pts) {
    mesh.positions.push_back(placement.apply({v.x, v.y, 0}));
    mesh.positions.push_back(placement.apply({v.x, v.y, thickness}));
  }

  std::map<std::pair<uint32_t, uint32_t>, int> edge_use;
  for (const auto& ring : cells.rings) {
    uint32_t c = uint32_t(mesh.positions.size() / 2);
    Vec2 cen = ring_centroid(cells.pts, ring);
    mesh.positions.push_back(placement.apply({cen.x, cen.y, 0}));
    mesh.positions.push_back(placement.apply({cen.x, cen.y, thickness}));
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = ring[i], v = ring[(i + 1) % n];
      mesh.triangles.push_back({2 * c, 2 * v, 2 * u});          // bottom, faces -z
      mesh.triangles.push_back({2 * c + 1, 2 * u + 1, 2 * v + 1});  // top, faces +z
      edge_use[{std::min(u, v), std::max(u, v)}]++;
    }
  }

  // A cell edge shared by two cells is interior; an edge used once lies on the
  // region boundary and gets a side wall facing away from the solid (cell
  // rings run counter-clockwise, so the outside is to the right of u->v).
  for (const auto& ring : cells.rings) {
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = ring[i], v = ring[(i + 1) % n];
      int uses = edge_use[{std::min(u, v), std::max(u, v)}];
      if (uses > 2)
        throw Error("MeshError", "band decomposition produced a non-manifold edge");
      if (uses != 1) continue;
      mesh.triangles.push_back({2 * u, 2 * v, 2 * v + 1});
      mesh.triangles.push_back({2 * u, 2 * v + 1, 2 * u + 1});
    }
  }
  return mesh;
}

double mesh_signed_volume(const TriangleMesh& mesh) {
  double v = 0;
  for (auto t : mesh.triangles) {
    const Vec3& a = mesh.positions[t[0]];
    const Vec3& b = mesh.positions[t[1]];
    const Vec3& c = mesh.positions[t[2]];
    v += dot(a, cross(b, c));
  }
  return v / 6;
}

}  // namespace flatpack
