#include "flatpack/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace flatpack {

namespace {

// Flip a line direction so its first non-negligible component is positive.
// Both parts of an intersecting pair then agree on the parameter axis, which
// keeps record ordering independent of which plane came first.
Vec3 canonical_dir(const Vec3& d) {
  double lead = d.x;
  if (std::abs(lead) <= eps_parallel) lead = d.y;
  if (std::abs(lead) <= eps_parallel) lead = d.z;
  return lead < 0 ? Vec3{-d.x, -d.y, -d.z} : d;
}

// Vertex ordering feeds byte-exact output, so it must not flip when the same
// geometry is rebuilt through a different floating-point path; compare on an
// eps_len grid instead of raw coordinates.
bool grid_less(const Vec2& a, const Vec2& b) {
  long long ax = std::llround(a.x / eps_len);
  long long bx = std::llround(b.x / eps_len);
  if (ax != bx) return ax < bx;
  return std::llround(a.y / eps_len) < std::llround(b.y / eps_len);
}

std::vector<Vec2> rotate_to_min(std::vector<Vec2> ring) {
  if (ring.empty()) return ring;
  std::size_t best = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (grid_less(ring[i], ring[best])) best = i;
  }
  std::rotate(ring.begin(), ring.begin() + static_cast<long>(best), ring.end());
  return ring;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Chord of the infinite line inside one part, as a parameter interval along
// the world-space line (parameter = signed distance from line.point).
std::vector<std::pair<double, double>> part_chords(const Part& part,
                                                   const Line3& line) {
  Transform inv = invert(part.pose);
  Vec3 local_point = inv.apply(line.point);
  Vec3 local_dir = inv.rotate(line.dir);
  Line2 local_line{{local_point.x, local_point.y},
                   normalized(Vec2{local_dir.x, local_dir.y})};
  std::vector<std::pair<double, double>> chords;
  for (const Segment2& s : clip_line_to_polygon(local_line, part.shape)) {
    Vec3 wa = part.pose.apply({s.a.x, s.a.y, 0});
    Vec3 wb = part.pose.apply({s.b.x, s.b.y, 0});
    double ta = dot(wa - line.point, line.dir);
    double tb = dot(wb - line.point, line.dir);
    chords.emplace_back(std::min(ta, tb), std::max(ta, tb));
  }
  std::sort(chords.begin(), chords.end());
  return chords;
}

// True when both endpoints and the midpoint of the shared run all lie on the
// part's outline rather than in its interior.
bool run_on_boundary(const Part& part, const Line3& line, double lo,
                     double hi) {
  Transform inv = invert(part.pose);
  for (double f : {0.0, 0.5, 1.0}) {
    double t = lo + f * (hi - lo);
    Vec3 world = line.point + t * line.dir;
    Vec3 local = inv.apply(world);
    if (distance_to_boundary(part.shape, {local.x, local.y}) > eps_len) {
      return false;
    }
  }
  return true;
}

// True when the part's chord keeps going past both ends of the shared run,
// i.e. the other part pierces this one away from any edge.
bool run_in_interior(const std::vector<std::pair<double, double>>& chords,
                     double lo, double hi) {
  constexpr double margin = 1e-3;
  for (const auto& [clo, chi] : chords) {
    if (clo <= lo + eps_len && chi >= hi - eps_len) {
      return clo < lo - margin && chi > hi + margin;
    }
  }
  return false;
}

}  // namespace

Polygon2 canonical_polygon(const Polygon2& p) {
  Polygon2 out;
  out.outer = rotate_to_min(p.outer);
  out.holes.reserve(p.holes.size());
  for (const auto& hole : p.holes) out.holes.push_back(rotate_to_min(hole));
  std::sort(out.holes.begin(), out.holes.end(),
            [](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
              if (a.empty() || b.empty()) return b.empty() < a.empty();
              return grid_less(a[0], b[0]);
            });
  return out;
}

Assembly build_assembly(const FlatDesign& design,
                        const std::vector<Transform>& poses) {
  const std::size_t n = design.components.size();
  if (poses.size() != n) {
    throw std::logic_error("build_assembly: pose count does not match design");
  }

  std::vector<Plane3> comp_planes;
  comp_planes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    comp_planes.push_back(plane_of(design.components[i].shape, poses[i]));
  }

  // Components joined by an explicit connection while lying in the same plane
  // become one physical part.
  DisjointSet merged(n);
  for (const FlatConnection& cn : design.connections) {
    if (planes_coplanar(comp_planes[cn.connecting], comp_planes[cn.connected])) {
      merged.unite(cn.connecting, cn.connected);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[merged.find(i)].push_back(i);

  Assembly asm_out;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                return design.components[a].id < design.components[b].id;
              });
    std::size_t rep = members[0];
    Part part;
    part.id = design.components[rep].id;
    part.members = members;
    part.pose = poses[rep];

    Polygon2 acc = design.components[rep].shape;
    std::vector<Polygon2> pending;
    Transform to_rep = invert(poses[rep]);
    for (std::size_t k = 1; k < members.size(); ++k) {
      Transform rel = compose(to_rep, poses[members[k]]);
      pending.push_back(transformed(design.components[members[k]].shape, rel));
    }
    // Union in any order that makes progress; a chain may only connect to the
    // representative through intermediate members.
    bool progress = true;
    while (progress && !pending.empty()) {
      progress = false;
      for (auto it = pending.begin(); it != pending.end();) {
        if (polygons_touch(acc, *it)) {
          acc = polygon_union(acc, *it);
          it = pending.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
    }
    if (!pending.empty()) {
      throw Error("DisjointUnion",
                  "coplanar components connected to '" + part.id +
                      "' do not overlap or touch, so they cannot merge into "
                      "one part");
    }
    part.shape = canonical_polygon(acc);
    asm_out.parts.push_back(std::move(part));
  }

  std::sort(asm_out.parts.begin(), asm_out.parts.end(),
            [](const Part& a, const Part& b) { return a.id < b.id; });
  asm_out.component_part.resize(n);
  for (std::size_t p = 0; p < asm_out.parts.size(); ++p) {
    for (std::size_t c : asm_out.parts[p].members) asm_out.component_part[c] = p;
  }

  // Part pairs named by at least one explicit connection.
  std::set<std::pair<std::size_t, std::size_t>> user_pairs;
  for (const FlatConnection& cn : design.connections) {
    std::size_t pa = asm_out.component_part.at(cn.connecting);
    std::size_t pb = asm_out.component_part.at(cn.connected);
    if (pa != pb) user_pairs.insert({std::min(pa, pb), std::max(pa, pb)});
  }

  std::vector<Plane3> part_planes;
  part_planes.reserve(asm_out.parts.size());
  for (const Part& part : asm_out.parts) {
    part_planes.push_back(plane_of(part.shape, part.pose));
  }

  for (std::size_t a = 0; a < asm_out.parts.size(); ++a) {
    for (std::size_t b = a + 1; b < asm_out.parts.size(); ++b) {
      PlaneIntersection cross = plane_intersection(part_planes[a], part_planes[b]);
      const Line3* raw = std::get_if<Line3>(&cross);
      if (!raw) continue;
      Line3 line{raw->point, canonical_dir(raw->dir)};

      auto chords_a = part_chords(asm_out.parts[a], line);
      auto chords_b = part_chords(asm_out.parts[b], line);
      if (chords_a.empty() || chords_b.empty()) continue;

      std::vector<std::pair<double, double>> shared;
      for (const auto& [alo, ahi] : chords_a) {
        for (const auto& [blo, bhi] : chords_b) {
          double lo = std::max(alo, blo);
          double hi = std::min(ahi, bhi);
          if (hi - lo > eps_len) shared.emplace_back(lo, hi);
        }
      }
      std::sort(shared.begin(), shared.end());

      for (const auto& [lo, hi] : shared) {
        IntersectionRecord rec;
        rec.part_a = a;
        rec.part_b = b;
        rec.world = {line.point + lo * line.dir, line.point + hi * line.dir};
        rec.edge_a = run_on_boundary(asm_out.parts[a], line, lo, hi);
        rec.edge_b = run_on_boundary(asm_out.parts[b], line, lo, hi);
        rec.inside_a = run_in_interior(chords_a, lo, hi);
        rec.inside_b = run_in_interior(chords_b, lo, hi);
        rec.user = user_pairs.count({a, b}) > 0;
        asm_out.records.push_back(std::move(rec));
      }
    }
  }
  return asm_out;
}

}  // namespace flatpack
