#include "flatpack/geometry.hpp"

// Legacy coordinate rescaling perturbs overlay output by ~1e-6 on mm-scale
// inputs, which breaks downstream coincidence matching; newer Boost versions
// disable it by default.
#define BOOST_GEOMETRY_NO_ROBUSTNESS

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>

namespace bg = boost::geometry;

namespace flatpack {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

double norm(Vec2 v) { return std::sqrt(dot(v, v)); }
double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

Vec2 normalized(Vec2 v) {
  double n = norm(v);
  if (n < eps_len) throw Error("DegenerateVector", "cannot normalize near-zero 2d vector");
  return {v.x / n, v.y / n};
}

Vec3 normalized(Vec3 v) {
  double n = norm(v);
  if (n < eps_len) throw Error("DegenerateVector", "cannot normalize near-zero 3d vector");
  return {v.x / n, v.y / n, v.z / n};
}

Transform Transform::translation(Vec3 t) {
  Transform r;
  r.at(0, 3) = t.x;
  r.at(1, 3) = t.y;
  r.at(2, 3) = t.z;
  return r;
}

Transform Transform::rotation_x(double deg) {
  double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
  Transform r;
  r.at(1, 1) = c;
  r.at(1, 2) = -s;
  r.at(2, 1) = s;
  r.at(2, 2) = c;
  return r;
}

Transform Transform::rotation_y(double deg) {
  double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
  Transform r;
  r.at(0, 0) = c;
  r.at(0, 2) = s;
  r.at(2, 0) = -s;
  r.at(2, 2) = c;
  return r;
}

Transform Transform::rotation_z(double deg) {
  double c = std::cos(deg2rad(deg)), s = std::sin(deg2rad(deg));
  Transform r;
  r.at(0, 0) = c;
  r.at(0, 1) = -s;
  r.at(1, 0) = s;
  r.at(1, 1) = c;
  return r;
}

Transform Transform::from_basis(Vec3 ex, Vec3 ey, Vec3 ez, Vec3 origin) {
  Transform r;
  r.at(0, 0) = ex.x;
  r.at(1, 0) = ex.y;
  r.at(2, 0) = ex.z;
  r.at(0, 1) = ey.x;
  r.at(1, 1) = ey.y;
  r.at(2, 1) = ey.z;
  r.at(0, 2) = ez.x;
  r.at(1, 2) = ez.y;
  r.at(2, 2) = ez.z;
  r.at(0, 3) = origin.x;
  r.at(1, 3) = origin.y;
  r.at(2, 3) = origin.z;
  return r;
}

Vec3 Transform::apply(Vec3 p) const {
  return {at(0, 0) * p.x + at(0, 1) * p.y + at(0, 2) * p.z + at(0, 3),
          at(1, 0) * p.x + at(1, 1) * p.y + at(1, 2) * p.z + at(1, 3),
          at(2, 0) * p.x + at(2, 1) * p.y + at(2, 2) * p.z + at(2, 3)};
}

Vec3 Transform::rotate(Vec3 v) const {
  return {at(0, 0) * v.x + at(0, 1) * v.y + at(0, 2) * v.z,
          at(1, 0) * v.x + at(1, 1) * v.y + at(1, 2) * v.z,
          at(2, 0) * v.x + at(2, 1) * v.y + at(2, 2) * v.z};
}

bool Transform::is_rigid(double tol) const {
  if (at(3, 0) != 0 || at(3, 1) != 0 || at(3, 2) != 0 || at(3, 3) != 1) return false;
  Vec3 cx{at(0, 0), at(1, 0), at(2, 0)};
  Vec3 cy{at(0, 1), at(1, 1), at(2, 1)};
  Vec3 cz{at(0, 2), at(1, 2), at(2, 2)};
  if (std::abs(norm(cx) - 1) > tol) return false;
  if (std::abs(norm(cy) - 1) > tol) return false;
  if (std::abs(norm(cz) - 1) > tol) return false;
  if (std::abs(dot(cx, cy)) > tol) return false;
  if (std::abs(dot(cy, cz)) > tol) return false;
  if (std::abs(dot(cz, cx)) > tol) return false;
  double det = dot(cx, cross(cy, cz));
  return std::abs(det - 1) <= 8 * tol;
}

Transform Transform::orthonormalized() const {
  Vec3 cx{at(0, 0), at(1, 0), at(2, 0)};
  Vec3 cy{at(0, 1), at(1, 1), at(2, 1)};
  cx = normalized(cx);
  cy = normalized(cy - dot(cy, cx) * cx);
  Vec3 cz = cross(cx, cy);
  return from_basis(cx, cy, cz, translation_part());
}

Transform compose(const Transform& t1, const Transform& t2) {
  Transform r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += t1.at(i, k) * t2.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

Transform invert(const Transform& t) {
  // Rigid inverse: transpose rotation, negate rotated translation.
  Transform r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = t.at(j, i);
  Vec3 tr = t.translation_part();
  Vec3 it = r.rotate(tr);
  r.at(0, 3) = -it.x;
  r.at(1, 3) = -it.y;
  r.at(2, 3) = -it.z;
  return r;
}

double max_abs_diff(const Transform& a, const Transform& b) {
  double d = 0;
  for (int i = 0; i < 16; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
  return d;
}

Plane3 Plane3::canonicalized() const {
  double ax = std::abs(normal.x), ay = std::abs(normal.y), az = std::abs(normal.z);
  double lead = normal.z;
  if (ax >= ay && ax >= az) lead = normal.x;
  else if (ay >= az) lead = normal.y;
  if (lead < 0) return {-normal, -offset};
  return *this;
}

double ring_signed_area(const std::vector<Vec2>& ring) {
  double s = 0;
  size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % n];
    s += cross(p, q);
  }
  return s / 2;
}

double polygon_area(const Polygon2& p) {
  double a = ring_signed_area(p.outer);
  for (const auto& h : p.holes) a += ring_signed_area(h);  // holes are CW, negative
  return a;
}

namespace {

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

void validate_ring(const std::vector<Vec2>& ring, bool want_ccw, const char* what) {
  if (ring.size() < 3)
    throw Error("InvalidPolygon", std::string(what) + " has fewer than 3 vertices");
  double area = ring_signed_area(ring);
  if (want_ccw && area <= 0)
    throw Error("InvalidPolygon", std::string(what) + " is not counter-clockwise");
  if (!want_ccw && area >= 0)
    throw Error("InvalidPolygon", std::string(what) + " is not clockwise");
  size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    if (norm(ring[(i + 1) % n] - ring[i]) < eps_len)
      throw Error("InvalidPolygon", std::string(what) + " has a degenerate edge");
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
        throw Error("InvalidPolygon", std::string(what) + " self-intersects");
    }
  }
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 < eps_len * eps_len) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace

void validate_polygon(const Polygon2& p) {
  validate_ring(p.outer, true, "outer ring");
  for (const auto& h : p.holes) validate_ring(h, false, "hole ring");
}

Polygon2 simplify_collinear(const Polygon2& p, double eps) {
  auto clean = [&](const std::vector<Vec2>& ring) {
    std::vector<Vec2> out;
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 prev = ring[(i + n - 1) % n];
      Vec2 cur = ring[i];
      Vec2 next = ring[(i + 1) % n];
      if (norm(cur - prev) < eps) continue;  // duplicate point
      double dev = std::abs(cross(next - prev, cur - prev));
      double base = norm(next - prev);
      if (base > eps && dev / base < eps) continue;  // collinear with neighbours
      out.push_back(cur);
    }
    return out.size() >= 3 ? out : ring;
  };
  Polygon2 r;
  r.outer = clean(p.outer);
  for (const auto& h : p.holes) r.holes.push_back(clean(h));
  return r;
}

double distance_to_boundary(const Polygon2& p, Vec2 q) {
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const std::vector<Vec2>& ring) {
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i)
      best = std::min(best, point_segment_distance(q, ring[i], ring[(i + 1) % n]));
  };
  scan(p.outer);
  for (const auto& h : p.holes) scan(h);
  return best;
}

bool point_in_polygon(const Polygon2& p, Vec2 q, double eps) {
  if (distance_to_boundary(p, q) <= eps) return true;
  // Even-odd crossing count over all rings.
  int crossings = 0;
  auto scan = [&](const std::vector<Vec2>& ring) {
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = ring[i], b = ring[(i + 1) % n];
      if ((a.y > q.y) != (b.y > q.y)) {
        double xi = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (xi > q.x) ++crossings;
      }
    }
  };
  scan(p.outer);
  for (const auto& h : p.holes) scan(h);
  return (crossings % 2) == 1;
}

Polygon2 transformed(const Polygon2& p, const Transform& t2d) {
  auto map = [&](const std::vector<Vec2>& ring) {
    std::vector<Vec2> out;
    out.reserve(ring.size());
    for (Vec2 v : ring) {
      Vec3 w = t2d.apply({v.x, v.y, 0});
      out.push_back({w.x, w.y});
    }
    return out;
  };
  Polygon2 r;
  r.outer = map(p.outer);
  for (const auto& h : p.holes) r.holes.push_back(map(h));
  // A reflection (improper planar map) flips winding; restore it.
  if (ring_signed_area(r.outer) < 0) {
    std::reverse(r.outer.begin(), r.outer.end());
    for (auto& h : r.holes) std::reverse(h.begin(), h.end());
  }
  return r;
}

Plane3 plane_of(const Polygon2& poly, const Transform& placement) {
  if (poly.outer.size() < 3) throw Error("DegeneratePolygon", "fewer than 3 vertices");
  // The polygon lives in its local z=0 plane with front normal +z; a rigid
  // placement keeps that exact. Guard against collinear rings all the same.
  double best = 0;
  size_t n = poly.outer.size();
  for (size_t i = 1; i + 1 < n; ++i) {
    double a = std::abs(cross(poly.outer[i] - poly.outer[0], poly.outer[i + 1] - poly.outer[0]));
    best = std::max(best, a);
  }
  if (best < eps_len)
    throw Error("DegeneratePolygon", "vertices are collinear; no supporting plane");
  Vec3 nrm = normalized(placement.rotate({0, 0, 1}));
  Vec3 p0 = placement.apply({poly.outer[0].x, poly.outer[0].y, 0});
  return {nrm, dot(nrm, p0)};
}

bool planes_coplanar(const Plane3& p1, const Plane3& p2) {
  Plane3 a = p1.canonicalized(), b = p2.canonicalized();
  return std::abs(dot(a.normal, b.normal)) > 1 - eps_parallel &&
         dot(a.normal, b.normal) > 0 && std::abs(a.offset - b.offset) < eps_plane;
}

bool planes_parallel(const Plane3& p1, const Plane3& p2) {
  return norm(cross(p1.normal, p2.normal)) < eps_parallel && !planes_coplanar(p1, p2);
}

PlaneIntersection plane_intersection(const Plane3& p1, const Plane3& p2) {
  if (planes_coplanar(p1, p2)) return PlanesCoplanar{};
  Vec3 dir = cross(p1.normal, p2.normal);
  if (norm(dir) < eps_parallel) return PlanesParallel{};
  dir = normalized(dir);
  // Point on both planes: p = a*n1 + b*n2 solving the 2x2 system.
  double n11 = dot(p1.normal, p1.normal);
  double n12 = dot(p1.normal, p2.normal);
  double n22 = dot(p2.normal, p2.normal);
  double det = n11 * n22 - n12 * n12;
  double a = (p1.offset * n22 - p2.offset * n12) / det;
  double b = (p2.offset * n11 - p1.offset * n12) / det;
  Vec3 point = a * p1.normal + b * p2.normal;
  return Line3{point, dir};
}

std::vector<Segment2> clip_line_to_polygon(const Line2& line, const Polygon2& poly) {
  Vec2 dir = normalized(line.dir);
  // Collect arclength parameters where the line meets any ring edge.
  std::vector<double> ts;
  auto scan = [&](const std::vector<Vec2>& ring) {
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = ring[i], b = ring[(i + 1) % n];
      Vec2 e = b - a;
      double denom = cross(dir, e);
      if (std::abs(denom) > eps_parallel) {
        double u = cross(a - line.point, dir) / denom;  // along edge
        if (u < -eps_plane || u > 1 + eps_plane) continue;
        double t = cross(a - line.point, e) / denom;  // along line
        ts.push_back(t);
      } else {
        // Edge parallel to the line; if collinear, both endpoints bound a run.
        if (std::abs(cross(a - line.point, dir)) < eps_plane) {
          ts.push_back(dot(a - line.point, dir));
          ts.push_back(dot(b - line.point, dir));
        }
      }
    }
  };
  scan(poly.outer);
  for (const auto& h : poly.holes) scan(h);
  if (ts.empty()) return {};
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < eps_len; }),
           ts.end());
  // Interval midpoints decide membership; adjacent inside intervals coalesce.
  std::vector<Segment2> out;
  double run_start = 0;
  bool in_run = false;
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    double mid = (ts[i] + ts[i + 1]) / 2;
    bool inside = point_in_polygon(poly, line.point + mid * dir);
    if (inside && !in_run) {
      run_start = ts[i];
      in_run = true;
    }
    if (!inside && in_run) {
      if (ts[i] - run_start > eps_len)
        out.push_back({line.point + run_start * dir, line.point + ts[i] * dir});
      in_run = false;
    }
  }
  if (in_run && ts.back() - run_start > eps_len)
    out.push_back({line.point + run_start * dir, line.point + ts.back() * dir});
  return out;
}

// ---------------------------------------------------------------------------
// Polygon booleans, backed by boost::geometry behind the Polygon2 contract.

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;  // CCW outer, closed
using BMulti = bg::model::multi_polygon<BPolygon>;

BPolygon to_boost(const Polygon2& p) {
  BPolygon out;
  for (Vec2 v : p.outer) bg::append(out.outer(), BPoint(v.x, v.y));
  bg::append(out.outer(), BPoint(p.outer[0].x, p.outer[0].y));
  out.inners().resize(p.holes.size());
  for (size_t i = 0; i < p.holes.size(); ++i) {
    for (Vec2 v : p.holes[i]) bg::append(out.inners()[i], BPoint(v.x, v.y));
    bg::append(out.inners()[i], BPoint(p.holes[i][0].x, p.holes[i][0].y));
  }
  bg::correct(out);
  return out;
}

Polygon2 from_boost(const BPolygon& p) {
  Polygon2 out;
  // boost closes rings by repeating the first vertex; drop the repeat.
  for (size_t i = 0; i + 1 < p.outer().size(); ++i)
    out.outer.push_back({bg::get<0>(p.outer()[i]), bg::get<1>(p.outer()[i])});
  for (const auto& inner : p.inners()) {
    std::vector<Vec2> hole;
    for (size_t i = 0; i + 1 < inner.size(); ++i)
      hole.push_back({bg::get<0>(inner[i]), bg::get<1>(inner[i])});
    out.holes.push_back(std::move(hole));
  }
  // boost emits CW outers/CCW inners under this model config only when
  // correct() was skipped; normalize winding to the Polygon2 convention.
  if (ring_signed_area(out.outer) < 0) std::reverse(out.outer.begin(), out.outer.end());
  for (auto& h : out.holes)
    if (ring_signed_area(h) > 0) std::reverse(h.begin(), h.end());
  return out;
}

}  // namespace

std::vector<Polygon2> polygon_band(const Polygon2& p, double y0, double y1) {
  double lo_x = p.outer[0].x, hi_x = lo_x;
  for (Vec2 v : p.outer) {
    lo_x = std::min(lo_x, v.x);
    hi_x = std::max(hi_x, v.x);
  }
  Polygon2 band;
  band.outer = {{lo_x - 1, y0}, {hi_x + 1, y0}, {hi_x + 1, y1}, {lo_x - 1, y1}};
  BMulti out;
  bg::intersection(to_boost(p), to_boost(band), out);
  std::vector<Polygon2> pieces;
  for (const auto& bp : out) {
    Polygon2 piece = from_boost(bp);
    if (polygon_area(piece) > eps_len * eps_len) pieces.push_back(std::move(piece));
  }
  return pieces;
}

bool polygons_touch(const Polygon2& a, const Polygon2& b) {
  return bg::intersects(to_boost(a), to_boost(b));
}

double polygons_intersection_area(const Polygon2& a, const Polygon2& b) {
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return bg::area(out);
}

bool polygon_within(const Polygon2& inner, const Polygon2& outer) {
  return bg::within(to_boost(inner), to_boost(outer));
}

Polygon2 polygon_union(const Polygon2& a, const Polygon2& b) {
  BMulti out;
  bg::union_(to_boost(a), to_boost(b), out);
  if (out.size() != 1)
    throw Error("DisjointUnion", "polygon regions do not overlap or touch");
  Polygon2 result = simplify_collinear(from_boost(out[0]));
  validate_polygon(result);
  return result;
}

Polygon2 polygon_difference(const Polygon2& a, const std::vector<Polygon2>& cuts) {
  BMulti cur;
  cur.push_back(to_boost(a));
  for (const auto& c : cuts) {
    BMulti next;
    bg::difference(cur, to_boost(c), next);
    cur = std::move(next);
  }
  // Cuts flush with the boundary can leave degenerate slivers (sub-eps_len
  // wide over a mm-scale length); only pieces with real area count.
  const BPolygon* body = nullptr;
  int substantial = 0;
  for (const auto& p : cur) {
    if (bg::area(p) <= eps_len) continue;
    body = &p;
    ++substantial;
  }
  if (substantial != 1)
    throw Error("InvalidPolygon",
                substantial == 0 ? "difference removed the whole part"
                                 : "difference split the part into pieces");
  Polygon2 result = simplify_collinear(from_boost(*body));
  validate_polygon(result);
  return result;
}

std::vector<Segment2> segment_set_intersection(const std::vector<Segment2>& sa,
                                               const std::vector<Segment2>& sb) {
  if (sa.empty() || sb.empty()) return {};
  // Carrier from the first segment; everything must sit on it.
  Vec2 origin = sa[0].a;
  Vec2 dir = normalized(sa[0].b - sa[0].a);
  auto to_interval = [&](const Segment2& s) {
    double off_a = std::abs(cross(s.a - origin, dir));
    double off_b = std::abs(cross(s.b - origin, dir));
    if (off_a > eps_plane || off_b > eps_plane)
      throw Error("NonCollinear", "segment set is not collinear with the carrier line");
    double ta = dot(s.a - origin, dir), tb = dot(s.b - origin, dir);
    return std::pair<double, double>{std::min(ta, tb), std::max(ta, tb)};
  };
  auto normalize = [&](const std::vector<Segment2>& set) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& s : set) iv.push_back(to_interval(s));
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto [lo, hi] : iv) {
      if (!merged.empty() && lo <= merged.back().second + eps_len)
        merged.back().second = std::max(merged.back().second, hi);
      else
        merged.push_back({lo, hi});
    }
    return merged;
  };
  auto ia = normalize(sa), ib = normalize(sb);
  std::vector<Segment2> out;
  size_t x = 0, y = 0;
  while (x < ia.size() && y < ib.size()) {
    double lo = std::max(ia[x].first, ib[y].first);
    double hi = std::min(ia[x].second, ib[y].second);
    if (hi - lo > eps_len) out.push_back({origin + lo * dir, origin + hi * dir});
    if (ia[x].second < ib[y].second) ++x;
    else ++y;
  }
  return out;
}

}  // namespace flatpack
