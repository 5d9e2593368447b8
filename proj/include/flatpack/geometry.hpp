#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace flatpack {

// Shared tolerances. Every predicate in the library goes through these;
// no operation carries its own epsilon.
inline constexpr double eps_plane = 1e-6;     // mm, coplanarity / point-on-plane
inline constexpr double eps_len = 1e-6;       // mm, degenerate-segment floor
inline constexpr double eps_parallel = 1e-9;  // |n1 x n2| threshold for parallel normals

// Error with a stable machine-readable code ("BindingError", "SchemaError", ...)
// plus a human message. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct Vec2 {
  double x = 0, y = 0;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(Vec2 v);
double norm(Vec3 v);
Vec2 normalized(Vec2 v);
Vec3 normalized(Vec3 v);

// 4x4 homogeneous rigid transform, row major. Rotation block orthonormal with
// det +1; bottom row exactly (0,0,0,1). Lengths in millimeters. Angles are
// degrees at the API boundary.
struct Transform {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  static Transform identity() { return {}; }
  static Transform translation(Vec3 t);
  static Transform rotation_x(double deg);
  static Transform rotation_y(double deg);
  static Transform rotation_z(double deg);
  // Basis vectors are the columns of the rotation block.
  static Transform from_basis(Vec3 ex, Vec3 ey, Vec3 ez, Vec3 origin);

  double at(int r, int c) const { return m[r * 4 + c]; }
  double& at(int r, int c) { return m[r * 4 + c]; }

  Vec3 apply(Vec3 p) const;    // full transform
  Vec3 rotate(Vec3 v) const;   // rotation block only
  Vec3 translation_part() const { return {at(0, 3), at(1, 3), at(2, 3)}; }

  bool is_rigid(double tol = 1e-9) const;
  // Gram-Schmidt repair of the rotation block; keeps translation.
  Transform orthonormalized() const;
};

// Applies t2 first, then t1 (matrix product t1*t2).
Transform compose(const Transform& t1, const Transform& t2);
Transform invert(const Transform& t);
double max_abs_diff(const Transform& a, const Transform& b);

struct Segment2 {
  Vec2 a, b;
};
struct Segment3 {
  Vec3 a, b;
};
struct Line2 {
  Vec2 point, dir;
};
struct Line3 {
  Vec3 point, dir;
};

// Plane as n.p = offset with |n| = 1.
struct Plane3 {
  Vec3 normal;
  double offset = 0;

  double signed_distance(Vec3 p) const { return dot(normal, p) - offset; }
  // Flips the normal, if needed, so the largest-magnitude component is positive.
  Plane3 canonicalized() const;
};

// Planar polygon: outer ring counter-clockwise, holes clockwise, all rings
// simple with at least 3 vertices. Coordinates in mm.
struct Polygon2 {
  std::vector<Vec2> outer;
  std::vector<std::vector<Vec2>> holes;
};

double ring_signed_area(const std::vector<Vec2>& ring);
double polygon_area(const Polygon2& p);
// Throws Error("InvalidPolygon", ...) when an invariant is violated.
void validate_polygon(const Polygon2& p);
// Drops vertices that are collinear with their neighbours (exact shape kept).
Polygon2 simplify_collinear(const Polygon2& p, double eps = eps_plane);
// Closed-region membership: boundary points count as inside.
bool point_in_polygon(const Polygon2& p, Vec2 q, double eps = eps_plane);
double distance_to_boundary(const Polygon2& p, Vec2 q);
Polygon2 transformed(const Polygon2& p, const Transform& t2d);  // planar rigid map

Plane3 plane_of(const Polygon2& poly, const Transform& placement);

struct PlanesParallel {};
struct PlanesCoplanar {};
using PlaneIntersection = std::variant<Line3, PlanesParallel, PlanesCoplanar>;
PlaneIntersection plane_intersection(const Plane3& p1, const Plane3& p2);
bool planes_coplanar(const Plane3& p1, const Plane3& p2);
bool planes_parallel(const Plane3& p1, const Plane3& p2);

// Maximal segments of line ∩ closed polygon region, ordered along the line.
std::vector<Segment2> clip_line_to_polygon(const Line2& line, const Polygon2& poly);

// Region union of two overlapping (or boundary-touching) polygons.
// Throws Error("DisjointUnion") when the inputs do not touch.
Polygon2 polygon_union(const Polygon2& a, const Polygon2& b);
// a minus all cut regions; used by joint application. May grow holes.
Polygon2 polygon_difference(const Polygon2& a, const std::vector<Polygon2>& cuts);
// Pieces of the polygon region inside the horizontal band y0 <= y <= y1,
// one polygon per connected component. Slivers thinner than eps_len are
// dropped.
std::vector<Polygon2> polygon_band(const Polygon2& p, double y0, double y1);
// Region overlap/touch test.
bool polygons_touch(const Polygon2& a, const Polygon2& b);
double polygons_intersection_area(const Polygon2& a, const Polygon2& b);
bool polygon_within(const Polygon2& inner, const Polygon2& outer);

// 1D intersection of two collinear segment sets. All segments must lie on one
// carrier line (within eps_plane) or Error("NonCollinear") is thrown.
// Overlaps shorter than eps_len are discarded; output is maximal and sorted.
std::vector<Segment2> segment_set_intersection(const std::vector<Segment2>& sa,
                                               const std::vector<Segment2>& sb);

struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<uint32_t, 3>> triangles;
};

double mesh_signed_volume(const TriangleMesh& mesh);

// Watertight prism mesh of poly x [0, thickness], transformed by placement.
TriangleMesh extrude_polygon(const Polygon2& poly, double thickness,
                             const Transform& placement);

// Cap triangulation of the polygon region. The polygon is decomposed into
// horizontal bands between consecutive vertex heights (every band cell is
// convex) and each cell is fanned from its centroid, so the result carries
// its own vertex list rather than indices into the input rings.
struct CapTriangulation {
  std::vector<Vec2> points;
  std::vector<std::array<uint32_t, 3>> triangles;  // counter-clockwise
};
CapTriangulation triangulate_polygon(const Polygon2& poly);

}  // namespace flatpack
