#include "flatpack/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flatpack {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct EdgeFrame {
  Vec3 d;  // edge direction (counter-clockwise)
  Vec3 o;  // outward in-plane normal
  Vec3 m;  // edge midpoint
};

EdgeFrame edge_frame(const FlatComponent& c, size_t edge) {
  const auto& ring = c.shape.outer;
  Vec2 a = ring[edge], b = ring[(edge + 1) % ring.size()];
  if (norm(b - a) < eps_len)
    throw Error("DegenerateInterface",
                "interface edge " + std::to_string(edge) + " of '" + c.id +
                    "' has no length");
  Vec2 d2 = normalized(b - a);
  Vec2 mid = 0.5 * (a + b);
  return {{d2.x, d2.y, 0}, {d2.y, -d2.x, 0}, {mid.x, mid.y, 0}};
}

Transform rotation_from_triples(Vec3 t0, Vec3 t1, Vec3 t2, Vec3 s0, Vec3 s1, Vec3 s2) {
  // R = sum of target_i * source_i^T over the orthonormal triple.
  auto arr = [](Vec3 v) { return std::array<double, 3>{v.x, v.y, v.z}; };
  std::array<std::array<double, 3>, 3> t{arr(t0), arr(t1), arr(t2)};
  std::array<std::array<double, 3>, 3> s{arr(s0), arr(s1), arr(s2)};
  Transform r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double sum = 0;
      for (int k = 0; k < 3; ++k) sum += t[k][i] * s[k][j];
      r.at(i, j) = sum;
    }
  return r;
}

Transform interface_basis(const EdgeFrame& f, double s) {
  Vec3 mx = -1.0 * f.d;
  Vec3 mz = s * Vec3{0, 0, 1};
  Vec3 my = cross(mz, mx);
  return Transform::from_basis(mx, my, mz, {0, 0, 0});
}

Transform euler_rotation(Vec3 deg) {
  return compose(Transform::rotation_x(deg.x),
                 compose(Transform::rotation_y(deg.y), Transform::rotation_z(deg.z)));
}

}  // namespace

Transform relative_transform(const FlatComponent& connecting,
                             const FlatComponent& connected,
                             const FlatConnection& conn) {
  EdgeFrame fa = edge_frame(connecting, conn.connecting_edge);
  EdgeFrame fb = edge_frame(connected, conn.connected_edge);
  double s = conn.alignment == Alignment::front_front ? 1.0 : -1.0;
  Vec3 n{0, 0, 1};

  // Base alignment: edges anti-parallel, outward normals opposed (or matched
  // when folding), fronts matched per alignment sign.
  Transform align = rotation_from_triples(-1.0 * fb.d, -s * fb.o, s * n, fa.d, fa.o, n);
  Vec3 t_align = fb.m - align.rotate(fa.m);
  align.at(0, 3) = t_align.x;
  align.at(1, 3) = t_align.y;
  align.at(2, 3) = t_align.z;

  Transform m = interface_basis(fb, s);
  Transform spin = compose(m, compose(euler_rotation(conn.rotation), invert(m)));
  Transform t_rot = compose(Transform::translation(fb.m),
                            compose(spin, Transform::translation(-1.0 * fb.m)));
  return compose(Transform::translation(conn.offset), compose(t_rot, align));
}

Vec3 euler_angles_xyz(const Transform& r) {
  double sy = r.at(0, 2);
  sy = std::clamp(sy, -1.0, 1.0);
  double b = std::asin(sy);
  double a, c;
  if (std::abs(std::cos(b)) > 1e-9) {
    a = std::atan2(-r.at(1, 2), r.at(2, 2));
    c = std::atan2(-r.at(0, 1), r.at(0, 0));
  } else {
    // Gimbal lock: fold everything into the x angle.
    c = 0;
    a = std::atan2(r.at(1, 0), r.at(1, 1));
    if (sy < 0) a = -a;
  }
  return {a * 180 / kPi, b * 180 / kPi, c * 180 / kPi};
}

FlatConnection reversed_connection(const FlatDesign& design, const FlatConnection& conn) {
  const FlatComponent& a = design.components[conn.connecting];
  const FlatComponent& b = design.components[conn.connected];
  Transform target = invert(relative_transform(a, b, conn));

  FlatConnection rev;
  rev.connecting = conn.connected;
  rev.connected = conn.connecting;
  rev.connecting_edge = conn.connected_edge;
  rev.connected_edge = conn.connecting_edge;
  rev.alignment = conn.alignment;

  FlatConnection zero = rev;
  Transform align = relative_transform(b, a, zero);
  Transform g = compose(target, invert(align));  // = offset * spin-about-midpoint

  EdgeFrame fa = edge_frame(a, conn.connecting_edge);
  double s = conn.alignment == Alignment::front_front ? 1.0 : -1.0;
  Transform m = interface_basis(fa, s);
  Transform q = g;
  q.at(0, 3) = q.at(1, 3) = q.at(2, 3) = 0;
  rev.rotation = euler_angles_xyz(compose(invert(m), compose(q, m)));
  rev.offset = g.translation_part() - fa.m + q.rotate(fa.m);
  return rev;
}

std::vector<Transform> place_components(const FlatDesign& design) {
  size_t n = design.components.size();
  std::vector<Transform> poses(n);
  if (n == 0) return poses;

  // Connectivity check up front so the failure names every island.
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& c : design.connections) parent[find(c.connecting)] = find(c.connected);
  std::map<size_t, std::vector<std::string>> islands;
  for (size_t i = 0; i < n; ++i) islands[find(i)].push_back(design.components[i].id);
  if (islands.size() > 1) {
    std::string msg = "components form " + std::to_string(islands.size()) +
                      " disconnected groups:";
    for (const auto& [root, ids] : islands) {
      (void)root;
      msg += " [";
      for (size_t i = 0; i < ids.size(); ++i) msg += (i ? ", " : "") + ids[i];
      msg += "]";
    }
    throw Error("DisconnectedDesign", msg);
  }

  std::vector<std::vector<size_t>> adjacent(n);
  for (size_t ci = 0; ci < design.connections.size(); ++ci) {
    adjacent[design.connections[ci].connecting].push_back(ci);
    adjacent[design.connections[ci].connected].push_back(ci);
  }

  size_t seed = 0;
  for (size_t i = 1; i < n; ++i)
    if (design.components[i].id < design.components[seed].id) seed = i;

  std::vector<char> placed(n, 0);
  poses[seed] = Transform::identity();
  placed[seed] = 1;
  std::vector<size_t> stack{seed};
  while (!stack.empty()) {
    size_t i = stack.back();
    stack.pop_back();
    for (size_t ci : adjacent[i]) {
      const FlatConnection& conn = design.connections[ci];
      Transform rel = relative_transform(design.components[conn.connecting],
                                         design.components[conn.connected], conn);
      size_t j;
      Transform pose;
      if (conn.connected == i) {
        j = conn.connecting;
        pose = compose(poses[i], rel);
      } else {
        j = conn.connected;
        pose = compose(poses[i], invert(rel));
      }
      if (!pose.is_rigid(1e-9)) pose = pose.orthonormalized();
      if (placed[j]) {
        if (max_abs_diff(poses[j], pose) > 1e-6)
          throw Error("OverConstrained",
                      "connection between '" + design.components[conn.connecting].id +
                          "' and '" + design.components[conn.connected].id +
                          "' contradicts an earlier placement");
      } else {
        poses[j] = pose;
        placed[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return poses;
}

}  // namespace flatpack
