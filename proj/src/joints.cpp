#include "flatpack/joints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace flatpack {

namespace {

constexpr double deg_to_rad = 3.14159265358979323846 / 180.0;

std::string fmt_mm(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Record segment mapped into one part's local frame.
struct LocalSeg {
  Vec2 a, b;
  Vec2 u;  // unit direction a -> b
  double len = 0;
};

LocalSeg local_segment(const Part& part, const Segment3& world) {
  Transform inv = invert(part.pose);
  Vec3 la = inv.apply(world.a);
  Vec3 lb = inv.apply(world.b);
  LocalSeg s;
  s.a = {la.x, la.y};
  s.b = {lb.x, lb.y};
  s.len = norm(s.b - s.a);
  s.u = (1.0 / s.len) * (s.b - s.a);
  return s;
}

// Rectangle in the segment frame: along [s0,s1] measured from seg.a, across
// [c0,c1] measured along the unit normal v. Counter-clockwise outer ring.
Polygon2 seg_rect(const LocalSeg& seg, Vec2 v, double s0, double s1, double c0,
                  double c1) {
  Polygon2 r;
  r.outer = {seg.a + s0 * seg.u + c0 * v, seg.a + s1 * seg.u + c0 * v,
             seg.a + s1 * seg.u + c1 * v, seg.a + s0 * seg.u + c1 * v};
  if (ring_signed_area(r.outer) < 0) {
    std::reverse(r.outer.begin(), r.outer.end());
  }
  return r;
}

// Unit normal of the segment pointing away from the part's material.
Vec2 outward_of(const Polygon2& poly, const LocalSeg& seg, double thickness) {
  Vec2 n{seg.u.y, -seg.u.x};
  Vec2 mid = seg.a + (seg.len / 2) * seg.u;
  double probe = std::max(1e-4, 1e-3 * thickness);
  if (point_in_polygon(poly, mid + probe * n)) {
    n = -1.0 * n;
  }
  return n;
}

std::vector<std::pair<double, double>> spans_for(const FingerLayout& lay,
                                                 double len, bool lead,
                                                 double width) {
  std::vector<std::pair<double, double>> out;
  for (int k = lead ? 0 : 1; k < lay.sections; k += 2) {
    double c = (k + 0.5) * lay.nominal;
    out.push_back({std::max(0.0, c - width / 2), std::min(len, c + width / 2)});
  }
  return out;
}

// One record's planned cuts and additions on a single part, applied later in
// deterministic record order.
struct Edit {
  size_t part = 0;
  size_t record = 0;
  std::vector<Polygon2> cuts;
  std::vector<Polygon2> adds;
  Segment2 claim{};  // boundary interval this joint occupies on the part
};

Edit finger_edit(size_t part, size_t record, const Polygon2& shape,
                 const LocalSeg& seg, const FingerLayout& lay, bool lead,
                 const FabricationSpec& spec) {
  Edit e;
  e.part = part;
  e.record = record;
  Vec2 out = outward_of(shape, seg, spec.thickness);
  double half = spec.thickness / 2;
  // recede the whole contact to the dent floor, then graft the tabs back on
  // at full depth so every finger spans the mating sheet exactly; the tab
  // bases sink a hair below the floor so the union overlaps on area rather
  // than a razor-thin touching edge that coordinate noise can separate
  double sink = 1e-3;
  e.cuts.push_back(seg_rect(seg, out, 0, seg.len, -half, 0));
  for (const auto& [s0, s1] : spans_for(lay, seg.len, lead, lay.w_f)) {
    e.adds.push_back(seg_rect(seg, out, s0, s1, -half - sink, half));
  }
  e.claim = {seg.a, seg.b};
  return e;
}

Edit hole_edit(size_t part, size_t record, const Polygon2& shape,
               const LocalSeg& seg, const FingerLayout& lay,
               const FabricationSpec& spec, const std::string& joint_name) {
  Edit e;
  e.part = part;
  e.record = record;
  Vec2 n{seg.u.y, -seg.u.x};
  double half = spec.thickness / 2;
  for (const auto& [s0, s1] : spans_for(lay, seg.len, true, lay.w_h)) {
    Polygon2 hole = seg_rect(seg, n, s0, s1, -half, half);
    for (const Vec2& corner : hole.outer) {
      if (!point_in_polygon(shape, corner) ||
          distance_to_boundary(shape, corner) <= eps_len) {
        throw Error("JointPlacementError",
                    "finger hole of joint " + joint_name +
                        " breaches the face boundary: the contact runs closer "
                        "than half the material thickness to an edge");
      }
    }
    e.cuts.push_back(std::move(hole));
  }
  e.claim = {seg.a, seg.b};
  return e;
}

Edit slot_edit(size_t part, size_t record, const Polygon2& shape,
               const LocalSeg& seg, double s0, double s1,
               const FabricationSpec& spec) {
  Edit e;
  e.part = part;
  e.record = record;
  Vec2 n{seg.u.y, -seg.u.x};
  double half = slot_width(spec) / 2;
  e.claim = {seg.a + s0 * seg.u, seg.a + s1 * seg.u};
  // a slot whose end reaches the part boundary opens through it; overshoot
  // the cut so the notch breaches the rim cleanly
  double lo = s0, hi = s1;
  if (s0 <= eps_len && distance_to_boundary(shape, seg.a) <= eps_plane) {
    lo -= spec.thickness;
  }
  if (s1 >= seg.len - eps_len &&
      distance_to_boundary(shape, seg.b) <= eps_plane) {
    hi += spec.thickness;
  }
  e.cuts.push_back(seg_rect(seg, n, lo, hi, -half, half));
  return e;
}

bool claims_overlap(const Segment2& s1, const Segment2& s2) {
  Vec2 d = s1.b - s1.a;
  double len = norm(d);
  if (len <= eps_len) return false;
  Vec2 u = (1.0 / len) * d;
  if (std::abs(cross(u, s2.a - s1.a)) > eps_plane ||
      std::abs(cross(u, s2.b - s1.a)) > eps_plane) {
    return false;  // not on the same carrier line
  }
  double t1 = dot(u, s2.a - s1.a);
  double t2 = dot(u, s2.b - s1.a);
  double lo = std::max(0.0, std::min(t1, t2));
  double hi = std::min(len, std::max(t1, t2));
  return hi - lo > eps_len;
}

}  // namespace

std::string to_string(JointKind kind) {
  switch (kind) {
    case JointKind::finger_finger: return "finger-finger";
    case JointKind::finger_hole: return "finger-hole";
    case JointKind::slot_slot: return "slot-slot";
    case JointKind::slot_single: return "slot-single";
  }
  return "unknown";
}

FingerLayout finger_layout(double segment_len, const FabricationSpec& spec) {
  if (segment_len < 2 * spec.thickness - eps_len) {
    throw Error("JointTooSmall",
                "segment of " + fmt_mm(segment_len) +
                    " mm is shorter than twice the material thickness (" +
                    fmt_mm(2 * spec.thickness) + " mm)");
  }
  double pitch = std::max(2 * spec.thickness, segment_len / 9);
  double raw = segment_len / pitch;
  int n = static_cast<int>(std::llround(raw));
  if (n % 2 == 0) n += raw > n ? 1 : -1;
  n = std::max(3, n);

  FingerLayout lay;
  lay.sections = n;
  lay.nominal = segment_len / n;
  double grow = (4 * spec.kerf + spec.interference) / 2;
  lay.w_f = lay.nominal + grow;
  lay.w_d = lay.nominal - grow;
  lay.w_h = lay.nominal - grow;
  lay.l_f = spec.thickness;
  if (lay.w_d <= 0) {
    throw Error("JointTooSmall",
                "kerf and interference compensation of " + fmt_mm(2 * grow) +
                    " mm leaves no dent material at a finger pitch of " +
                    fmt_mm(lay.nominal) + " mm");
  }
  return lay;
}

double slot_width(const FabricationSpec& spec) {
  return spec.thickness + 2 * spec.kerf + spec.interference;
}

std::vector<std::pair<double, double>> finger_spans(const FingerLayout& lay,
                                                    double segment_len,
                                                    bool lead) {
  return spans_for(lay, segment_len, lead, lay.w_f);
}

JointedParts synthesize_joints(const FlatDesign& design,
                               const Assembly& assembly,
                               const FabricationSpec& spec) {
  JointedParts out;
  out.shapes.reserve(assembly.parts.size());
  for (const Part& p : assembly.parts) out.shapes.push_back(p.shape);

  std::set<std::pair<size_t, size_t>> vetoed;
  for (const auto& [ca, cb] : design.no_joint) {
    size_t pa = assembly.component_part.at(ca);
    size_t pb = assembly.component_part.at(cb);
    vetoed.insert({std::min(pa, pb), std::max(pa, pb)});
  }

  auto joint_name = [&](const IntersectionRecord& rec) {
    return "'" + assembly.parts[rec.part_a].id + " x " +
           assembly.parts[rec.part_b].id + "'";
  };

  std::vector<Edit> edits;
  for (size_t ri = 0; ri < assembly.records.size(); ++ri) {
    const IntersectionRecord& rec = assembly.records[ri];
    const Part& pa = assembly.parts[rec.part_a];
    const Part& pb = assembly.parts[rec.part_b];
    if (!rec.user && vetoed.count({rec.part_a, rec.part_b}) > 0) continue;

    double len = norm(rec.world.b - rec.world.a);
    if (len < 2 * spec.thickness - eps_len) {
      out.warnings.push_back(
          "dropped contact between '" + pa.id + "' and '" + pb.id +
          "': segment of " + fmt_mm(len) +
          " mm is shorter than twice the material thickness and cannot host "
          "a joint");
      continue;
    }

    LocalSeg sa = local_segment(pa, rec.world);
    LocalSeg sb = local_segment(pb, rec.world);

    if (rec.edge_a || rec.edge_b) {
      // finger patterns only make sense when the sheets meet square-on
      Vec3 na = pa.pose.rotate({0, 0, 1});
      Vec3 nb = pb.pose.rotate({0, 0, 1});
      if (std::abs(dot(na, nb)) > std::cos(89.0 * deg_to_rad) + 1e-9) {
        throw Error("JointUnsupportedAngle",
                    "joint " + joint_name(rec) +
                        " meets at an unsupported dihedral angle; finger "
                        "joints require 90 degrees (within 1 degree)");
      }
    }

    JointKind kind;
    if (rec.edge_a && rec.edge_b) {
      kind = JointKind::finger_finger;
      auto lay = finger_layout(len, spec);
      edits.push_back(finger_edit(rec.part_a, ri, pa.shape, sa, lay, true, spec));
      edits.push_back(finger_edit(rec.part_b, ri, pb.shape, sb, lay, false, spec));
    } else if (rec.edge_a != rec.edge_b) {
      kind = JointKind::finger_hole;
      auto lay = finger_layout(len, spec);
      if (rec.edge_a) {
        edits.push_back(finger_edit(rec.part_a, ri, pa.shape, sa, lay, true, spec));
        edits.push_back(hole_edit(rec.part_b, ri, pb.shape, sb, lay, spec,
                                  joint_name(rec)));
      } else {
        edits.push_back(finger_edit(rec.part_b, ri, pb.shape, sb, lay, true, spec));
        edits.push_back(hole_edit(rec.part_a, ri, pa.shape, sa, lay, spec,
                                  joint_name(rec)));
      }
    } else if (rec.inside_a != rec.inside_b) {
      // one part passes clear through the other's interior: one full-length
      // slot in the pierced part lets it be stuck through
      kind = JointKind::slot_single;
      if (rec.inside_a) {
        edits.push_back(slot_edit(rec.part_a, ri, pa.shape, sa, 0, len, spec));
      } else {
        edits.push_back(slot_edit(rec.part_b, ri, pb.shape, sb, 0, len, spec));
      }
    } else {
      // cross-lap: the lexicographically smaller part id (always part_a;
      // parts are sorted) slots from the parameter-0 end of the segment
      kind = JointKind::slot_slot;
      edits.push_back(slot_edit(rec.part_a, ri, pa.shape, sa, 0, len / 2, spec));
      edits.push_back(slot_edit(rec.part_b, ri, pb.shape, sb, len / 2, len, spec));
    }

    Joint j;
    j.record = ri;
    j.part_a = rec.part_a;
    j.part_b = rec.part_b;
    j.kind = kind;
    j.length = len;
    j.user = rec.user;
    out.joints.push_back(j);
  }

  for (size_t i = 0; i < edits.size(); ++i) {
    for (size_t j = i + 1; j < edits.size(); ++j) {
      if (edits[i].part != edits[j].part || edits[i].record == edits[j].record) {
        continue;
      }
      if (claims_overlap(edits[i].claim, edits[j].claim)) {
        const auto& ra = assembly.records[edits[i].record];
        const auto& rb = assembly.records[edits[j].record];
        throw Error("JointConflict",
                    "joints " + joint_name(ra) + " and " + joint_name(rb) +
                        " edit the same boundary interval of part '" +
                        assembly.parts[edits[i].part].id + "'");
      }
    }
  }

  for (const Edit& e : edits) {
    Polygon2& poly = out.shapes[e.part];
    try {
      if (!e.cuts.empty()) poly = polygon_difference(poly, e.cuts);
      for (const Polygon2& add : e.adds) poly = polygon_union(poly, add);
    } catch (const Error& err) {
      throw Error(err.code, "part '" + assembly.parts[e.part].id + "': " +
                                joint_name(assembly.records[e.record]) + ": " +
                                err.what());
    }
  }
  for (Polygon2& p : out.shapes) {
    p = canonical_polygon(simplify_collinear(p));
  }
  return out;
}

std::vector<std::vector<Vec2>> flex_hinge_cuts(const HingeRegion& region,
                                               const FabricationSpec& spec,
                                               int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw Error("JointTooSmall", "hinge module grid must be at least 1 x 1");
  }
  Vec2 u = normalized(region.axis);
  Vec2 v{-u.y, u.x};
  double cu = region.length / rows;  // module length along the bending axis
  double cv = region.width / cols;   // transverse width of one replica
  double slit = cu - 2 * spec.hinge_beam;
  if (slit < spec.hinge_gap ||
      cv < 2 * spec.hinge_gap + 3 * spec.hinge_beam) {
    throw Error("JointTooSmall",
                "hinge region of " + fmt_mm(region.length) + " x " +
                    fmt_mm(region.width) + " mm cannot fit a " +
                    fmt_mm(cu) + " x " + fmt_mm(cv) + " mm lattice module");
  }
  Vec2 origin =
      region.center - (region.length / 2) * u - (region.width / 2) * v;
  std::vector<std::vector<Vec2>> cuts;
  double g2 = spec.hinge_gap / 2;
  for (int r = 0; r < rows; ++r) {
    double u0 = r * cu + spec.hinge_beam;
    double u1 = (r + 1) * cu - spec.hinge_beam;
    for (int c = 0; c < cols; ++c) {
      // two parallel slits; the strip between them is the spring beam that
      // links the junction blocks at both slit ends
      for (double frac : {1.0 / 3.0, 2.0 / 3.0}) {
        double vc = (c + frac) * cv;
        cuts.push_back({origin + u0 * u + (vc - g2) * v,
                        origin + u1 * u + (vc - g2) * v,
                        origin + u1 * u + (vc + g2) * v,
                        origin + u0 * u + (vc + g2) * v});
      }
    }
  }
  return cuts;
}

}  // namespace flatpack
