#include "doctest.h"

#include "flatpack/joints.hpp"
#include "flatpack/placement.hpp"

#include <cmath>
#include <string>

using namespace flatpack;

namespace {

Component rect_comp(std::string id, double l, double w) {
  Component c;
  c.id = std::move(id);
  c.template_name = "rectangle";
  c.bindings["l"] = Expression::parse(std::to_string(l));
  c.bindings["w"] = Expression::parse(std::to_string(w));
  return c;
}

Connection join(std::string a, std::string ai, std::string b, std::string bi,
                Vec3 rotation = {}, Vec3 offset = {},
                Alignment al = Alignment::front_front) {
  Connection cn;
  cn.connecting = {std::move(a), std::move(ai)};
  cn.connected = {std::move(b), std::move(bi)};
  cn.rotation = rotation;
  cn.offset = offset;
  cn.alignment = al;
  return cn;
}

FabricationSpec thin_spec(double kerf = 0, double interference = 0) {
  FabricationSpec s;
  s.thickness = 1;
  s.kerf = kerf;
  s.interference = interference;
  return s;
}

struct Built {
  FlatDesign flat;
  Assembly assembly;
};

Built assemble(const Design& d) {
  Built b;
  b.flat = link_design(d);
  b.assembly = build_assembly(b.flat, place_components(b.flat));
  return b;
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

TEST_CASE("finger layout reproduces the worked 30 mm example") {
  FabricationSpec spec;
  spec.thickness = 3;
  spec.kerf = 0.1;
  spec.interference = 0.05;
  auto lay = finger_layout(30, spec);
  CHECK(lay.sections == 5);
  CHECK(lay.nominal == doctest::Approx(6).epsilon(1e-12));
  CHECK(lay.w_f == doctest::Approx(6.225).epsilon(1e-12));
  CHECK(lay.w_d == doctest::Approx(5.775).epsilon(1e-12));
  CHECK(lay.w_h == doctest::Approx(5.775).epsilon(1e-12));
  CHECK(lay.l_f == doctest::Approx(3).epsilon(1e-12));
  // exact identities
  CHECK(std::abs((lay.w_f - lay.w_d) - (4 * spec.kerf + spec.interference)) < 1e-12);
  CHECK(std::abs((lay.w_f - lay.w_h) - (4 * spec.kerf + spec.interference)) < 1e-12);
  CHECK(std::abs(lay.l_f - spec.thickness) < 1e-12);
  CHECK(std::abs(slot_width(spec) - (spec.thickness + 2 * spec.kerf + spec.interference)) < 1e-12);
  CHECK(slot_width(spec) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("zero compensation gives a perfect-fit layout") {
  FabricationSpec spec;
  spec.thickness = 3;
  spec.kerf = 0;
  spec.interference = 0;
  auto lay = finger_layout(30, spec);
  CHECK(lay.w_f == doctest::Approx(lay.nominal).epsilon(1e-12));
  CHECK(lay.w_d == doctest::Approx(lay.nominal).epsilon(1e-12));
}

TEST_CASE("section counts are odd, at least three, and pitch-capped") {
  FabricationSpec spec;
  spec.thickness = 3;
  spec.kerf = 0;
  spec.interference = 0;
  // pitch = max(6, len/9)
  CHECK(finger_layout(7, spec).sections == 3);     // 7/6 rounds to 1, floored at 3
  CHECK(finger_layout(30, spec).sections == 5);    // 30/6 = 5
  CHECK(finger_layout(36, spec).sections == 5);    // exactly 6 -> step down to odd
  CHECK(finger_layout(39, spec).sections == 7);    // 6.5 rounds up to 7
  CHECK(finger_layout(100, spec).sections == 9);   // pitch 100/9 keeps nine sections
  CHECK(finger_layout(1000, spec).sections == 9);  // long edges capped by len/9
  for (double len : {7.0, 11.0, 30.0, 36.0, 39.0, 100.0, 263.0}) {
    auto lay = finger_layout(len, spec);
    CHECK(lay.sections >= 3);
    CHECK(lay.sections % 2 == 1);
    CHECK(lay.nominal == doctest::Approx(len / lay.sections).epsilon(1e-12));
  }
}

TEST_CASE("finger spans of the two roles tile the segment exactly at zero compensation") {
  FabricationSpec spec = thin_spec();
  spec.thickness = 3;
  auto lay = finger_layout(30, spec);
  auto lead = finger_spans(lay, 30, true);
  auto trail = finger_spans(lay, 30, false);
  REQUIRE(lead.size() == 3);
  REQUIRE(trail.size() == 2);
  // merge and verify the tiling [0,30] with no gaps or overlaps
  std::vector<std::pair<double, double>> all;
  all.insert(all.end(), lead.begin(), lead.end());
  all.insert(all.end(), trail.begin(), trail.end());
  std::sort(all.begin(), all.end());
  CHECK(std::abs(all.front().first - 0) < 1e-12);
  CHECK(std::abs(all.back().second - 30) < 1e-12);
  for (size_t i = 0; i + 1 < all.size(); ++i) {
    CHECK(std::abs(all[i].second - all[i + 1].first) < 1e-12);
  }
}

TEST_CASE("compensated spans stay inside the segment and keep interior width w_f") {
  FabricationSpec spec;
  spec.thickness = 3;
  spec.kerf = 0.1;
  spec.interference = 0.05;
  auto lay = finger_layout(30, spec);
  auto lead = finger_spans(lay, 30, true);
  REQUIRE(lead.size() == 3);
  CHECK(lead.front().first == doctest::Approx(0).epsilon(1e-12));
  CHECK(lead.back().second == doctest::Approx(30).epsilon(1e-12));
  // the middle finger is not clamped
  CHECK((lead[1].second - lead[1].first) == doctest::Approx(lay.w_f).epsilon(1e-12));
  // end fingers lose half the growth to the clamp
  CHECK((lead[0].second - lead[0].first) ==
        doctest::Approx(lay.w_f - (lay.w_f - lay.nominal) / 2).epsilon(1e-12));
}

TEST_CASE("interference strictly widens fingers and slots, narrows dents and holes") {
  FabricationSpec lo;
  lo.thickness = 3;
  lo.kerf = 0.1;
  lo.interference = 0.05;
  FabricationSpec hi = lo;
  hi.interference = 0.2;
  auto a = finger_layout(30, lo);
  auto b = finger_layout(30, hi);
  CHECK(b.w_f > a.w_f);
  CHECK(b.w_d < a.w_d);
  CHECK(b.w_h < a.w_h);
  CHECK(slot_width(hi) > slot_width(lo));
}

TEST_CASE("an edge-edge contact synthesizes a complementary finger-finger joint") {
  Design d;
  d.components.push_back(rect_comp("base", 4, 2));
  d.components.push_back(rect_comp("wall", 4, 2));
  d.connections.push_back(join("wall", "t", "base", "b", {90, 0, 0}));
  auto built = assemble(d);
  auto out = synthesize_joints(built.flat, built.assembly, thin_spec());
  REQUIRE(out.joints.size() == 1);
  CHECK(out.joints[0].kind == JointKind::finger_finger);
  CHECK(out.joints[0].length == doctest::Approx(4).epsilon(1e-9));
  CHECK(out.joints[0].user);
  CHECK(out.warnings.empty());
  // 3 sections of 4/3; base leads with two tabs and one dent, wall the reverse.
  // Tabs protrude t/2 = 0.5 beyond the edge, dents recede 0.5 into the part.
  double sect = 4.0 / 3.0;
  CHECK(polygon_area(out.shapes[0]) ==
        doctest::Approx(8 + 2 * sect * 0.5 - sect * 0.5).epsilon(1e-9));
  CHECK(polygon_area(out.shapes[1]) ==
        doctest::Approx(8 + sect * 0.5 - 2 * sect * 0.5).epsilon(1e-9));
  CHECK(out.shapes[0].holes.empty());
  CHECK(out.shapes[1].holes.empty());
  validate_polygon(out.shapes[0]);
  validate_polygon(out.shapes[1]);
}

TEST_CASE("an edge-face contact synthesizes fingers on the edge part and holes in the face") {
  Design d;
  d.components.push_back(rect_comp("base", 8, 6));
  d.components.push_back(rect_comp("leg", 4, 2));
  d.connections.push_back(join("leg", "t", "base", "b", {90, 0, 0}, {0, 3, 0}));
  auto built = assemble(d);
  FabricationSpec spec = thin_spec(0.1, 0.05);
  auto out = synthesize_joints(built.flat, built.assembly, spec);
  REQUIRE(out.joints.size() == 1);
  CHECK(out.joints[0].kind == JointKind::finger_hole);

  auto lay = finger_layout(4, spec);
  REQUIRE(lay.sections == 3);
  // the face part takes one rectangular through-hole per finger
  const Polygon2& base = out.shapes[0];
  REQUIRE(base.holes.size() == 2);
  double hole_area = 0;
  for (const auto& h : base.holes) hole_area += -ring_signed_area(h);
  CHECK(hole_area == doctest::Approx(2 * lay.w_h * spec.thickness).epsilon(1e-9));
  CHECK(polygon_area(base) ==
        doctest::Approx(48 - 2 * lay.w_h * spec.thickness).epsilon(1e-9));

  // the edge part gains two clamped tabs and loses one dent
  auto spans = finger_spans(lay, 4, true);
  REQUIRE(spans.size() == 2);
  double tab = (spans[0].second - spans[0].first) + (spans[1].second - spans[1].first);
  CHECK(polygon_area(out.shapes[1]) ==
        doctest::Approx(8 + tab * 0.5 - lay.w_d * 0.5).epsilon(1e-9));
}

TEST_CASE("a hole too close to the face boundary is rejected") {
  Design d;
  d.components.push_back(rect_comp("base", 8, 3.4));
  d.components.push_back(rect_comp("leg", 4, 2));
  d.connections.push_back(join("leg", "t", "base", "b", {90, 0, 0}, {0, 3, 0}));
  auto built = assemble(d);
  expect_error("JointPlacementError", [&] {
    synthesize_joints(built.flat, built.assembly, thin_spec());
  });
}

TEST_CASE("finger joints demand a right angle between the parts") {
  Design d;
  d.components.push_back(rect_comp("base", 4, 2));
  d.components.push_back(rect_comp("wall", 4, 2));
  d.connections.push_back(join("wall", "t", "base", "b", {45, 0, 0}));
  auto built = assemble(d);
  expect_error("JointUnsupportedAngle", [&] {
    synthesize_joints(built.flat, built.assembly, thin_spec());
  });

  Design ok;
  ok.components.push_back(rect_comp("base", 4, 2));
  ok.components.push_back(rect_comp("wall", 4, 2));
  ok.connections.push_back(join("wall", "t", "base", "b", {89.5, 0, 0}));
  auto near = assemble(ok);
  auto out = synthesize_joints(near.flat, near.assembly, thin_spec());
  CHECK(out.joints.size() == 1);
  CHECK(out.joints[0].kind == JointKind::finger_finger);
}

TEST_CASE("a mid-face crossing synthesizes a cross-lap slot-slot joint") {
  Design d;
  d.components.push_back(rect_comp("a", 10, 4));
  d.components.push_back(rect_comp("b", 10, 4));
  auto flat = link_design(d);
  std::vector<Transform> poses(2);
  poses[0] = Transform::rotation_x(90);
  poses[1] = compose(Transform::translation({5, -2, -1}),
                     compose(Transform::rotation_z(90), Transform::rotation_x(90)));
  auto assembly = build_assembly(flat, poses);
  FabricationSpec spec = thin_spec(0.1, 0.05);
  auto out = synthesize_joints(flat, assembly, spec);
  REQUIRE(out.joints.size() == 1);
  CHECK(out.joints[0].kind == JointKind::slot_slot);
  CHECK(out.joints[0].length == doctest::Approx(3).epsilon(1e-9));
  CHECK(!out.joints[0].user);
  // each part loses one open notch of l_s x w_s = 1.5 x 1.25
  double ws = slot_width(spec);
  CHECK(ws == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(polygon_area(out.shapes[0]) == doctest::Approx(40 - 1.5 * ws).epsilon(1e-9));
  CHECK(polygon_area(out.shapes[1]) == doctest::Approx(40 - 1.5 * ws).epsilon(1e-9));
  CHECK(out.shapes[0].holes.empty());
  CHECK(out.shapes[1].holes.empty());
  // the notches open at opposite ends: "a" at world (5,0,0), "b" at world (5,0,3)
  CHECK(point_in_polygon(out.shapes[0], {5, 0.5}) == false);
  CHECK(point_in_polygon(out.shapes[1], {2, 3.5}) == false);
}

TEST_CASE("a part stuck through another gets one full-length pass-through slot") {
  Design d;
  d.components.push_back(rect_comp("rung", 20, 2));
  d.components.push_back(rect_comp("wall", 10, 10));
  auto flat = link_design(d);
  std::vector<Transform> poses(2);
  poses[0] = Transform::translation({-5, 4, 1});
  poses[1] = compose(Transform::translation({5, 0, 0}),
                     compose(Transform::rotation_z(90), Transform::rotation_x(90)));
  auto assembly = build_assembly(flat, poses);
  FabricationSpec spec = thin_spec(0.1, 0.05);
  auto out = synthesize_joints(flat, assembly, spec);
  REQUIRE(out.joints.size() == 1);
  CHECK(out.joints[0].kind == JointKind::slot_single);
  // the rung is untouched; the wall gains a closed 2 x w_s hole
  CHECK(polygon_area(out.shapes[0]) == doctest::Approx(40).epsilon(1e-12));
  CHECK(out.shapes[0].holes.empty());
  REQUIRE(out.shapes[1].holes.size() == 1);
  CHECK(polygon_area(out.shapes[1]) ==
        doctest::Approx(100 - 2 * slot_width(spec)).epsilon(1e-9));
}

TEST_CASE("segments shorter than two thicknesses are dropped with a warning") {
  Design d;
  d.components.push_back(rect_comp("base", 4, 2));
  d.components.push_back(rect_comp("wall", 1.5, 2));
  d.connections.push_back(join("wall", "t", "base", "b", {90, 0, 0}));
  auto built = assemble(d);
  auto out = synthesize_joints(built.flat, built.assembly, thin_spec());
  CHECK(out.joints.empty());
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("base") != std::string::npos);
  CHECK(out.warnings[0].find("wall") != std::string::npos);
  CHECK(polygon_area(out.shapes[0]) == doctest::Approx(8).epsilon(1e-12));
  CHECK(polygon_area(out.shapes[1]) == doctest::Approx(3).epsilon(1e-12));
}

TEST_CASE("a too-short segment fails fast when a layout is requested directly") {
  expect_error("JointTooSmall", [] { finger_layout(1.5, thin_spec()); });
}

TEST_CASE("no_joint suppresses auto-detected contacts but not user connections") {
  Design d;
  d.components.push_back(rect_comp("a", 10, 4));
  d.components.push_back(rect_comp("b", 10, 4));
  auto flat = link_design(d);
  flat.no_joint.push_back({0, 1});
  std::vector<Transform> poses(2);
  poses[0] = Transform::rotation_x(90);
  poses[1] = compose(Transform::translation({5, -2, -1}),
                     compose(Transform::rotation_z(90), Transform::rotation_x(90)));
  auto assembly = build_assembly(flat, poses);
  auto out = synthesize_joints(flat, assembly, thin_spec());
  CHECK(out.joints.empty());
  CHECK(out.warnings.empty());
  CHECK(polygon_area(out.shapes[0]) == doctest::Approx(40).epsilon(1e-12));

  Design user;
  user.components.push_back(rect_comp("base", 4, 2));
  user.components.push_back(rect_comp("wall", 4, 2));
  user.connections.push_back(join("wall", "t", "base", "b", {90, 0, 0}));
  auto built = assemble(user);
  built.flat.no_joint.push_back({0, 1});
  auto kept = synthesize_joints(built.flat, built.assembly, thin_spec());
  CHECK(kept.joints.size() == 1);
}

TEST_CASE("two joints claiming the same boundary interval collide") {
  Design d;
  d.components.push_back(rect_comp("base", 8, 2));
  d.components.push_back(rect_comp("walla", 4, 2));
  d.components.push_back(rect_comp("wallb", 4, 2));
  d.connections.push_back(join("walla", "t", "base", "b", {90, 0, 0}, {-2, 0, 0}));
  d.connections.push_back(join("wallb", "t", "base", "b", {90, 0, 0}));
  auto built = assemble(d);
  REQUIRE(built.assembly.records.size() == 2);
  std::string msg = expect_error("JointConflict", [&] {
    synthesize_joints(built.flat, built.assembly, thin_spec());
  });
  CHECK(msg.find("walla") != std::string::npos);
  CHECK(msg.find("wallb") != std::string::npos);
}

TEST_CASE("flex hinge modules tile the region with closed interior cuts") {
  FabricationSpec spec;  // defaults: beam 1.5, gap 0.5
  HingeRegion region;
  region.center = {10, 10};
  region.axis = {1, 0};
  region.length = 20;
  region.width = 20;
  auto cuts = flex_hinge_cuts(region, spec, 1, 1);
  REQUIRE(cuts.size() == 2);
  for (const auto& ring : cuts) {
    REQUIRE(ring.size() >= 4);
    for (const auto& v : ring) {
      CHECK(v.x >= 0 - 1e-9);
      CHECK(v.x <= 20 + 1e-9);
      CHECK(v.y >= 0 - 1e-9);
      CHECK(v.y <= 20 + 1e-9);
    }
    CHECK(std::abs(ring_signed_area(ring)) > 0);
  }
  // transverse replication for wider hinges
  auto wide = flex_hinge_cuts(region, spec, 1, 3);
  CHECK(wide.size() == 6);

  HingeRegion tiny;
  tiny.center = {0.5, 0.5};
  tiny.axis = {1, 0};
  tiny.length = 1;
  tiny.width = 1;
  FabricationSpec fat = spec;
  fat.hinge_beam = 1;
  expect_error("JointTooSmall", [&] { flex_hinge_cuts(tiny, fat, 1, 1); });
}

TEST_CASE("hinge cuts subtract cleanly from a host polygon") {
  FabricationSpec spec;
  HingeRegion region;
  region.center = {15, 10};
  region.axis = {1, 0};
  region.length = 16;
  region.width = 12;
  auto cuts = flex_hinge_cuts(region, spec, 1, 2);
  Polygon2 host;
  host.outer = {{0, 0}, {30, 0}, {30, 20}, {0, 20}};
  std::vector<Polygon2> cut_polys;
  for (auto& ring : cuts) {
    Polygon2 p;
    p.outer = ring;
    if (ring_signed_area(p.outer) < 0) {
      std::reverse(p.outer.begin(), p.outer.end());
    }
    cut_polys.push_back(std::move(p));
  }
  auto slotted = polygon_difference(host, cut_polys);
  validate_polygon(slotted);
  CHECK(slotted.holes.size() == cuts.size());
  double removed = 0;
  for (const auto& p : cut_polys) removed += polygon_area(p);
  CHECK(polygon_area(slotted) == doctest::Approx(600 - removed).epsilon(1e-9));
}
