#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flatpack/intersect.hpp"

namespace flatpack {

// Manufacturing parameters. thickness is the sheet material thickness,
// kerf the material removed on each side of a cut, interference the extra
// press-fit tightness added to every joint.
struct FabricationSpec {
  std::string material = "plywood";
  double thickness = 3.0;
  double kerf = 0.1;
  double interference = 0.05;
  double sheet_width = 2440.0;
  double sheet_height = 1220.0;
  double spacing = 10.0;
  double hinge_beam = 1.5;  // rigid junction width of the flex hinge lattice
  double hinge_gap = 0.5;   // spring cut width of the flex hinge lattice
};

enum class JointKind { finger_finger, finger_hole, slot_slot, slot_single };

std::string to_string(JointKind kind);

struct Joint {
  size_t record = 0;  // index into Assembly::records
  size_t part_a = 0;
  size_t part_b = 0;
  JointKind kind = JointKind::finger_finger;
  double length = 0;
  bool user = false;
};

// Alternating finger sectioning of one intersection segment. The segment is
// split into an odd number (>= 3) of sections of pitch max(2*thickness,
// len/9); fingers widen and dents/holes narrow by half the compensation
// 4*kerf + interference each, so w_f - w_d = w_f - w_h = 4*kerf + interference
// and a finger is exactly as deep as the mating sheet (l_f = thickness).
struct FingerLayout {
  int sections = 0;
  double nominal = 0;  // section pitch = segment_len / sections
  double w_f = 0;      // finger width
  double w_d = 0;      // dent width
  double w_h = 0;      // hole width (equals w_d)
  double l_f = 0;      // finger depth = material thickness
};

// Error("JointTooSmall") when segment_len < 2 * thickness.
FingerLayout finger_layout(double segment_len, const FabricationSpec& spec);

// Slot width w_s = thickness + 2*kerf + interference.
double slot_width(const FabricationSpec& spec);

// Along-segment intervals of the finger tabs for one of the two roles.
// The lead role takes sections 0, 2, 4, ...; the other role the rest.
// End fingers are clamped to the segment, losing half their growth.
std::vector<std::pair<double, double>> finger_spans(const FingerLayout& lay,
                                                    double segment_len,
                                                    bool lead);

struct JointedParts {
  std::vector<Polygon2> shapes;  // final local outline per assembly part
  std::vector<Joint> joints;
  std::vector<std::string> warnings;  // dropped-segment diagnostics
};

// Classifies every intersection record and traces the joint cut geometry into
// the part outlines: edge-edge contacts become finger-finger joints, edge-face
// contacts finger-hole joints (fingers on the edge part, through-holes in the
// face part), face-face crossings cross-lap slot-slot joints, and a part stuck
// through another a single full-length pass-through slot. Segments shorter
// than 2 * thickness are dropped with a warning; design no_joint pairs
// suppress auto-detected contacts. Finger joints off 90 +/- 1 degrees raise
// Error("JointUnsupportedAngle"); a through-hole nearer than thickness/2 to
// the face boundary raises Error("JointPlacementError"); two joints editing
// the same boundary interval raise Error("JointConflict").
JointedParts synthesize_joints(const FlatDesign& design,
                               const Assembly& assembly,
                               const FabricationSpec& spec);

// Axis-aligned-in-spirit rectangular region in a part's local frame: centered
// at `center`, `length` along `axis` (the bending axis), `width` across it.
struct HingeRegion {
  Vec2 center{};
  Vec2 axis{1, 0};
  double length = 0;
  double width = 0;
};

// Flexible lattice hinge: rows modules along the axis, cols transverse
// replicas. Each module is a pair of rigid junction blocks joined by a spring
// beam between two parallel slit cuts. Returns the closed slit contours in
// part-local coordinates (counter-clockwise); subtract them from the part to
// apply. Error("JointTooSmall") when a module cannot fit the region.
std::vector<std::vector<Vec2>> flex_hinge_cuts(const HingeRegion& region,
                                               const FabricationSpec& spec,
                                               int rows, int cols);

}  // namespace flatpack
