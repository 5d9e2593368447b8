#pragma once

#include <string>
#include <vector>

#include "flatpack/geometry.hpp"
#include "flatpack/joints.hpp"

namespace flatpack {

// One part fixed onto a sheet. Local shape coordinates map to sheet
// coordinates as offset + rot90^rotated(p).
struct PlacedPart {
  size_t part = 0;  // index into the shape list given to layout_sheets
  size_t sheet = 0;
  bool rotated = false;  // quarter turn counter-clockwise
  Vec2 offset;
};

struct SheetLayout {
  size_t sheet_count = 0;
  std::vector<PlacedPart> placements;  // deterministic packing order
};

Polygon2 placed_polygon(const Polygon2& shape, const PlacedPart& placed);

// First-fit decreasing-height shelf packing with rotation set {0°, 90°}.
// Placed parts keep at least `spacing` clearance from each other; they may
// touch the sheet rim. Packing order depends only on part geometry, so
// congruent inputs yield identical layouts whatever their ids. Throws
// Error("PartTooLarge") naming the part and its dimensions when neither
// orientation fits a sheet.
SheetLayout layout_sheets(const std::vector<std::string>& ids,
                          const std::vector<Polygon2>& shapes,
                          const FabricationSpec& spec);

}  // namespace flatpack
