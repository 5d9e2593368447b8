#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatpack/geometry.hpp"
#include "flatpack/joints.hpp"
#include "flatpack/layout.hpp"

namespace flatpack {

// One SVG document per sheet; millimetre user units, one stroke-only path per
// part (outer ring first, then hole subpaths, even-odd rule), coordinates
// fixed to 1e-3 mm. Byte-deterministic for identical input.
std::vector<std::string> emit_svg(const SheetLayout& layout,
                                  const std::vector<Polygon2>& shapes,
                                  const FabricationSpec& spec);

// One ASCII DXF document per sheet (R12 subset): HEADER with $INSUNITS set to
// millimetres, then one closed POLYLINE on layer CUT for every contour.
std::vector<std::string> emit_dxf(const SheetLayout& layout,
                                  const std::vector<Polygon2>& shapes,
                                  const FabricationSpec& spec);

// Binary STL preview of the assembled model: every part extruded by the
// material thickness along its front normal, centred on the polygon plane, at
// its global pose. Throws Error("MeshError") naming the part when a final
// polygon cannot be meshed.
std::vector<std::uint8_t> emit_stl(const std::vector<std::string>& ids,
                                   const std::vector<Polygon2>& shapes,
                                   const std::vector<Transform>& poses,
                                   const FabricationSpec& spec);

}  // namespace flatpack
