#pragma once

#include <vector>

#include "flatpack/model.hpp"

namespace flatpack {

// Rigid transform that carries the `connecting` component into position
// against the `connected` one (A_pose = B_pose * relative). With a zero
// rotation/offset tuple the two interface edges coincide anti-parallel and
// the parts lie unfolded in one plane (front_front) or folded face-to-face
// (front_back). The rotation tuple turns A about the connected interface
// frame (x along the reversed edge, z along the resulting front normal),
// intrinsic x-y-z, degrees; the offset then shifts A in the connected
// component's local axes.
//
// Error: DegenerateInterface if either interface edge has no length.
Transform relative_transform(const FlatComponent& connecting,
                             const FlatComponent& connected,
                             const FlatConnection& conn);

// World pose per component, indexed like design.components. The component
// with the lexicographically smallest id is pinned to the identity; the rest
// follow the connection graph. Poses are re-orthonormalized when numeric
// drift accumulates.
//
// Errors: DisconnectedDesign (lists the islands), OverConstrained (a
// connection cycle disagrees by more than 1e-6).
std::vector<Transform> place_components(const FlatDesign& design);

// The same joint seen from the other side: endpoints swapped and the tuple
// rebuilt so the induced relative pose is exactly preserved.
FlatConnection reversed_connection(const FlatDesign& design, const FlatConnection& conn);

// Intrinsic x-y-z Euler angles (degrees) of a proper rotation.
Vec3 euler_angles_xyz(const Transform& rotation);

}  // namespace flatpack
