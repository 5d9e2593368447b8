#pragma once

#include <vector>

#include "flatpack/model.hpp"

namespace flatpack {

// A physical part: one component, or several connected coplanar components
// fused into one outline. The part frame is the frame of the representative
// component (lexicographically smallest id among the members).
struct Part {
  std::string id;
  std::vector<size_t> members;  // component indices, sorted by id
  Polygon2 shape;               // part-local, z = 0 mid-plane
  Transform pose;               // part-local -> world
};

// One straight contact segment between two parts whose mid-planes cross.
struct IntersectionRecord {
  size_t part_a = 0;  // indices into Assembly::parts, a < b
  size_t part_b = 0;
  Segment3 world;     // endpoints ordered along the canonical line direction
  bool edge_a = false;    // contact runs along part_a's outline
  bool edge_b = false;
  bool inside_a = false;  // part_a's chord continues past both contact ends
  bool inside_b = false;
  bool user = false;      // a connection exists between the two parts
};

struct Assembly {
  std::vector<Part> parts;              // sorted by part id
  std::vector<size_t> component_part;   // component index -> part index
  std::vector<IntersectionRecord> records;
};

// Merges connected coplanar components (union of their outlines; the pieces
// must touch or Error("DisjointUnion") surfaces) and finds every pairwise
// plane crossing clipped to both outlines. Record order is deterministic:
// sorted by part pair, then by position along the intersection line.
Assembly build_assembly(const FlatDesign& design, const std::vector<Transform>& poses);

// Rotates rings so the smallest vertex leads and orders holes likewise.
// Emitters rely on this to produce identical bytes for identical geometry.
Polygon2 canonical_polygon(const Polygon2& p);

}  // namespace flatpack
