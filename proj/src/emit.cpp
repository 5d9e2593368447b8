#include "flatpack/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace flatpack {

namespace {

// Fixed-point formatting: quantize first so that negative zero and
// half-way rounding artefacts can never leak into the output bytes.
std::string fixed_mm(double v, int decimals, double scale) {
  long long q = llround(v * scale);
  if (q == 0) q = 0;  // normalize -0
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, static_cast<double>(q) / scale);
  return buf;
}

std::string svg_mm(double v) { return fixed_mm(v, 6, 1e6); }
std::string dxf_mm(double v) { return fixed_mm(v, 6, 1e6); }

std::string plain(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void append_u32(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void append_f32(std::vector<std::uint8_t>& bytes, double v) {
  float f = static_cast<float>(v);
  std::uint32_t u = 0;
  std::memcpy(&u, &f, 4);
  append_u32(bytes, u);
}

}  // namespace

std::vector<std::string> emit_svg(const SheetLayout& layout,
                                  const std::vector<Polygon2>& shapes,
                                  const FabricationSpec& spec) {
  std::vector<std::string> docs(layout.sheet_count);
  for (auto& doc : docs) {
    doc += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    doc += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           plain(spec.sheet_width) + "mm\" height=\"" + plain(spec.sheet_height) +
           "mm\" viewBox=\"0 0 " + plain(spec.sheet_width) + " " +
           plain(spec.sheet_height) + "\">\n";
  }
  for (const auto& pl : layout.placements) {
    auto shape = placed_polygon(shapes.at(pl.part), pl);
    std::string d;
    auto add_ring = [&](const std::vector<Vec2>& ring) {
      for (size_t i = 0; i < ring.size(); ++i) {
        d += (i == 0 ? "M " : " L ");
        d += svg_mm(ring[i].x);
        d += " ";
        d += svg_mm(ring[i].y);
      }
      d += " Z";
    };
    add_ring(shape.outer);
    for (const auto& hole : shape.holes) {
      d += " ";
      add_ring(hole);
    }
    docs.at(pl.sheet) += "  <path d=\"" + d +
                         "\" fill=\"none\" fill-rule=\"evenodd\" stroke=\"black\""
                         " stroke-width=\"0.1\"/>\n";
  }
  for (auto& doc : docs) doc += "</svg>\n";
  return docs;
}

std::vector<std::string> emit_dxf(const SheetLayout& layout,
                                  const std::vector<Polygon2>& shapes,
                                  const FabricationSpec& spec) {
  (void)spec;
  std::vector<std::string> docs(layout.sheet_count);
  for (auto& doc : docs)
    doc +=
        "  0\nSECTION\n  2\nHEADER\n  9\n$INSUNITS\n 70\n4\n  0\nENDSEC\n"
        "  0\nSECTION\n  2\nENTITIES\n";
  for (const auto& pl : layout.placements) {
    auto shape = placed_polygon(shapes.at(pl.part), pl);
    auto& doc = docs.at(pl.sheet);
    auto add_ring = [&](const std::vector<Vec2>& ring) {
      doc += "  0\nPOLYLINE\n  8\nCUT\n 66\n1\n 70\n1\n";
      for (auto v : ring)
        doc += "  0\nVERTEX\n  8\nCUT\n 10\n" + dxf_mm(v.x) + "\n 20\n" +
               dxf_mm(v.y) + "\n";
      doc += "  0\nSEQEND\n  8\nCUT\n";
    };
    add_ring(shape.outer);
    for (const auto& hole : shape.holes) add_ring(hole);
  }
  for (auto& doc : docs) doc += "  0\nENDSEC\n  0\nEOF\n";
  return docs;
}

std::vector<std::uint8_t> emit_stl(const std::vector<std::string>& ids,
                                   const std::vector<Polygon2>& shapes,
                                   const std::vector<Transform>& poses,
                                   const FabricationSpec& spec) {
  if (ids.size() != shapes.size() || poses.size() != shapes.size())
    throw std::logic_error("emit_stl: ids, shapes and poses must align");
  std::vector<TriangleMesh> meshes;
  meshes.reserve(shapes.size());
  for (size_t i = 0; i < shapes.size(); ++i) {
    // centre the material on the polygon plane before posing
    auto placement = compose(poses[i],
                             Transform::translation({0, 0, -spec.thickness / 2}));
    try {
      validate_polygon(shapes[i]);
      meshes.push_back(extrude_polygon(shapes[i], spec.thickness, placement));
    } catch (const Error& e) {
      throw Error("MeshError", "part '" + ids[i] + "': " + e.what());
    }
  }

  std::uint32_t triangle_count = 0;
  for (const auto& mesh : meshes)
    triangle_count += static_cast<std::uint32_t>(mesh.triangles.size());

  std::vector<std::uint8_t> bytes;
  bytes.reserve(84 + static_cast<size_t>(triangle_count) * 50);
  const char header[] = "flatpack extruded parts";
  for (int i = 0; i < 80; ++i)
    bytes.push_back(i < static_cast<int>(sizeof header) - 1
                        ? static_cast<std::uint8_t>(header[i])
                        : 0);
  append_u32(bytes, triangle_count);
  for (const auto& mesh : meshes)
    for (const auto& tri : mesh.triangles) {
      Vec3 a = mesh.positions[tri[0]];
      Vec3 b = mesh.positions[tri[1]];
      Vec3 c = mesh.positions[tri[2]];
      Vec3 n = cross(b - a, c - a);
      double len = norm(n);
      n = len > 1e-30 ? (1 / len) * n : Vec3{0, 0, 0};
      for (Vec3 v : {n, a, b, c}) {
        append_f32(bytes, v.x);
        append_f32(bytes, v.y);
        append_f32(bytes, v.z);
      }
      bytes.push_back(0);
      bytes.push_back(0);  // attribute byte count
    }
  return bytes;
}

}  // namespace flatpack
