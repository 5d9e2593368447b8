#include "flatpack/compile.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "flatpack/emit.hpp"
#include "flatpack/placement.hpp"
#include "json.hpp"

namespace flatpack {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

template <typename Bytes>
void write_artifact(const std::filesystem::path& dir, const std::string& name,
                    const Bytes& data, CompileReport& report) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out)
    throw Error("IOError", "cannot write '" + (dir / name).string() + "'");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  report.files.push_back(name);
}

}  // namespace

std::string report_json(const CompileReport& report, bool include_timings) {
  nlohmann::json j;
  j["design"] = report.design;
  j["components"] = report.components;
  j["parts"] = report.parts;
  j["connections"] = {{"user", report.user_connections},
                      {"auto", report.auto_connections}};
  nlohmann::json joints;
  joints["total"] = report.joint_total;
  for (const auto& [kind, n] : report.joints_by_kind) joints[kind] = n;
  j["joints"] = joints;
  j["sheets"] = report.sheets;
  j["warnings"] = report.warnings;
  j["files"] = report.files;
  if (include_timings) {
    nlohmann::json t;
    for (const auto& [stage, ms] : report.timings_ms) t[stage] = ms;
    j["timings_ms"] = t;
  }
  return j.dump(2) + "\n";
}

std::string joints_text(const Assembly& assembly, const std::vector<Joint>& joints) {
  std::string out;
  char buf[64];
  for (const auto& joint : joints) {
    std::snprintf(buf, sizeof buf, "%g", joint.length);
    out += assembly.parts[joint.part_a].id + " x " + assembly.parts[joint.part_b].id +
           ": " + to_string(joint.kind) + " len=" + buf +
           " source=" + (joint.user ? "user" : "auto") + "\n";
  }
  return out;
}

CompileResult compile_flat(const FlatDesign& flat, const std::string& design_name,
                           const CompileOptions& options) {
  CompileResult result;
  result.flat = flat;
  auto& report = result.report;
  report.design = design_name;
  report.components = flat.components.size();

  auto t = std::chrono::steady_clock::now();
  auto poses = place_components(result.flat);
  report.timings_ms.emplace_back("place", ms_since(t));

  t = std::chrono::steady_clock::now();
  result.assembly = build_assembly(result.flat, poses);
  report.timings_ms.emplace_back("intersect", ms_since(t));
  report.parts = result.assembly.parts.size();
  for (const auto& record : result.assembly.records)
    ++(record.user ? report.user_connections : report.auto_connections);

  t = std::chrono::steady_clock::now();
  result.jointed = synthesize_joints(result.flat, result.assembly, options.spec);
  report.timings_ms.emplace_back("synthesize", ms_since(t));
  report.joint_total = result.jointed.joints.size();
  for (const auto& joint : result.jointed.joints)
    ++report.joints_by_kind[to_string(joint.kind)];
  report.warnings = result.jointed.warnings;

  std::vector<std::string> part_ids;
  std::vector<Transform> part_poses;
  for (const auto& part : result.assembly.parts) {
    part_ids.push_back(part.id);
    part_poses.push_back(part.pose);
  }

  t = std::chrono::steady_clock::now();
  result.layout = layout_sheets(part_ids, result.jointed.shapes, options.spec);
  report.timings_ms.emplace_back("layout", ms_since(t));
  report.sheets = result.layout.sheet_count;

  t = std::chrono::steady_clock::now();
  if (options.write_svg)
    result.svg = emit_svg(result.layout, result.jointed.shapes, options.spec);
  if (options.write_dxf)
    result.dxf = emit_dxf(result.layout, result.jointed.shapes, options.spec);
  if (options.write_stl)
    result.stl = emit_stl(part_ids, result.jointed.shapes, part_poses, options.spec);
  report.timings_ms.emplace_back("emit", ms_since(t));

  if (options.write_files) {
    t = std::chrono::steady_clock::now();
    std::filesystem::create_directories(options.output_dir);
    for (size_t s = 0; s < result.svg.size(); ++s)
      write_artifact(options.output_dir,
                     design_name + "-sheet" + std::to_string(s + 1) + ".svg",
                     result.svg[s], report);
    for (size_t s = 0; s < result.dxf.size(); ++s)
      write_artifact(options.output_dir,
                     design_name + "-sheet" + std::to_string(s + 1) + ".dxf",
                     result.dxf[s], report);
    if (options.write_stl)
      write_artifact(options.output_dir, design_name + ".stl", result.stl, report);
    write_artifact(options.output_dir, design_name + "-report.json",
                   report_json(report, false), report);
    report.timings_ms.emplace_back("write", ms_since(t));
  }
  return result;
}

CompileResult compile_file(const std::filesystem::path& design_file,
                           const CompileOptions& options) {
  auto t = std::chrono::steady_clock::now();
  Design root;
  auto flat = load_and_link_file(design_file, root);
  double link_ms = ms_since(t);
  auto result = compile_flat(flat, root.name, options);
  result.report.timings_ms.insert(result.report.timings_ms.begin(),
                                  {"link", link_ms});
  return result;
}

}  // namespace flatpack
