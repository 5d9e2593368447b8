#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flatpack/design_io.hpp"
#include "flatpack/intersect.hpp"
#include "flatpack/joints.hpp"
#include "flatpack/layout.hpp"

namespace flatpack {

struct CompileOptions {
  FabricationSpec spec;
  std::filesystem::path output_dir = ".";
  bool write_svg = true;
  bool write_dxf = true;
  bool write_stl = true;
  bool write_files = true;  // false: keep the documents in memory only
};

struct CompileReport {
  std::string design;
  size_t components = 0;  // parts before coplanar merging
  size_t parts = 0;       // parts after merging (equals paths in the SVG)
  size_t user_connections = 0;
  size_t auto_connections = 0;
  std::map<std::string, size_t> joints_by_kind;
  size_t joint_total = 0;
  size_t sheets = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> files;  // artifact names, relative to output_dir
  std::vector<std::pair<std::string, double>> timings_ms;  // stage order
};

// The report as JSON (sorted keys). Timing fields are the only
// run-to-run variation, so comparisons drop them.
std::string report_json(const CompileReport& report, bool include_timings = true);

// One line per synthesized joint: `a x b: <kind> len=<mm> source=<user|auto>`.
std::string joints_text(const Assembly& assembly, const std::vector<Joint>& joints);

struct CompileResult {
  FlatDesign flat;
  Assembly assembly;
  JointedParts jointed;
  SheetLayout layout;
  std::vector<std::string> svg;  // one document per sheet
  std::vector<std::string> dxf;
  std::vector<std::uint8_t> stl;
  CompileReport report;
};

// Runs place -> merge -> intersect -> synthesize -> layout -> emit on an
// already linked design and (optionally) writes the artifacts.
CompileResult compile_flat(const FlatDesign& flat, const std::string& design_name,
                           const CompileOptions& options);

// Loads, links and compiles a design file.
CompileResult compile_file(const std::filesystem::path& design_file,
                           const CompileOptions& options);

}  // namespace flatpack
