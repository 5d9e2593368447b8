#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flatpack/model.hpp"

namespace flatpack {

// Parses one design document (YAML with a `flatpack: 1` version header).
// Malformed YAML raises Error("ParseError"); structural problems raise
// Error("SchemaError") carrying the /path of the offending node.
Design load_design(const std::string& document);

// Canonical document form: fixed section order, sorted maps, verbatim
// expression text, shortest round-trip numbers, empty sections omitted.
// save -> load -> save is byte-identical; values survive to 1e-9.
std::string save_design(const Design& design);

// Reads the file (Error("IOError") when unreadable) and parses it.
Design load_design_file(const std::filesystem::path& path);

// Directories named by the FLATPACK_LIBRARY_PATH environment variable,
// colon separated, in order.
std::vector<std::filesystem::path> library_search_path();

// Loads a design file and links it. Include references resolve against the
// root file's directory first, then the library path. A reference that
// reaches the root file again raises CycleError; an unresolvable one raises
// IOError. The root design's name defaults to the file stem.
FlatDesign load_and_link_file(const std::filesystem::path& path);
FlatDesign load_and_link_file(const std::filesystem::path& path, Design& root_out);

}  // namespace flatpack
