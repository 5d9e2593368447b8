#include <yaml-cpp/yaml.h>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flatpack/compile.hpp"
#include "flatpack/placement.hpp"
#include "json.hpp"

namespace {

using namespace flatpack;

double number_arg(const std::string& text, const std::string& what) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw Error("CLIError", what + " expects a number, got '" + text + "'");
  return v;
}

void apply_sheet(FabricationSpec& spec, const std::string& text) {
  auto split = text.find('x');
  if (split == std::string::npos)
    throw Error("CLIError", "--sheet expects WxH (e.g. 2440x1220), got '" + text + "'");
  spec.sheet_width = number_arg(text.substr(0, split), "--sheet width");
  spec.sheet_height = number_arg(text.substr(split + 1), "--sheet height");
}

FabricationSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IOError", "cannot read spec '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(buffer.str());
  } catch (const YAML::Exception& e) {
    throw Error("ParseError", path.string() + ": " + e.what());
  }
  if (!root.IsMap())
    throw Error("SchemaError", path.string() + ": spec must be a mapping");
  FabricationSpec spec;
  for (const auto& kv : root) {
    auto key = kv.first.as<std::string>();
    auto number = [&] { return kv.second.as<double>(); };
    if (key == "material")
      spec.material = kv.second.as<std::string>();
    else if (key == "thickness")
      spec.thickness = number();
    else if (key == "kerf")
      spec.kerf = number();
    else if (key == "interference" || key == "fit")
      spec.interference = number();
    else if (key == "spacing")
      spec.spacing = number();
    else if (key == "hinge_beam")
      spec.hinge_beam = number();
    else if (key == "hinge_gap")
      spec.hinge_gap = number();
    else if (key == "sheet") {
      if (!kv.second.IsSequence() || kv.second.size() != 2)
        throw Error("SchemaError", path.string() + ": sheet expects [width, height]");
      spec.sheet_width = kv.second[0].as<double>();
      spec.sheet_height = kv.second[1].as<double>();
    } else {
      throw Error("SchemaError", path.string() + ": unknown spec key '" + key + "'");
    }
  }
  if (spec.thickness <= 0 || spec.kerf < 0 || spec.interference < 0 ||
      spec.sheet_width <= 0 || spec.sheet_height <= 0)
    throw Error("SchemaError", path.string() + ": spec values out of range");
  return spec;
}

void apply_formats(CompileOptions& options, const std::string& formats) {
  options.write_svg = options.write_dxf = options.write_stl = false;
  size_t start = 0;
  while (start <= formats.size()) {
    size_t end = formats.find(',', start);
    if (end == std::string::npos) end = formats.size();
    auto token = formats.substr(start, end - start);
    if (token == "svg")
      options.write_svg = true;
    else if (token == "dxf")
      options.write_dxf = true;
    else if (token == "stl")
      options.write_stl = true;
    else if (!token.empty())
      throw Error("CLIError", "--formats knows svg, dxf, stl; got '" + token + "'");
    start = end + 1;
  }
}

std::string diagnostic_code(const std::string& error_code) {
  static const std::map<std::string, std::string> table = {
      {"ParseError", "E_PARSE"},          {"SchemaError", "E_SCHEMA"},
      {"IOError", "E_IO"},                {"CycleError", "E_CYCLE"},
      {"ReferenceError", "E_REFERENCE"},  {"BindingError", "E_BINDING"},
      {"ConstraintError", "E_CONSTRAINT"},{"EvalError", "E_EVAL"},
      {"SelfConnectionError", "E_SELF_CONNECTION"},
      {"DegenerateInterface", "E_DEGENERATE_INTERFACE"},
      {"InvalidPolygon", "E_INVALID_POLYGON"}};
  auto it = table.find(error_code);
  if (it != table.end()) return it->second;
  std::string code = "E_";
  for (char c : error_code) {
    if (std::isupper(static_cast<unsigned char>(c)) && code.size() > 2) code += '_';
    code += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return code;
}

// Messages are "<path>: <detail>" for schema issues; pull the path out.
std::string diagnostic_path(const std::string& message) {
  auto colon = message.find(": ");
  if (colon == std::string::npos) return "";
  auto head = message.substr(0, colon);
  return (!head.empty() && head[0] == '/') ? head : "";
}

void print_diagnostic(const std::string& severity, const std::string& code,
                      const std::string& path, const std::string& message) {
  nlohmann::json j;
  j["severity"] = severity;
  j["code"] = code;
  j["path"] = path;
  j["message"] = message;
  std::cout << j.dump() << "\n";
}

int run_validate(const std::filesystem::path& design_path) {
  FlatDesign flat;
  try {
    flat = load_and_link_file(design_path);
  } catch (const Error& e) {
    std::string detail = e.what();
    auto head = e.code + ": ";
    if (detail.rfind(head, 0) == 0) detail = detail.substr(head.size());
    print_diagnostic("error", diagnostic_code(e.code), diagnostic_path(detail), detail);
    return 2;
  }

  // connectivity: every component reachable over the connection graph
  std::vector<size_t> root(flat.components.size());
  for (size_t i = 0; i < root.size(); ++i) root[i] = i;
  std::function<size_t(size_t)> find = [&](size_t v) {
    return root[v] == v ? v : root[v] = find(root[v]);
  };
  for (const auto& cn : flat.connections) root[find(cn.connecting)] = find(cn.connected);
  std::map<size_t, std::vector<std::string>> islands;
  for (size_t i = 0; i < flat.components.size(); ++i)
    islands[find(i)].push_back(flat.components[i].id);
  if (islands.size() > 1) {
    std::string text = "connectivity graph splits into " +
                       std::to_string(islands.size()) + " islands:";
    for (const auto& [rep, members] : islands) {
      (void)rep;
      text += " {";
      for (size_t i = 0; i < members.size(); ++i)
        text += (i ? ", " : "") + members[i];
      text += "}";
    }
    print_diagnostic("error", "E_DISCONNECTED", "/connections", text);
    return 2;
  }
  return 0;
}

int run_library(bool list_all, const std::string& show_name) {
  TemplateLibrary library;
  std::map<std::string, std::pair<Template, std::string>> custom;  // name -> (tmpl, origin)
  for (const auto& dir : library_search_path()) {
    if (!std::filesystem::is_directory(dir)) continue;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.path().extension() == ".yaml") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      Design d;
      try {
        d = load_design_file(file);
      } catch (const Error&) {
        continue;  // not a design file; the library scan is best effort
      }
      for (const auto& t : d.templates)
        custom.try_emplace(t.name, t, file.string());
    }
  }

  if (list_all) {
    for (const auto& name : library.names()) std::cout << name << " (builtin)\n";
    for (const auto& [name, entry] : custom)
      std::cout << name << " (from " << entry.second << ")\n";
    return 0;
  }

  const Template* tmpl = library.find(show_name);
  std::string origin = "builtin";
  if (!tmpl) {
    auto it = custom.find(show_name);
    if (it == custom.end())
      throw Error("ReferenceError", "no template named '" + show_name + "'");
    tmpl = &it->second.first;
    origin = "from " + it->second.second;
  }
  std::cout << tmpl->name << " (" << origin << ")\n";
  std::cout << "  params:\n";
  for (const auto& p : tmpl->params) {
    std::cout << "    " << p.name;
    if (p.min) std::cout << "  min " << *p.min;
    if (p.max) std::cout << "  max " << *p.max;
    if (p.preset) std::cout << "  preset " << *p.preset;
    std::cout << "\n";
  }
  std::cout << "  interfaces: ";
  if (!tmpl->interfaces.empty()) {
    for (size_t i = 0; i < tmpl->interfaces.size(); ++i)
      std::cout << (i ? ", " : "") << tmpl->interfaces[i].name;
    std::cout << "\n";
  } else if (tmpl->interface_gen) {
    std::cout << "one per edge (count follows the parameters)\n";
  } else {
    std::cout << "none\n";
  }
  return 0;
}

int run_params(const std::filesystem::path& design_path) {
  auto flat = load_and_link_file(design_path);
  std::cout << flat.free_parameters << " free / " << flat.total_parameters
            << " total parameters\n";
  return 0;
}

int run_compile(const std::filesystem::path& design_path, const CompileOptions& options) {
  auto result = compile_file(design_path, options);
  const auto& r = result.report;
  std::cout << r.design << ": " << r.parts << " parts (" << r.components
            << " components), " << r.user_connections << " user + "
            << r.auto_connections << " auto connections, " << r.joint_total
            << (r.joint_total == 1 ? " joint, " : " joints, ") << r.sheets
            << (r.sheets == 1 ? " sheet" : " sheets") << "\n";
  std::cout << joints_text(result.assembly, result.jointed.joints);
  for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& f : r.files)
    std::cout << "wrote " << (options.output_dir / f).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatpack: compile flat-pack furniture designs into fabrication files"};
  app.require_subcommand(1);

  auto* compile_cmd =
      app.add_subcommand("compile", "compile a design to SVG/DXF/STL and a report");
  std::string design_arg, spec_arg, sheet_arg, formats_arg, out_arg = ".";
  double thickness_arg = 0, kerf_arg = 0, fit_arg = 0, spacing_arg = 0;
  compile_cmd->add_option("design", design_arg, "design file (YAML)")->required();
  auto* spec_opt = compile_cmd->add_option("--spec", spec_arg, "fabrication spec file");
  auto* thickness_opt =
      compile_cmd->add_option("--thickness", thickness_arg, "material thickness (mm)");
  auto* kerf_opt = compile_cmd->add_option("--kerf", kerf_arg, "kerf compensation (mm)");
  auto* fit_opt =
      compile_cmd->add_option("--fit", fit_arg, "press-fit interference (mm)");
  auto* sheet_opt =
      compile_cmd->add_option("--sheet", sheet_arg, "sheet size WxH in mm");
  auto* spacing_opt =
      compile_cmd->add_option("--spacing", spacing_arg, "part spacing on the sheet (mm)");
  compile_cmd->add_option("-o,--out", out_arg, "output directory");
  auto* formats_opt = compile_cmd->add_option(
      "--formats", formats_arg, "comma-separated subset of svg,dxf,stl");

  auto* validate_cmd =
      app.add_subcommand("validate", "check a design file, print JSON diagnostics");
  std::string validate_arg;
  validate_cmd->add_option("design", validate_arg, "design file (YAML)")->required();

  auto* library_cmd = app.add_subcommand("library", "inspect the template library");
  bool list_flag = false;
  std::string show_arg;
  library_cmd->add_flag("--list", list_flag, "list all templates");
  auto* show_opt =
      library_cmd->add_option("--show", show_arg, "show one template in detail");

  auto* params_cmd =
      app.add_subcommand("params", "report free and total parameter counts");
  std::string params_arg;
  params_cmd->add_option("design", params_arg, "design file (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*compile_cmd) {
      CompileOptions options;
      if (spec_opt->count()) options.spec = load_spec_file(spec_arg);
      if (thickness_opt->count()) options.spec.thickness = thickness_arg;
      if (kerf_opt->count()) options.spec.kerf = kerf_arg;
      if (fit_opt->count()) options.spec.interference = fit_arg;
      if (sheet_opt->count()) apply_sheet(options.spec, sheet_arg);
      if (spacing_opt->count()) options.spec.spacing = spacing_arg;
      if (formats_opt->count()) apply_formats(options, formats_arg);
      options.output_dir = out_arg;
      if (options.spec.thickness <= 0)
        throw Error("CLIError", "--thickness must be positive");
      return run_compile(design_arg, options);
    }
    if (*validate_cmd) return run_validate(validate_arg);
    if (*library_cmd) {
      if (list_flag == (show_opt->count() > 0))
        throw Error("CLIError", "library needs exactly one of --list or --show");
      return run_library(list_flag, show_arg);
    }
    if (*params_cmd) return run_params(params_arg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
