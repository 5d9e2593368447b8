#include "flatpack/design_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace flatpack {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error("SchemaError", path + ": " + what);
}

std::string scalar_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsDefined() || !node.IsScalar()) schema_fail(path, "expected a scalar");
  return node.as<std::string>();
}

double number_of(const YAML::Node& node, const std::string& path) {
  auto text = scalar_of(node, path);
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    schema_fail(path, "expected a number, got '" + text + "'");
  return v;
}

size_t index_of(const YAML::Node& node, const std::string& path) {
  double v = number_of(node, path);
  if (v < 0 || v != static_cast<double>(static_cast<size_t>(v)))
    schema_fail(path, "expected a non-negative integer");
  return static_cast<size_t>(v);
}

Expression expr_of(const YAML::Node& node, const std::string& path) {
  auto text = scalar_of(node, path);
  try {
    return Expression::parse(text);
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

Vec3 vec3_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 3)
    schema_fail(path, "expected a [x, y, z] triple");
  return {number_of(node[0], path + "/0"), number_of(node[1], path + "/1"),
          number_of(node[2], path + "/2")};
}

InterfaceRef ref_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 2)
    schema_fail(path, "expected a [component, interface] pair");
  return {scalar_of(node[0], path + "/0"), scalar_of(node[1], path + "/1")};
}

void check_keys(const YAML::Node& map, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end())
      schema_fail(path + "/" + key, "unknown key");
  }
}

YAML::Node require(const YAML::Node& map, const char* key, const std::string& path) {
  auto node = map[key];
  if (!node.IsDefined()) schema_fail(path + "/" + key, "missing required key");
  return node;
}

std::vector<ParamSpec> param_specs_of(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) schema_fail(path, "expected a list of parameter specs");
  std::vector<ParamSpec> specs;
  for (size_t i = 0; i < node.size(); ++i) {
    auto ipath = path + "/" + std::to_string(i);
    const auto& entry = node[i];
    if (!entry.IsMap()) schema_fail(ipath, "expected a {name, min, max, preset} map");
    check_keys(entry, ipath, {"name", "min", "max", "preset"});
    ParamSpec spec;
    spec.name = scalar_of(require(entry, "name", ipath), ipath + "/name");
    if (entry["min"]) spec.min = number_of(entry["min"], ipath + "/min");
    if (entry["max"]) spec.max = number_of(entry["max"], ipath + "/max");
    if (entry["preset"]) spec.preset = number_of(entry["preset"], ipath + "/preset");
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<std::pair<Expression, Expression>> ring_of(const YAML::Node& node,
                                                       const std::string& path) {
  if (!node.IsSequence() || node.size() < 3)
    schema_fail(path, "expected a ring of at least 3 [x, y] expression pairs");
  std::vector<std::pair<Expression, Expression>> ring;
  for (size_t i = 0; i < node.size(); ++i) {
    auto ipath = path + "/" + std::to_string(i);
    const auto& pt = node[i];
    if (!pt.IsSequence() || pt.size() != 2)
      schema_fail(ipath, "expected an [x, y] expression pair");
    ring.emplace_back(expr_of(pt[0], ipath + "/0"), expr_of(pt[1], ipath + "/1"));
  }
  return ring;
}

// --- canonical writer ----------------------------------------------------------

std::string fmt_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') {
      q += '\\';
      q += c;
    } else if (c == '\n') {
      q += "\\n";
    } else {
      q += c;
    }
  }
  q += '"';
  return q;
}

bool bare_safe(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' &&
        c != '/' && c != '-')
      return false;
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const char* kw : {"true", "false", "null", "yes", "no", "on", "off"})
    if (lower == kw) return false;
  return true;
}

std::string ident(const std::string& s) { return bare_safe(s) ? s : quoted(s); }

std::string vec3_text(Vec3 v) {
  return "[" + fmt_number(v.x) + ", " + fmt_number(v.y) + ", " + fmt_number(v.z) + "]";
}

std::string param_spec_text(const ParamSpec& p) {
  std::string s = "{name: " + ident(p.name);
  if (p.min) s += ", min: " + fmt_number(*p.min);
  if (p.max) s += ", max: " + fmt_number(*p.max);
  if (p.preset) s += ", preset: " + fmt_number(*p.preset);
  return s + "}";
}

std::string pair_text(const std::pair<Expression, Expression>& p) {
  return "[" + quoted(p.first.text()) + ", " + quoted(p.second.text()) + "]";
}

}  // namespace

Design load_design(const std::string& document) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw Error("ParseError", e.what());
  }
  if (!root.IsMap()) schema_fail("/", "document must be a mapping");
  check_keys(root, "", {"flatpack", "name", "params", "templates", "components",
                        "constraints", "connections", "includes", "exports",
                        "no_joint"});
  auto version = require(root, "flatpack", "");
  if (!version.IsScalar() || version.as<std::string>() != "1")
    schema_fail("/flatpack", "unsupported version (this reader handles 1)");

  Design d;
  if (root["name"]) d.name = scalar_of(root["name"], "/name");
  if (root["params"]) d.params = param_specs_of(root["params"], "/params");

  if (root["templates"]) {
    const auto& ts = root["templates"];
    if (!ts.IsSequence()) schema_fail("/templates", "expected a list");
    for (size_t i = 0; i < ts.size(); ++i) {
      auto tpath = "/templates/" + std::to_string(i);
      const auto& tn = ts[i];
      if (!tn.IsMap()) schema_fail(tpath, "expected a template map");
      check_keys(tn, tpath, {"name", "params", "outline", "windows", "interfaces"});
      Template t;
      t.name = scalar_of(require(tn, "name", tpath), tpath + "/name");
      if (tn["params"]) t.params = param_specs_of(tn["params"], tpath + "/params");
      t.outline = ring_of(require(tn, "outline", tpath), tpath + "/outline");
      if (tn["windows"]) {
        const auto& ws = tn["windows"];
        if (!ws.IsSequence()) schema_fail(tpath + "/windows", "expected a list of rings");
        for (size_t w = 0; w < ws.size(); ++w)
          t.windows.push_back(ring_of(ws[w], tpath + "/windows/" + std::to_string(w)));
      }
      if (tn["interfaces"]) {
        const auto& ifs = tn["interfaces"];
        if (!ifs.IsSequence()) schema_fail(tpath + "/interfaces", "expected a list");
        for (size_t k = 0; k < ifs.size(); ++k) {
          auto kpath = tpath + "/interfaces/" + std::to_string(k);
          const auto& fn = ifs[k];
          if (!fn.IsMap()) schema_fail(kpath, "expected a {name, edge} map");
          check_keys(fn, kpath, {"name", "edge"});
          t.interfaces.push_back(
              {scalar_of(require(fn, "name", kpath), kpath + "/name"),
               index_of(require(fn, "edge", kpath), kpath + "/edge")});
        }
      }
      d.templates.push_back(std::move(t));
    }
  }

  // A document may consist purely of included sub-models, so `components`
  // is required only when nothing is included.
  if (!root["components"] && !root["includes"])
    schema_fail("/components", "missing required key");
  auto comps = root["components"] ? root["components"] : YAML::Node(YAML::NodeType::Sequence);
  if (!comps.IsSequence()) schema_fail("/components", "expected a list");
  for (size_t i = 0; i < comps.size(); ++i) {
    auto cpath = "/components/" + std::to_string(i);
    const auto& cn = comps[i];
    if (!cn.IsMap()) schema_fail(cpath, "expected a component map");
    check_keys(cn, cpath, {"id", "template", "bindings"});
    Component c;
    c.id = scalar_of(require(cn, "id", cpath), cpath + "/id");
    c.template_name = scalar_of(require(cn, "template", cpath), cpath + "/template");
    if (cn["bindings"]) {
      const auto& bs = cn["bindings"];
      if (!bs.IsMap()) schema_fail(cpath + "/bindings", "expected a map");
      for (const auto& kv : bs) {
        auto key = kv.first.as<std::string>();
        c.bindings[key] = expr_of(kv.second, cpath + "/bindings/" + key);
      }
    }
    d.components.push_back(std::move(c));
  }

  if (root["constraints"]) {
    const auto& cs = root["constraints"];
    if (!cs.IsMap()) schema_fail("/constraints", "expected a target -> expression map");
    for (const auto& kv : cs) {
      auto target = kv.first.as<std::string>();
      d.constraints.push_back({target, expr_of(kv.second, "/constraints/" + target)});
    }
  }

  auto conns = require(root, "connections", "");
  if (!conns.IsSequence() && !conns.IsNull())
    schema_fail("/connections", "expected a list");
  if (conns.IsSequence())
    for (size_t i = 0; i < conns.size(); ++i) {
      auto cpath = "/connections/" + std::to_string(i);
      const auto& cn = conns[i];
      if (!cn.IsMap()) schema_fail(cpath, "expected a connection map");
      check_keys(cn, cpath,
                 {"connecting", "connected", "alignment", "offset", "rotation"});
      Connection c;
      c.connecting = ref_of(require(cn, "connecting", cpath), cpath + "/connecting");
      c.connected = ref_of(require(cn, "connected", cpath), cpath + "/connected");
      if (cn["alignment"]) {
        auto a = scalar_of(cn["alignment"], cpath + "/alignment");
        if (a == "ff")
          c.alignment = Alignment::front_front;
        else if (a == "fb")
          c.alignment = Alignment::front_back;
        else
          schema_fail(cpath + "/alignment", "expected ff or fb, got '" + a + "'");
      }
      if (cn["offset"]) c.offset = vec3_of(cn["offset"], cpath + "/offset");
      if (cn["rotation"]) c.rotation = vec3_of(cn["rotation"], cpath + "/rotation");
      d.connections.push_back(std::move(c));
    }

  if (root["includes"]) {
    const auto& is = root["includes"];
    if (!is.IsSequence()) schema_fail("/includes", "expected a list");
    for (size_t i = 0; i < is.size(); ++i) {
      auto ipath = "/includes/" + std::to_string(i);
      const auto& in = is[i];
      if (!in.IsMap()) schema_fail(ipath, "expected an include map");
      check_keys(in, ipath, {"file", "alias", "params"});
      Include inc;
      inc.file = scalar_of(require(in, "file", ipath), ipath + "/file");
      inc.alias = scalar_of(require(in, "alias", ipath), ipath + "/alias");
      if (in["params"]) {
        const auto& ps = in["params"];
        if (!ps.IsMap()) schema_fail(ipath + "/params", "expected a map");
        for (const auto& kv : ps) {
          auto key = kv.first.as<std::string>();
          inc.params[key] = expr_of(kv.second, ipath + "/params/" + key);
        }
      }
      d.includes.push_back(std::move(inc));
    }
  }

  if (root["exports"]) {
    const auto& es = root["exports"];
    if (!es.IsMap()) schema_fail("/exports", "expected a name -> [id, interface] map");
    for (const auto& kv : es) {
      auto name = kv.first.as<std::string>();
      d.exports.emplace_back(name, ref_of(kv.second, "/exports/" + name));
    }
  }

  if (root["no_joint"]) {
    const auto& ns = root["no_joint"];
    if (!ns.IsSequence()) schema_fail("/no_joint", "expected a list of id pairs");
    for (size_t i = 0; i < ns.size(); ++i) {
      auto npath = "/no_joint/" + std::to_string(i);
      const auto& pn = ns[i];
      if (!pn.IsSequence() || pn.size() != 2)
        schema_fail(npath, "expected an [id, id] pair");
      d.no_joint.emplace_back(scalar_of(pn[0], npath + "/0"),
                              scalar_of(pn[1], npath + "/1"));
    }
  }

  return d;
}

std::string save_design(const Design& design) {
  std::string out = "flatpack: 1\n";
  if (!design.name.empty()) out += "name: " + ident(design.name) + "\n";

  if (!design.params.empty()) {
    out += "params:\n";
    for (const auto& p : design.params) out += "  - " + param_spec_text(p) + "\n";
  }

  if (!design.templates.empty()) {
    out += "templates:\n";
    for (const auto& t : design.templates) {
      out += "  - name: " + ident(t.name) + "\n";
      if (!t.params.empty()) {
        out += "    params:\n";
        for (const auto& p : t.params) out += "      - " + param_spec_text(p) + "\n";
      }
      out += "    outline:\n";
      for (const auto& pt : t.outline) out += "      - " + pair_text(pt) + "\n";
      if (!t.windows.empty()) {
        out += "    windows:\n";
        for (const auto& ring : t.windows) {
          out += "      - [";
          for (size_t i = 0; i < ring.size(); ++i) {
            if (i) out += ", ";
            out += pair_text(ring[i]);
          }
          out += "]\n";
        }
      }
      if (!t.interfaces.empty()) {
        out += "    interfaces:\n";
        for (const auto& f : t.interfaces)
          out += "      - {name: " + ident(f.name) +
                 ", edge: " + std::to_string(f.edge) + "}\n";
      }
    }
  }

  out += "components:";
  out += design.components.empty() ? " []\n" : "\n";
  for (const auto& c : design.components) {
    out += "  - id: " + ident(c.id) + "\n";
    out += "    template: " + ident(c.template_name) + "\n";
    if (!c.bindings.empty()) {
      out += "    bindings:\n";
      for (const auto& [name, expr] : c.bindings)
        out += "      " + ident(name) + ": " + quoted(expr.text()) + "\n";
    }
  }

  if (!design.constraints.empty()) {
    auto sorted = design.constraints;
    std::sort(sorted.begin(), sorted.end(),
              [](const Constraint& a, const Constraint& b) { return a.target < b.target; });
    out += "constraints:\n";
    for (const auto& c : sorted)
      out += "  " + ident(c.target) + ": " + quoted(c.value.text()) + "\n";
  }

  out += "connections:";
  out += design.connections.empty() ? " []\n" : "\n";
  for (const auto& c : design.connections) {
    out += "  - connecting: [" + ident(c.connecting.component) + ", " +
           ident(c.connecting.interface) + "]\n";
    out += "    connected: [" + ident(c.connected.component) + ", " +
           ident(c.connected.interface) + "]\n";
    out += std::string("    alignment: ") +
           (c.alignment == Alignment::front_front ? "ff" : "fb") + "\n";
    out += "    offset: " + vec3_text(c.offset) + "\n";
    out += "    rotation: " + vec3_text(c.rotation) + "\n";
  }

  if (!design.includes.empty()) {
    out += "includes:\n";
    for (const auto& inc : design.includes) {
      out += "  - file: " + ident(inc.file) + "\n";
      out += "    alias: " + ident(inc.alias) + "\n";
      if (!inc.params.empty()) {
        out += "    params:\n";
        for (const auto& [name, expr] : inc.params)
          out += "      " + ident(name) + ": " + quoted(expr.text()) + "\n";
      }
    }
  }

  if (!design.exports.empty()) {
    auto sorted = design.exports;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out += "exports:\n";
    for (const auto& [name, ref] : sorted)
      out += "  " + ident(name) + ": [" + ident(ref.component) + ", " +
             ident(ref.interface) + "]\n";
  }

  if (!design.no_joint.empty()) {
    out += "no_joint:\n";
    for (const auto& [a, b] : design.no_joint)
      out += "  - [" + ident(a) + ", " + ident(b) + "]\n";
  }

  return out;
}

Design load_design_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IOError", "cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_design(buffer.str());
}

std::vector<std::filesystem::path> library_search_path() {
  std::vector<std::filesystem::path> dirs;
  const char* env = std::getenv("FLATPACK_LIBRARY_PATH");
  if (!env) return dirs;
  std::string text(env);
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(':', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) dirs.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return dirs;
}

FlatDesign load_and_link_file(const std::filesystem::path& path, Design& root_out) {
  root_out = load_design_file(path);
  if (root_out.name.empty()) root_out.name = path.stem().string();
  auto root_canonical = std::filesystem::weakly_canonical(path);

  std::vector<std::filesystem::path> dirs;
  dirs.push_back(path.has_parent_path() ? path.parent_path()
                                        : std::filesystem::path("."));
  for (auto& d : library_search_path()) dirs.push_back(d);

  std::map<std::string, Design> cache;
  auto resolve = [&](const std::string& ref) -> Design {
    std::filesystem::path found;
    std::filesystem::path raw(ref);
    if (raw.is_absolute() && std::filesystem::exists(raw)) {
      found = raw;
    } else {
      for (const auto& dir : dirs) {
        auto candidate = dir / raw;
        if (std::filesystem::exists(candidate)) {
          found = candidate;
          break;
        }
      }
    }
    if (found.empty())
      throw Error("IOError", "include '" + ref + "' was not found next to '" +
                                 path.string() + "' or on the library path");
    auto canonical = std::filesystem::weakly_canonical(found);
    if (canonical == root_canonical)
      throw Error("CycleError", "include cycle through '" + ref + "'");
    auto [it, fresh] = cache.try_emplace(canonical.string());
    if (fresh) it->second = load_design_file(found);
    return it->second;
  };
  return link_design(root_out, resolve);
}

FlatDesign load_and_link_file(const std::filesystem::path& path) {
  Design root;
  return load_and_link_file(path, root);
}

}  // namespace flatpack
