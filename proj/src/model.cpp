#include "flatpack/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace flatpack {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_bound(const std::string& owner, const ParamSpec& p, double v) {
  if (p.min && v < *p.min - 1e-12)
    throw Error("BindingError", owner + "." + p.name + " = " + std::to_string(v) +
                                    " is below the minimum " + std::to_string(*p.min));
  if (p.max && v > *p.max + 1e-12)
    throw Error("BindingError", owner + "." + p.name + " = " + std::to_string(v) +
                                    " is above the maximum " + std::to_string(*p.max));
}

Template rectangle_template() {
  Template t;
  t.name = "rectangle";
  t.builtin = true;
  t.params = {{"l", 1e-6, {}, {}}, {"w", 1e-6, {}, {}}};
  t.interfaces = {{"b", 0}, {"r", 1}, {"t", 2}, {"l", 3}};
  t.generator = [](const std::map<std::string, double>& v) {
    double l = v.at("l"), w = v.at("w");
    Polygon2 p;
    p.outer = {{0, 0}, {l, 0}, {l, w}, {0, w}};
    return p;
  };
  return t;
}

Template trapezoid_template() {
  Template t;
  t.name = "trapezoid";
  t.builtin = true;
  t.params = {{"b", 1e-6, {}, {}}, {"t", 1e-6, {}, {}}, {"h", 1e-6, {}, {}}};
  t.interfaces = {{"b", 0}, {"r", 1}, {"t", 2}, {"l", 3}};
  t.generator = [](const std::map<std::string, double>& v) {
    double b = v.at("b"), top = v.at("t"), h = v.at("h");
    Polygon2 p;
    p.outer = {{0, 0}, {b, 0}, {(b + top) / 2, h}, {(b - top) / 2, h}};
    return p;
  };
  return t;
}

Template right_triangle_template() {
  Template t;
  t.name = "right_triangle";
  t.builtin = true;
  t.params = {{"b", 1e-6, {}, {}}, {"h", 1e-6, {}, {}}};
  t.interfaces = {{"b", 0}, {"hyp", 1}, {"l", 2}};
  t.generator = [](const std::map<std::string, double>& v) {
    Polygon2 p;
    p.outer = {{0, 0}, {v.at("b"), 0}, {0, v.at("h")}};
    return p;
  };
  return t;
}

Template regular_polygon_template() {
  Template t;
  t.name = "regular_polygon";
  t.builtin = true;
  t.params = {{"n", 3.0, 64.0, {}}, {"side", 1e-6, {}, {}}};
  t.generator = [](const std::map<std::string, double>& v) {
    double nd = v.at("n");
    long n = std::lround(nd);
    if (std::abs(nd - double(n)) > 1e-9)
      throw Error("BindingError", "regular_polygon.n must be an integer");
    double side = v.at("side");
    double r = side / (2 * std::sin(kPi / double(n)));
    Polygon2 p;
    for (long k = 0; k < n; ++k) {
      double a = 2 * kPi * double(k) / double(n) - kPi / 2 - kPi / double(n);
      p.outer.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return p;
  };
  t.interface_gen = [](const std::map<std::string, double>& v) {
    long n = std::lround(v.at("n"));
    std::vector<Interface> out;
    for (long k = 0; k < n; ++k) out.push_back({"e" + std::to_string(k), size_t(k)});
    return out;
  };
  return t;
}

Template frame_template() {
  Template t;
  t.name = "frame";
  t.builtin = true;
  t.params = {{"l", 1e-6, {}, {}}, {"w", 1e-6, {}, {}}, {"m", 1e-6, {}, {}}};
  t.interfaces = {{"b", 0}, {"r", 1}, {"t", 2}, {"l", 3}};
  t.generator = [](const std::map<std::string, double>& v) {
    double l = v.at("l"), w = v.at("w"), m = v.at("m");
    if (2 * m >= std::min(l, w) - 1e-6)
      throw Error("BindingError", "frame.m leaves no window: 2*m must stay below min(l, w)");
    Polygon2 p;
    p.outer = {{0, 0}, {l, 0}, {l, w}, {0, w}};
    p.holes.push_back({{m, m}, {m, w - m}, {l - m, w - m}, {l - m, m}});
    return p;
  };
  return t;
}

}  // namespace

const ParamSpec* Template::find_param(const std::string& n) const {
  for (const auto& p : params)
    if (p.name == n) return &p;
  return nullptr;
}

Polygon2 Template::shape(const std::map<std::string, double>& values) const {
  for (const auto& p : params) {
    auto it = values.find(p.name);
    if (it == values.end())
      throw Error("BindingError", name + "." + p.name + " has no value");
    check_bound(name, p, it->second);
  }
  Polygon2 poly;
  if (generator) {
    poly = generator(values);
  } else {
    for (const auto& [ex, ey] : outline)
      poly.outer.push_back({ex.evaluate(values), ey.evaluate(values)});
    for (const auto& win : windows) {
      std::vector<Vec2> ring;
      for (const auto& [ex, ey] : win)
        ring.push_back({ex.evaluate(values), ey.evaluate(values)});
      poly.holes.push_back(std::move(ring));
    }
  }
  validate_polygon(poly);
  return poly;
}

std::vector<Interface> Template::instance_interfaces(
    const std::map<std::string, double>& values) const {
  return interface_gen ? interface_gen(values) : interfaces;
}

TemplateLibrary::TemplateLibrary() {
  templates_.push_back(rectangle_template());
  templates_.push_back(trapezoid_template());
  templates_.push_back(right_triangle_template());
  templates_.push_back(regular_polygon_template());
  templates_.push_back(frame_template());
}

void TemplateLibrary::add(Template t) {
  if (find(t.name))
    throw Error("SchemaError", "template '" + t.name + "' is declared twice");
  if (!t.generator && t.outline.size() < 3)
    throw Error("SchemaError", "template '" + t.name + "' needs at least 3 outline vertices");
  std::set<std::string> seen;
  for (const auto& p : t.params)
    if (!seen.insert(p.name).second)
      throw Error("SchemaError", "template '" + t.name + "' repeats parameter '" + p.name + "'");
  seen.clear();
  for (const auto& i : t.interfaces) {
    if (!seen.insert(i.name).second)
      throw Error("SchemaError", "template '" + t.name + "' repeats interface '" + i.name + "'");
    if (!t.generator && i.edge >= t.outline.size())
      throw Error("SchemaError", "template '" + t.name + "' interface '" + i.name +
                                     "' points past the outline");
  }
  templates_.push_back(std::move(t));
}

const Template* TemplateLibrary::find(const std::string& name) const {
  for (const auto& t : templates_)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<std::string> TemplateLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& t : templates_) out.push_back(t.name);
  return out;
}

const Interface* FlatComponent::find_interface(const std::string& n) const {
  for (const auto& i : interfaces)
    if (i.name == n) return &i;
  return nullptr;
}

size_t FlatDesign::component_index(const std::string& id) const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i].id == id) return i;
  throw Error("ReferenceError", "no component named '" + id + "'");
}

// --- linking -----------------------------------------------------------------

namespace {

enum class Origin { model_preset, model_override, binding, comp_preset, constraint, unset };

struct ValueNode {
  Expression expr;
  std::string scope;  // prefix the expression's names resolve in
  Origin origin = Origin::unset;
  ParamSpec spec;     // bounds to re-check after evaluation (model params)
  bool is_model_param = false;
};

struct PendingComponent {
  std::string flat_id;
  Template tmpl;
  std::string scope;
};

struct PendingRef {
  std::string scope;
  InterfaceRef ref;
};

struct PendingConnection {
  PendingRef connecting, connected;
  Alignment alignment;
  Vec3 offset, rotation;
};

struct LinkContext {
  std::map<std::string, ValueNode> nodes;
  std::vector<PendingComponent> comps;
  std::vector<PendingConnection> conns;
  std::vector<std::pair<std::string, Constraint>> constraints;  // (scope, raw)
  std::vector<std::pair<std::string, std::string>> nojoint;     // flat ids
  std::map<std::string, std::pair<std::string, std::string>> exports;  // "scope+name" -> (flat id, iface)
};

Expression literal_expr(double v) {
  // Shortest round-trip form; negative presets arrive via unary minus.
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return Expression::parse(std::string(buf, r.ptr));
}

void flatten_file(const Design& d, const std::string& prefix,
                  const std::function<Design(const std::string&)>& loader,
                  std::vector<std::string>& include_stack,
                  std::map<std::string, ValueNode> overrides, LinkContext& ctx) {
  TemplateLibrary lib;
  for (const auto& t : d.templates) lib.add(t);

  std::set<std::string> local_names;
  auto claim = [&](const std::string& n, const char* what) {
    if (!local_names.insert(n).second)
      throw Error("SchemaError", std::string(what) + " '" + prefix + n +
                                     "' collides with another declaration");
  };

  for (const auto& p : d.params) {
    claim(p.name, "model parameter");
    ValueNode node;
    node.is_model_param = true;
    node.spec = p;
    auto ov = overrides.find(p.name);
    if (ov != overrides.end()) {
      node.expr = ov->second.expr;
      node.scope = ov->second.scope;
      node.origin = Origin::model_override;
      overrides.erase(ov);
    } else if (p.preset) {
      node.expr = literal_expr(*p.preset);
      node.scope = prefix;
      node.origin = Origin::model_preset;
    } else {
      throw Error("BindingError",
                  "model parameter '" + prefix + p.name + "' needs a value");
    }
    ctx.nodes.emplace(prefix + p.name, std::move(node));
  }
  if (!overrides.empty())
    throw Error("ReferenceError", "include overrides unknown parameter '" + prefix +
                                      overrides.begin()->first + "'");

  for (const auto& c : d.components) {
    claim(c.id, "component");
    const Template* tmpl = lib.find(c.template_name);
    if (!tmpl)
      throw Error("ReferenceError", "component '" + prefix + c.id +
                                        "' uses unknown template '" + c.template_name + "'");
    for (const auto& [bname, bexpr] : c.bindings) {
      (void)bexpr;
      if (!tmpl->find_param(bname))
        throw Error("ReferenceError", "component '" + prefix + c.id + "' binds '" + bname +
                                          "' which template '" + tmpl->name + "' lacks");
    }
    for (const auto& p : tmpl->params) {
      ValueNode node;
      node.scope = prefix;
      auto it = c.bindings.find(p.name);
      if (it != c.bindings.end()) {
        node.expr = it->second;
        node.origin = Origin::binding;
      } else if (p.preset) {
        node.expr = literal_expr(*p.preset);
        node.origin = Origin::comp_preset;
      } else {
        node.origin = Origin::unset;  // a constraint may still fill it
      }
      ctx.nodes.emplace(prefix + c.id + "." + p.name, std::move(node));
    }
    ctx.comps.push_back({prefix + c.id, *tmpl, prefix});
  }

  // Constraints may reach into components of includes that are flattened
  // later in this file; apply them only once every node exists.
  for (const auto& cn : d.constraints) ctx.constraints.emplace_back(prefix, cn);

  for (const auto& cn : d.connections) {
    PendingConnection pc;
    pc.connecting = {prefix, cn.connecting};
    pc.connected = {prefix, cn.connected};
    pc.alignment = cn.alignment;
    pc.offset = cn.offset;
    pc.rotation = cn.rotation;
    ctx.conns.push_back(std::move(pc));
  }

  for (const auto& [a, b] : d.no_joint) ctx.nojoint.emplace_back(prefix + a, prefix + b);

  for (const auto& inc : d.includes) {
    claim(inc.alias, "include alias");
    if (!loader)
      throw Error("ReferenceError",
                  "design includes '" + inc.file + "' but no loader is available");
    if (std::find(include_stack.begin(), include_stack.end(), inc.file) !=
        include_stack.end())
      throw Error("CycleError", "include cycle through '" + inc.file + "'");
    std::map<std::string, ValueNode> child_overrides;
    for (const auto& [pname, pexpr] : inc.params) {
      ValueNode n;
      n.expr = pexpr;
      n.scope = prefix;
      child_overrides.emplace(pname, std::move(n));
    }
    include_stack.push_back(inc.file);
    Design child = loader(inc.file);
    std::string child_prefix = prefix + inc.alias + "/";
    flatten_file(child, child_prefix, loader, include_stack, std::move(child_overrides),
                 ctx);
    include_stack.pop_back();
    for (const auto& [ename, eref] : child.exports) {
      std::string flat_comp = child_prefix + eref.component;
      bool direct = std::any_of(ctx.comps.begin(), ctx.comps.end(),
                                [&](const PendingComponent& pc) {
                                  return pc.flat_id == flat_comp;
                                });
      if (!direct)
        throw Error("ReferenceError", "export '" + ename + "' in '" + inc.file +
                                          "' must name a component of that file");
      ctx.exports.emplace(child_prefix + ename,
                          std::make_pair(flat_comp, eref.interface));
    }
  }
}

}  // namespace

FlatDesign link_design(const Design& root,
                       const std::function<Design(const std::string&)>& load_include) {
  LinkContext ctx;
  std::vector<std::string> include_stack;
  flatten_file(root, "", load_include, include_stack, {}, ctx);

  for (const auto& [scope, cn] : ctx.constraints) {
    std::string key = scope + cn.target;
    auto it = ctx.nodes.find(key);
    if (it == ctx.nodes.end())
      throw Error("ReferenceError", "constraint targets unknown parameter '" + key + "'");
    if (it->second.origin == Origin::constraint)
      throw Error("ConstraintError", "parameter '" + key + "' is constrained twice");
    it->second.expr = cn.value;
    it->second.scope = scope;
    it->second.origin = Origin::constraint;
  }

  for (const auto& [key, node] : ctx.nodes)
    if (node.origin == Origin::unset)
      throw Error("BindingError", "parameter '" + key + "' never receives a value");

  // Dependency-ordered evaluation with cycle detection.
  std::map<std::string, double> resolved;
  std::set<std::string> visiting;
  std::function<double(const std::string&)> value_of = [&](const std::string& key) {
    auto done = resolved.find(key);
    if (done != resolved.end()) return done->second;
    if (!visiting.insert(key).second)
      throw Error("CycleError", "parameter dependency cycle through '" + key + "'");
    const ValueNode& node = ctx.nodes.at(key);
    std::map<std::string, double> env;
    for (const auto& var : node.expr.variables()) {
      std::string dep = node.scope + var;
      if (!ctx.nodes.count(dep))
        throw Error("ReferenceError",
                    "'" + key + "' references unknown parameter '" + dep + "'");
      env[var] = value_of(dep);
    }
    double v = node.expr.evaluate(env);
    if (node.is_model_param) check_bound("model", node.spec, v);
    visiting.erase(key);
    resolved[key] = v;
    return v;
  };
  for (const auto& [key, node] : ctx.nodes) {
    (void)node;
    value_of(key);
  }

  FlatDesign flat;
  flat.name = root.name;
  for (const auto& pc : ctx.comps) {
    FlatComponent fc;
    fc.id = pc.flat_id;
    fc.template_name = pc.tmpl.name;
    for (const auto& p : pc.tmpl.params) fc.values[p.name] = resolved.at(pc.flat_id + "." + p.name);
    fc.shape = pc.tmpl.shape(fc.values);
    fc.interfaces = pc.tmpl.instance_interfaces(fc.values);
    for (const auto& iface : fc.interfaces)
      if (iface.edge >= fc.shape.outer.size())
        throw Error("SchemaError", "interface '" + iface.name + "' of '" + fc.id +
                                       "' points past the outline");
    flat.components.push_back(std::move(fc));
    flat.total_parameters += pc.tmpl.params.size();
  }

  for (const auto& [key, node] : ctx.nodes) {
    (void)key;
    bool knob = node.origin == Origin::model_preset ||
                node.origin == Origin::model_override || node.origin == Origin::binding;
    if (knob && node.expr.is_literal()) ++flat.free_parameters;
  }

  auto resolve_ref = [&](const PendingRef& r) -> std::pair<size_t, size_t> {
    std::string flat_id = r.scope + r.ref.component;
    std::string iface = r.ref.interface;
    bool found = std::any_of(flat.components.begin(), flat.components.end(),
                             [&](const FlatComponent& c) { return c.id == flat_id; });
    if (!found) {
      auto ex = ctx.exports.find(flat_id + "/" + iface);
      if (ex == ctx.exports.end())
        throw Error("ReferenceError", "connection references unknown endpoint '" +
                                          flat_id + "/" + iface + "'");
      flat_id = ex->second.first;
      iface = ex->second.second;
    }
    size_t idx = flat.component_index(flat_id);
    const Interface* i = flat.components[idx].find_interface(iface);
    if (!i)
      throw Error("ReferenceError",
                  "component '" + flat_id + "' has no interface '" + iface + "'");
    return {idx, i->edge};
  };

  for (const auto& pc : ctx.conns) {
    FlatConnection fc;
    std::tie(fc.connecting, fc.connecting_edge) = resolve_ref(pc.connecting);
    std::tie(fc.connected, fc.connected_edge) = resolve_ref(pc.connected);
    if (fc.connecting == fc.connected)
      throw Error("SelfConnectionError",
                  "'" + flat.components[fc.connecting].id + "' cannot connect to itself");
    fc.alignment = pc.alignment;
    fc.offset = pc.offset;
    fc.rotation = pc.rotation;
    flat.connections.push_back(fc);
  }

  for (const auto& [a, b] : ctx.nojoint)
    flat.no_joint.emplace_back(flat.component_index(a), flat.component_index(b));

  return flat;
}

FlatDesign link_design(const Design& root) { return link_design(root, nullptr); }

}  // namespace flatpack
