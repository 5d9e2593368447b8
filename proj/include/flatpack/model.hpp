#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatpack/expression.hpp"
#include "flatpack/geometry.hpp"

namespace flatpack {

// A named edge of a template outline; edge i runs from outline vertex i to
// vertex (i+1) mod n, counter-clockwise.
struct Interface {
  std::string name;
  size_t edge = 0;
};

struct ParamSpec {
  std::string name;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> preset;
};

// A parametric planar outline. Custom templates carry coordinate expressions;
// builtins generate their rings procedurally (vertex count may depend on the
// parameters, e.g. regular polygons).
struct Template {
  std::string name;
  std::vector<ParamSpec> params;
  std::vector<std::pair<Expression, Expression>> outline;                // CCW
  std::vector<std::vector<std::pair<Expression, Expression>>> windows;   // CW
  std::vector<Interface> interfaces;
  bool builtin = false;

  std::function<Polygon2(const std::map<std::string, double>&)> generator;
  std::function<std::vector<Interface>(const std::map<std::string, double>&)>
      interface_gen;

  const ParamSpec* find_param(const std::string& n) const;

  // Bound-checks the values (Error: BindingError) and builds the polygon
  // (Error: InvalidPolygon if the result degenerates).
  Polygon2 shape(const std::map<std::string, double>& values) const;
  std::vector<Interface> instance_interfaces(
      const std::map<std::string, double>& values) const;
};

// Builtins plus the custom templates of one design file.
class TemplateLibrary {
 public:
  TemplateLibrary();  // starts with the builtin set

  void add(Template t);  // Error: SchemaError on duplicate names
  const Template* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<Template> templates_;
};

struct Component {
  std::string id;
  std::string template_name;
  std::map<std::string, Expression> bindings;
};

struct InterfaceRef {
  std::string component;
  std::string interface;
};

enum class Alignment { front_front, front_back };

// Attaches `connecting` onto `connected`: interface edges are aligned
// anti-parallel, then the rotation (degrees, intrinsic x-y-z about the
// connected interface frame) and the offset (in that frame) are applied.
struct Connection {
  InterfaceRef connecting;
  InterfaceRef connected;
  Alignment alignment = Alignment::front_front;
  Vec3 offset{};
  Vec3 rotation{};
};

struct Constraint {
  std::string target;  // "component.param"
  Expression value;
};

struct Include {
  std::string file;
  std::string alias;
  std::map<std::string, Expression> params;  // overrides of the child's knobs
};

struct Design {
  std::string name;
  std::vector<ParamSpec> params;  // model-level knobs
  std::vector<Template> templates;
  std::vector<Component> components;
  std::vector<Constraint> constraints;
  std::vector<Connection> connections;
  std::vector<Include> includes;
  std::vector<std::pair<std::string, InterfaceRef>> exports;
  std::vector<std::pair<std::string, std::string>> no_joint;
};

// --- linked form -------------------------------------------------------------

struct FlatComponent {
  std::string id;  // include path joined with '/'
  std::string template_name;
  std::map<std::string, double> values;
  Polygon2 shape;
  std::vector<Interface> interfaces;

  const Interface* find_interface(const std::string& n) const;
};

struct FlatConnection {
  size_t connecting = 0;  // component indices
  size_t connected = 0;
  size_t connecting_edge = 0;
  size_t connected_edge = 0;
  Alignment alignment = Alignment::front_front;
  Vec3 offset{};
  Vec3 rotation{};
};

struct FlatDesign {
  std::string name;
  std::vector<FlatComponent> components;
  std::vector<FlatConnection> connections;
  std::vector<std::pair<size_t, size_t>> no_joint;
  size_t free_parameters = 0;
  size_t total_parameters = 0;

  size_t component_index(const std::string& id) const;  // Error: ReferenceError
};

// Resolves includes (via `load_include`, keyed by the include's file string),
// evaluates every parameter (constraints beat bindings beat presets),
// instantiates all shapes and resolves connection endpoints.
//
// Errors: SchemaError (id collisions), ReferenceError (unknown names),
// CycleError (value dependencies or include recursion), BindingError (missing
// value or bound violation), ConstraintError (duplicate target),
// SelfConnectionError, DegenerateInterface.
FlatDesign link_design(const Design& root,
                       const std::function<Design(const std::string&)>& load_include);

// Convenience for single-file designs (any include triggers ReferenceError).
FlatDesign link_design(const Design& root);

}  // namespace flatpack
