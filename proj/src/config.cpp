#include "richards/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace richards {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  if (!j[key].is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
  return j[key].get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ConfigError(where + ": missing integer \"" + key + "\"");
  return j[key].get<int>();
}

std::string require_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(where + ": missing string \"" + key + "\"");
  return j[key].get<std::string>();
}

BoundaryConfig::Side side_from_string(const std::string& s) {
  if (s == "top") return BoundaryConfig::Side::top;
  if (s == "bottom") return BoundaryConfig::Side::bottom;
  if (s == "left") return BoundaryConfig::Side::left;
  if (s == "right") return BoundaryConfig::Side::right;
  throw ConfigError("boundary: unknown side \"" + s + "\"");
}

std::string side_to_string(BoundaryConfig::Side s) {
  switch (s) {
    case BoundaryConfig::Side::top: return "top";
    case BoundaryConfig::Side::bottom: return "bottom";
    case BoundaryConfig::Side::left: return "left";
    case BoundaryConfig::Side::right: return "right";
  }
  return "?";
}

BoundaryConfig parse_boundary(const json& j) {
  check_keys(j, {"side", "span", "kind", "value", "expr", "dt_d"}, "boundary");
  BoundaryConfig b;
  b.side = side_from_string(require_string(j, "side", "boundary"));
  if (j.contains("span")) {
    if (!j["span"].is_array() || j["span"].size() != 2)
      throw ConfigError("boundary: \"span\" must be [lo, hi]");
    b.span = {j["span"][0].get<double>(), j["span"][1].get<double>()};
  }
  std::string kind = require_string(j, "kind", "boundary");
  if (kind == "no_flow") {
    b.kind = BoundaryConfig::Kind::no_flow;
  } else if (kind == "dirichlet_fixed") {
    b.kind = BoundaryConfig::Kind::dirichlet_fixed;
    b.value = require_number(j, "value", "boundary");
  } else if (kind == "example1_top") {  // fixed surface head of the vadose study
    b.kind = BoundaryConfig::Kind::dirichlet_fixed;
    b.value = -3.0;
  } else if (kind == "dirichlet_expression") {
    b.kind = BoundaryConfig::Kind::dirichlet_expression;
    b.expr = require_string(j, "expr", "boundary");
    Expression::parse(b.expr);
  } else if (kind == "example2_watertable") {
    b.kind = BoundaryConfig::Kind::dirichlet_expression;
    b.expr = "1 - z";
  } else if (kind == "example2_trench") {
    b.kind = BoundaryConfig::Kind::example2_trench;
    b.dt_d = require_number(j, "dt_d", "boundary");
    if (!(b.dt_d > 0.0)) throw ConfigError("boundary: dt_d must be > 0");
  } else {
    throw ConfigError("boundary: unknown kind \"" + kind + "\"");
  }
  return b;
}

json boundary_to_json(const BoundaryConfig& b) {
  json j;
  j["side"] = side_to_string(b.side);
  if (b.span) j["span"] = {b.span->first, b.span->second};
  switch (b.kind) {
    case BoundaryConfig::Kind::no_flow: j["kind"] = "no_flow"; break;
    case BoundaryConfig::Kind::dirichlet_fixed:
      j["kind"] = "dirichlet_fixed";
      j["value"] = b.value;
      break;
    case BoundaryConfig::Kind::dirichlet_expression:
      j["kind"] = "dirichlet_expression";
      j["expr"] = b.expr;
      break;
    case BoundaryConfig::Kind::example2_trench:
      j["kind"] = "example2_trench";
      j["dt_d"] = b.dt_d;
      break;
  }
  return j;
}

SourceConfig parse_source(const json& j) {
  SourceConfig s;
  if (j.is_string()) {
    std::string text = j.get<std::string>();
    if (text == "zero") return s;
    if (text == "example1_source" || text == "example1") {
      s.kind = SourceConfig::Kind::example1;
      return s;
    }
    if (text.rfind("expression:", 0) == 0) {
      s.kind = SourceConfig::Kind::expression;
      s.expr = text.substr(std::string("expression:").size());
      Expression::parse(s.expr);
      return s;
    }
    throw ConfigError("source: unknown name \"" + text + "\"");
  }
  check_keys(j, {"kind", "expr"}, "source");
  std::string kind = require_string(j, "kind", "source");
  if (kind == "zero") {
    s.kind = SourceConfig::Kind::zero;
  } else if (kind == "example1") {
    s.kind = SourceConfig::Kind::example1;
  } else if (kind == "expression") {
    s.kind = SourceConfig::Kind::expression;
    s.expr = require_string(j, "expr", "source");
    Expression::parse(s.expr);
  } else {
    throw ConfigError("source: unknown kind \"" + kind + "\"");
  }
  return s;
}

json source_to_json(const SourceConfig& s) {
  json j;
  switch (s.kind) {
    case SourceConfig::Kind::zero: j["kind"] = "zero"; break;
    case SourceConfig::Kind::example1: j["kind"] = "example1"; break;
    case SourceConfig::Kind::expression:
      j["kind"] = "expression";
      j["expr"] = s.expr;
      break;
  }
  return j;
}

InitialConfig parse_initial(const json& j) {
  InitialConfig ic;
  if (j.is_string()) {
    std::string text = j.get<std::string>();
    if (text.rfind("expression:", 0) == 0) {
      ic.expr = text.substr(std::string("expression:").size());
      Expression::parse(ic.expr);
      return ic;
    }
    throw ConfigError("initial: unknown name \"" + text + "\"");
  }
  check_keys(j, {"kind", "expr", "psi_vad"}, "initial");
  std::string kind = require_string(j, "kind", "initial");
  if (kind == "expression") {
    ic.kind = InitialConfig::Kind::expression;
    ic.expr = require_string(j, "expr", "initial");
    Expression::parse(ic.expr);
  } else if (kind == "example1") {
    ic.kind = InitialConfig::Kind::example1;
    ic.psi_vad = require_number(j, "psi_vad", "initial");
  } else {
    throw ConfigError("initial: unknown kind \"" + kind + "\"");
  }
  return ic;
}

json initial_to_json(const InitialConfig& ic) {
  json j;
  if (ic.kind == InitialConfig::Kind::expression) {
    j["kind"] = "expression";
    j["expr"] = ic.expr;
  } else {
    j["kind"] = "example1";
    j["psi_vad"] = ic.psi_vad;
  }
  return j;
}

SchemeConfig parse_scheme(const json& j) {
  check_keys(j, {"kind", "L", "first", "switch", "escalate"}, "scheme");
  SchemeConfig s;
  std::string kind = require_string(j, "kind", "scheme");
  if (kind == "l_scheme") {
    s.kind = SchemeConfig::Kind::l_scheme;
    s.L = require_number(j, "L", "scheme");
  } else if (kind == "picard") {
    s.kind = SchemeConfig::Kind::picard;
  } else if (kind == "newton") {
    s.kind = SchemeConfig::Kind::newton;
  } else if (kind == "mixed") {
    s.kind = SchemeConfig::Kind::mixed;
    std::string first = require_string(j, "first", "scheme");
    if (first == "l_scheme") {
      s.mixed_first = Linearization::l_scheme;
      s.L = require_number(j, "L", "scheme");
    } else if (first == "picard") {
      s.mixed_first = Linearization::modified_picard;
    } else {
      throw ConfigError("scheme: mixed \"first\" must be l_scheme or picard");
    }
    if (!j.contains("switch")) throw ConfigError("scheme: mixed needs \"switch\"");
    const json& sw = j["switch"];
    check_keys(sw, {"delta_a", "delta_r", "fixed_iterations"}, "switch");
    if (sw.contains("fixed_iterations")) {
      s.switch_rule = SwitchRule::fixed_count(require_int(sw, "fixed_iterations", "switch"));
    } else {
      s.switch_rule = SwitchRule::threshold(require_number(sw, "delta_a", "switch"),
                                            require_number(sw, "delta_r", "switch"));
    }
    s.switch_rule.validate();
  } else {
    throw ConfigError("scheme: unknown kind \"" + kind + "\"");
  }
  if (j.contains("escalate")) {
    if (!j["escalate"].is_boolean()) throw ConfigError("scheme: \"escalate\" must be a bool");
    s.escalate = j["escalate"].get<bool>();
    if (s.escalate &&
        (s.kind != SchemeConfig::Kind::mixed || !s.switch_rule.uses_fixed_count()))
      throw ConfigError("scheme: \"escalate\" needs a mixed scheme with a fixed-count switch");
  }
  return s;
}

json scheme_to_json(const SchemeConfig& s) {
  json j;
  switch (s.kind) {
    case SchemeConfig::Kind::l_scheme:
      j["kind"] = "l_scheme";
      j["L"] = s.L;
      break;
    case SchemeConfig::Kind::picard: j["kind"] = "picard"; break;
    case SchemeConfig::Kind::newton: j["kind"] = "newton"; break;
    case SchemeConfig::Kind::mixed:
      j["kind"] = "mixed";
      if (s.mixed_first == Linearization::l_scheme) {
        j["first"] = "l_scheme";
        j["L"] = s.L;
      } else {
        j["first"] = "picard";
      }
      if (s.switch_rule.uses_fixed_count())
        j["switch"] = {{"fixed_iterations", s.switch_rule.fixed_iterations}};
      else
        j["switch"] = {{"delta_a", s.switch_rule.delta_a}, {"delta_r", s.switch_rule.delta_r}};
      if (s.escalate) j["escalate"] = true;
      break;
  }
  return j;
}

}  // namespace

SchemeSpec SchemeConfig::to_spec(const StoppingRule& stopping) const {
  switch (kind) {
    case Kind::l_scheme: return SchemeSpec::l_scheme(L, stopping);
    case Kind::picard: return SchemeSpec::modified_picard(stopping);
    case Kind::newton: return SchemeSpec::newton(stopping);
    case Kind::mixed: {
      SchemeSpec spec = SchemeSpec::mixed(mixed_first, L, switch_rule, stopping);
      spec.escalate_robust_on_failure = escalate;
      spec.validate();
      return spec;
    }
  }
  throw ConfigError("scheme: bad kind");
}

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, {"problem", "schemes", "stopping", "output"}, "config");
  if (!j.contains("problem")) throw ConfigError("config: missing \"problem\"");
  const json& p = j["problem"];
  check_keys(p, {"domain", "mesh", "soil", "boundary", "source", "initial", "tau", "steps"},
             "problem");

  RunConfig c;
  const json& dom = p.at("domain");
  check_keys(dom, {"x0", "x1", "z0", "z1"}, "domain");
  c.domain = {require_number(dom, "x0", "domain"), require_number(dom, "x1", "domain"),
              require_number(dom, "z0", "domain"), require_number(dom, "z1", "domain")};
  try {
    c.domain.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }

  const json& mesh = p.at("mesh");
  check_keys(mesh, {"nx", "nz"}, "mesh");
  c.nx = require_int(mesh, "nx", "mesh");
  c.nz = require_int(mesh, "nz", "mesh");
  if (c.nx < 1 || c.nz < 1) throw ConfigError("mesh: nx, nz must be >= 1");

  const json& soil = p.at("soil");
  check_keys(soil, {"theta_r", "theta_s", "alpha", "n", "k_s"}, "soil");
  c.soil.theta_R = require_number(soil, "theta_r", "soil");
  c.soil.theta_S = require_number(soil, "theta_s", "soil");
  c.soil.alpha = require_number(soil, "alpha", "soil");
  c.soil.n = require_number(soil, "n", "soil");
  c.soil.K_S = require_number(soil, "k_s", "soil");
  try {
    c.soil.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("soil: ") + e.what());
  }

  if (!p.contains("boundary") || !p["boundary"].is_array())
    throw ConfigError("problem: missing \"boundary\" array");
  for (const json& b : p["boundary"]) c.boundary.push_back(parse_boundary(b));

  c.source = p.contains("source") ? parse_source(p["source"]) : SourceConfig{};
  if (!p.contains("initial")) throw ConfigError("problem: missing \"initial\"");
  c.initial = parse_initial(p["initial"]);
  c.tau = require_number(p, "tau", "problem");
  if (!(c.tau > 0.0)) throw ConfigError("problem: tau must be > 0");
  c.steps = require_int(p, "steps", "problem");
  if (c.steps < 1) throw ConfigError("problem: steps must be >= 1");

  if (!j.contains("schemes") || !j["schemes"].is_array() || j["schemes"].empty())
    throw ConfigError("config: missing non-empty \"schemes\" array");
  for (const json& s : j["schemes"]) c.schemes.push_back(parse_scheme(s));

  if (j.contains("stopping")) {
    const json& st = j["stopping"];
    check_keys(st, {"eps_a", "eps_r", "max_iter"}, "stopping");
    if (st.contains("eps_a")) c.stopping.eps_a = st["eps_a"].get<double>();
    if (st.contains("eps_r")) c.stopping.eps_r = st["eps_r"].get<double>();
    if (st.contains("max_iter")) c.stopping.max_iter = st["max_iter"].get<int>();
    try {
      c.stopping.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("stopping: ") + e.what());
    }
  }

  if (j.contains("output")) {
    const json& out = j["output"];
    check_keys(out, {"formats"}, "output");
    if (out.contains("formats")) {
      c.output_formats.clear();
      for (const json& f : out["formats"]) {
        std::string fmt = f.get<std::string>();
        if (fmt != "csv" && fmt != "vtk") throw ConfigError("output: unknown format " + fmt);
        c.output_formats.push_back(fmt);
      }
    }
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  j["problem"]["domain"] = {{"x0", domain.x0}, {"x1", domain.x1}, {"z0", domain.z0},
                            {"z1", domain.z1}};
  j["problem"]["mesh"] = {{"nx", nx}, {"nz", nz}};
  j["problem"]["soil"] = {{"theta_r", soil.theta_R}, {"theta_s", soil.theta_S},
                          {"alpha", soil.alpha}, {"n", soil.n}, {"k_s", soil.K_S}};
  j["problem"]["boundary"] = json::array();
  for (const BoundaryConfig& b : boundary) j["problem"]["boundary"].push_back(boundary_to_json(b));
  j["problem"]["source"] = source_to_json(source);
  j["problem"]["initial"] = initial_to_json(initial);
  j["problem"]["tau"] = tau;
  j["problem"]["steps"] = steps;
  j["schemes"] = json::array();
  for (const SchemeConfig& s : schemes) j["schemes"].push_back(scheme_to_json(s));
  j["stopping"] = {{"eps_a", stopping.eps_a}, {"eps_r", stopping.eps_r},
                   {"max_iter", stopping.max_iter}};
  j["output"] = {{"formats", output_formats}};
  return j;
}

Problem RunConfig::build_problem() const {
  Problem prob;
  prob.model = ConstitutiveModel::van_genuchten(soil);

  // Dirichlet data goes through transient profiles uniformly; fixed values
  // are constant profiles.
  std::vector<BoundaryTag> tags;
  for (const BoundaryConfig& b : boundary) {
    switch (b.kind) {
      case BoundaryConfig::Kind::no_flow:
        tags.push_back(BoundaryTag::no_flow());
        break;
      case BoundaryConfig::Kind::dirichlet_fixed:
        tags.push_back(BoundaryTag::fixed(b.value));
        break;
      case BoundaryConfig::Kind::dirichlet_expression: {
        Expression e = Expression::parse(b.expr);
        tags.push_back(BoundaryTag::transient(static_cast<int>(prob.profiles.size())));
        prob.profiles.push_back([e](double x, double z, double t) { return e(x, z, t); });
        break;
      }
      case BoundaryConfig::Kind::example2_trench: {
        double dt_d = b.dt_d;
        tags.push_back(BoundaryTag::transient(static_cast<int>(prob.profiles.size())));
        prob.profiles.push_back([dt_d](double, double, double t) {
          return t <= dt_d ? -2.0 + 2.2 * t / dt_d : 0.2;
        });
        break;
      }
    }
  }

  Rectangle dom = domain;
  std::vector<BoundaryConfig> regions = boundary;
  double tol_x = 1e-9 * (1.0 + std::abs(dom.x1 - dom.x0));
  double tol_z = 1e-9 * (1.0 + std::abs(dom.z1 - dom.z0));
  auto rule = [dom, regions, tags, tol_x, tol_z](double x, double z) {
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const BoundaryConfig& b = regions[i];
      bool on_side = false;
      double along = 0.0;
      switch (b.side) {
        case BoundaryConfig::Side::top: on_side = std::abs(z - dom.z1) < tol_z; along = x; break;
        case BoundaryConfig::Side::bottom: on_side = std::abs(z - dom.z0) < tol_z; along = x; break;
        case BoundaryConfig::Side::left: on_side = std::abs(x - dom.x0) < tol_x; along = z; break;
        case BoundaryConfig::Side::right: on_side = std::abs(x - dom.x1) < tol_x; along = z; break;
      }
      if (!on_side) continue;
      if (b.span && (along < b.span->first || along > b.span->second)) continue;
      return tags[i];
    }
    return BoundaryTag::no_flow();
  };
  prob.mesh = tag_boundary(build_structured(dom, nx, nz), rule);

  switch (source.kind) {
    case SourceConfig::Kind::zero:
      prob.source = nullptr;
      break;
    case SourceConfig::Kind::example1:
      prob.source = [](double x, double z, double) {
        if (z <= -0.75) return 0.0;
        return 0.006 * std::cos(4.0 / 3.0 * std::numbers::pi * z) *
               std::sin(2.0 * std::numbers::pi * x);
      };
      break;
    case SourceConfig::Kind::expression: {
      Expression e = Expression::parse(source.expr);
      prob.source = [e](double x, double z, double t) { return e(x, z, t); };
      break;
    }
  }
  return prob;
}

std::vector<double> RunConfig::build_initial_state(const Problem& problem) const {
  if (initial.kind == InitialConfig::Kind::expression) {
    Expression e = Expression::parse(initial.expr);
    return interpolate_nodal(problem.mesh, [e](double x, double z) { return e(x, z, 0.0); });
  }
  double psi_vad = initial.psi_vad;
  return interpolate_nodal(problem.mesh, [psi_vad](double, double z) {
    return z > -0.75 ? psi_vad : -z - 0.75;
  });
}

std::vector<SchemeSpec> RunConfig::build_schemes() const {
  std::vector<SchemeSpec> specs;
  for (const SchemeConfig& s : schemes) specs.push_back(s.to_spec(stopping));
  return specs;
}

}  // namespace richards
