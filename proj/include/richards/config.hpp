#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "richards/bench.hpp"
#include "richards/constitutive.hpp"
#include "richards/expression.hpp"
#include "richards/schemes.hpp"

namespace richards {

/// One boundary segment of the rectangle. `span` restricts the segment along
/// its running coordinate (x for top/bottom, z for left/right), inclusive,
/// tested at edge midpoints. Untouched boundary edges default to no-flow.
struct BoundaryConfig {
  enum class Side { top, bottom, left, right };
  enum class Kind { no_flow, dirichlet_fixed, dirichlet_expression, example2_trench };

  Side side = Side::top;
  std::optional<std::pair<double, double>> span;
  Kind kind = Kind::no_flow;
  double value = 0.0;       // dirichlet_fixed
  std::string expr;         // dirichlet_expression
  double dt_d = 1.0;        // example2_trench ramp duration
};

struct SourceConfig {
  enum class Kind { zero, example1, expression };
  Kind kind = Kind::zero;
  std::string expr;
};

struct InitialConfig {
  enum class Kind { expression, example1 };
  Kind kind = Kind::expression;
  std::string expr;
  double psi_vad = -2.0;  // example1
};

struct SchemeConfig {
  enum class Kind { l_scheme, picard, newton, mixed };
  Kind kind = Kind::l_scheme;
  double L = 0.0;
  Linearization mixed_first = Linearization::l_scheme;
  SwitchRule switch_rule;
  bool escalate = false;  // mixed with fixed-count switch only

  SchemeSpec to_spec(const StoppingRule& stopping) const;
};

/// Validated run configuration; unknown JSON keys are rejected.
struct RunConfig {
  Rectangle domain;
  int nx = 1, nz = 1;
  VanGenuchtenParams soil;
  std::vector<BoundaryConfig> boundary;
  SourceConfig source;
  InitialConfig initial;
  double tau = 1.0;
  int steps = 1;
  std::vector<SchemeConfig> schemes;
  StoppingRule stopping;
  std::vector<std::string> output_formats = {"csv", "vtk"};

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
  nlohmann::json to_json() const;

  /// Materializes the tagged mesh, constitutive model, profiles, source and
  /// the nodal initial state.
  Problem build_problem() const;
  std::vector<double> build_initial_state(const Problem& problem) const;
  std::vector<SchemeSpec> build_schemes() const;
};

}  // namespace richards
