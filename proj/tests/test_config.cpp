#include <doctest.h>

#include <cmath>
#include <numbers>

#include "richards/config.hpp"

using namespace richards;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "problem": {
      "domain": {"x0": 0.0, "x1": 1.0, "z0": -1.0, "z1": 0.0},
      "mesh": {"nx": 6, "nz": 6},
      "soil": {"theta_r": 0.026, "theta_s": 0.42, "alpha": 0.95, "n": 2.9, "k_s": 0.12},
      "boundary": [
        {"side": "top", "kind": "dirichlet_fixed", "value": -3.0}
      ],
      "source": {"kind": "zero"},
      "initial": {"kind": "expression", "expr": "-2"},
      "tau": 1.0,
      "steps": 1
    },
    "schemes": [{"kind": "l_scheme", "L": 0.25}],
    "stopping": {"eps_a": 1e-5, "eps_r": 1e-5, "max_iter": 50},
    "output": {"formats": ["csv"]}
  })");
}

}  // namespace

TEST_CASE("expression grammar") {
  Expression e = Expression::parse("0.006*cos(4/3*pi*z)*sin(2*pi*x)");
  double x = 0.3, z = -0.4;
  double expect = 0.006 * std::cos(4.0 / 3.0 * std::numbers::pi * z) *
                  std::sin(2.0 * std::numbers::pi * x);
  CHECK(e(x, z, 0.0) == doctest::Approx(expect).epsilon(1e-15));

  CHECK(Expression::parse("1 - z")(0.0, 0.25, 0.0) == doctest::Approx(0.75));
  CHECK(Expression::parse("-2 + 2.2*t/0.0625")(0, 0, 0.03125) == doctest::Approx(-0.9));
  CHECK(Expression::parse("π")(0, 0, 0) == doctest::Approx(std::numbers::pi));
  CHECK(Expression::parse("2*(3+4)")(0, 0, 0) == 14.0);
  CHECK(Expression::parse("-x*-z")(2, 3, 0) == 6.0);
  CHECK(Expression::parse("1/2/2")(0, 0, 0) == 0.25);  // left associative

  CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("foo(3)"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("sin 3"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("(1+2"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("1 2"), ConfigError);
}

TEST_CASE("config parses, validates and round-trips idempotently") {
  RunConfig c = RunConfig::from_json(minimal_config());
  CHECK(c.nx == 6);
  CHECK(c.soil.n == 2.9);
  CHECK(c.schemes.size() == 1);
  CHECK(c.output_formats == std::vector<std::string>{"csv"});

  json serialized = c.to_json();
  RunConfig c2 = RunConfig::from_json(serialized);
  CHECK(c2.to_json() == serialized);  // parse-serialize is idempotent
}

TEST_CASE("unknown keys are rejected everywhere") {
  json j = minimal_config();
  j["problem"]["typo"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["problem"]["mesh"]["n"] = 3;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["problem"]["boundary"][0]["profile"] = "x";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["extra"] = true;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("invalid values are diagnosed") {
  json j = minimal_config();
  j["problem"]["soil"]["n"] = 0.9;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["problem"]["tau"] = 0.0;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["problem"]["boundary"][0]["kind"] = "nonsense";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["schemes"] = json::array();
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  j = minimal_config();
  j["problem"]["source"] = "expression: nope(";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("string shorthands for source and initial") {
  json j = minimal_config();
  j["problem"]["source"] = "expression: 0.5*x";
  j["problem"]["initial"] = "expression: 1 - z";
  RunConfig c = RunConfig::from_json(j);
  CHECK(c.source.kind == SourceConfig::Kind::expression);
  CHECK(c.initial.expr == " 1 - z");
}

TEST_CASE("built problem matches the recharge benchmark wiring") {
  json j = json::parse(R"({
    "problem": {
      "domain": {"x0": 0.0, "x1": 2.0, "z0": 0.0, "z1": 3.0},
      "mesh": {"nx": 20, "nz": 30},
      "soil": {"theta_r": 0.131, "theta_s": 0.396, "alpha": 0.423, "n": 2.06, "k_s": 0.0496},
      "boundary": [
        {"side": "top", "span": [0.0, 1.0], "kind": "example2_trench", "dt_d": 0.0625},
        {"side": "right", "span": [0.0, 1.0], "kind": "example2_watertable"}
      ],
      "source": "zero",
      "initial": {"kind": "expression", "expr": "1 - z"},
      "tau": 0.020833333333333332,
      "steps": 9
    },
    "schemes": [
      {"kind": "l_scheme", "L": 0.045},
      {"kind": "picard"},
      {"kind": "newton"},
      {"kind": "mixed", "first": "picard", "switch": {"delta_a": 0.2, "delta_r": 0.0}},
      {"kind": "mixed", "first": "l_scheme", "L": 0.035, "switch": {"fixed_iterations": 4}}
    ]
  })");
  RunConfig c = RunConfig::from_json(j);
  Problem p = c.build_problem();
  CHECK(p.mesh.num_nodes() == 651);
  REQUIRE(p.profiles.size() == 2);
  CHECK(p.profiles[0](0.5, 3.0, 0.03125) == doctest::Approx(-0.9));
  CHECK(p.profiles[1](2.0, 0.25, 9.9) == doctest::Approx(0.75));
  CHECK(!p.source);

  int trench = 0, table = 0;
  for (const BoundaryEdge& e : p.mesh.boundary_edges()) {
    if (e.tag.kind == BoundaryTag::Kind::dirichlet_transient)
      (e.tag.profile == 0 ? trench : table)++;
  }
  CHECK(trench == 10);
  CHECK(table == 10);

  std::vector<double> init = c.build_initial_state(p);
  CHECK(init[0] == doctest::Approx(1.0));

  std::vector<SchemeSpec> specs = c.build_schemes();
  REQUIRE(specs.size() == 5);
  CHECK(specs[0].name() == "L-scheme(0.045)");
  CHECK(specs[3].name() == "Picard/Newton");
  CHECK(specs[4].switch_rule.fixed_iterations == 4);
}

TEST_CASE("escalate flag wiring") {
  json j = minimal_config();
  j["schemes"] = json::array({json{{"kind", "mixed"},
                                   {"first", "l_scheme"},
                                   {"L", 0.15},
                                   {"switch", {{"fixed_iterations", 2}}},
                                   {"escalate", true}}});
  RunConfig c = RunConfig::from_json(j);
  std::vector<SchemeSpec> specs = c.build_schemes();
  CHECK(specs[0].escalate_robust_on_failure);
  CHECK(c.to_json()["schemes"][0]["escalate"] == true);

  // escalation needs a fixed-count switch
  j["schemes"][0]["switch"] = {{"delta_a", 0.2}, {"delta_r", 0.0}};
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("example1 initial shorthand splits at the interface") {
  json j = minimal_config();
  j["problem"]["initial"] = {{"kind", "example1"}, {"psi_vad", -2.0}};
  j["problem"]["source"] = {{"kind", "example1"}};
  RunConfig c = RunConfig::from_json(j);
  Problem p = c.build_problem();
  std::vector<double> init = c.build_initial_state(p);
  for (int i = 0; i < p.mesh.num_nodes(); ++i) {
    double z = p.mesh.nodes()[i].z;
    if (z > -0.75 + 1e-12)
      CHECK(init[i] == -2.0);
    else
      CHECK(init[i] == doctest::Approx(-z - 0.75));
  }
  CHECK(p.source(0.25, -0.5, 0.0) != 0.0);
  CHECK(p.source(0.25, -0.9, 0.0) == 0.0);
}
