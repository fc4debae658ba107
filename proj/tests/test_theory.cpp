#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "richards/theory.hpp"

using namespace richards;

TEST_CASE("theoretical rate formula") {
  TheoryInputs in;
  in.L = 0.25;
  in.K_m = 1.0;
  in.tau = 0.1;
  in.C_omega = 1.0;
  CHECK(theoretical_rate(in) == doctest::Approx(0.8451542547285166).epsilon(1e-12));

  // tau -> 0 drives the rate to 1
  in.tau = 1e-12;
  CHECK(theoretical_rate(in) > 0.999999);

  // monotonicity: decreasing in tau and K_m, increasing in L
  auto rate = [](double L, double K_m, double tau) {
    TheoryInputs t;
    t.L = L;
    t.K_m = K_m;
    t.tau = tau;
    t.C_omega = 0.5;
    return theoretical_rate(t);
  };
  CHECK(rate(0.2, 1.0, 0.2) < rate(0.2, 1.0, 0.1));
  CHECK(rate(0.2, 2.0, 0.1) < rate(0.2, 1.0, 0.1));
  CHECK(rate(0.4, 1.0, 0.1) > rate(0.2, 1.0, 0.1));

  in.L = 0.0;
  CHECK_THROWS_AS(theoretical_rate(in), std::invalid_argument);
}

TEST_CASE("convergence condition") {
  SUBCASE("constant K reduces to L >= L_theta/2") {
    TheoryInputs in;
    in.L_theta = 0.2;
    in.L = 0.1;
    in.L_K = 0.0;
    in.K_m = 1.0;
    in.tau = 123.0;
    in.M = 5.0;
    CHECK(lscheme_condition(in).satisfied);  // slack = 2/0.2 - 1/0.1 = 0
    CHECK(lscheme_condition(in).slack == doctest::Approx(0.0));
    CHECK(lscheme_condition_constant_k(0.1, 0.2).satisfied);
    CHECK(!lscheme_condition_constant_k(0.0999, 0.2).satisfied);
  }

  SUBCASE("the optimal L and tau sit exactly on the boundary") {
    TheoryInputs in;
    in.L_theta = 0.2341;
    in.L = in.L_theta;
    in.L_K = 0.8;
    in.K_m = 0.05;
    in.M = 3.0;
    in.tau = in.K_m / (in.L_theta * (in.M + 1.0) * (in.M + 1.0) * in.L_K * in.L_K);
    ConditionCheck c = lscheme_condition(in);
    CHECK(std::abs(c.slack) < 1e-12);
    in.tau *= 1.0 - 1e-6;
    CHECK(lscheme_condition(in).satisfied);
    in.tau *= (1.0 + 1e-6) / (1.0 - 1e-6);
    CHECK(!lscheme_condition(in).satisfied);
  }
}

TEST_CASE("Poincare constant diam/pi") {
  CHECK(poincare_constant({0.0, 1.0, 0.0, 1.0}) ==
        doctest::Approx(0.45015815807855303).epsilon(1e-12));
  CHECK(poincare_constant({0.0, 2.0, 0.0, 3.0}) ==
        doctest::Approx(1.1476826161227637).epsilon(1e-12));
  CHECK_THROWS_AS(poincare_constant({0.0, 0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("measured contraction ratios obey the theoretical bound") {
  const double l_theta = contraction_problem_l_theta();
  Problem p = make_contraction_problem(10, 10, 1.0);
  std::vector<double> initial = interpolate_nodal(p.mesh, [](double, double) { return -2.0; });
  double c_omega = poincare_constant(p.mesh.domain());

  for (double mult : {0.5, 1.0, 4.0}) {
    double L = mult * l_theta, tau = 0.1;
    std::vector<double> ref = compute_tight_reference(p, initial, tau, L, tau);
    std::vector<double> ratios = measure_contraction(p, initial, tau, L, tau, ref);
    REQUIRE(!ratios.empty());
    TheoryInputs in;
    in.L = L;
    in.K_m = 1.0;
    in.tau = tau;
    in.C_omega = c_omega;
    double bound = theoretical_rate(in);
    for (double r : ratios) CHECK(r <= bound + 1e-10);
  }
}

TEST_CASE("contraction measurement edge cases") {
  Problem p = make_contraction_problem(8, 8, 1.0);
  std::vector<double> initial = interpolate_nodal(p.mesh, [](double, double) { return -2.0; });
  double L = contraction_problem_l_theta(), tau = 0.5;
  std::vector<double> ref = compute_tight_reference(p, initial, tau, L, tau);

  SUBCASE("converged start gives an empty ratio list") {
    std::vector<double> ratios = measure_contraction(p, ref, tau, L, tau, ref);
    CHECK(ratios.empty());
  }

  SUBCASE("very large L contracts slowly, ratios approach one from below") {
    double big = 2000.0 * L;
    std::vector<double> ref_big = compute_tight_reference(p, initial, tau, big, tau, 1e-12,
                                                          200000);
    std::vector<double> ratios = measure_contraction(p, initial, tau, big, tau, ref_big, 10);
    REQUIRE(!ratios.empty());
    for (double r : ratios) CHECK(r < 1.0);
    CHECK(ratios.back() > 0.9);
  }
}

TEST_CASE("contraction rate is mesh independent (max ratio stable under refinement)") {
  const double l_theta = contraction_problem_l_theta();
  double L = l_theta, tau = 0.1;
  double max_ratio[2] = {0.0, 0.0};
  int idx = 0;
  for (int cells : {10, 20}) {
    Problem p = make_contraction_problem(cells, cells, 1.0);
    std::vector<double> initial =
        interpolate_nodal(p.mesh, [](double, double) { return -2.0; });
    std::vector<double> ref = compute_tight_reference(p, initial, tau, L, tau);
    std::vector<double> ratios = measure_contraction(p, initial, tau, L, tau, ref);
    for (double r : ratios) max_ratio[idx] = std::max(max_ratio[idx], r);
    ++idx;
  }
  CHECK(max_ratio[1] <= max_ratio[0] * 1.05);
}

TEST_CASE("sweep rows and CSV schema") {
  std::vector<ContractionCase> cases = {{8, 8, contraction_problem_l_theta(), 0.5}};
  std::vector<ContractionRow> rows = run_contraction_sweep(cases);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].max_ratio <= rows[0].rate + 1e-10);
  CHECK(rows[0].slack >= 0.0);
  CHECK(rows[0].ratios_measured > 0);

  std::string path = "test_theory_sweep.csv";
  write_contraction_csv(rows, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "L,tau,K_m,C_omega,theoretical_rate,max_measured_ratio,condition_slack");
  std::string row;
  std::getline(in, row);
  int commas = 0;
  for (char c : row) commas += c == ',';
  CHECK(commas == 6);
  std::remove(path.c_str());
}

TEST_CASE("default sweep covers at least 20 configurations") {
  CHECK(default_contraction_cases().size() >= 20);
}
