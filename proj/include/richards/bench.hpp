#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "richards/constitutive.hpp"
#include "richards/schemes.hpp"

namespace richards {

enum class Soil { silt_loam, beit_netofa_clay };

std::string to_string(Soil s);
VanGenuchtenParams soil_parameters(Soil s);

/// Vadose-zone injection/extraction problem: domain (0,1)x(-1,0), fixed
/// Dirichlet head -3 on the surface, no-flow elsewhere, discontinuous
/// initial state, one backward Euler step with tau = 1.
struct Example1Setup {
  Problem problem;
  std::vector<double> initial_state;
  double tau = 1.0;
  int num_steps = 1;
};

Example1Setup example1_setup(double psi_vad, int cells_per_unit);
std::vector<SchemeSpec> example1_schemes();

/// Groundwater recharge benchmark: domain (0,2)x(0,3) on a 21x31 grid,
/// transient trench Dirichlet on top, fixed water table on the right,
/// hydrostatic initial state, nine backward Euler steps.
struct Example2Setup {
  Problem problem;
  std::vector<double> initial_state;
  double tau = 0.0;
  int num_steps = 9;
  double dt_d = 0.0;
};

Example2Setup example2_setup(Soil soil);
std::vector<SchemeSpec> example2_schemes(Soil soil);

/// One (scheme, mesh) benchmark run.
struct BenchmarkRun {
  std::string example;
  std::string case_label;  // psi_vad or soil
  std::string scheme;
  std::string scheme_slug;
  std::optional<double> L;
  double h = 0.0;
  bool converged = false;
  int total_iterations = 0;
  int iterations_before_switch = 0;  // robust stage (equals total for plain schemes)
  int iterations_after_switch = 0;   // Newton stage of mixed schemes
  double wall_time_s = 0.0;
  double avg_condest = 0.0;                  // over all iterations
  double avg_condest_robust = 0.0;           // split averages for mixed schemes
  double avg_condest_newton = 0.0;
  std::string failure_reason;
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> final_field;
};

struct BenchmarkReport {
  std::vector<BenchmarkRun> runs;  // sorted by (scheme, h)

  const BenchmarkRun* find(const std::string& scheme, double h) const;
};

/// Executes one scheme on a prepared problem and fills a report row.
BenchmarkRun run_benchmark_case(const std::string& example, const std::string& case_label,
                                std::shared_ptr<const Mesh> mesh, const Problem& problem,
                                std::span<const double> initial_state, double tau,
                                int num_steps, const SchemeSpec& spec);

/// The full study grid: all schemes across the requested mesh resolutions
/// (cells per unit length; the study uses 10..60).
BenchmarkReport example1(double psi_vad, std::span<const int> resolutions, int threads = 1);
BenchmarkReport example1(double psi_vad, int threads = 1);

BenchmarkReport example2(Soil soil, int threads = 1);

/// report.csv plus one VTK file per converged run under dir/fields.
void write_report(const BenchmarkReport& report, const std::string& dir);
std::string report_csv_string(const BenchmarkReport& report);

/// Thread cap from RICHARDS_THREADS, default 1.
int threads_from_env();

}  // namespace richards
