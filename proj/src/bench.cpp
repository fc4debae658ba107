#include "richards/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <thread>

#include "richards/io.hpp"

namespace richards {

std::string to_string(Soil s) {
  return s == Soil::silt_loam ? "silt_loam" : "beit_netofa_clay";
}

VanGenuchtenParams soil_parameters(Soil s) {
  if (s == Soil::silt_loam) return {0.131, 0.396, 0.423, 2.06, 4.96e-2};
  return {0.0, 0.446, 0.152, 1.17, 8.2e-4};
}

namespace {

const VanGenuchtenParams kExample1Soil{0.026, 0.42, 0.95, 2.9, 0.12};
constexpr double kInterfaceZ = -0.75;  // vadose/groundwater transition

}  // namespace

Example1Setup example1_setup(double psi_vad, int cells_per_unit) {
  Example1Setup s;
  Mesh mesh = build_structured({0.0, 1.0, -1.0, 0.0}, cells_per_unit, cells_per_unit);
  s.problem.mesh = tag_boundary(std::move(mesh), [](double, double z) {
    return std::abs(z) < 1e-9 ? BoundaryTag::fixed(-3.0) : BoundaryTag::no_flow();
  });
  s.problem.model = ConstitutiveModel::van_genuchten(kExample1Soil);
  s.problem.source = [](double x, double z, double) {
    if (z <= kInterfaceZ) return 0.0;
    return 0.006 * std::cos(4.0 / 3.0 * std::numbers::pi * z) *
           std::sin(2.0 * std::numbers::pi * x);
  };
  // Nodes on the interface belong to the groundwater zone (half-open split).
  s.initial_state = interpolate_nodal(s.problem.mesh, [psi_vad](double, double z) {
    return z > kInterfaceZ ? psi_vad : -z + kInterfaceZ;
  });
  s.tau = 1.0;
  s.num_steps = 1;
  return s;
}

std::vector<SchemeSpec> example1_schemes() {
  SwitchRule sw = SwitchRule::threshold(2.0, 0.0);
  return {
      SchemeSpec::l_scheme(0.25),
      SchemeSpec::l_scheme(0.15),
      SchemeSpec::modified_picard(),
      SchemeSpec::newton(),
      SchemeSpec::mixed(Linearization::modified_picard, 0.0, sw),
      SchemeSpec::mixed(Linearization::l_scheme, 0.15, sw),
  };
}

Example2Setup example2_setup(Soil soil) {
  Example2Setup s;
  s.dt_d = soil == Soil::silt_loam ? 1.0 / 16.0 : 1.0;
  s.tau = soil == Soil::silt_loam ? 1.0 / 48.0 : 1.0 / 3.0;
  s.num_steps = 9;

  Mesh mesh = build_structured({0.0, 2.0, 0.0, 3.0}, 20, 30);
  constexpr int kTrench = 0, kWaterTable = 1;  // profile ids below
  s.problem.mesh = tag_boundary(std::move(mesh), [](double x, double z) {
    if (std::abs(z - 3.0) < 1e-9 && x <= 1.0) return BoundaryTag::transient(kTrench);
    if (std::abs(x - 2.0) < 1e-9 && z <= 1.0) return BoundaryTag::transient(kWaterTable);
    return BoundaryTag::no_flow();
  });
  double dt_d = s.dt_d;
  s.problem.profiles.push_back([dt_d](double, double, double t) {
    return t <= dt_d ? -2.0 + 2.2 * t / dt_d : 0.2;
  });
  s.problem.profiles.push_back([](double, double z, double) { return 1.0 - z; });
  s.problem.model = ConstitutiveModel::van_genuchten(soil_parameters(soil));
  s.initial_state = interpolate_nodal(s.problem.mesh, [](double, double z) { return 1.0 - z; });
  return s;
}

std::vector<SchemeSpec> example2_schemes(Soil soil) {
  VanGenuchtenParams p = soil_parameters(soil);
  double l1 = lipschitz_info(p, -50.0, 0.0).L_theta;  // sup theta'
  double l2 = soil == Soil::silt_loam ? 3.5e-2 : 6.5e-3;
  SwitchRule sw = SwitchRule::threshold(0.2, 0.0);
  return {
      SchemeSpec::l_scheme(l1),
      SchemeSpec::l_scheme(l2),
      SchemeSpec::modified_picard(),
      SchemeSpec::newton(),
      SchemeSpec::mixed(Linearization::l_scheme, l1, sw),
      SchemeSpec::mixed(Linearization::l_scheme, l2, sw),
      SchemeSpec::mixed(Linearization::modified_picard, 0.0, sw),
  };
}

BenchmarkRun run_benchmark_case(const std::string& example, const std::string& case_label,
                                std::shared_ptr<const Mesh> mesh, const Problem& problem,
                                std::span<const double> initial_state, double tau,
                                int num_steps, const SchemeSpec& spec) {
  BenchmarkRun run;
  run.example = example;
  run.case_label = case_label;
  run.scheme = spec.name();
  run.scheme_slug = spec.slug();
  if (spec.kind == SchemeSpec::Kind::l_scheme ||
      (spec.kind == SchemeSpec::Kind::mixed && spec.mixed_first == Linearization::l_scheme))
    run.L = spec.L;
  run.h = mesh->spacing_x();
  run.mesh = std::move(mesh);

  auto started = std::chrono::steady_clock::now();
  SimulationResult sim = run_simulation(problem, initial_state, tau, num_steps, spec);
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  run.converged = sim.converged;
  run.total_iterations = sim.total_iterations();
  run.iterations_after_switch = sim.iterations_with(Linearization::newton);
  run.iterations_before_switch = run.total_iterations - run.iterations_after_switch;
  if (spec.kind == SchemeSpec::Kind::newton) {
    run.iterations_before_switch = 0;
    run.iterations_after_switch = run.total_iterations;
  }
  run.avg_condest = sim.mean_condest_all();
  if (spec.kind == SchemeSpec::Kind::mixed) {
    run.avg_condest_robust = sim.mean_condest(spec.mixed_first);
    run.avg_condest_newton = sim.mean_condest(Linearization::newton);
  }
  if (!sim.converged && !sim.steps.empty()) {
    const IterationTrace& t = sim.steps.back().trace;
    run.failure_reason = to_string(t.failure);
  }
  if (!sim.steps.empty()) run.final_field = sim.steps.back().field;
  return run;
}

namespace {

void sort_report(BenchmarkReport& report) {
  std::stable_sort(report.runs.begin(), report.runs.end(),
                   [](const BenchmarkRun& a, const BenchmarkRun& b) {
                     if (a.scheme != b.scheme) return a.scheme < b.scheme;
                     return a.h < b.h;
                   });
}

// Runs independent cases, optionally on a small worker pool. Results land
// in input order regardless of the thread count.
template <typename Fn>
void run_indexed(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

std::string format_psi_vad(double psi_vad) {
  std::ostringstream os;
  os << psi_vad;
  return os.str();
}

}  // namespace

BenchmarkReport example1(double psi_vad, std::span<const int> resolutions, int threads) {
  struct Case {
    Example1Setup setup;
    std::shared_ptr<const Mesh> mesh;
    SchemeSpec spec;
  };
  std::vector<Case> cases;
  for (int res : resolutions) {
    Example1Setup setup = example1_setup(psi_vad, res);
    auto mesh = std::make_shared<const Mesh>(setup.problem.mesh);
    for (const SchemeSpec& spec : example1_schemes()) cases.push_back({setup, mesh, spec});
  }

  BenchmarkReport report;
  report.runs.resize(cases.size());
  run_indexed(static_cast<int>(cases.size()), threads, [&](int i) {
    const Case& c = cases[static_cast<std::size_t>(i)];
    report.runs[static_cast<std::size_t>(i)] =
        run_benchmark_case("example1", format_psi_vad(psi_vad), c.mesh, c.setup.problem,
                           c.setup.initial_state, c.setup.tau, c.setup.num_steps, c.spec);
  });
  sort_report(report);
  return report;
}

BenchmarkReport example1(double psi_vad, int threads) {
  const int resolutions[] = {10, 20, 30, 40, 50, 60};
  return example1(psi_vad, resolutions, threads);
}

BenchmarkReport example2(Soil soil, int threads) {
  Example2Setup setup = example2_setup(soil);
  auto mesh = std::make_shared<const Mesh>(setup.problem.mesh);
  std::vector<SchemeSpec> schemes = example2_schemes(soil);

  BenchmarkReport report;
  report.runs.resize(schemes.size());
  run_indexed(static_cast<int>(schemes.size()), threads, [&](int i) {
    report.runs[static_cast<std::size_t>(i)] =
        run_benchmark_case("example2", to_string(soil), mesh, setup.problem,
                           setup.initial_state, setup.tau, setup.num_steps,
                           schemes[static_cast<std::size_t>(i)]);
  });
  sort_report(report);
  return report;
}

const BenchmarkRun* BenchmarkReport::find(const std::string& scheme, double h) const {
  for (const BenchmarkRun& r : runs)
    if (r.scheme == scheme && std::abs(r.h - h) < 1e-12) return &r;
  return nullptr;
}

std::string report_csv_string(const BenchmarkReport& report) {
  CsvWriter csv;
  csv.header({"example", "soil_or_psivad", "scheme", "L", "h", "converged",
              "total_iterations", "iterations_before_switch", "iterations_after_switch",
              "wall_time_s", "avg_condest", "failure_reason"});
  for (const BenchmarkRun& r : report.runs) {
    csv.begin_row();
    csv.field(r.example);
    csv.field(r.case_label);
    csv.field(r.scheme);
    if (r.L)
      csv.field(*r.L);
    else
      csv.field(std::string());
    csv.field(r.h);
    csv.field(r.converged);
    csv.field(r.total_iterations);
    csv.field(r.iterations_before_switch);
    csv.field(r.iterations_after_switch);
    csv.field(r.wall_time_s);
    csv.field(r.avg_condest);
    csv.field(r.failure_reason);
  }
  return csv.str();
}

void write_report(const BenchmarkReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_file_atomic((fs::path(dir) / "report.csv").string(), report_csv_string(report));

  fs::path fields = fs::path(dir) / "fields";
  bool any_field = false;
  for (const BenchmarkRun& r : report.runs)
    if (r.converged && !r.final_field.empty()) any_field = true;
  if (!any_field) return;
  fs::create_directories(fields);
  for (const BenchmarkRun& r : report.runs) {
    if (!r.converged || r.final_field.empty() || !r.mesh) continue;
    std::ostringstream name;
    name << r.example << '_' << r.case_label << '_' << r.scheme_slug << "_h"
         << std::lround(1.0 / r.h) << ".vtk";
    std::string fname = name.str();
    for (char& c : fname)
      if (c == ' ' || c == '/' || c == '\\') c = '_';
    write_field_vtk(*r.mesh, r.final_field, (fields / fname).string());
  }
}

int threads_from_env() {
  const char* env = std::getenv("RICHARDS_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

}  // namespace richards
