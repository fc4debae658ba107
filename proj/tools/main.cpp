// Command line front end: benchmark and theory subcommands plus generic
// config-driven runs. Machine-readable output goes to files under --out,
// progress to stderr. Exit codes: 0 success, 2 config error, 3 when any
// scheme run failed to converge (reports are still written).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "richards/bench.hpp"
#include "richards/config.hpp"
#include "richards/io.hpp"
#include "richards/theory.hpp"

namespace fs = std::filesystem;
using namespace richards;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRunFailed = 3;

int report_outcome(const BenchmarkReport& report) {
  int failures = 0;
  for (const BenchmarkRun& r : report.runs) {
    std::cerr << "  " << r.scheme << " h=" << r.h << ": "
              << (r.converged ? "converged" : "FAILED") << " after " << r.total_iterations
              << " iterations\n";
    if (!r.converged) ++failures;
  }
  return failures == 0 ? kExitOk : kExitRunFailed;
}

int run_example1(double psi_vad, const std::string& out, bool dump_mesh, int threads) {
  if (psi_vad != -2.0 && psi_vad != -3.0) {
    std::cerr << "error: --psi-vad must be -2 or -3\n";
    return kExitConfig;
  }
  std::cerr << "running example1, psi_vad=" << psi_vad << "\n";
  BenchmarkReport report = example1(psi_vad, threads);
  write_report(report, out);
  if (dump_mesh && !report.runs.empty() && report.runs.front().mesh)
    write_mesh_vtk(*report.runs.front().mesh, (fs::path(out) / "mesh.vtk").string());
  return report_outcome(report);
}

int run_example2(const std::string& soil_name, const std::string& out, bool dump_mesh,
                 int threads) {
  Soil soil;
  if (soil_name == "silt" || soil_name == "silt_loam")
    soil = Soil::silt_loam;
  else if (soil_name == "clay" || soil_name == "beit_netofa_clay")
    soil = Soil::beit_netofa_clay;
  else {
    std::cerr << "error: --soil must be silt or clay\n";
    return kExitConfig;
  }
  std::cerr << "running example2, soil=" << to_string(soil) << "\n";
  BenchmarkReport report = example2(soil, threads);
  write_report(report, out);
  if (dump_mesh && !report.runs.empty() && report.runs.front().mesh)
    write_mesh_vtk(*report.runs.front().mesh, (fs::path(out) / "mesh.vtk").string());
  return report_outcome(report);
}

int run_theory(const std::string& out) {
  std::cerr << "running contraction sweep\n";
  std::vector<ContractionCase> cases = default_contraction_cases();
  std::vector<ContractionRow> rows = run_contraction_sweep(cases);
  fs::create_directories(out);
  write_contraction_csv(rows, (fs::path(out) / "theory.csv").string());
  for (const ContractionRow& r : rows)
    std::cerr << "  L=" << r.L << " tau=" << r.tau << " rate=" << r.rate
              << " measured=" << r.max_ratio << "\n";
  return kExitOk;
}

int run_config(const std::string& config_path, const std::string& out, bool dump_mesh,
               int threads) {
  RunConfig config = RunConfig::from_file(config_path);
  Problem problem = config.build_problem();
  std::vector<double> initial = config.build_initial_state(problem);
  std::vector<SchemeSpec> schemes = config.build_schemes();
  auto mesh = std::make_shared<const Mesh>(problem.mesh);

  std::cerr << "running " << schemes.size() << " scheme(s) on a " << config.nx << "x"
            << config.nz << " mesh\n";
  (void)threads;  // config runs share one mesh; schemes run sequentially
  BenchmarkReport report;
  for (const SchemeSpec& spec : schemes)
    report.runs.push_back(run_benchmark_case("run", "config", mesh, problem, initial,
                                             config.tau, config.steps, spec));

  bool want_csv = false, want_vtk = false;
  for (const std::string& f : config.output_formats) {
    want_csv |= f == "csv";
    want_vtk |= f == "vtk";
  }
  if (!want_vtk)
    for (BenchmarkRun& r : report.runs) r.final_field.clear();
  if (want_csv || want_vtk) write_report(report, out);
  if (dump_mesh) write_mesh_vtk(*mesh, (fs::path(out) / "mesh.vtk").string());
  return report_outcome(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Richards' equation linearization laboratory"};
  app.require_subcommand(1);

  std::string out_dir;
  std::string config_path;
  std::string soil = "silt";
  double psi_vad = -2.0;
  bool dump_mesh = false;
  int threads = threads_from_env();

  CLI::App* cmd_run = app.add_subcommand("run", "solve a problem described by a JSON config");
  cmd_run->add_option("--config", config_path, "config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory")->required();
  cmd_run->add_flag("--write-mesh", dump_mesh, "also dump the mesh as VTK");

  CLI::App* cmd_ex1 = app.add_subcommand("example1", "vadose-zone injection benchmark");
  cmd_ex1->add_option("--psi-vad", psi_vad, "initial vadose pressure head (-2 or -3)")
      ->required();
  cmd_ex1->add_option("--out", out_dir, "output directory")->required();
  cmd_ex1->add_flag("--write-mesh", dump_mesh, "also dump the coarsest mesh as VTK");

  CLI::App* cmd_ex2 = app.add_subcommand("example2", "groundwater recharge benchmark");
  cmd_ex2->add_option("--soil", soil, "soil type: silt or clay")->required();
  cmd_ex2->add_option("--out", out_dir, "output directory")->required();
  cmd_ex2->add_flag("--write-mesh", dump_mesh, "also dump the mesh as VTK");

  CLI::App* cmd_theory = app.add_subcommand("theory", "contraction-rate sweep");
  cmd_theory->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_run->parsed()) return run_config(config_path, out_dir, dump_mesh, threads);
    if (cmd_ex1->parsed()) return run_example1(psi_vad, out_dir, dump_mesh, threads);
    if (cmd_ex2->parsed()) return run_example2(soil, out_dir, dump_mesh, threads);
    if (cmd_theory->parsed()) return run_theory(out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
