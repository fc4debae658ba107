#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "richards/bench.hpp"
#include "richards/constitutive.hpp"
#include "richards/io.hpp"
#include "richards/mesh.hpp"
#include "richards/theory.hpp"

namespace py = pybind11;
using namespace richards;

namespace {

Soil soil_from_string(const std::string& name) {
  if (name == "silt" || name == "silt_loam") return Soil::silt_loam;
  if (name == "clay" || name == "beit_netofa_clay") return Soil::beit_netofa_clay;
  throw std::invalid_argument("soil must be 'silt' or 'clay'");
}

py::dict run_to_dict(const BenchmarkRun& r) {
  py::dict d;
  d["example"] = r.example;
  d["case"] = r.case_label;
  d["scheme"] = r.scheme;
  if (r.L)
    d["L"] = *r.L;
  else
    d["L"] = py::none();
  d["h"] = r.h;
  d["converged"] = r.converged;
  d["total_iterations"] = r.total_iterations;
  d["iterations_before_switch"] = r.iterations_before_switch;
  d["iterations_after_switch"] = r.iterations_after_switch;
  d["wall_time_s"] = r.wall_time_s;
  d["avg_condest"] = r.avg_condest;
  d["failure_reason"] = r.failure_reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(_richards, m) {
  m.doc() = "Saturated/unsaturated flow solver laboratory: van Genuchten-Mualem "
            "constitutive curves, P1 backward-Euler schemes and the benchmark drivers";

  py::class_<VanGenuchtenParams>(m, "VanGenuchtenParams")
      .def(py::init([](double theta_R, double theta_S, double alpha, double n, double K_S) {
             VanGenuchtenParams p{theta_R, theta_S, alpha, n, K_S};
             p.validate();
             return p;
           }),
           py::arg("theta_R"), py::arg("theta_S"), py::arg("alpha"), py::arg("n"),
           py::arg("K_S"))
      .def_readonly("theta_R", &VanGenuchtenParams::theta_R)
      .def_readonly("theta_S", &VanGenuchtenParams::theta_S)
      .def_readonly("alpha", &VanGenuchtenParams::alpha)
      .def_readonly("n", &VanGenuchtenParams::n)
      .def_readonly("K_S", &VanGenuchtenParams::K_S)
      .def("__repr__", [](const VanGenuchtenParams& p) {
        return "VanGenuchtenParams(theta_R=" + std::to_string(p.theta_R) +
               ", theta_S=" + std::to_string(p.theta_S) + ", alpha=" + std::to_string(p.alpha) +
               ", n=" + std::to_string(p.n) + ", K_S=" + std::to_string(p.K_S) + ")";
      });

  py::class_<LipschitzInfo>(m, "LipschitzInfo")
      .def_readonly("L_theta", &LipschitzInfo::L_theta)
      .def_readonly("L_K_estimate", &LipschitzInfo::L_K_estimate)
      .def_readonly("K_m", &LipschitzInfo::K_m)
      .def_readonly("K_M", &LipschitzInfo::K_M)
      .def_readonly("K_globally_lipschitz", &LipschitzInfo::K_globally_lipschitz);

  m.def("water_content", py::vectorize([](VanGenuchtenParams p, double psi) {
          return water_content(p, psi);
        }),
        py::arg("params"), py::arg("psi"));
  m.def("dtheta_dpsi", py::vectorize([](VanGenuchtenParams p, double psi) {
          return dtheta_dpsi(p, psi);
        }),
        py::arg("params"), py::arg("psi"));
  m.def("conductivity", py::vectorize([](VanGenuchtenParams p, double psi) {
          return conductivity(p, psi);
        }),
        py::arg("params"), py::arg("psi"));
  m.def("dK_dpsi", py::vectorize([](VanGenuchtenParams p, double psi) {
          return dK_dpsi(p, psi);
        }),
        py::arg("params"), py::arg("psi"));
  m.def("lipschitz_info", &lipschitz_info, py::arg("params"), py::arg("psi_lo") = -50.0,
        py::arg("psi_hi") = 0.0);

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("num_boundary_edges",
                             [](const Mesh& m) { return m.boundary_edges().size(); })
      .def_property_readonly("spacing", [](const Mesh& m) {
        return py::make_tuple(m.spacing_x(), m.spacing_z());
      })
      .def("nodes",
           [](const Mesh& mesh) {
             py::array_t<double> arr({mesh.num_nodes(), 2});
             auto view = arr.mutable_unchecked<2>();
             for (int i = 0; i < mesh.num_nodes(); ++i) {
               view(i, 0) = mesh.nodes()[i].x;
               view(i, 1) = mesh.nodes()[i].z;
             }
             return arr;
           })
      .def("triangles",
           [](const Mesh& mesh) {
             py::array_t<int> arr({mesh.num_triangles(), 3});
             auto view = arr.mutable_unchecked<2>();
             for (int t = 0; t < mesh.num_triangles(); ++t)
               for (int v = 0; v < 3; ++v) view(t, v) = mesh.triangles()[t][v];
             return arr;
           })
      .def("write_vtk",
           [](const Mesh& mesh, const std::string& path) { write_mesh_vtk(mesh, path); });

  m.def(
      "build_structured",
      [](double x0, double x1, double z0, double z1, int nx, int nz) {
        return build_structured({x0, x1, z0, z1}, nx, nz);
      },
      py::arg("x0"), py::arg("x1"), py::arg("z0"), py::arg("z1"), py::arg("nx"), py::arg("nz"));

  m.def(
      "theoretical_rate",
      [](double L, double K_m, double tau, double C_omega) {
        TheoryInputs in;
        in.L = L;
        in.K_m = K_m;
        in.tau = tau;
        in.C_omega = C_omega;
        return theoretical_rate(in);
      },
      py::arg("L"), py::arg("K_m"), py::arg("tau"), py::arg("C_omega"));
  m.def(
      "lscheme_condition",
      [](double L, double L_theta, double L_K, double K_m, double M, double tau) {
        TheoryInputs in;
        in.L = L;
        in.L_theta = L_theta;
        in.L_K = L_K;
        in.K_m = K_m;
        in.M = M;
        in.tau = tau;
        ConditionCheck c = lscheme_condition(in);
        return py::make_tuple(c.satisfied, c.slack);
      },
      py::arg("L"), py::arg("L_theta"), py::arg("L_K"), py::arg("K_m"), py::arg("M"),
      py::arg("tau"));
  m.def(
      "lscheme_condition_constant_k",
      [](double L, double L_theta) {
        ConditionCheck c = lscheme_condition_constant_k(L, L_theta);
        return py::make_tuple(c.satisfied, c.slack);
      },
      py::arg("L"), py::arg("L_theta"));
  m.def(
      "poincare_constant",
      [](double x0, double x1, double z0, double z1) {
        return poincare_constant({x0, x1, z0, z1});
      },
      py::arg("x0"), py::arg("x1"), py::arg("z0"), py::arg("z1"));

  py::class_<BenchmarkReport>(m, "BenchmarkReport")
      .def("rows",
           [](const BenchmarkReport& rep) {
             py::list rows;
             for (const BenchmarkRun& r : rep.runs) rows.append(run_to_dict(r));
             return rows;
           })
      .def("csv", &report_csv_string)
      .def(
          "write",
          [](const BenchmarkReport& rep, const std::string& dir) { write_report(rep, dir); },
          py::arg("dir"));

  m.def(
      "example1",
      [](double psi_vad, std::vector<int> resolutions, int threads) {
        if (resolutions.empty()) return example1(psi_vad, threads);
        return example1(psi_vad, resolutions, threads);
      },
      py::arg("psi_vad"), py::arg("resolutions") = std::vector<int>{}, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "example2",
      [](const std::string& soil, int threads) {
        return example2(soil_from_string(soil), threads);
      },
      py::arg("soil"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def(
      "contraction_sweep",
      [](const std::string& csv_path) {
        std::vector<ContractionRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_contraction_sweep(default_contraction_cases());
          if (!csv_path.empty()) write_contraction_csv(rows, csv_path);
        }
        py::list out;
        for (const ContractionRow& r : rows) {
          py::dict d;
          d["L"] = r.L;
          d["tau"] = r.tau;
          d["K_m"] = r.K_m;
          d["C_omega"] = r.C_omega;
          d["theoretical_rate"] = r.rate;
          d["max_measured_ratio"] = r.max_ratio;
          d["condition_slack"] = r.slack;
          out.append(d);
        }
        return out;
      },
      py::arg("csv_path") = std::string());
}
