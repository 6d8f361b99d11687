#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kagome/config.hpp"
#include "kagome/io.hpp"
#include "kagome/recipes.hpp"
#include "kagome/tightbinding.hpp"

namespace py = pybind11;
using namespace kagome;

namespace {

LatticeSpec make_spec(int cells_per_side, double imbalance, double spacing) {
  LatticeSpec s;
  s.cells_per_side = cells_per_side;
  s.imbalance = imbalance;
  s.spacing = spacing;
  s.validate();
  return s;
}

Eigen::MatrixXd positions(const Lattice& lat) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(lat.size()), 3);
  for (std::size_t i = 0; i < lat.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = lat.positions[i].transpose();
  return out;
}

py::dict modes_dict(const ModeSet& m) {
  std::vector<std::string> cls;
  for (auto c : m.cls) cls.emplace_back(to_string(c));
  py::dict d;
  d["eigenvalues"] = m.eigenvalues;
  d["vectors"] = m.vectors;
  d["ipr"] = m.ipr;
  d["class"] = cls;
  d["corner_weight"] = m.corner_weight;
  d["sublattice_weight"] = m.sublattice_weight;
  d["gap"] = m.gap;
  d["in_gap_corner_modes"] = m.in_gap_corner_modes();
  return d;
}

RunConfig config_from(const std::map<std::string, std::string>& settings) {
  RunConfig cfg;
  for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
  return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Breathing-Kagome atomic metasurface engine";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Polarization>(m, "Polarization")
      .def_static("parse", &Polarization::parse)
      .def_static("from_vector", &Polarization::from_vector)
      .def_readonly("vector", &Polarization::vector)
      .def("__repr__", &Polarization::describe);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init(&make_spec), py::arg("cells_per_side") = 10, py::arg("imbalance") = 0.0,
           py::arg("spacing") = 0.1)
      .def_readonly("cells_per_side", &LatticeSpec::cells_per_side)
      .def_readonly("imbalance", &LatticeSpec::imbalance)
      .def_readonly("spacing", &LatticeSpec::spacing)
      .def_property_readonly("intracell", &LatticeSpec::intracell)
      .def_property_readonly("intercell", &LatticeSpec::intercell);

  py::class_<Lattice>(m, "Lattice")
      .def_property_readonly("positions", &positions)
      .def_property_readonly("sublattice",
                             [](const Lattice& l) {
                               std::string s;
                               for (auto x : l.sublattice) s += to_char(x);
                               return s;
                             })
      .def_readonly("corner_sites", &Lattice::corner_sites)
      .def("__len__", &Lattice::size);

  m.def("build_flake", &build_flake, py::arg("spec"));

  m.def(
      "hamiltonian",
      [](const Lattice& lat, const std::string& pol) { return assemble_array(lat, Polarization::parse(pol)).matrix; },
      py::arg("lattice"), py::arg("polarization") = "pi", "Array Hamiltonian in units of hbar Gamma0");

  m.def(
      "analyze",
      [](const Lattice& lat, const std::string& pol) {
        return modes_dict(analyze(assemble_array(lat, Polarization::parse(pol)), lat));
      },
      py::arg("lattice"), py::arg("polarization") = "pi");

  m.def(
      "bands",
      [](const LatticeSpec& spec, const std::string& pol, const std::vector<std::string>& path, int points,
         double sum_radius) {
        BlochSettings settings;
        settings.sum_radius = sum_radius;
        const auto kp = high_symmetry_path(spec, path, points);
        const auto bs = band_structure(spec, Polarization::parse(pol), kp.points, settings, 0);
        const auto n = static_cast<Eigen::Index>(bs.size());
        Eigen::MatrixXd k(n, 2), omega(n, 3), gamma(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto& b = bs[static_cast<std::size_t>(i)];
          k.row(i) = b.k.transpose();
          for (Eigen::Index j = 0; j < 3; ++j) {
            omega(i, j) = b.omega[static_cast<std::size_t>(j)];
            gamma(i, j) = b.gamma[static_cast<std::size_t>(j)];
          }
        }
        py::dict d;
        d["k"] = k;
        d["distance"] = kp.distance;
        d["omega"] = omega;
        d["gamma"] = gamma;
        return d;
      },
      py::arg("spec"), py::arg("polarization") = "pi", py::arg("path") = std::vector<std::string>{"G", "K", "M", "G"},
      py::arg("points_per_segment") = 40, py::arg("sum_radius") = BlochSettings{}.sum_radius);

  m.def(
      "wilson_polarization",
      [](double t_intra, double t_inter, const LatticeSpec& spec, int n) {
        const Vec2 p = wilson_polarization(TBModel{t_intra, t_inter, 0.0}, spec, n);
        return std::make_pair(p.x(), p.y());
      },
      py::arg("t_intra"), py::arg("t_inter"), py::arg("spec") = LatticeSpec{}, py::arg("n") = 120);

  m.def(
      "tb_corner_modes",
      [](const LatticeSpec& spec, const std::string& pol) {
        return tb_spectrum(fit_tb(spec, Polarization::parse(pol)), build_flake(spec)).in_gap_corner_modes().size();
      },
      py::arg("spec"), py::arg("polarization") = "pi");

  m.def("scenario_names", &scenario_names);
  m.def(
      "scenario",
      [](const std::string& name) {
        const auto r = emission_scenario(name);
        py::dict d;
        d["times"] = r.trace.times;
        d["sectors"] = r.trace.sectors;
        d["chirality"] = r.trace.chirality;
        d["norm"] = r.trace.total_norm;
        d["side_edges"] = r.side_edges;
        d["detuning"] = r.detuning;
        return d;
      },
      py::arg("name"));

  m.def(
      "run",
      [](const std::string& command, const std::filesystem::path& out, const std::string& target,
         const std::map<std::string, std::string>& settings) {
        const RunConfig cfg = config_from(settings);
        const auto summary = run_command(command, target, cfg, out);
        return py::module_::import("json").attr("loads")(summary.dump());
      },
      py::arg("command"), py::arg("out"), py::arg("target") = "",
      py::arg("settings") = std::map<std::string, std::string>{},
      "Runs a CLI subcommand in-process; settings use section.key names");

  m.attr("__version__") = io::version();
}
