#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "z2hubo/annealers.hpp"
#include "z2hubo/bench.hpp"
#include "z2hubo/error.hpp"
#include "z2hubo/graph_map.hpp"
#include "z2hubo/hubo.hpp"
#include "z2hubo/quantum_sim.hpp"

namespace py = pybind11;
using namespace z2hubo;

namespace {

SpinConfig to_spins(const std::vector<int>& v) { return SpinConfig(v); }

py::dict sample_dict(const SampleResult& r) {
  py::dict d;
  d["energy"] = r.energy;
  d["spins"] = r.spins.to_vector();
  d["iterations"] = r.iterations_run;
  d["wall_time"] = r.wall_time;
  return d;
}

}  // namespace

PYBIND11_MODULE(_z2hubo, m) {
  m.doc() = "HUBO to Z2 gauge theory mapping and annealing solvers";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<SizeError>(m, "SizeError", base.ptr());
  py::register_exception<MappingError>(m, "MappingError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  py::class_<HuboPolynomial>(m, "HuboPolynomial")
      .def_property_readonly("n_vars", &HuboPolynomial::n_vars)
      .def_property_readonly("terms",
                             [](const HuboPolynomial& p) {
                               py::list out;
                               for (const auto& t : p.terms())
                                 out.append(py::make_tuple(t.coefficient, t.order));
                               return out;
                             })
      .def("__str__", &serialize_instance);

  m.def("parse_instance", [](const std::string& text) { return parse_instance(text); });
  m.def("read_instance", &read_instance);
  m.def("evaluate", [](const HuboPolynomial& p, const std::vector<int>& s) {
    return evaluate(p, to_spins(s));
  });
  m.def("brute_force_minimum", [](const HuboPolynomial& p) {
    const auto gs = brute_force_minimum(p);
    return py::make_tuple(gs.energy, gs.spins.to_vector());
  });

  py::enum_<CycleSearch>(m, "CycleSearch")
      .value("AUTO", CycleSearch::kAuto)
      .value("FACES", CycleSearch::kFaces)
      .value("SHORTEST", CycleSearch::kShortest);

  py::class_<GGraph>(m, "GGraph")
      .def_property_readonly("n_links", &GGraph::n_links)
      .def_property_readonly("plaquettes",
                             [](const GGraph& g) {
                               py::list out;
                               for (const auto& p : g.plaquettes())
                                 out.append(py::make_tuple(p.coupling, p.links));
                               return out;
                             })
      .def_property_readonly("sites",
                             [](const GGraph& g) {
                               std::vector<std::vector<Index>> out;
                               for (const auto& s : g.sites()) out.push_back(s.links);
                               return out;
                             })
      .def("energy", [](const GGraph& g, const std::vector<int>& s) { return g.energy(to_spins(s)); })
      .def("satisfied_energy", &GGraph::satisfied_energy)
      .def("to_polynomial", &GGraph::to_polynomial)
      .def("__str__", &serialize_ggraph);

  m.def(
      "map_instance",
      [](const HuboPolynomial& p, std::size_t k_m, CycleSearch mode) {
        return build_dual(build_hubo_graph(p), k_m, mode);
      },
      py::arg("poly"), py::arg("k_m") = kDefaultMaxCycle, py::arg("mode") = CycleSearch::kAuto);
  m.def("parse_ggraph", [](const std::string& text) { return parse_ggraph(text); });
  m.def("torus", &gen_torus_lattice, py::arg("L"));
  m.def("four_regular_dual", &gen_four_regular_dual, py::arg("n_vertices"), py::arg("seed"),
        py::arg("k_m") = kDefaultMaxCycle);

  py::class_<AnnealerParams>(m, "AnnealerParams")
      .def(py::init<>())
      .def_readwrite("n_iter", &AnnealerParams::n_iter)
      .def_readwrite("gamma", &AnnealerParams::gamma)
      .def_readwrite("eta", &AnnealerParams::eta)
      .def_readwrite("mu", &AnnealerParams::mu)
      .def_readwrite("B", &AnnealerParams::B)
      .def_readwrite("init_scale", &AnnealerParams::init_scale)
      .def_readwrite("seed", &AnnealerParams::seed);

  m.def("link_angle", &link_angle);
  m.def("lqa_cost", [](const GGraph& g, const std::vector<double>& w, double t, double gamma) {
    return lqa_cost(g, w, t, gamma);
  });
  m.def("lqa_grad", [](const GGraph& g, const std::vector<double>& w, double t, double gamma) {
    return lqa_grad(g, w, t, gamma);
  });
  m.def("gauge_penalty",
        [](const GGraph& g, const std::vector<double>& w) { return gauge_penalty(g, w); });
  m.def("gauge_step", [](const GGraph& g, const std::vector<double>& w, double B) {
    return gauge_step(g, w, B);
  });
  m.def("lqa_run", [](const GGraph& g, const AnnealerParams& p) { return sample_dict(lqa_run(g, p)); });
  m.def("glqa_run",
        [](const GGraph& g, const AnnealerParams& p) { return sample_dict(glqa_run(g, p)); });
  m.def(
      "sa_run",
      [](const GGraph& g, std::size_t sweeps, double beta_min, double beta_max, bool linear,
         std::uint64_t seed) {
        SaSchedule s{beta_min, beta_max, linear ? BetaSchedule::kLinear : BetaSchedule::kGeometric};
        return sample_dict(sa_run(g, sweeps, s, seed));
      },
      py::arg("g"), py::arg("sweeps"), py::arg("beta_min") = 0.1, py::arg("beta_max") = 10.0,
      py::arg("linear") = false, py::arg("seed") = 0);

  m.def("tts", &tts, py::arg("t_p"), py::arg("p"));
  m.def(
      "run_experiment",
      [](const GGraph& g, const std::string& solver, const AnnealerParams& params,
         std::vector<std::size_t> n_iter_grid, std::size_t n_sam) {
        ExperimentConfig c;
        c.instance.family = Family::kFile;
        c.instance.path = "<python>";
        c.solver = parse_solver(solver);
        c.params = params;
        c.n_iter_grid = std::move(n_iter_grid);
        c.n_sam = n_sam;
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(g, c);
        }
        py::list rows;
        for (const auto& pt : r.points) {
          py::dict d;
          d["n_iter"] = pt.n_iter;
          d["n_sam"] = pt.n_sam;
          d["E_min"] = pt.e_min;
          d["E_med"] = pt.e_med;
          d["p"] = pt.p;
          d["t_p"] = pt.t_p_mean;
          d["TTS"] = pt.tts ? py::cast(*pt.tts) : py::none();
          rows.append(d);
        }
        return rows;
      },
      py::arg("g"), py::arg("solver"), py::arg("params"), py::arg("n_iter_grid"),
      py::arg("n_sam"));

  m.def(
      "adiabatic_sweep",
      [](const GGraph& g, double gamma, std::size_t n_steps, double dt, std::size_t measure_every,
         std::uint64_t seed) {
        const auto r = adiabatic_sweep(g, {gamma, n_steps, dt, measure_every, seed});
        std::vector<std::tuple<double, double, double>> rows;
        for (const auto& rec : r.records) rows.emplace_back(rec.t, rec.energy, rec.fidelity);
        return py::make_tuple(rows, r.minus_outcomes);
      },
      py::arg("g"), py::arg("gamma") = 1.0, py::arg("n_steps") = 100, py::arg("dt") = 0.1,
      py::arg("measure_every") = 0, py::arg("seed") = 0);
}
