// Python bindings for the core operations: truncated Fock-space linear
// algebra, Fourier decomposition, gate-program compilation and simulation.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bqsp/experiments.hpp"

namespace py = pybind11;
using namespace bqsp;

namespace {

py::dict report_to_dict(const RunReport& report) {
  py::dict d;
  d["success_probability"] = report.success_probability;
  d["final_leakage"] = report.final_leakage;
  d["wall_seconds"] = report.wall_seconds;
  py::dict counts;
  counts["conditional_displacements"] = report.gate_counts.conditional_displacements;
  counts["rotations"] = report.gate_counts.rotations;
  counts["hadamards"] = report.gate_counts.hadamards;
  counts["free_evolutions"] = report.gate_counts.free_evolutions;
  d["gate_counts"] = counts;
  py::list records;
  for (const auto& rec : report.records) {
    py::dict r;
    r["step"] = rec.step;
    r["time"] = rec.time;
    r["mean_positions"] = rec.mean_positions;
    r["fock_populations"] = rec.fock_populations;
    r["projection_probability"] = rec.projection_probability;
    r["leakage"] = rec.leakage;
    records.append(r);
  }
  d["records"] = records;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiler and simulator for bosonic anharmonicities and nonlinear "
            "couplings via Fourier-decomposed qubit-oscillator gate programs";

  py::register_exception<NumericalTrustError>(m, "NumericalTrustError", PyExc_RuntimeError);

  py::class_<ModeSpace>(m, "ModeSpace")
      .def_readonly("truncation_dim", &ModeSpace::truncation_dim)
      .def_readonly("num_modes", &ModeSpace::num_modes)
      .def_readonly("qubit_present", &ModeSpace::qubit_present)
      .def("oscillator_dim", &ModeSpace::oscillator_dim)
      .def("total_dim", &ModeSpace::total_dim)
      .def("without_qubit", &ModeSpace::without_qubit)
      .def("with_qubit", &ModeSpace::with_qubit)
      .def("__eq__", [](const ModeSpace& a, const ModeSpace& b) { return a == b; })
      .def("__repr__", [](const ModeSpace& s) {
        return "ModeSpace(trunc=" + std::to_string(s.truncation_dim) +
               ", modes=" + std::to_string(s.num_modes) +
               ", qubit=" + (s.qubit_present ? std::string("True") : std::string("False")) + ")";
      });
  m.def("oscillator_space", &oscillator_space, py::arg("truncation_dim"), py::arg("num_modes"));
  m.def("qubit_oscillator_space", &qubit_oscillator_space, py::arg("truncation_dim"),
        py::arg("num_modes"));

  py::class_<Operator>(m, "Operator")
      .def(py::init<Matrix, ModeSpace, bool>(), py::arg("matrix"), py::arg("space"),
           py::arg("hermitian") = false)
      .def_readonly("space", &Operator::space)
      .def_readonly("hermitian_hint", &Operator::hermitian_hint)
      .def_property_readonly("matrix", [](const Operator& op) { return op.mat; });

  py::class_<StateVector>(m, "StateVector")
      .def(py::init<Vector, ModeSpace, bool>(), py::arg("amplitudes"), py::arg("space"),
           py::arg("check_norm") = true)
      .def_readonly("space", &StateVector::space)
      .def_property_readonly("amplitudes", [](const StateVector& s) { return s.amps; });

  m.def("annihilation_op", &annihilation_op, py::arg("space"), py::arg("mode_index"));
  m.def("quadrature_op", &quadrature_op, py::arg("space"), py::arg("mode_index"),
        py::arg("theta"));
  m.def("position_op", &position_op, py::arg("space"), py::arg("mode_index"));
  m.def("momentum_op", &momentum_op, py::arg("space"), py::arg("mode_index"));
  m.def("hermitian_expm", &hermitian_expm, py::arg("operator"), py::arg("scale"));
  m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));
  m.def("expectation", &expectation, py::arg("state"), py::arg("operator"));
  m.def(
      "coherent_state",
      [](const ModeSpace& space, int mode, Complex alpha) {
        double leakage = 0.0;
        StateVector st = coherent_state(space, mode, alpha, &leakage);
        return py::make_tuple(st, leakage);
      },
      py::arg("space"), py::arg("mode_index"), py::arg("alpha"),
      "Returns (state, truncation_leakage).");
  m.def("fock_state", &fock_state, py::arg("space"), py::arg("occupations"));
  m.def("vacuum_state", &vacuum_state, py::arg("space"));
  m.def("fock_population", &fock_population, py::arg("state"), py::arg("occupation"));
  m.def("attach_qubit_up", &attach_qubit_up, py::arg("oscillator_state"));
  m.def(
      "project_qubit_up",
      [](const StateVector& s) {
        QubitProjection p = project_qubit_up(s);
        return py::make_tuple(p.state, p.probability);
      },
      py::arg("state"), "Returns (projected_state, probability).");
  m.def("edge_leakage", &edge_leakage, py::arg("state"),
        py::arg("buffer") = kDefaultLeakageBuffer);

  py::class_<MonomialTerm>(m, "MonomialTerm")
      .def(py::init([](double c, std::vector<int> e) {
             return MonomialTerm{c, std::move(e)};
           }),
           py::arg("coefficient"), py::arg("exponents"))
      .def_readwrite("coefficient", &MonomialTerm::coefficient)
      .def_readwrite("exponents", &MonomialTerm::exponents);

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_readonly("num_modes", &PotentialSpec::num_modes)
      .def_readonly("domain_lengths", &PotentialSpec::domain_lengths)
      .def("evaluate", &PotentialSpec::evaluate, py::arg("point"));
  m.def("polynomial_potential", &polynomial_potential, py::arg("num_modes"), py::arg("terms"),
        py::arg("domain_lengths"));
  m.def("callable_potential", &callable_potential, py::arg("num_modes"), py::arg("function"),
        py::arg("domain_lengths"));
  m.def("default_domain_length", &default_domain_length, py::arg("mean_q"), py::arg("sigma_q"));

  py::class_<FourierTerm>(m, "FourierTerm")
      .def_readonly("m", &FourierTerm::m)
      .def_readonly("a", &FourierTerm::a)
      .def_readonly("b", &FourierTerm::b);
  py::class_<FourierSeries>(m, "FourierSeries")
      .def_readonly("num_modes", &FourierSeries::num_modes)
      .def_readonly("max_order", &FourierSeries::max_order)
      .def_readonly("wavevectors", &FourierSeries::wavevectors)
      .def_readonly("constant_term", &FourierSeries::constant_term)
      .def_readonly("terms", &FourierSeries::terms);
  m.def("coefficients_quadrature", &coefficients_quadrature, py::arg("spec"),
        py::arg("max_order"), py::arg("points_per_dim") = 0,
        py::arg("prune_threshold") = kPruneThreshold);
  m.def("coefficients_polynomial", &coefficients_polynomial, py::arg("spec"),
        py::arg("max_order"), py::arg("prune_threshold") = kPruneThreshold);
  m.def("evaluate_series", &evaluate_series, py::arg("series"), py::arg("point"));
  m.def(
      "reconstruction_error",
      [](const FourierSeries& s, const PotentialSpec& p, int samples) {
        ReconstructionError e = reconstruction_error(s, p, samples);
        return py::make_tuple(e.max_abs, e.rms);
      },
      py::arg("series"), py::arg("spec"), py::arg("samples_per_dim"),
      "Returns (max_abs_error, rms_error).");
  m.def("series_table", &series_table, py::arg("series"));

  py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
      .def_readonly("frequencies", &HamiltonianSpec::frequencies)
      .def_readonly("potential", &HamiltonianSpec::potential)
      .def_readonly("convention_note", &HamiltonianSpec::convention_note);
  m.def("double_well_hamiltonian", &double_well_hamiltonian, py::arg("omega"), py::arg("xi0"),
        py::arg("xi1"), py::arg("domain_length"));
  m.def("two_mode_coupling_hamiltonian", &two_mode_coupling_hamiltonian, py::arg("omega1"),
        py::arg("omega2"), py::arg("xi"), py::arg("l1"), py::arg("l2"));
  m.def(
      "custom_hamiltonian",
      [](std::vector<double> freqs, PotentialSpec pot) {
        HamiltonianSpec h;
        h.frequencies = std::move(freqs);
        h.potential = std::move(pot);
        h.convention_note = "custom potential as given";
        h.validate();
        return h;
      },
      py::arg("frequencies"), py::arg("potential"));

  py::class_<GateProgram>(m, "GateProgram")
      .def_property_readonly("num_instructions",
                             [](const GateProgram& p) { return p.instructions.size(); })
      .def_property_readonly("dt", [](const GateProgram& p) { return p.meta.dt; })
      .def_property_readonly("steps", [](const GateProgram& p) { return p.meta.trotter_steps; })
      .def_property_readonly("max_order", [](const GateProgram& p) { return p.meta.max_order; })
      .def_property_readonly("space", [](const GateProgram& p) { return p.meta.space; })
      .def_property_readonly("warnings", [](const GateProgram& p) { return p.meta.warnings; })
      .def_property_readonly("gate_counts", [](const GateProgram& p) {
        GateCounts c = count_gates(p.instructions);
        py::dict d;
        d["conditional_displacements"] = c.conditional_displacements;
        d["rotations"] = c.rotations;
        d["hadamards"] = c.hadamards;
        d["free_evolutions"] = c.free_evolutions;
        return d;
      });
  m.def(
      "compile_program",
      [](const HamiltonianSpec& ham, int max_order, double dt, int steps, bool postselect,
         const ModeSpace& space, bool strang, double lambda_split) {
        CompileOptions opt;
        opt.strang = strang;
        opt.lambda_split = lambda_split;
        return compile_program(ham, max_order, dt, steps, postselect, space, opt);
      },
      py::arg("hamiltonian"), py::arg("max_order"), py::arg("dt"), py::arg("steps"),
      py::arg("postselect"), py::arg("space"), py::arg("strang") = false,
      py::arg("lambda_split") = 0.0);
  m.def("fuse_displacements", &fuse_displacements, py::arg("program"));
  m.def("serialize_program", &serialize_program, py::arg("program"));
  m.def("parse_program", &parse_program, py::arg("text"));

  m.def(
      "resource_estimate",
      [](const HamiltonianSpec& ham, int max_order, int steps, double eta, int native_order,
         int modes_per_term) {
        ResourceEstimate e = resource_estimate(ham, max_order, steps, eta, native_order,
                                               modes_per_term);
        py::dict d;
        d["conditional_displacements"] = e.counts.conditional_displacements;
        d["rotations"] = e.counts.rotations;
        d["hadamards"] = e.counts.hadamards;
        d["free_evolutions"] = e.counts.free_evolutions;
        d["fourier_terms"] = e.fourier_terms;
        d["qsp_time_proxy"] = e.qsp_time_proxy;
        d["native_time_proxy"] = e.native_time_proxy;
        d["speedup_threshold"] = e.speedup_threshold;
        d["speedup"] = e.speedup;
        return d;
      },
      py::arg("hamiltonian"), py::arg("max_order"), py::arg("steps"), py::arg("eta"),
      py::arg("native_order"), py::arg("modes_per_term"));

  py::class_<ObservableSchedule>(m, "ObservableSchedule")
      .def(py::init<>())
      .def_static("evenly_spaced", &ObservableSchedule::evenly_spaced, py::arg("steps"),
                  py::arg("samples") = 200)
      .def_readwrite("sample_steps", &ObservableSchedule::sample_steps)
      .def_readwrite("fock_targets", &ObservableSchedule::fock_targets);

  m.def(
      "run_program",
      [](const GateProgram& program, const StateVector& initial,
         const ObservableSchedule& schedule, double success_floor) {
        SimOptions opt;
        opt.success_floor = success_floor;
        RunResult res = run_program(program, initial, schedule, opt);
        return py::make_tuple(report_to_dict(res.report), res.final_state);
      },
      py::arg("program"), py::arg("initial"), py::arg("schedule") = ObservableSchedule{},
      py::arg("success_floor") = 1e-6, "Returns (report_dict, final_state).");
  m.def(
      "gate_count_check",
      [](const GateProgram& p) { p.check_shape(); },
      py::arg("program"));
  m.def(
      "exact_reference",
      [](const HamiltonianSpec& ham, double T, const StateVector& initial) {
        double leak = 0.0;
        StateVector out = exact_reference(ham, T, initial, &leak);
        return py::make_tuple(out, leak);
      },
      py::arg("hamiltonian"), py::arg("T"), py::arg("initial"),
      "Returns (state, leakage).");
  m.def(
      "infidelity_sweep",
      [](const HamiltonianSpec& ham, const std::vector<int>& orders, double dt, int steps,
         const StateVector& initial, const ModeSpace& space, int samples, bool fuse) {
        ObservableSchedule sched = ObservableSchedule::evenly_spaced(steps, samples);
        auto rows = infidelity_sweep(ham, orders, dt, steps, initial, space, sched, {}, fuse);
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["max_order"] = r.max_order;
          d["step"] = r.step;
          d["time"] = r.time;
          d["infidelity"] = r.infidelity;
          d["leakage"] = r.leakage;
          d["leakage_flagged"] = r.leakage_flagged;
          out.append(d);
        }
        return out;
      },
      py::arg("hamiltonian"), py::arg("max_orders"), py::arg("dt"), py::arg("steps"),
      py::arg("initial_oscillator"), py::arg("space"), py::arg("samples") = 200,
      py::arg("fuse") = false);

  m.def(
      "run_scenario",
      [](const std::string& config_json, const std::string& out_dir) {
        return execute_plan(scenario_from_json_text(config_json), out_dir);
      },
      py::arg("config_json"), py::arg("out_dir"),
      "Runs a scenario config (JSON text) and returns the list of files written.");
}
