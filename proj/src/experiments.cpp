#include "bqsp/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqsp {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Timing {
  double dt;
  int steps;
  double total_time;
};

// Close (T, dt, r) over whichever two are given; a scenario may supply a
// default pair when the config gives fewer than two.
Timing resolve_timing(std::optional<double> total_time, std::optional<double> dt,
                      std::optional<int> steps) {
  int given = (total_time ? 1 : 0) + (dt ? 1 : 0) + (steps ? 1 : 0);
  if (given < 2) {
    throw std::invalid_argument("timing needs two of T, dt, r");
  }
  Timing t{};
  if (dt && steps) {
    t.dt = *dt;
    t.steps = *steps;
    t.total_time = t.dt * t.steps;
    if (total_time && std::abs(*total_time - t.total_time) > 1e-9 * std::abs(t.total_time)) {
      throw std::invalid_argument("T, dt and r were all given but are inconsistent");
    }
  } else if (total_time && steps) {
    t.steps = *steps;
    t.dt = *total_time / *steps;
    t.total_time = *total_time;
  } else {
    t.steps = static_cast<int>(std::llround(*total_time / *dt));
    t.dt = *dt;
    t.total_time = *total_time;
    if (t.steps < 1) throw std::invalid_argument("T/dt yields no Trotter steps");
  }
  if (!(t.dt > 0.0) || t.steps < 1) throw std::invalid_argument("invalid timing");
  return t;
}

json require_object(const std::string& text) {
  json j = json::parse(text);
  if (j.contains("config") && j["config"].is_object()) j = j["config"];  // report round-trip
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  // Nothing in the pipeline draws random numbers; the flag exists so configs
  // can state the expectation, and false is a contradiction.
  if (j.contains("deterministic") && !j.at("deterministic").get<bool>()) {
    throw std::invalid_argument("the pipeline is seedless and deterministic; 'deterministic' cannot be false");
  }
  j.erase("deterministic");
  return j;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::optional<double> opt_num(const json& j, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<int> opt_int(const json& j, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<int>();
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) {
      if (it.key() == k) { ok = true; break; }
    }
    if (!ok) throw std::invalid_argument("unknown config key: " + it.key());
  }
}

StateVector build_initial(const json& init, const ModeSpace& osc, std::string& desc) {
  std::string type = init.at("type").get<std::string>();
  if (type == "fock") {
    std::vector<int> occ = init.at("occupations").get<std::vector<int>>();
    desc = "fock:";
    for (int o : occ) desc += std::to_string(o) + ",";
    return fock_state(osc, occ);
  }
  if (type == "coherent") {
    std::vector<double> alphas = init.at("alphas").get<std::vector<double>>();
    if (static_cast<int>(alphas.size()) != osc.num_modes) {
      throw std::invalid_argument("initial coherent alphas must list one value per mode");
    }
    desc = "coherent:";
    for (double a : alphas) desc += g17(a) + ",";
    // Product of per-mode coherent states, assembled mode by mode.
    StateVector state = vacuum_state(osc);
    Vector v = Matrix::Ones(1, 1).col(0);
    for (int n = 0; n < osc.num_modes; ++n) {
      ModeSpace single = oscillator_space(osc.truncation_dim, 1);
      StateVector local = coherent_state(single, 0, alphas[n]);
      Vector merged(v.size() * local.amps.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        merged.segment(i * local.amps.size(), local.amps.size()) = v(i) * local.amps;
      }
      v = merged;
    }
    return StateVector(v, osc);
  }
  throw std::invalid_argument("initial state type must be fock or coherent");
}

std::string plan_content_digest(const ScenarioPlan& plan) {
  std::string s = hamiltonian_digest(plan.ham);
  s += "|trunc=" + std::to_string(plan.space.truncation_dim);
  s += "|dt=" + g17(plan.dt);
  s += "|r=" + std::to_string(plan.steps);
  s += "|samples=" + std::to_string(plan.samples);
  s += "|fuse=" + std::to_string(plan.fuse ? 1 : 0);
  s += "|nf=";
  for (int nf : plan.nf_list) s += std::to_string(nf) + ",";
  s += "|init=" + plan.initial_desc;
  s += "|targets=";
  for (const auto& t : plan.fock_targets) {
    for (int o : t) s += std::to_string(o) + ".";
    s += ";";
  }
  s += "|alphas=";
  for (double a : plan.alpha_grid) s += g17(a) + ",";
  return fnv1a_hex_digest(s);
}

ScenarioPlan plan_double_well(const json& cfg, const ScenarioOverrides& ov) {
  reject_unknown_keys(cfg, {"scenario", "omega", "xi1_over_omega", "xi0_over_omega",
                            "T", "dt", "r", "nf_list", "truncation", "L", "alpha",
                            "samples", "fuse", "success_floor", "leakage_buffer",
                            "leakage_threshold"});
  ScenarioPlan plan;
  plan.scenario = "double_well";
  double omega = get_or(cfg, "omega", 1.0);
  double xi1 = get_or(cfg, "xi1_over_omega", 0.35) * omega;
  double xi0 = cfg.contains("xi0_over_omega") ? cfg.at("xi0_over_omega").get<double>() * omega
                                              : xi1 / 8.0;
  double x0 = double_well_minimum(xi0, xi1);
  double L = get_or(cfg, "L", 7.0 * x0 / 2.0);
  double alpha = get_or(cfg, "alpha", -x0 / std::sqrt(2.0));

  std::optional<int> steps = opt_int(cfg, "r");
  std::optional<double> dt = opt_num(cfg, "dt");
  std::optional<double> total = opt_num(cfg, "T");
  if (!steps && !dt && !total) steps = 500;
  if ((steps ? 1 : 0) + (dt ? 1 : 0) + (total ? 1 : 0) == 1) {
    // Default closure: dt = 20 pi / (omega r).
    if (steps) {
      dt = 20.0 * M_PI / (omega * *steps);
    } else if (dt) {
      steps = static_cast<int>(std::llround(20.0 * M_PI / (omega * *dt)));
    } else {
      steps = 500;
    }
  }
  Timing t = resolve_timing(total, dt, steps);

  int trunc = ov.truncation > 0 ? ov.truncation : get_or(cfg, "truncation", 64);
  plan.ham = double_well_hamiltonian(omega, xi0, xi1, L);
  plan.space = qubit_oscillator_space(trunc, 1);
  plan.nf_list = !ov.nf_list.empty() ? ov.nf_list
                                     : get_or(cfg, "nf_list", std::vector<int>{2, 4, 8});
  plan.dt = t.dt;
  plan.steps = t.steps;
  plan.samples = get_or(cfg, "samples", 200);
  plan.fuse = ov.fuse || get_or(cfg, "fuse", false);
  plan.sim.success_floor = get_or(cfg, "success_floor", 1e-6);
  plan.sim.leakage_buffer = get_or(cfg, "leakage_buffer", kDefaultLeakageBuffer);
  plan.sim.leakage_threshold = get_or(cfg, "leakage_threshold", 1e-8);
  plan.initial_osc = coherent_state(plan.space.without_qubit(), 0, alpha);
  plan.initial_desc = "coherent:" + std::string(g17(alpha)) + ",";

  json resolved = {
      {"scenario", plan.scenario},
      {"omega", omega},
      {"xi1_over_omega", xi1 / omega},
      {"xi0_over_omega", xi0 / omega},
      {"L", L},
      {"alpha", alpha},
      {"dt", t.dt},
      {"r", t.steps},
      {"T", t.total_time},
      {"nf_list", plan.nf_list},
      {"truncation", trunc},
      {"samples", plan.samples},
      {"fuse", plan.fuse},
      {"success_floor", plan.sim.success_floor},
      {"leakage_buffer", plan.sim.leakage_buffer},
      {"leakage_threshold", plan.sim.leakage_threshold},
  };
  plan.resolved_json = resolved.dump(2);
  plan.plan_digest = plan_content_digest(plan);
  return plan;
}

ScenarioPlan plan_two_mode(const json& cfg, const ScenarioOverrides& ov) {
  reject_unknown_keys(cfg, {"scenario", "omega1", "omega2", "xi_over_omega1", "xi_dt",
                            "r", "dt", "T", "nf_list", "truncation", "L1", "L2",
                            "initial", "alpha_grid", "fock_targets", "samples", "fuse",
                            "success_floor", "leakage_buffer", "leakage_threshold"});
  ScenarioPlan plan;
  plan.scenario = "two_mode";
  double omega1 = get_or(cfg, "omega1", 1.0);
  double omega2 = get_or(cfg, "omega2", omega1 / 2.0);
  double xi = get_or(cfg, "xi_over_omega1", 0.05) * omega1;
  double l1 = get_or(cfg, "L1", 2.0 * M_PI);
  double l2 = get_or(cfg, "L2", 2.0 * M_PI);

  std::optional<int> steps = opt_int(cfg, "r");
  std::optional<double> dt = opt_num(cfg, "dt");
  std::optional<double> total = opt_num(cfg, "T");
  if (!steps && !dt && !total) steps = 2500;
  if ((steps ? 1 : 0) + (dt ? 1 : 0) + (total ? 1 : 0) == 1) {
    double xi_dt = get_or(cfg, "xi_dt", 1.715e-3);
    if (!dt) dt = xi_dt / xi;
    if (!steps && !total) steps = 2500;
  }
  Timing t = resolve_timing(total, dt, steps);

  int trunc = ov.truncation > 0 ? ov.truncation : get_or(cfg, "truncation", 24);
  plan.ham = two_mode_coupling_hamiltonian(omega1, omega2, xi, l1, l2);
  plan.space = qubit_oscillator_space(trunc, 2);
  plan.nf_list = !ov.nf_list.empty() ? ov.nf_list
                                     : get_or(cfg, "nf_list", std::vector<int>{3, 8});
  plan.dt = t.dt;
  plan.steps = t.steps;
  plan.samples = get_or(cfg, "samples", 200);
  plan.fuse = ov.fuse || get_or(cfg, "fuse", false);
  plan.sim.success_floor = get_or(cfg, "success_floor", 1e-6);
  plan.sim.leakage_buffer = get_or(cfg, "leakage_buffer", kDefaultLeakageBuffer);
  plan.sim.leakage_threshold = get_or(cfg, "leakage_threshold", 1e-8);

  json init = cfg.contains("initial")
                  ? cfg.at("initial")
                  : json{{"type", "fock"}, {"occupations", {1, 0}}};
  plan.initial_osc = build_initial(init, plan.space.without_qubit(), plan.initial_desc);

  if (cfg.contains("alpha_grid")) {
    plan.alpha_grid = cfg.at("alpha_grid").get<std::vector<double>>();
  } else {
    for (int i = 0; i <= 6; ++i) plan.alpha_grid.push_back(0.2 * i);
  }
  if (cfg.contains("fock_targets")) {
    plan.fock_targets = cfg.at("fock_targets").get<std::vector<std::vector<int>>>();
  } else {
    plan.fock_targets = {{1, 0}, {0, 2}};
  }

  json resolved = {
      {"scenario", plan.scenario},
      {"omega1", omega1},
      {"omega2", omega2},
      {"xi_over_omega1", xi / omega1},
      {"xi_dt", xi * t.dt},
      {"L1", l1},
      {"L2", l2},
      {"dt", t.dt},
      {"r", t.steps},
      {"T", t.total_time},
      {"nf_list", plan.nf_list},
      {"truncation", trunc},
      {"initial", init},
      {"alpha_grid", plan.alpha_grid},
      {"fock_targets", plan.fock_targets},
      {"samples", plan.samples},
      {"fuse", plan.fuse},
      {"success_floor", plan.sim.success_floor},
      {"leakage_buffer", plan.sim.leakage_buffer},
      {"leakage_threshold", plan.sim.leakage_threshold},
  };
  plan.resolved_json = resolved.dump(2);
  plan.plan_digest = plan_content_digest(plan);
  return plan;
}

ScenarioPlan plan_custom(const json& cfg, const ScenarioOverrides& ov) {
  reject_unknown_keys(cfg, {"scenario", "omegas", "potential", "L", "initial",
                            "nf_list", "truncation", "r", "dt", "T", "samples",
                            "fuse", "fock_targets", "max_reconstruction_error",
                            "success_floor", "leakage_buffer", "leakage_threshold",
                            "quadrature_angles"});
  ScenarioPlan plan;
  plan.scenario = "custom";
  std::vector<double> omegas = cfg.at("omegas").get<std::vector<double>>();
  int num_modes = static_cast<int>(omegas.size());

  // Domain default: cover the initial state's classical support,
  // |<Q>| + 4 sigma_Q, in every mode.
  std::vector<double> lengths;
  if (cfg.contains("L")) {
    lengths = cfg.at("L").get<std::vector<double>>();
  } else {
    const json& init = cfg.at("initial");
    std::string type = init.at("type").get<std::string>();
    for (int n = 0; n < num_modes; ++n) {
      double mean = 0.0, sigma = 1.0 / std::sqrt(2.0);
      if (type == "coherent") {
        mean = std::sqrt(2.0) * init.at("alphas").get<std::vector<double>>().at(n);
      } else {
        int occ = init.at("occupations").get<std::vector<int>>().at(n);
        sigma = std::sqrt(occ + 0.5);
      }
      lengths.push_back(default_domain_length(mean, sigma));
    }
  }

  std::vector<MonomialTerm> terms;
  for (const auto& jt : cfg.at("potential")) {
    MonomialTerm t;
    t.coefficient = jt.at("coefficient").get<double>();
    t.exponents = jt.at("exponents").get<std::vector<int>>();
    terms.push_back(std::move(t));
  }
  plan.ham.frequencies = omegas;
  plan.ham.potential = polynomial_potential(num_modes, terms, lengths);
  if (cfg.contains("quadrature_angles")) {
    plan.ham.potential.quadrature_angles =
        cfg.at("quadrature_angles").get<std::vector<double>>();
    plan.ham.potential.validate();
  }
  plan.ham.convention_note = "custom potential as given";
  plan.ham.validate();

  Timing t = resolve_timing(opt_num(cfg, "T"), opt_num(cfg, "dt"), opt_int(cfg, "r"));
  int trunc = ov.truncation > 0 ? ov.truncation
                                : get_or(cfg, "truncation", num_modes == 1 ? 64 : 24);
  plan.space = qubit_oscillator_space(trunc, num_modes);
  plan.nf_list = !ov.nf_list.empty() ? ov.nf_list
                                     : get_or(cfg, "nf_list", std::vector<int>{8});
  plan.dt = t.dt;
  plan.steps = t.steps;
  plan.samples = get_or(cfg, "samples", 200);
  plan.fuse = ov.fuse || get_or(cfg, "fuse", false);
  plan.sim.success_floor = get_or(cfg, "success_floor", 1e-6);
  plan.sim.leakage_buffer = get_or(cfg, "leakage_buffer", kDefaultLeakageBuffer);
  plan.sim.leakage_threshold = get_or(cfg, "leakage_threshold", 1e-8);
  plan.max_reconstruction_error_rel = get_or(cfg, "max_reconstruction_error", 0.05);
  plan.initial_osc = build_initial(cfg.at("initial"), plan.space.without_qubit(),
                                   plan.initial_desc);
  if (cfg.contains("fock_targets")) {
    plan.fock_targets = cfg.at("fock_targets").get<std::vector<std::vector<int>>>();
  }

  json resolved = cfg;
  resolved["scenario"] = "custom";
  resolved["L"] = lengths;
  resolved["dt"] = t.dt;
  resolved["r"] = t.steps;
  resolved["T"] = t.total_time;
  resolved["truncation"] = trunc;
  resolved["nf_list"] = plan.nf_list;
  resolved["samples"] = plan.samples;
  resolved["fuse"] = plan.fuse;
  resolved["max_reconstruction_error"] = plan.max_reconstruction_error_rel;
  plan.resolved_json = resolved.dump(2);
  plan.plan_digest = plan_content_digest(plan);
  return plan;
}

// The header identifies the physical plan, not the scenario label, so a
// custom config that duplicates a built-in scenario emits identical bytes.
std::string csv_header(const ScenarioPlan& plan, const std::string& kind) {
  std::string h;
  h += "# bqsp " + kind + "\n";
  h += "# plan_digest " + plan.plan_digest + "\n";
  return h;
}

std::string observable_columns(const ScenarioPlan& plan) {
  std::string cols = "step,time";
  for (int n = 0; n < plan.space.num_modes; ++n) cols += ",x_" + std::to_string(n + 1);
  for (const auto& occ : plan.fock_targets) {
    cols += ",pop_";
    for (size_t i = 0; i < occ.size(); ++i) cols += (i ? "_" : "") + std::to_string(occ[i]);
  }
  cols += ",success_prob,leakage";
  return cols;
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
  written.push_back(path);
}

}  // namespace

double double_well_minimum(double xi0, double xi1) {
  if (!(xi0 > 0.0) || !(xi1 > 0.0)) {
    throw std::invalid_argument("double-well coefficients must be positive");
  }
  return std::sqrt(xi0 / (2.0 * xi1));
}

ScenarioPlan scenario_from_json_text(const std::string& text, const ScenarioOverrides& ov) {
  try {
    json cfg = require_object(text);
    std::string scenario = cfg.at("scenario").get<std::string>();
    if (scenario == "double_well") return plan_double_well(cfg, ov);
    if (scenario == "two_mode") return plan_two_mode(cfg, ov);
    if (scenario == "custom") return plan_custom(cfg, ov);
    throw std::invalid_argument("scenario must be double_well, two_mode or custom");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config schema violation: ") + e.what());
  }
}

ScenarioPlan scenario_from_json_text(const std::string& text) {
  return scenario_from_json_text(text, {});
}

ScenarioPlan load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::vector<std::string> execute_plan(const ScenarioPlan& plan, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  auto path_of = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  // Reconstruction-error gate for user potentials.
  FourierSeries probe_series;
  if (plan.max_reconstruction_error_rel >= 0.0) {
    int worst_nf = *std::min_element(plan.nf_list.begin(), plan.nf_list.end());
    probe_series = plan.ham.potential.is_polynomial()
                       ? coefficients_polynomial(plan.ham.potential, worst_nf)
                       : coefficients_quadrature(plan.ham.potential, worst_nf);
    ReconstructionError err = reconstruction_error(probe_series, plan.ham.potential, 201);
    // Scale against the potential's range over the domain.
    double vmin = 0, vmax = 0;
    bool first = true;
    int nsamp = 101;
    std::vector<int> idx(plan.ham.num_modes(), 0);
    std::vector<double> pt(plan.ham.num_modes());
    long long total = 1;
    for (int n = 0; n < plan.ham.num_modes(); ++n) total *= nsamp;
    for (long long g = 0; g < total; ++g) {
      for (int n = 0; n < plan.ham.num_modes(); ++n) {
        double l = plan.ham.potential.domain_lengths[n];
        pt[n] = -l / 2 + l * idx[n] / (nsamp - 1.0);
      }
      double v = plan.ham.potential.evaluate(pt);
      vmin = first ? v : std::min(vmin, v);
      vmax = first ? v : std::max(vmax, v);
      first = false;
      int n = plan.ham.num_modes() - 1;
      while (n >= 0 && ++idx[n] == nsamp) idx[n--] = 0;
    }
    double range = std::max(vmax - vmin, 1e-12);
    // Gate on the RMS error: the max is dominated by the periodization jump
    // at the domain edge, which the wavefunction is not supposed to reach.
    if (err.rms > plan.max_reconstruction_error_rel * range) {
      throw NumericalTrustError(
          "Fourier reconstruction RMS error " + std::to_string(err.rms) +
          " exceeds " + std::to_string(plan.max_reconstruction_error_rel) +
          " of the potential range " + std::to_string(range) +
          "; raise N_F or enlarge the domain lengths");
    }
  }

  ObservableSchedule schedule = ObservableSchedule::evenly_spaced(plan.steps, plan.samples);
  schedule.fock_targets = plan.fock_targets;

  ExactPropagator prop(plan.ham, plan.space.without_qubit());
  ModeSpace osc = plan.space.without_qubit();
  std::vector<Operator> xops;
  for (int n = 0; n < osc.num_modes; ++n) xops.push_back(position_op(osc, n));

  // Exact-reference time series.
  {
    std::string csv = csv_header(plan, "exact reference series");
    csv += observable_columns(plan) + "\n";
    for (int s : schedule.sample_steps) {
      double time = s * plan.dt;
      StateVector ref = prop.state_at(plan.initial_osc, time);
      std::string row = std::to_string(s) + "," + g17(time);
      for (const auto& op : xops) row += "," + g17(expectation(ref, op).real());
      for (const auto& occ : plan.fock_targets) row += "," + g17(fock_population(ref, occ));
      row += ",1," + g17(edge_leakage(ref, plan.sim.leakage_buffer));
      csv += row + "\n";
    }
    write_file(path_of(plan.scenario + "_exact.csv"), csv, written);
  }

  StateVector initial = attach_qubit_up(plan.initial_osc);
  json summary;
  summary["per_nf"] = json::array();

  std::string inf_csv = csv_header(plan, "infidelity table");
  inf_csv += "nf,step,time,infidelity,leakage,leakage_flagged\n";

  for (int nf : plan.nf_list) {
    GateProgram prog = compile_program(plan.ham, nf, plan.dt, plan.steps, true, plan.space);
    if (plan.fuse) prog = fuse_displacements(prog);
    PreparedProgram prepared(prog);

    std::string csv = csv_header(plan, "compiled run series");
    csv += "# nf " + std::to_string(nf) + "\n";
    csv += observable_columns(plan) + "\n";

    std::vector<InfidelityRow> rows;
    SimOptions sim = plan.sim;
    sim.on_sample = [&](int step_index, const StateVector& osc_state) {
      InfidelityRow row;
      row.max_order = nf;
      row.step = step_index;
      row.time = step_index * plan.dt;
      StateVector ref = prop.state_at(plan.initial_osc, row.time);
      row.infidelity = 1.0 - fidelity(ref, osc_state);
      row.leakage = edge_leakage(osc_state, plan.sim.leakage_buffer);
      row.leakage_flagged = row.leakage > plan.sim.leakage_threshold;
      rows.push_back(row);
    };
    RunResult result = prepared.run(initial, schedule, sim);

    for (const auto& rec : result.report.records) {
      std::string row = std::to_string(rec.step) + "," + g17(rec.time);
      for (double x : rec.mean_positions) row += "," + g17(x);
      for (double p : rec.fock_populations) row += "," + g17(p);
      row += "," + g17(rec.projection_probability) + "," + g17(rec.leakage);
      csv += row + "\n";
    }
    write_file(path_of(plan.scenario + "_nf" + std::to_string(nf) + ".csv"), csv, written);

    for (const auto& row : rows) {
      inf_csv += std::to_string(row.max_order) + "," + std::to_string(row.step) + "," +
                 g17(row.time) + "," + g17(row.infidelity) + "," + g17(row.leakage) + "," +
                 (row.leakage_flagged ? "1" : "0") + "\n";
    }

    json nf_summary;
    nf_summary["nf"] = nf;
    nf_summary["final_infidelity"] = rows.empty() ? 0.0 : rows.back().infidelity;
    nf_summary["success_probability"] = result.report.success_probability;
    nf_summary["final_leakage"] = result.report.final_leakage;
    nf_summary["gate_counts"] = {
        {"conditional_displacements", result.report.gate_counts.conditional_displacements},
        {"rotations", result.report.gate_counts.rotations},
        {"hadamards", result.report.gate_counts.hadamards},
        {"free_evolutions", result.report.gate_counts.free_evolutions},
    };
    summary["per_nf"].push_back(nf_summary);
  }
  write_file(path_of(plan.scenario + "_infidelity.csv"), inf_csv, written);

  // Coherent-amplitude scan (two-mode by default): infidelity at final time
  // per (alpha, N_F), reusing one prepared program per N_F.
  if (!plan.alpha_grid.empty()) {
    std::string csv = csv_header(plan, "coherent amplitude scan");
    csv += "alpha,nf,infidelity,success_prob,final_leakage\n";
    std::vector<std::pair<int, PreparedProgram>> prepared;
    for (int nf : plan.nf_list) {
      GateProgram prog = compile_program(plan.ham, nf, plan.dt, plan.steps, true, plan.space);
      if (plan.fuse) prog = fuse_displacements(prog);
      prepared.emplace_back(nf, PreparedProgram(prog));
    }
    double total_time = plan.steps * plan.dt;
    for (double a : plan.alpha_grid) {
      std::vector<double> alphas(osc.num_modes, 0.0);
      alphas[0] = a;
      std::string dummy;
      json init = {{"type", "coherent"}, {"alphas", alphas}};
      StateVector osc0 = build_initial(init, osc, dummy);
      StateVector ref = prop.state_at(osc0, total_time);
      StateVector start = attach_qubit_up(osc0);
      for (auto& [nf, prep] : prepared) {
        RunResult res = prep.run(start, ObservableSchedule{}, plan.sim);
        double infid = 1.0 - fidelity(ref, res.final_state);
        csv += g17(a) + "," + std::to_string(nf) + "," + g17(infid) + "," +
               g17(res.report.success_probability) + "," +
               g17(res.report.final_leakage) + "\n";
      }
    }
    write_file(path_of(plan.scenario + "_alpha_scan.csv"), csv, written);
  }

  json report;
  report["config"] = json::parse(plan.resolved_json);
  report["plan_digest"] = plan.plan_digest;
  report["results"] = summary;
  write_file(path_of(plan.scenario + "_report.json"), report.dump(2) + "\n", written);
  return written;
}

namespace {

std::vector<std::string> run_scenario_checked(const std::string& config_path,
                                              const std::string& out_dir,
                                              const std::string& expected) {
  ScenarioPlan plan = load_scenario(config_path);
  if (plan.scenario != expected) {
    throw std::invalid_argument("config scenario is " + plan.scenario + ", expected " + expected);
  }
  return execute_plan(plan, out_dir);
}

}  // namespace

std::vector<std::string> run_double_well(const std::string& config_path,
                                         const std::string& out_dir) {
  return run_scenario_checked(config_path, out_dir, "double_well");
}

std::vector<std::string> run_two_mode(const std::string& config_path,
                                      const std::string& out_dir) {
  return run_scenario_checked(config_path, out_dir, "two_mode");
}

std::vector<std::string> run_custom(const std::string& config_path,
                                    const std::string& out_dir) {
  return run_scenario_checked(config_path, out_dir, "custom");
}

}  // namespace bqsp
