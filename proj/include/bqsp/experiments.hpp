#pragma once

#include "bqsp/simulator.hpp"

#include <string>
#include <vector>

namespace bqsp {

// A fully-resolved scenario: every default applied, timing closed over
// (T, dt, r), initial state built. Executing a plan is deterministic, so two
// identical plans produce byte-identical output files.
struct ScenarioPlan {
  std::string scenario;
  HamiltonianSpec ham;
  ModeSpace space;          // qubit + modes at the working truncation
  StateVector initial_osc;  // oscillator-only initial state
  std::string initial_desc; // canonical text form of the initial state
  std::vector<int> nf_list;
  double dt = 0.0;
  int steps = 0;
  int samples = 200;
  bool fuse = false;
  std::vector<std::vector<int>> fock_targets;
  std::vector<double> alpha_grid;  // when non-empty, run the coherent-state scan
  SimOptions sim;
  double max_reconstruction_error_rel = -1.0;  // <0: gate disabled

  std::string resolved_json;  // fully-resolved config, embedded in the report
  std::string plan_digest;    // digest of the physical content only
};

// Parses a config file (or a previously emitted report; its embedded config
// is used), validating per-scenario keys and applying documented defaults.
ScenarioPlan load_scenario(const std::string& path);
ScenarioPlan scenario_from_json_text(const std::string& text);

// Override hooks used by the CLI.
struct ScenarioOverrides {
  std::vector<int> nf_list;
  int truncation = 0;
  bool fuse = false;
};
ScenarioPlan scenario_from_json_text(const std::string& text, const ScenarioOverrides& ov);

// Runs the plan end to end: per-N_F time series, exact-reference series,
// infidelity table, optional coherent-amplitude scan, and a JSON report that
// embeds the resolved config. Returns the list of files written.
std::vector<std::string> execute_plan(const ScenarioPlan& plan, const std::string& out_dir);

// Convenience wrappers matching the three scenarios.
std::vector<std::string> run_double_well(const std::string& config_path, const std::string& out_dir);
std::vector<std::string> run_two_mode(const std::string& config_path, const std::string& out_dir);
std::vector<std::string> run_custom(const std::string& config_path, const std::string& out_dir);

// Derived double-well quantities.
double double_well_minimum(double xi0, double xi1);  // sqrt(xi0 / (2 xi1))

}  // namespace bqsp
