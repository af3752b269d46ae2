// bqsp command line: scenario runners, resource estimation and Fourier-table
// inspection on top of the core library.
//
// Exit codes: 0 success, 2 validation error, 3 numerical-trust failure.

#include "bqsp/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumericalTrust = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<int> nf_list;
  int truncation = 0;
  bool fuse = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--nf", args.nf_list, "override the N_F list")->delimiter(',');
  cmd->add_option("--trunc", args.truncation, "override the Fock truncation per mode");
  cmd->add_flag("--fuse", args.fuse, "run the displacement-fusion pass before simulating");
}

int run_scenario(const CommonArgs& args, const std::string& expected_scenario,
                 const std::string& default_config) {
  std::string text;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::invalid_argument("cannot read config file " + args.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = default_config;
  }
  bqsp::ScenarioOverrides ov;
  ov.nf_list = args.nf_list;
  ov.truncation = args.truncation;
  ov.fuse = args.fuse;
  bqsp::ScenarioPlan plan = bqsp::scenario_from_json_text(text, ov);
  if (!expected_scenario.empty() && plan.scenario != expected_scenario) {
    throw std::invalid_argument("config declares scenario " + plan.scenario + ", expected " +
                                expected_scenario);
  }
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> files = bqsp::execute_plan(plan, args.out_dir);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& f : files) std::cout << f << "\n";
  std::cerr << "done in " << secs << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-decomposition compiler and simulator for hybrid qubit-oscillator gate programs"};
  app.require_subcommand(1);

  CommonArgs dw_args, tm_args, cu_args, dec_args;

  auto* dw = app.add_subcommand("double-well", "anharmonic tunneling scenario");
  add_common(dw, dw_args, false);

  auto* tm = app.add_subcommand("two-mode", "two-mode nonlinear coupling scenario");
  add_common(tm, tm_args, false);

  auto* cu = app.add_subcommand("custom", "user-supplied Hamiltonian scenario");
  add_common(cu, cu_args, true);

  auto* est = app.add_subcommand("estimate", "gate counts and speedup threshold");
  std::string est_config;
  double eta = 0.01;
  int native_order = 4, modes_per_term = 1, est_nf = 8, est_r = 1;
  est->add_option("--config", est_config, "scenario config supplying the Hamiltonian");
  est->add_option("--eta", eta, "Lamb-Dicke parameter")->capture_default_str();
  est->add_option("--d", native_order, "native interaction order")->capture_default_str();
  est->add_option("--m", modes_per_term, "modes per coupling term")->capture_default_str();
  est->add_option("--nf", est_nf, "Fourier order")->capture_default_str();
  est->add_option("--r", est_r, "Trotter steps")->capture_default_str();

  auto* dec = app.add_subcommand("decompose", "print the Fourier coefficient table");
  add_common(dec, dec_args, true);
  int dec_nf = 8;
  dec->add_option("--order", dec_nf, "Fourier order for the table")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (dw->parsed()) {
      return run_scenario(dw_args, "double_well", R"({"scenario": "double_well"})");
    }
    if (tm->parsed()) {
      return run_scenario(tm_args, "two_mode", R"({"scenario": "two_mode"})");
    }
    if (cu->parsed()) {
      return run_scenario(cu_args, "custom", "");
    }
    if (est->parsed()) {
      std::string text = R"({"scenario": "double_well"})";
      if (!est_config.empty()) {
        std::ifstream in(est_config);
        if (!in) throw std::invalid_argument("cannot read config file " + est_config);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
      }
      bqsp::ScenarioPlan plan = bqsp::scenario_from_json_text(text);
      bqsp::ResourceEstimate estval = bqsp::resource_estimate(
          plan.ham, est_nf, est_r, eta, native_order, modes_per_term);
      std::cout << "fourier_terms " << estval.fourier_terms << "\n"
                << "conditional_displacements " << estval.counts.conditional_displacements << "\n"
                << "rotations " << estval.counts.rotations << "\n"
                << "hadamards " << estval.counts.hadamards << "\n"
                << "free_evolutions " << estval.counts.free_evolutions << "\n"
                << "qsp_time_proxy " << estval.qsp_time_proxy << "\n"
                << "native_time_proxy " << estval.native_time_proxy << "\n"
                << "speedup_threshold " << estval.speedup_threshold << "\n"
                << "speedup " << (estval.speedup ? "true" : "false") << "\n";
      return 0;
    }
    if (dec->parsed()) {
      bqsp::ScenarioOverrides ov;
      ov.truncation = dec_args.truncation;
      std::ifstream in(dec_args.config_path);
      if (!in) throw std::invalid_argument("cannot read config file " + dec_args.config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      bqsp::ScenarioPlan plan = bqsp::scenario_from_json_text(ss.str(), ov);
      bqsp::FourierSeries series =
          plan.ham.potential.is_polynomial()
              ? bqsp::coefficients_polynomial(plan.ham.potential, dec_nf)
              : bqsp::coefficients_quadrature(plan.ham.potential, dec_nf);
      std::cout << bqsp::series_table(series);
      return 0;
    }
  } catch (const bqsp::NumericalTrustError& e) {
    std::cerr << "numerical-trust failure: " << e.what() << "\n";
    return kExitNumericalTrust;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
