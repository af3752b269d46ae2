// Acceptance suite: one pass/fail line per criterion, with the measured
// values. Exit status is nonzero when any criterion fails.

#include "bqsp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

using namespace bqsp;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool pass, const std::string& details) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// Largest singular value through the Hermitian eigenproblem of M^dagger M.
double opnorm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Matrix realize(const std::vector<GateInstruction>& instructions, const ModeSpace& space) {
  GateMatrixFactory factory(space);
  Matrix u = Matrix::Identity(space.total_dim(), space.total_dim());
  for (const auto& inst : instructions) factory.apply_left(inst, u);
  return u;
}

// exp(i theta (sigma_z cos(2 kappa X) + sigma_y sin(2 kappa X))).
Matrix qsp_target(double theta, double kappa, int dim) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(quadrature_local(dim, 0.0));
  Eigen::VectorXd vals = 2.0 * kappa * es.eigenvalues();
  Matrix c = es.eigenvectors() * vals.array().cos().matrix().cast<Complex>().asDiagonal() *
             es.eigenvectors().adjoint();
  Matrix s = es.eigenvectors() * vals.array().sin().matrix().cast<Complex>().asDiagonal() *
             es.eigenvectors().adjoint();
  Matrix gen(2 * dim, 2 * dim);
  gen.topLeftCorner(dim, dim) = c;
  gen.bottomRightCorner(dim, dim) = -c;
  gen.topRightCorner(dim, dim) = Complex(0, -1) * s;
  gen.bottomLeftCorner(dim, dim) = Complex(0, 1) * s;
  ModeSpace space = qubit_oscillator_space(dim, 1);
  return hermitian_expm(Operator(gen, space, true), Complex(0, theta)).mat;
}

Matrix trig_target(double theta, double kappa, bool cosine, int dim) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(quadrature_local(dim, 0.0));
  Eigen::VectorXd vals = 2.0 * kappa * es.eigenvalues();
  Eigen::VectorXd f = cosine ? Eigen::VectorXd(vals.array().cos())
                             : Eigen::VectorXd(vals.array().sin());
  Vector up(dim), down(dim);
  for (int i = 0; i < dim; ++i) {
    up(i) = std::exp(Complex(0, 2.0 * theta * f(i)));
    down(i) = std::exp(Complex(0, -2.0 * theta * f(i)));
  }
  Matrix m = Matrix::Zero(2 * dim, 2 * dim);
  m.topLeftCorner(dim, dim) =
      es.eigenvectors() * up.asDiagonal() * es.eigenvectors().adjoint();
  m.bottomRightCorner(dim, dim) =
      es.eigenvectors() * down.asDiagonal() * es.eigenvectors().adjoint();
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

void criterion_1_qsp_identity() {
  const int dim = 80;
  ModeSpace space = qubit_oscillator_space(dim, 1);
  // Interior-support projector: level buffer of 8 below the truncation edge.
  Matrix proj = Matrix::Zero(2 * dim, 2 * dim);
  for (int b = 0; b < 2; ++b) {
    for (int n = 0; n < dim - kDefaultLeakageBuffer; ++n) proj(b * dim + n, b * dim + n) = 1.0;
  }
  std::mt19937 rng(20240901);
  std::uniform_real_distribution<double> th(-1.0, 1.0), kp(0.1, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double theta = th(rng), kappa = kp(rng);
    Matrix u = realize(compile_qsp_block(theta, {kappa}, {0.0}), space);
    worst = std::max(worst, opnorm((u - qsp_target(theta, kappa, dim)) * proj));
  }
  criterion(1, "exact QSP identity", worst <= 1e-8,
            "max operator-norm error " + fmt(worst) + " over 20 random (theta, kappa), bound 1e-8");
}

void criterion_2_trotter_order() {
  const int dim = 80;
  ModeSpace space = qubit_oscillator_space(dim, 1);
  bool pass = true;
  std::ostringstream detail;
  for (bool cosine : {true, false}) {
    for (double kappa : {0.5, 1.0}) {
      std::vector<double> errs;
      for (double theta : {0.1, 0.05, 0.025}) {
        TrigGateParams p;
        p.mu = {2.0 * kappa};
        p.angles = {0.0};
        p.lambda = -2.0 * theta;
        p.kind = cosine ? TrigGateParams::Kind::Cosine : TrigGateParams::Kind::Sine;
        Matrix u = realize(compile_trig_gate(p), space);
        errs.push_back(opnorm(u - trig_target(theta, kappa, cosine, dim)));
      }
      for (int i = 0; i + 1 < 3; ++i) {
        double ratio = errs[i] / errs[i + 1];
        if (!(ratio >= 3.5 && ratio <= 4.5)) pass = false;
        detail << (cosine ? "cos" : "sin") << "/k=" << kappa << " ratio "
               << fmt(ratio) << "; ";
      }
    }
  }
  criterion(2, "Lie-Trotter second order", pass, detail.str() + "bounds [3.5, 4.5]");
}

void criterion_3_fourier_engines() {
  std::mt19937 rng(7777);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> length(2.0, 10.0);
  std::uniform_int_distribution<int> pick_modes(1, 2);
  std::uniform_int_distribution<int> pick_nf(2, 10);
  std::uniform_int_distribution<int> degree(0, 6);

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    int num_modes = pick_modes(rng);
    std::vector<MonomialTerm> terms;
    for (int t = 0; t < 3; ++t) {
      MonomialTerm mt;
      mt.coefficient = coeff(rng);
      int total = degree(rng);
      if (num_modes == 1) {
        mt.exponents = {total};
      } else {
        std::uniform_int_distribution<int> split(0, total);
        int e1 = split(rng);
        mt.exponents = {e1, total - e1};
      }
      terms.push_back(mt);
    }
    std::vector<double> lengths;
    for (int n = 0; n < num_modes; ++n) lengths.push_back(length(rng));
    PotentialSpec spec = polynomial_potential(num_modes, terms, lengths);
    int nf = pick_nf(rng);
    FourierSeries a = coefficients_polynomial(spec, nf, 0.0);
    FourierSeries b = coefficients_quadrature(spec, nf, 0, 0.0);
    worst = std::max(worst, std::abs(a.constant_term - b.constant_term));
    auto lookup = [](const FourierSeries& s, const std::vector<int>& m, bool sine) {
      for (const auto& t : s.terms) {
        if (t.m == m) return sine ? t.b : t.a;
      }
      return 0.0;
    };
    for (const auto& m : canonical_multi_indices(num_modes, nf)) {
      worst = std::max(worst, std::abs(lookup(a, m, false) - lookup(b, m, false)));
      worst = std::max(worst, std::abs(lookup(a, m, true) - lookup(b, m, true)));
    }
  }

  // Parity-forbidden coefficients of even and odd test potentials.
  PotentialSpec even = polynomial_potential(1, {{1.0, {4}}, {-0.7, {2}}}, {9.0});
  PotentialSpec odd = polynomial_potential(1, {{0.4, {3}}, {0.2, {1}}}, {9.0});
  double parity = 0.0;
  for (const auto& t : coefficients_quadrature(even, 10, 0, 0.0).terms) {
    parity = std::max(parity, std::abs(t.b));
  }
  for (const auto& t : coefficients_quadrature(odd, 10, 0, 0.0).terms) {
    parity = std::max(parity, std::abs(t.a));
  }

  criterion(3, "Fourier engine oracle equivalence",
            worst <= 1e-10 && parity <= 1e-12,
            "max engine disagreement " + fmt(worst) + " (bound 1e-10), parity residue " +
                fmt(parity) + " (bound 1e-12) over 50 random polynomials");
}

struct DoubleWellOutcome {
  std::vector<double> final_infidelity;     // per N_F
  std::vector<double> max_position_dev;     // per N_F
  std::vector<double> success;              // per N_F
};

DoubleWellOutcome run_double_well_case(double xi1, double xi0, const std::vector<int>& nfs,
                                       int steps, int truncation) {
  double omega = 1.0;
  double x0 = double_well_minimum(xi0, xi1);
  double dt = 20.0 * M_PI / (omega * steps);
  HamiltonianSpec ham = double_well_hamiltonian(omega, xi0, xi1, 7.0 * x0 / 2.0);
  ModeSpace space = qubit_oscillator_space(truncation, 1);
  StateVector osc0 = coherent_state(space.without_qubit(), 0, -x0 / std::sqrt(2.0));
  StateVector initial = attach_qubit_up(osc0);
  ExactPropagator prop(ham, space.without_qubit());
  Operator x = position_op(space.without_qubit(), 0);
  ObservableSchedule sched = ObservableSchedule::evenly_spaced(steps, 200);

  DoubleWellOutcome out;
  for (int nf : nfs) {
    GateProgram prog = compile_program(ham, nf, dt, steps, true, space);
    PreparedProgram prepared(prog);
    double max_dev = 0.0;
    double final_infid = 0.0;
    SimOptions sim;
    sim.on_sample = [&](int step_index, const StateVector& osc_state) {
      double t = step_index * dt;
      StateVector ref = prop.state_at(osc0, t);
      double dev = std::abs(expectation(osc_state, x).real() - expectation(ref, x).real());
      max_dev = std::max(max_dev, dev);
      if (step_index == steps) final_infid = 1.0 - fidelity(ref, osc_state);
    };
    RunResult res = prepared.run(initial, sched, sim);
    out.final_infidelity.push_back(final_infid);
    out.max_position_dev.push_back(max_dev);
    out.success.push_back(res.report.success_probability);
  }
  return out;
}

void criterion_4_double_well() {
  // Parameters exactly as stated: xi1/omega = 0.35, xi0 = xi1/8.
  DoubleWellOutcome out = run_double_well_case(0.35, 0.35 / 8.0, {2, 4, 8}, 500, 64);
  bool ordering = out.final_infidelity[0] > out.final_infidelity[1] &&
                  out.final_infidelity[1] > out.final_infidelity[2];
  bool tracking = out.max_position_dev[2] < out.max_position_dev[0];
  std::ostringstream detail;
  detail << "final infidelity (NF=2,4,8): " << fmt(out.final_infidelity[0]) << ", "
         << fmt(out.final_infidelity[1]) << ", " << fmt(out.final_infidelity[2])
         << " (strictly decreasing: " << (ordering ? "yes" : "NO") << "); max <X> deviation NF=8 "
         << fmt(out.max_position_dev[2]) << " vs NF=2 " << fmt(out.max_position_dev[0])
         << " (below: " << (tracking ? "yes" : "NO") << ")";
  criterion(4, "double-well reproduction", ordering && tracking, detail.str());

  // Informational only: the same pipeline under the swapped ratio reading
  // (xi0/omega = 0.35, xi1 = xi0/8), which matches the below-barrier
  // tunneling regime the experiment describes.
  DoubleWellOutcome swap = run_double_well_case(0.35 / 8.0, 0.35, {2, 4, 8}, 500, 64);
  std::printf("       (info) swapped-ratio reading: final infidelity %s, %s, %s; "
              "max <X> dev NF=8 %s vs NF=2 %s; success(NF=8) %.4f\n",
              fmt(swap.final_infidelity[0]).c_str(), fmt(swap.final_infidelity[1]).c_str(),
              fmt(swap.final_infidelity[2]).c_str(), fmt(swap.max_position_dev[2]).c_str(),
              fmt(swap.max_position_dev[0]).c_str(), swap.success[2]);
}

void criterion_5_two_mode() {
  double omega1 = 1.0, omega2 = 0.5, xi = 0.05;
  double dt = 1.715e-3 / xi;
  int steps = 2500;
  int trunc = 24;
  HamiltonianSpec ham = two_mode_coupling_hamiltonian(omega1, omega2, xi, 2 * M_PI, 2 * M_PI);
  ModeSpace space = qubit_oscillator_space(trunc, 2);
  ModeSpace osc = space.without_qubit();
  ExactPropagator prop(ham, osc);

  // (a) exact-reference population transfer beyond one half.
  StateVector fock10 = fock_state(osc, {1, 0});
  ObservableSchedule sched = ObservableSchedule::evenly_spaced(steps, 200);
  double p02_max = 0.0;
  for (int s : sched.sample_steps) {
    StateVector ref = prop.state_at(fock10, s * dt);
    p02_max = std::max(p02_max, fock_population(ref, {0, 2}));
  }
  bool transfer = p02_max > 0.5;

  // (b) final-time infidelity ordering from |1,0>.
  std::vector<PreparedProgram> prepared;
  std::vector<int> nfs = {3, 8};
  for (int nf : nfs) {
    prepared.emplace_back(compile_program(ham, nf, dt, steps, true, space));
  }
  StateVector refT = prop.state_at(fock10, steps * dt);
  std::vector<double> fock_infid;
  for (auto& prep : prepared) {
    RunResult res = prep.run(attach_qubit_up(fock10));
    fock_infid.push_back(1.0 - fidelity(refT, res.final_state));
  }
  bool ordering = fock_infid[1] < fock_infid[0];

  // (c) pointwise comparison over the coherent-amplitude grid.
  bool pointwise = true;
  std::ostringstream grid_detail;
  for (int i = 0; i <= 6; ++i) {
    double alpha = 0.2 * i;
    StateVector osc0 = (alpha == 0.0)
                           ? vacuum_state(osc)
                           : coherent_state(osc, 0, alpha);
    StateVector ref = prop.state_at(osc0, steps * dt);
    double inf3 = 0, inf8 = 0;
    for (size_t k = 0; k < prepared.size(); ++k) {
      RunResult res = prepared[k].run(attach_qubit_up(osc0));
      double inf = 1.0 - fidelity(ref, res.final_state);
      (k == 0 ? inf3 : inf8) = inf;
    }
    if (inf8 > inf3) pointwise = false;
    grid_detail << "a=" << alpha << ": " << fmt(inf8) << (inf8 <= inf3 ? "<=" : ">")
                << fmt(inf3) << "; ";
  }

  std::ostringstream detail;
  detail << "max exact pop(0,2) " << fmt(p02_max) << " (>0.5: " << (transfer ? "yes" : "NO")
         << "); |1,0> final infidelity NF=8 " << fmt(fock_infid[1]) << " vs NF=3 "
         << fmt(fock_infid[0]) << " (ordered: " << (ordering ? "yes" : "NO")
         << "); pointwise over alpha grid: " << (pointwise ? "yes" : "NO");
  criterion(5, "two-mode reproduction", transfer && ordering && pointwise, detail.str());
  std::printf("       (info) alpha grid NF=8 vs NF=3: %s\n", grid_detail.str().c_str());
}

void criterion_6_postselection() {
  double omega = 1.0, xi1 = 0.35, xi0 = 0.35 / 8.0;
  double x0 = double_well_minimum(xi0, xi1);
  HamiltonianSpec ham = double_well_hamiltonian(omega, xi0, xi1, 7.0 * x0 / 2.0);
  ModeSpace space = qubit_oscillator_space(64, 1);
  StateVector initial = attach_qubit_up(coherent_state(space.without_qubit(), 0,
                                                       -x0 / std::sqrt(2.0)));
  double total_time = 20.0 * M_PI / omega;

  std::vector<double> success;
  for (int steps : {500, 1000, 2000, 4000}) {
    GateProgram prog = compile_program(ham, 8, total_time / steps, steps, true, space);
    RunResult res = run_program(prog, initial);
    success.push_back(res.report.success_probability);
  }
  bool floor = success[0] >= 0.99;
  bool monotone = true;
  for (int i = 0; i + 1 < 4; ++i) {
    if (!(std::abs(1.0 - success[i + 1]) < std::abs(1.0 - success[i]))) monotone = false;
  }
  std::ostringstream detail;
  char sbuf[32];
  std::snprintf(sbuf, sizeof(sbuf), "%.12f", success[0]);
  detail << "success at r=500: " << sbuf << " (>=0.99: " << (floor ? "yes" : "NO")
         << "); deviations from 1 over three halvings: ";
  for (double s : success) detail << fmt(std::abs(1.0 - s)) << " ";
  detail << "(strictly shrinking: " << (monotone ? "yes" : "NO") << ")";
  criterion(6, "postselection contract", floor && monotone, detail.str());
}

void criterion_7_fusion() {
  double omega = 1.0, xi1 = 0.35 / 8.0, xi0 = 0.35;  // cosine-gate dominated program
  double x0 = double_well_minimum(xi0, xi1);
  HamiltonianSpec ham = double_well_hamiltonian(omega, xi0, xi1, 7.0 * x0 / 2.0);
  ModeSpace space = qubit_oscillator_space(64, 1);
  GateProgram prog = compile_program(ham, 8, 20.0 * M_PI / 500, 500, true, space);
  GateProgram fused = fuse_displacements(prog);

  long long before = count_gates(prog.instructions).conditional_displacements;
  long long after = count_gates(fused.instructions).conditional_displacements;
  double reduction = 1.0 - static_cast<double>(after) / before;

  StateVector initial = attach_qubit_up(coherent_state(space.without_qubit(), 0,
                                                       -x0 / std::sqrt(2.0)));
  RunResult raw = run_program(prog, initial);
  RunResult opt = run_program(fused, initial);
  double fid = fidelity(raw.final_state, opt.final_state);

  std::ostringstream detail;
  detail << "displacements " << before << " -> " << after << " (" << fmt(100 * reduction)
         << "% reduction, need >=25%); fused-vs-unfused fidelity deficit "
         << fmt(std::abs(1.0 - fid)) << " (bound 1e-10)";
  criterion(7, "fusion soundness", reduction >= 0.25 && fid >= 1.0 - 1e-10, detail.str());
}

void criterion_8_resources() {
  HamiltonianSpec dw = double_well_hamiltonian(1.0, 0.35 / 8.0, 0.35, 7.0);
  ResourceEstimate est = resource_estimate(dw, 8, 500, 0.01, 4, 1);
  bool threshold_ok = std::abs(est.speedup_threshold - 1e6) <= 1.0;
  bool flag_ok = est.speedup;
  bool count_ok = est.counts.conditional_displacements ==
                  500LL * est.fourier_terms * 4;

  HamiltonianSpec tm = two_mode_coupling_hamiltonian(1.0, 0.5, 0.05, 2 * M_PI, 2 * M_PI);
  ResourceEstimate est2 = resource_estimate(tm, 3, 7, 0.01, 4, 2);
  bool count2_ok = est2.counts.conditional_displacements == 7LL * est2.fourier_terms * 4;

  std::ostringstream detail;
  detail << "threshold " << est.speedup_threshold << " (=1e6: " << (threshold_ok ? "yes" : "NO")
         << "), speedup flag " << (est.speedup ? "true" : "false") << ", CD count "
         << est.counts.conditional_displacements << " = r*terms*4: "
         << (count_ok ? "yes" : "NO") << ", two-mode CD count "
         << est2.counts.conditional_displacements << " = r*terms*4: "
         << (count2_ok ? "yes" : "NO");
  criterion(8, "resource estimator spot checks",
            threshold_ok && flag_ok && count_ok && count2_ok, detail.str());
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  criterion_1_qsp_identity();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_2_trotter_order();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_3_fourier_engines();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_4_double_well();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_5_two_mode();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_6_postselection();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_7_fusion();
  std::printf("       (t = %.1f s)\n", elapsed());
  criterion_8_resources();
  std::printf("total runtime %.1f s\n", elapsed());

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed; see docs in the repository README for the "
                "measured-behavior analysis of the trend criteria.\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
