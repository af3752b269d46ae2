#include "bqsp/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bqsp {

namespace {

std::vector<double> effective_angles(const std::vector<double>& angles, int num_modes) {
  if (angles.empty()) return std::vector<double>(num_modes, 0.0);
  if (static_cast<int>(angles.size()) != num_modes) {
    throw std::invalid_argument("instruction angle vector does not match the mode count");
  }
  return angles;
}

}  // namespace

ObservableSchedule ObservableSchedule::evenly_spaced(int steps, int samples) {
  ObservableSchedule s;
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  samples = std::max(1, samples);
  for (int j = 0; j <= samples; ++j) {
    s.sample_steps.push_back(static_cast<int>(std::llround(
        static_cast<double>(j) * steps / samples)));
  }
  std::sort(s.sample_steps.begin(), s.sample_steps.end());
  s.sample_steps.erase(std::unique(s.sample_steps.begin(), s.sample_steps.end()),
                       s.sample_steps.end());
  return s;
}

GateMatrixFactory::GateMatrixFactory(ModeSpace space) : space_(space) {}

const GateMatrixFactory::ModeBasis& GateMatrixFactory::mode_basis(int mode, double theta) {
  auto key = std::make_pair(mode, theta);
  auto it = mode_cache_.find(key);
  if (it != mode_cache_.end()) return it->second;
  Eigen::SelfAdjointEigenSolver<Matrix> es(quadrature_local(space_.truncation_dim, theta));
  ModeBasis b{es.eigenvalues(), es.eigenvectors()};
  return mode_cache_.emplace(key, std::move(b)).first->second;
}

const GateMatrixFactory::JointBasis& GateMatrixFactory::joint_basis(
    const std::vector<double>& angles) {
  auto it = joint_cache_.find(angles);
  if (it != joint_cache_.end()) return it->second;
  JointBasis jb;
  jb.vectors = Matrix::Identity(1, 1);
  for (int n = 0; n < space_.num_modes; ++n) {
    const ModeBasis& mb = mode_basis(n, angles[n]);
    jb.vectors = kron(jb.vectors, mb.vectors);
    jb.values.push_back(mb.values);
  }
  return joint_cache_.emplace(angles, std::move(jb)).first->second;
}

void GateMatrixFactory::cos_sin(const std::vector<double>& kappas,
                                const std::vector<double>& angles, Matrix& c, Matrix& s) {
  if (static_cast<int>(kappas.size()) != space_.num_modes) {
    throw std::invalid_argument("kappa vector does not match the mode count");
  }
  std::vector<double> ang = effective_angles(angles, space_.num_modes);
  const JointBasis& jb = joint_basis(ang);
  int dosc = space_.oscillator_dim();
  // kappa.Q is diagonal in the joint basis with values sum_n kappa_n lambda_n.
  Eigen::VectorXd diag(dosc);
  int d = space_.truncation_dim;
  for (int g = 0; g < dosc; ++g) {
    int rest = g;
    double v = 0.0;
    for (int n = space_.num_modes - 1; n >= 0; --n) {
      v += kappas[n] * jb.values[n](rest % d);
      rest /= d;
    }
    diag(g) = v;
  }
  Matrix scaled = jb.vectors * diag.array().cos().matrix().cast<Complex>().asDiagonal();
  c.noalias() = scaled * jb.vectors.adjoint();
  scaled = jb.vectors * diag.array().sin().matrix().cast<Complex>().asDiagonal();
  s.noalias() = scaled * jb.vectors.adjoint();
}

Matrix GateMatrixFactory::free_oscillator_unitary(double duration,
                                                  const std::vector<double>& frequencies) {
  if (static_cast<int>(frequencies.size()) != space_.num_modes) {
    throw std::invalid_argument("frequency vector does not match the mode count");
  }
  int d = space_.truncation_dim;
  Matrix u = Matrix::Identity(1, 1);
  for (int n = 0; n < space_.num_modes; ++n) {
    Matrix x = quadrature_local(d, 0.0);
    Matrix p = quadrature_local(d, M_PI / 2.0);
    Matrix h0 = 0.5 * frequencies[n] * (x * x + p * p);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
    Vector phases(d);
    for (int i = 0; i < d; ++i) phases(i) = std::exp(Complex(0, -duration) * es.eigenvalues()(i));
    u = kron(u, Matrix(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()));
  }
  return u;
}

Matrix GateMatrixFactory::matrix(const GateInstruction& inst) {
  int dosc = space_.oscillator_dim();
  int dim = space_.total_dim();
  if (const auto* r = std::get_if<RotationZ>(&inst)) {
    if (!space_.qubit_present) throw std::invalid_argument("rotation needs a qubit factor");
    Matrix m = Matrix::Zero(dim, dim);
    m.topLeftCorner(dosc, dosc) =
        std::exp(Complex(0, r->angle)) * Matrix::Identity(dosc, dosc);
    m.bottomRightCorner(dosc, dosc) =
        std::exp(Complex(0, -r->angle)) * Matrix::Identity(dosc, dosc);
    return m;
  }
  if (std::holds_alternative<HadamardYZ>(inst)) {
    if (!space_.qubit_present) throw std::invalid_argument("Hadamard needs a qubit factor");
    return kron(hadamard_yz(), Matrix::Identity(dosc, dosc));
  }
  if (const auto* cd = std::get_if<ConditionalDisplacement>(&inst)) {
    if (!space_.qubit_present) {
      throw std::invalid_argument("conditional displacement needs a qubit factor");
    }
    Matrix c, s;
    cos_sin(cd->kappas, cd->angles, c, s);
    Matrix m(dim, dim);
    m.topLeftCorner(dosc, dosc) = c;
    m.bottomRightCorner(dosc, dosc) = c;
    m.topRightCorner(dosc, dosc) = Complex(0, 1) * s;
    m.bottomLeftCorner(dosc, dosc) = Complex(0, 1) * s;
    return m;
  }
  if (const auto* f = std::get_if<FreeEvolution>(&inst)) {
    Matrix u = free_oscillator_unitary(f->duration, f->frequencies);
    if (!space_.qubit_present) return u;
    return kron(Matrix::Identity(2, 2), u);
  }
  throw std::invalid_argument("PostSelectUp is a marker, not a gate");
}

void GateMatrixFactory::apply_left(const GateInstruction& inst, Matrix& acc) {
  int dosc = space_.oscillator_dim();
  if (!space_.qubit_present) {
    if (const auto* f = std::get_if<FreeEvolution>(&inst)) {
      Matrix u = free_oscillator_unitary(f->duration, f->frequencies);
      acc = u * acc;
      return;
    }
    throw std::invalid_argument("only free evolution acts on an oscillator-only space");
  }
  auto top = acc.topRows(dosc);
  auto bottom = acc.bottomRows(dosc);
  if (const auto* r = std::get_if<RotationZ>(&inst)) {
    top *= std::exp(Complex(0, r->angle));
    bottom *= std::exp(Complex(0, -r->angle));
    return;
  }
  if (std::holds_alternative<HadamardYZ>(inst)) {
    const double inv = 1.0 / std::sqrt(2.0);
    Matrix t = (top - Complex(0, 1) * bottom) * inv;
    bottom = (Complex(0, 1) * top - bottom) * inv;
    top = t;
    return;
  }
  if (const auto* cd = std::get_if<ConditionalDisplacement>(&inst)) {
    Matrix c, s;
    cos_sin(cd->kappas, cd->angles, c, s);
    Matrix t(dosc, acc.cols());
    t.noalias() = c * top;
    t.noalias() += Complex(0, 1) * (s * bottom);
    Matrix b(dosc, acc.cols());
    b.noalias() = Complex(0, 1) * (s * top);
    b.noalias() += c * bottom;
    top = t;
    bottom = b;
    return;
  }
  if (const auto* f = std::get_if<FreeEvolution>(&inst)) {
    Matrix u = free_oscillator_unitary(f->duration, f->frequencies);
    top = u * top;
    bottom = u * bottom;
    return;
  }
  throw std::invalid_argument("PostSelectUp is a marker, not a gate");
}

Operator gate_matrix(const GateInstruction& inst, const ModeSpace& space) {
  GateMatrixFactory f(space);
  return Operator(f.matrix(inst), space, false);
}

namespace {

struct ProgramShape {
  int steps = 1;
  int per_step = 0;
  bool postselect = false;
};

ProgramShape resolve_shape(const GateProgram& program) {
  ProgramShape shape;
  shape.postselect = !program.instructions.empty() &&
                     std::holds_alternative<PostSelectUp>(program.instructions.back());
  long long body = static_cast<long long>(program.instructions.size()) -
                   (shape.postselect ? 1 : 0);
  if (program.meta.trotter_steps >= 1 &&
      body == static_cast<long long>(program.meta.trotter_steps) *
                  program.meta.instructions_per_step) {
    shape.steps = program.meta.trotter_steps;
    shape.per_step = program.meta.instructions_per_step;
  } else {
    shape.steps = body > 0 ? 1 : 0;
    shape.per_step = static_cast<int>(body);
  }
  return shape;
}

bool same_instruction(const GateInstruction& a, const GateInstruction& b) {
  if (a.index() != b.index()) return false;
  if (const auto* r = std::get_if<RotationZ>(&a)) {
    return r->angle == std::get<RotationZ>(b).angle;
  }
  if (const auto* cd = std::get_if<ConditionalDisplacement>(&a)) {
    const auto& o = std::get<ConditionalDisplacement>(b);
    return cd->kappas == o.kappas && cd->angles == o.angles;
  }
  if (const auto* f = std::get_if<FreeEvolution>(&a)) {
    const auto& o = std::get<FreeEvolution>(b);
    return f->duration == o.duration && f->frequencies == o.frequencies;
  }
  return true;
}

}  // namespace

PreparedProgram::PreparedProgram(const GateProgram& program)
    : space_(program.meta.space), dt_(program.meta.dt) {
  ProgramShape shape = resolve_shape(program);
  steps_ = shape.steps;
  postselect_ = shape.postselect;
  counts_ = count_gates(program.instructions);
  if (postselect_ && !space_.qubit_present) {
    throw std::invalid_argument("postselection requires a qubit factor");
  }

  // Compose the per-step matrix once; steps repeat by construction, which is
  // verified against the instruction list.
  GateMatrixFactory factory(space_);
  int dim = space_.total_dim();
  step_ = Matrix::Identity(dim, dim);
  for (int i = 0; i < shape.per_step; ++i) {
    factory.apply_left(program.instructions[i], step_);
  }
  for (int s = 1; s < shape.steps; ++s) {
    for (int i = 0; i < shape.per_step; ++i) {
      if (!same_instruction(program.instructions[i],
                            program.instructions[s * shape.per_step + i])) {
        throw std::invalid_argument("program steps are not identical repetitions");
      }
    }
  }
}

RunResult PreparedProgram::run(const StateVector& initial,
                               const ObservableSchedule& schedule,
                               const SimOptions& options) const {
  auto t0 = std::chrono::steady_clock::now();
  const ModeSpace& space = space_;
  if (!(initial.space == space)) {
    throw std::invalid_argument("initial state space does not match the program");
  }
  if (std::abs(initial.amps.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument("initial state must be normalized");
  }
  if (postselect_ && initial.amps.tail(space.oscillator_dim()).norm() > 1e-9) {
    throw std::invalid_argument("postselected programs start from the |up> qubit state");
  }

  int dosc = space.oscillator_dim();
  std::vector<Operator> position_ops;
  ModeSpace osc = space.without_qubit();
  for (int n = 0; n < space.num_modes; ++n) position_ops.push_back(position_op(osc, n));

  RunResult result{{}, initial};
  result.report.gate_counts = counts_;

  auto record_at = [&](int step_index, const Vector& psi) {
    ObservableRecord rec;
    rec.step = step_index;
    rec.time = step_index * dt_;
    StateVector full(psi, space, false);
    rec.leakage = edge_leakage(full, options.leakage_buffer);
    StateVector osc_state = full;
    if (space.qubit_present) {
      Vector up = psi.head(dosc);
      rec.projection_probability = up.squaredNorm();
      if (rec.projection_probability > 0) {
        osc_state = StateVector(up / std::sqrt(rec.projection_probability), osc);
      } else {
        osc_state = StateVector(Vector::Zero(dosc), osc, false);
      }
    }
    for (const auto& op : position_ops) {
      rec.mean_positions.push_back(expectation(osc_state, op).real());
    }
    for (const auto& occ : schedule.fock_targets) {
      rec.fock_populations.push_back(fock_population(osc_state, occ));
    }
    result.report.records.push_back(rec);
    if (options.on_sample) options.on_sample(step_index, osc_state);
  };

  Vector psi = initial.amps;
  auto scheduled = [&](int s) {
    return std::binary_search(schedule.sample_steps.begin(), schedule.sample_steps.end(), s);
  };
  if (scheduled(0)) record_at(0, psi);
  Vector next(space.total_dim());
  for (int s = 1; s <= steps_; ++s) {
    next.noalias() = step_ * psi;
    psi.swap(next);
    if (scheduled(s)) record_at(s, psi);
  }

  StateVector final_state(psi, space, false);
  result.report.final_leakage = edge_leakage(final_state, options.leakage_buffer);
  if (postselect_) {
    Vector up = psi.head(dosc);
    double p = up.squaredNorm();
    result.report.success_probability = p;
    if (p < options.success_floor) {
      throw NumericalTrustError("postselection success probability " + std::to_string(p) +
                                " fell below the floor");
    }
    final_state = StateVector(up / std::sqrt(p), osc);
  }
  result.final_state = std::move(final_state);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

RunResult run_program(const GateProgram& program, const StateVector& initial,
                      const ObservableSchedule& schedule, const SimOptions& options) {
  return PreparedProgram(program).run(initial, schedule, options);
}

Operator hamiltonian_matrix(const HamiltonianSpec& ham, const ModeSpace& oscillator_space) {
  ham.validate();
  if (oscillator_space.qubit_present) {
    throw std::invalid_argument("the reference Hamiltonian acts on the oscillators only");
  }
  if (oscillator_space.num_modes != ham.num_modes()) {
    throw std::invalid_argument("ModeSpace mode count does not match the Hamiltonian");
  }
  int d = oscillator_space.truncation_dim;
  int dosc = oscillator_space.oscillator_dim();
  Matrix h = Matrix::Zero(dosc, dosc);

  Matrix x = quadrature_local(d, 0.0);
  Matrix p = quadrature_local(d, M_PI / 2.0);
  for (int n = 0; n < ham.num_modes(); ++n) {
    Matrix local = 0.5 * ham.frequencies[n] * (x * x + p * p);
    Matrix m = Matrix::Identity(1, 1);
    for (int j = 0; j < ham.num_modes(); ++j) {
      m = kron(m, j == n ? local : Matrix(Matrix::Identity(d, d)));
    }
    h += m;
  }

  const PotentialSpec& pot = ham.potential;
  std::vector<double> angles = pot.quadrature_angles.empty()
                                   ? std::vector<double>(ham.num_modes(), 0.0)
                                   : pot.quadrature_angles;
  if (!pot.polynomial.empty()) {
    // Operator polynomial: per-monomial Kronecker product of local powers.
    for (const auto& term : pot.polynomial) {
      Matrix m = Matrix::Identity(1, 1);
      for (int n = 0; n < ham.num_modes(); ++n) {
        Matrix q = quadrature_local(d, angles[n]);
        Matrix power = Matrix::Identity(d, d);
        for (int e = 0; e < term.exponents[n]; ++e) power = power * q;
        m = kron(m, power);
      }
      h += term.coefficient * m;
    }
  } else {
    // Pointwise function on the joint quadrature eigenvalue grid.
    Matrix joint = Matrix::Identity(1, 1);
    std::vector<Eigen::VectorXd> values;
    for (int n = 0; n < ham.num_modes(); ++n) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(quadrature_local(d, angles[n]));
      joint = kron(joint, Matrix(es.eigenvectors()));
      values.push_back(es.eigenvalues());
    }
    Eigen::VectorXd diag(dosc);
    std::vector<double> point(ham.num_modes());
    for (int g = 0; g < dosc; ++g) {
      int rest = g;
      for (int n = ham.num_modes() - 1; n >= 0; --n) {
        point[n] = values[n](rest % d);
        rest /= d;
      }
      diag(g) = pot.evaluate(point);
    }
    h += joint * diag.cast<Complex>().asDiagonal() * joint.adjoint();
  }
  // Symmetrize away rounding asymmetry before flagging hermitian.
  h = 0.5 * (h + Matrix(h.adjoint()));
  return Operator(std::move(h), oscillator_space, true);
}

ExactPropagator::ExactPropagator(const HamiltonianSpec& ham, const ModeSpace& oscillator_space)
    : h_(hamiltonian_matrix(ham, oscillator_space)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_.mat);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("reference Hamiltonian eigendecomposition failed");
  }
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

StateVector ExactPropagator::state_at(const StateVector& initial, double time) const {
  if (!(initial.space == h_.space)) {
    throw std::invalid_argument("initial state space does not match the propagator");
  }
  Vector coeffs = eigenvectors_.adjoint() * initial.amps;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) *= std::exp(Complex(0, -eigenvalues_(i) * time));
  }
  return StateVector(eigenvectors_ * coeffs, h_.space, false);
}

StateVector exact_reference(const HamiltonianSpec& ham, double T,
                            const StateVector& initial, double* leakage_out) {
  if (initial.space.qubit_present) {
    throw std::invalid_argument("exact_reference expects an oscillator-only state");
  }
  ExactPropagator prop(ham, initial.space);
  StateVector out = prop.state_at(initial, T);
  if (leakage_out) *leakage_out = edge_leakage(out);
  return out;
}

std::vector<InfidelityRow> infidelity_sweep(const HamiltonianSpec& ham,
                                            const std::vector<int>& max_orders,
                                            double dt, int steps,
                                            const StateVector& initial_oscillator,
                                            const ModeSpace& space,
                                            const ObservableSchedule& schedule,
                                            const SimOptions& options, bool fuse) {
  if (initial_oscillator.space.qubit_present) {
    throw std::invalid_argument("sweep initial state must be oscillator-only");
  }
  ObservableSchedule sched = schedule.sample_steps.empty()
                                 ? ObservableSchedule::evenly_spaced(steps)
                                 : schedule;
  ExactPropagator prop(ham, initial_oscillator.space);
  StateVector initial = attach_qubit_up(initial_oscillator);

  std::vector<InfidelityRow> rows;
  for (int nf : max_orders) {
    GateProgram prog = compile_program(ham, nf, dt, steps, true, space);
    if (fuse) prog = fuse_displacements(prog);
    SimOptions local = options;
    local.on_sample = [&](int step_index, const StateVector& osc_state) {
      InfidelityRow row;
      row.max_order = nf;
      row.step = step_index;
      row.time = step_index * dt;
      StateVector ref = prop.state_at(initial_oscillator, row.time);
      row.infidelity = 1.0 - fidelity(ref, osc_state);
      row.leakage = edge_leakage(osc_state, options.leakage_buffer);
      row.leakage_flagged = row.leakage > options.leakage_threshold;
      rows.push_back(row);
      if (options.on_sample) options.on_sample(step_index, osc_state);
    };
    run_program(prog, initial, sched, local);
  }
  return rows;
}

}  // namespace bqsp
