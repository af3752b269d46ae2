#include "bqsp/hilbert.hpp"

#include <cmath>
#include <string>

namespace bqsp {

namespace {

void check_mode_index(const ModeSpace& space, int mode_index) {
  if (mode_index < 0 || mode_index >= space.num_modes) {
    throw std::invalid_argument("mode index " + std::to_string(mode_index) +
                                " out of range for " + std::to_string(space.num_modes) +
                                " modes");
  }
}

double max_abs_diff_from_adjoint(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

int ModeSpace::oscillator_dim() const {
  int d = 1;
  for (int n = 0; n < num_modes; ++n) d *= truncation_dim;
  return d;
}

ModeSpace oscillator_space(int truncation_dim, int num_modes) {
  if (truncation_dim < 1 || num_modes < 1) {
    throw std::invalid_argument("ModeSpace requires positive truncation_dim and num_modes");
  }
  return {truncation_dim, num_modes, false};
}

ModeSpace qubit_oscillator_space(int truncation_dim, int num_modes) {
  ModeSpace s = oscillator_space(truncation_dim, num_modes);
  s.qubit_present = true;
  return s;
}

Operator::Operator(Matrix m, ModeSpace s, bool hermitian)
    : mat(std::move(m)), space(s), hermitian_hint(hermitian) {
  if (mat.rows() != mat.cols() || mat.rows() != space.total_dim()) {
    throw std::invalid_argument("operator dimension does not match its ModeSpace");
  }
  if (hermitian_hint && max_abs_diff_from_adjoint(mat) > kHermitianTol) {
    throw std::invalid_argument("operator marked hermitian is not hermitian to 1e-12");
  }
}

StateVector::StateVector(Vector a, ModeSpace s, bool check_norm)
    : amps(std::move(a)), space(s) {
  if (amps.size() != space.total_dim()) {
    throw std::invalid_argument("state dimension does not match its ModeSpace");
  }
  if (check_norm) {
    if (std::abs(amps.norm() - 1.0) > kNormTol) {
      throw std::invalid_argument("state vector is not normalized");
    }
  } else {
    normalized = false;
  }
}

int basis_index(const ModeSpace& space, int qubit_branch,
                const std::vector<int>& occupations) {
  if (static_cast<int>(occupations.size()) != space.num_modes) {
    throw std::invalid_argument("occupation multi-index length mismatch");
  }
  int idx = space.qubit_present ? qubit_branch : 0;
  for (int n = 0; n < space.num_modes; ++n) {
    if (occupations[n] < 0 || occupations[n] >= space.truncation_dim) {
      throw std::invalid_argument("occupation out of truncation range");
    }
    idx = idx * space.truncation_dim + occupations[n];
  }
  return idx;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix annihilation_local(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix quadrature_local(int dim, double theta) {
  Matrix a = annihilation_local(dim);
  Complex ph = std::exp(Complex(0, -theta));
  Matrix q = (ph * a + std::conj(ph) * a.adjoint()) / std::sqrt(2.0);
  return q;
}

Matrix pauli(char axis) {
  Matrix m(2, 2);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli axis must be x, y or z");
  }
  return m;
}

Matrix hadamard_yz() { return (pauli('y') + pauli('z')) / std::sqrt(2.0); }

namespace {

// Embed a local mode operator: identity on the qubit and on every other mode.
Operator embed_mode(const ModeSpace& space, int mode_index, const Matrix& local,
                    bool hermitian) {
  check_mode_index(space, mode_index);
  Matrix m = space.qubit_present ? Matrix(Matrix::Identity(2, 2)) : Matrix::Identity(1, 1);
  for (int n = 0; n < space.num_modes; ++n) {
    m = (n == mode_index) ? kron(m, local)
                          : kron(m, Matrix::Identity(space.truncation_dim, space.truncation_dim));
  }
  return Operator(std::move(m), space, hermitian);
}

}  // namespace

Operator annihilation_op(const ModeSpace& space, int mode_index) {
  return embed_mode(space, mode_index, annihilation_local(space.truncation_dim), false);
}

Operator quadrature_op(const ModeSpace& space, int mode_index, double theta) {
  if (theta < 0.0 || theta >= 2.0 * M_PI) {
    throw std::invalid_argument("quadrature angle must lie in [0, 2pi)");
  }
  return embed_mode(space, mode_index, quadrature_local(space.truncation_dim, theta), true);
}

Operator position_op(const ModeSpace& space, int mode_index) {
  return quadrature_op(space, mode_index, 0.0);
}

Operator momentum_op(const ModeSpace& space, int mode_index) {
  return quadrature_op(space, mode_index, M_PI / 2.0);
}

Operator qubit_op(const ModeSpace& space, const Matrix& qubit_matrix) {
  if (!space.qubit_present) throw std::invalid_argument("space has no qubit factor");
  if (qubit_matrix.rows() != 2 || qubit_matrix.cols() != 2) {
    throw std::invalid_argument("qubit operator must be 2x2");
  }
  Matrix m = kron(qubit_matrix, Matrix::Identity(space.oscillator_dim(), space.oscillator_dim()));
  bool herm = max_abs_diff_from_adjoint(qubit_matrix) <= kHermitianTol;
  return Operator(std::move(m), space, herm);
}

Operator identity_op(const ModeSpace& space) {
  return Operator(Matrix::Identity(space.total_dim(), space.total_dim()), space, true);
}

Operator hermitian_expm(const Operator& h, Complex scale) {
  if (!h.hermitian_hint) {
    throw std::invalid_argument("hermitian_expm requires the hermitian hint");
  }
  if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw std::invalid_argument("hermitian_expm scale must be finite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in hermitian_expm");
  }
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(scale * es.eigenvalues()(i));
  }
  Matrix out = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(std::move(out), h.space, false);
}

TensorFactor TensorFactor::of(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("tensor factor must be square");
  TensorFactor f;
  f.dim = static_cast<int>(m.rows());
  f.mat = std::move(m);
  return f;
}

Operator tensor(const ModeSpace& space, const std::vector<TensorFactor>& factors) {
  long long dim = 1;
  for (const auto& f : factors) {
    if (f.dim < 1) throw std::invalid_argument("tensor factor dimension must be positive");
    dim *= f.dim;
  }
  if (dim != space.total_dim()) {
    throw std::invalid_argument("tensor factor dimensions do not multiply to the space dimension");
  }
  Matrix m = Matrix::Identity(1, 1);
  for (const auto& f : factors) {
    m = f.mat ? kron(m, *f.mat) : kron(m, Matrix::Identity(f.dim, f.dim));
  }
  return Operator(std::move(m), space, false);
}

StateVector fock_state(const ModeSpace& space, const std::vector<int>& occupations) {
  Vector v = Vector::Zero(space.total_dim());
  v(basis_index(space, 0, occupations)) = 1.0;
  return StateVector(std::move(v), space);
}

StateVector vacuum_state(const ModeSpace& space) {
  return fock_state(space, std::vector<int>(space.num_modes, 0));
}

StateVector coherent_state(const ModeSpace& space, int mode_index, Complex alpha,
                           double* truncation_leakage) {
  check_mode_index(space, mode_index);
  double n2 = std::norm(alpha);
  if (n2 > space.truncation_dim / 4.0) {
    throw std::invalid_argument("coherent amplitude too large for the truncation (|alpha|^2 > dim/4)");
  }
  int d = space.truncation_dim;
  Vector local(d);
  local(0) = std::exp(-n2 / 2.0);
  for (int n = 1; n < d; ++n) local(n) = local(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  double norm2 = local.squaredNorm();
  if (truncation_leakage) *truncation_leakage = std::max(0.0, 1.0 - norm2);
  local /= std::sqrt(norm2);

  Matrix col = Matrix::Zero(d, 1);  // reuse kron over column vectors
  col.col(0) = local;
  Matrix v = Matrix::Ones(1, 1);
  if (space.qubit_present) {
    Matrix up = Matrix::Zero(2, 1);
    up(0, 0) = 1.0;
    v = kron(v, up);
  }
  for (int n = 0; n < space.num_modes; ++n) {
    if (n == mode_index) {
      v = kron(v, col);
    } else {
      Matrix vac = Matrix::Zero(d, 1);
      vac(0, 0) = 1.0;
      v = kron(v, vac);
    }
  }
  return StateVector(v.col(0), space);
}

Complex overlap(const StateVector& a, const StateVector& b) {
  if (!(a.space == b.space)) throw std::invalid_argument("overlap requires matching spaces");
  return a.amps.dot(b.amps);  // Eigen dot conjugates the left argument
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(overlap(a, b));
}

Complex expectation(const StateVector& state, const Operator& op) {
  if (!(state.space == op.space)) throw std::invalid_argument("expectation requires matching spaces");
  return state.amps.dot(op.mat * state.amps);
}

double fock_population(const StateVector& state, const std::vector<int>& occupation) {
  if (state.space.qubit_present) {
    throw std::invalid_argument("fock_population expects an oscillator-only state; project the qubit first");
  }
  return std::norm(state.amps(basis_index(state.space, 0, occupation)));
}

QubitProjection project_qubit_up(const StateVector& state) {
  if (!state.space.qubit_present) {
    throw std::invalid_argument("project_qubit_up requires a qubit factor");
  }
  int dosc = state.space.oscillator_dim();
  Vector up = state.amps.head(dosc);
  double p = up.squaredNorm();
  QubitProjection out;
  out.probability = p;
  ModeSpace osc = state.space.without_qubit();
  if (p > 0.0) {
    out.state = StateVector(up / std::sqrt(p), osc);
  } else {
    out.state = StateVector(Vector::Zero(dosc), osc, false);
  }
  return out;
}

StateVector attach_qubit_up(const StateVector& oscillator_state) {
  if (oscillator_state.space.qubit_present) {
    throw std::invalid_argument("state already carries a qubit factor");
  }
  ModeSpace full = oscillator_state.space.with_qubit();
  Vector v = Vector::Zero(full.total_dim());
  v.head(oscillator_state.amps.size()) = oscillator_state.amps;
  return StateVector(std::move(v), full);
}

double edge_leakage(const StateVector& state, int buffer) {
  const ModeSpace& s = state.space;
  int floor_level = std::max(0, s.truncation_dim - buffer);
  double leak = 0.0;
  int dosc = s.oscillator_dim();
  int blocks = s.qubit_present ? 2 : 1;
  for (int b = 0; b < blocks; ++b) {
    for (int i = 0; i < dosc; ++i) {
      int rest = i;
      bool edge = false;
      for (int n = s.num_modes - 1; n >= 0; --n) {
        int occ = rest % s.truncation_dim;
        rest /= s.truncation_dim;
        if (occ >= floor_level) { edge = true; break; }
      }
      if (edge) leak += std::norm(state.amps(b * dosc + i));
    }
  }
  return leak;
}

}  // namespace bqsp
