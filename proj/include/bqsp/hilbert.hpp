#pragma once

#include <Eigen/Dense>

// Some toolchain configurations leak the C <complex.h> I macro, which breaks
// any later template using I as a parameter name.
#ifdef I
#undef I
#endif

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bqsp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Thrown when a computed quantity cannot be trusted numerically (truncation
// leakage, postselection success below floor). Distinct from invalid_argument
// so callers can map it to a dedicated exit code.
struct NumericalTrustError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr int kDefaultLeakageBuffer = 8;

// Truncated Fock space layout: an optional qubit factor followed by
// `num_modes` oscillator factors of `truncation_dim` levels each.
// Composite basis index is row-major in the order qubit, mode 1, ..., mode N;
// qubit index 0 is |up>.
struct ModeSpace {
  int truncation_dim = 0;
  int num_modes = 0;
  bool qubit_present = false;

  int oscillator_dim() const;
  int total_dim() const { return (qubit_present ? 2 : 1) * oscillator_dim(); }
  ModeSpace without_qubit() const { return {truncation_dim, num_modes, false}; }
  ModeSpace with_qubit() const { return {truncation_dim, num_modes, true}; }
  bool operator==(const ModeSpace&) const = default;
};

ModeSpace oscillator_space(int truncation_dim, int num_modes);
ModeSpace qubit_oscillator_space(int truncation_dim, int num_modes);

struct Operator {
  Matrix mat;
  ModeSpace space;
  bool hermitian_hint = false;

  Operator() = default;
  Operator(Matrix m, ModeSpace s, bool hermitian = false);
};

struct StateVector {
  Vector amps;
  ModeSpace space;
  // Post-projection intermediates may carry a non-unit norm.
  bool normalized = true;

  StateVector() = default;
  StateVector(Vector a, ModeSpace s, bool check_norm = true);
};

// Flattened basis index for (qubit_branch, occupations); qubit_branch ignored
// when no qubit factor is present.
int basis_index(const ModeSpace& space, int qubit_branch,
                const std::vector<int>& occupations);

Matrix kron(const Matrix& a, const Matrix& b);

// Local d x d blocks.
Matrix annihilation_local(int dim);
Matrix quadrature_local(int dim, double theta);
Matrix pauli(char axis);  // 'x', 'y', 'z'
Matrix hadamard_yz();     // (sigma_y + sigma_z)/sqrt(2), unitary involution

// Operators embedded on the full space (identity on the qubit and on the
// other modes).
Operator annihilation_op(const ModeSpace& space, int mode_index);
Operator quadrature_op(const ModeSpace& space, int mode_index, double theta);
Operator position_op(const ModeSpace& space, int mode_index);
Operator momentum_op(const ModeSpace& space, int mode_index);
Operator qubit_op(const ModeSpace& space, const Matrix& qubit_matrix);
Operator identity_op(const ModeSpace& space);

// exp(scale * H) through eigendecomposition of the Hermitian matrix H.
// Unitary for purely imaginary scale.
Operator hermitian_expm(const Operator& h, Complex scale);

struct TensorFactor {
  int dim = 0;
  std::optional<Matrix> mat;  // nullopt = identity of size dim

  static TensorFactor identity(int d) { return {d, std::nullopt}; }
  static TensorFactor of(Matrix m);
};

// Kronecker product in the fixed factor order (qubit first, then modes
// ascending); factor dimensions must multiply to the space dimension.
Operator tensor(const ModeSpace& space, const std::vector<TensorFactor>& factors);

StateVector fock_state(const ModeSpace& space, const std::vector<int>& occupations);
StateVector vacuum_state(const ModeSpace& space);

// Coherent amplitude alpha in one mode, vacuum elsewhere, qubit |up> if
// present. Renormalized after truncation; the pre-normalization tail weight
// is reported through truncation_leakage when non-null.
StateVector coherent_state(const ModeSpace& space, int mode_index, Complex alpha,
                           double* truncation_leakage = nullptr);

double fidelity(const StateVector& a, const StateVector& b);
Complex overlap(const StateVector& a, const StateVector& b);
Complex expectation(const StateVector& state, const Operator& op);

// |amplitude|^2 of one Fock basis vector of an oscillator-only state.
double fock_population(const StateVector& state, const std::vector<int>& occupation);

struct QubitProjection {
  StateVector state;   // renormalized oscillator-only state
  double probability;  // squared norm before renormalization
};
QubitProjection project_qubit_up(const StateVector& state);
StateVector attach_qubit_up(const StateVector& oscillator_state);

// Population with any mode occupation at or above truncation_dim - buffer;
// the proxy for truncation error used by every accuracy claim.
double edge_leakage(const StateVector& state, int buffer = kDefaultLeakageBuffer);

}  // namespace bqsp
