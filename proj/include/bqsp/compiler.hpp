#pragma once

#include "bqsp/fourier.hpp"
#include "bqsp/hamiltonian.hpp"
#include "bqsp/hilbert.hpp"

#include <string>
#include <variant>
#include <vector>

namespace bqsp {

// Instructions are listed in application order: the first element acts on the
// state first.
struct RotationZ {
  double angle = 0.0;  // exp(i angle sigma_z)
};
struct HadamardYZ {};
struct ConditionalDisplacement {
  std::vector<double> kappas;  // exp(i sigma_x sum_n kappa_n Q_n^theta_n)
  std::vector<double> angles;  // theta_n per mode
};
struct FreeEvolution {
  double duration = 0.0;
  std::vector<double> frequencies;  // omega_n
};
struct PostSelectUp {};

using GateInstruction = std::variant<RotationZ, HadamardYZ, ConditionalDisplacement,
                                     FreeEvolution, PostSelectUp>;

// Parameters of one trigonometric gate: target exp(-i Lambda trig(mu.Q))
// realized with qubit rotation angle theta = -Lambda/2 and conditional
// displacements kappa = mu/2.
struct TrigGateParams {
  enum class Kind { Cosine, Sine };
  std::vector<double> mu;
  double lambda = 0.0;
  Kind kind = Kind::Cosine;
  std::vector<double> angles;  // quadrature angles theta_n

  double theta() const { return -lambda / 2.0; }
  std::vector<double> kappas() const;
};

struct GateCounts {
  long long conditional_displacements = 0;
  long long rotations = 0;
  long long hadamards = 0;
  long long free_evolutions = 0;
  bool operator==(const GateCounts&) const = default;
};
GateCounts count_gates(const std::vector<GateInstruction>& instructions);

struct ProgramMetadata {
  ModeSpace space;
  double dt = 0.0;
  int trotter_steps = 0;       // r
  int max_order = 0;           // N_F
  int instructions_per_step = 0;
  bool postselect = false;
  std::string source_digest;   // Hamiltonian content digest
  std::vector<std::string> warnings;  // not part of the serialized IR
};

struct GateProgram {
  std::vector<GateInstruction> instructions;
  ProgramMetadata meta;

  // Instruction count with the closed-form prediction: r * per_step (+ marker).
  void check_shape() const;
};

struct CompileOptions {
  bool strang = false;        // Strang splitting instead of first order
  double lambda_split = 0.0;  // >0: split gates with |Lambda| above this value
  double theta_warn = 0.2;    // warn when |theta| = |Lambda|/2 exceeds this
};

// The d=2 QSP block realizing W(kappa) exp(i theta sigma_z) W(kappa)^dagger
// through the angle list phi_0 = pi/2, phi_1 = theta - pi/2, phi_2 = 0
// (zero-angle rotations omitted).
std::vector<GateInstruction> compile_qsp_block(double theta,
                                               const std::vector<double>& kappas,
                                               const std::vector<double>& angles);

// Cosine: U(theta, kappa) U(theta, -kappa); sine: the same pair with flipped
// theta on the second block, conjugated by Hadamard-YZ. Four conditional
// displacements per gate. Lambda = 0 compiles to nothing.
std::vector<GateInstruction> compile_trig_gate(const TrigGateParams& params,
                                               std::vector<std::string>* warnings = nullptr,
                                               const CompileOptions& options = {});

// One Trotter step: free evolution first, then one trig gate per canonical
// multi-index in lexicographic order (cosine before sine); the m=0 constant
// is skipped as a global phase.
std::vector<GateInstruction> compile_trotter_step(const FourierSeries& series,
                                                  const std::vector<double>& frequencies,
                                                  double dt,
                                                  std::vector<std::string>* warnings = nullptr,
                                                  const CompileOptions& options = {});

GateProgram compile_program(const HamiltonianSpec& ham, int max_order, double dt,
                            int steps, bool postselect, const ModeSpace& space,
                            const CompileOptions& options = {});

// Merges adjacent conditional displacements (vector addition) and adjacent
// rotations, dropping zero instructions. Quarter-turn z-rotations are moved
// across displacements (flipping their sign) when doing so removes a
// displacement; segments where nothing is gained are left untouched. The
// compiled unitary is preserved.
GateProgram fuse_displacements(const GateProgram& program);

struct ResourceEstimate {
  GateCounts counts;
  double qsp_time_proxy = 0.0;     // 4 N_F^M / eta
  double native_time_proxy = 0.0;  // 1 / eta^d
  double speedup_threshold = 0.0;  // eta^{-(d-1)}
  bool speedup = false;            // N_F^M < threshold
  long long fourier_terms = 0;     // surviving cosine + sine terms
};

// Gate counts come from an actual compilation (splitting disabled, nominal
// time step); the time proxies follow the eta-scaling argument for a single
// d-th order term spanning M modes.
ResourceEstimate resource_estimate(const HamiltonianSpec& ham, int max_order, int steps,
                                   double eta, int native_order, int modes_per_term);

// Line-oriented text IR; the compiler-simulator contract. Numeric fields are
// printed with 17 significant digits; the header carries the space, dt, r,
// N_F and a content digest over the instruction lines.
std::string serialize_program(const GateProgram& program);
GateProgram parse_program(const std::string& text);

std::string fnv1a_hex_digest(const std::string& bytes);

}  // namespace bqsp
