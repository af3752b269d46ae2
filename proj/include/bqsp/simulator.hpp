#pragma once

#include "bqsp/compiler.hpp"
#include "bqsp/hamiltonian.hpp"
#include "bqsp/hilbert.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace bqsp {

struct ObservableSchedule {
  std::vector<int> sample_steps;                // sorted, unique, within [0, r]
  std::vector<std::vector<int>> fock_targets;   // occupations to record

  // Up to `samples` evenly spaced step indices plus both endpoints.
  static ObservableSchedule evenly_spaced(int steps, int samples = 200);
};

struct ObservableRecord {
  int step = 0;
  double time = 0.0;
  std::vector<double> mean_positions;    // <X_n> on the |up>-projected state
  std::vector<double> fock_populations;  // one per schedule target
  double projection_probability = 1.0;   // |up> weight at this step
  double leakage = 0.0;                  // edge population of the full state
};

struct RunReport {
  std::vector<ObservableRecord> records;
  double success_probability = 1.0;  // recorded by the final postselection
  double final_leakage = 0.0;
  std::optional<double> fidelity_vs_exact;
  GateCounts gate_counts;
  double wall_seconds = 0.0;
};

struct RunResult {
  RunReport report;
  StateVector final_state;  // oscillator-only after postselection
};

struct SimOptions {
  double success_floor = 1e-6;
  int leakage_buffer = kDefaultLeakageBuffer;
  double leakage_threshold = 1e-8;
  // Called at every scheduled step with the projected, renormalized
  // oscillator state (or the raw state when no qubit is present).
  std::function<void(int step, const StateVector&)> on_sample;
};

// Builds instruction matrices on a fixed space, caching the per-mode
// quadrature eigenbases that conditional displacements and free evolutions
// are assembled from.
class GateMatrixFactory {
 public:
  explicit GateMatrixFactory(ModeSpace space);

  const ModeSpace& space() const { return space_; }
  Matrix matrix(const GateInstruction& inst);
  // acc <- G(inst) * acc, using the qubit block structure instead of a full
  // product where possible.
  void apply_left(const GateInstruction& inst, Matrix& acc);
  // Oscillator-only cos(kappa.Q) and sin(kappa.Q).
  void cos_sin(const std::vector<double>& kappas, const std::vector<double>& angles,
               Matrix& c, Matrix& s);
  Matrix free_oscillator_unitary(double duration, const std::vector<double>& frequencies);

 private:
  struct ModeBasis {
    Eigen::VectorXd values;
    Matrix vectors;
  };
  const ModeBasis& mode_basis(int mode, double theta);
  struct JointBasis {
    Matrix vectors;                         // kron of per-mode eigenvectors
    std::vector<Eigen::VectorXd> values;    // per-mode eigenvalues
  };
  const JointBasis& joint_basis(const std::vector<double>& angles);

  ModeSpace space_;
  std::map<std::pair<int, double>, ModeBasis> mode_cache_;
  std::map<std::vector<double>, JointBasis> joint_cache_;
};

// Full-dimension matrix of a single instruction (PostSelectUp has none and is
// rejected).
Operator gate_matrix(const GateInstruction& inst, const ModeSpace& space);

// A program with its per-step composite matrix precomputed; one composition
// serves any number of runs (Delta t is fixed across steps by construction).
class PreparedProgram {
 public:
  explicit PreparedProgram(const GateProgram& program);

  RunResult run(const StateVector& initial, const ObservableSchedule& schedule = {},
                const SimOptions& options = {}) const;
  int steps() const { return steps_; }
  const ModeSpace& space() const { return space_; }
  const Matrix& step_matrix() const { return step_; }

 private:
  ModeSpace space_;
  Matrix step_;
  int steps_ = 0;
  double dt_ = 0.0;
  bool postselect_ = false;
  GateCounts counts_;
};

// Executes an r-periodic program by composing the per-step matrix once and
// applying it r times; records scheduled observables on the |up>-projected
// state and resolves a trailing PostSelectUp into projection, success
// probability and renormalization.
RunResult run_program(const GateProgram& program, const StateVector& initial,
                      const ObservableSchedule& schedule = {},
                      const SimOptions& options = {});

// exp(-i H T) |initial> with H built from the spec on the truncated space;
// the potential enters as an operator polynomial (monomials) or through the
// joint quadrature eigenbasis (callable).
StateVector exact_reference(const HamiltonianSpec& ham, double T,
                            const StateVector& initial, double* leakage_out = nullptr);

// One eigendecomposition, many evolution times.
class ExactPropagator {
 public:
  ExactPropagator(const HamiltonianSpec& ham, const ModeSpace& oscillator_space);
  StateVector state_at(const StateVector& initial, double time) const;
  const Operator& hamiltonian() const { return h_; }

 private:
  Operator h_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

// Builds the truncated Hamiltonian matrix of the spec.
Operator hamiltonian_matrix(const HamiltonianSpec& ham, const ModeSpace& oscillator_space);

struct InfidelityRow {
  int max_order = 0;
  int step = 0;
  double time = 0.0;
  double infidelity = 0.0;
  double leakage = 0.0;
  bool leakage_flagged = false;
};

// Compile and run once per N_F, comparing the projected state against the
// exact reference at every scheduled time.
std::vector<InfidelityRow> infidelity_sweep(const HamiltonianSpec& ham,
                                            const std::vector<int>& max_orders,
                                            double dt, int steps,
                                            const StateVector& initial_oscillator,
                                            const ModeSpace& space,
                                            const ObservableSchedule& schedule = {},
                                            const SimOptions& options = {},
                                            bool fuse = false);

}  // namespace bqsp
