#pragma once

#include "bqsp/fourier.hpp"

#include <string>
#include <vector>

namespace bqsp {

// Total Hamiltonian in split form: sum_n omega_n/2 (X_n^2 + P_n^2) plus the
// anharmonic potential, which is net of any quadratic terms absorbed into the
// harmonic part. Any X^2 reassignment between the two is recorded in
// convention_note.
struct HamiltonianSpec {
  std::vector<double> frequencies;  // omega_n
  PotentialSpec potential;
  std::string convention_note;

  int num_modes() const { return static_cast<int>(frequencies.size()); }
  void validate() const;
};

// H = omega/2 P^2 + xi1 X^4 - xi0 X^2 rearranged around H0 = omega/2 (P^2+X^2),
// leaving V(X) = xi1 X^4 - (xi0 + omega/2) X^2 on the given domain.
HamiltonianSpec double_well_hamiltonian(double omega, double xi0, double xi1,
                                        double domain_length);

// Two oscillators with a xi X1 X2^2 coupling on the box L1 x L2.
HamiltonianSpec two_mode_coupling_hamiltonian(double omega1, double omega2, double xi,
                                              double l1, double l2);

// Stable short digest of the physical content (frequencies, potential terms,
// domain); used to tie compiled programs back to their source.
std::string hamiltonian_digest(const HamiltonianSpec& ham);

}  // namespace bqsp
