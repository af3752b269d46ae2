#include "bqsp/hamiltonian.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bqsp {

namespace {

// FNV-1a over a byte string, hex-printed.
std::string fnv1a_hex(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void HamiltonianSpec::validate() const {
  if (frequencies.empty()) throw std::invalid_argument("Hamiltonian needs at least one mode");
  for (double w : frequencies) {
    if (!std::isfinite(w)) throw std::invalid_argument("mode frequency must be finite");
  }
  potential.validate();
  if (potential.num_modes != num_modes()) {
    throw std::invalid_argument("potential mode count does not match frequencies");
  }
}

HamiltonianSpec double_well_hamiltonian(double omega, double xi0, double xi1,
                                        double domain_length) {
  HamiltonianSpec h;
  h.frequencies = {omega};
  h.potential = polynomial_potential(
      1, {{xi1, {4}}, {-(xi0 + omega / 2.0), {2}}}, {domain_length});
  h.convention_note =
      "V(X) = xi1 X^4 - (xi0 + omega/2) X^2; the omega/2 X^2 term moved into H0";
  h.validate();
  return h;
}

HamiltonianSpec two_mode_coupling_hamiltonian(double omega1, double omega2, double xi,
                                              double l1, double l2) {
  HamiltonianSpec h;
  h.frequencies = {omega1, omega2};
  h.potential = polynomial_potential(2, {{xi, {1, 2}}}, {l1, l2});
  h.convention_note = "V = xi X1 X2^2; no quadratic reassignment";
  h.validate();
  return h;
}

std::string hamiltonian_digest(const HamiltonianSpec& ham) {
  std::string s = "w:";
  for (double w : ham.frequencies) s += g17(w) + ",";
  s += ";L:";
  for (double l : ham.potential.domain_lengths) s += g17(l) + ",";
  s += ";theta:";
  for (double t : ham.potential.quadrature_angles) s += g17(t) + ",";
  if (!ham.potential.polynomial.empty()) {
    s += ";poly:";
    for (const auto& t : ham.potential.polynomial) {
      s += g17(t.coefficient) + "^";
      for (int e : t.exponents) s += std::to_string(e) + ".";
      s += "|";
    }
  } else {
    s += ";callable";
  }
  return fnv1a_hex(s);
}

}  // namespace bqsp
