#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bqsp {

struct MonomialTerm {
  double coefficient = 0.0;
  std::vector<int> exponents;  // one entry per mode
};

// A real target potential V(q_1, ..., q_N) over the box
// [-L_1/2, L_1/2] x ... x [-L_N/2, L_N/2], given either as a list of
// monomials or as a pointwise-evaluable function.
struct PotentialSpec {
  int num_modes = 0;
  std::vector<double> quadrature_angles;  // theta_n; empty means all zero
  std::vector<MonomialTerm> polynomial;
  std::function<double(const std::vector<double>&)> callable;
  std::vector<double> domain_lengths;  // L_n

  bool is_polynomial() const { return !polynomial.empty() || !callable; }
  double evaluate(const std::vector<double>& point) const;
  void validate() const;
};

PotentialSpec polynomial_potential(int num_modes, std::vector<MonomialTerm> terms,
                                   std::vector<double> domain_lengths);
PotentialSpec callable_potential(int num_modes,
                                 std::function<double(const std::vector<double>&)> f,
                                 std::vector<double> domain_lengths);

// Domain length so that |<Q>| + 4 sigma_Q of the given first/second moments
// fits inside [-L/2, L/2].
double default_domain_length(double mean_q, double sigma_q);

// One canonical multi-index with its cosine/sine coefficients. Indices run
// over m in {-N_F..N_F}^N with the first nonzero entry positive; each +-m
// pair is stored once, so cos(mu.q) and sin(mu.q) with mu = m*k cover every
// independent harmonic.
struct FourierTerm {
  std::vector<int> m;
  double a = 0.0;  // cosine coefficient
  double b = 0.0;  // sine coefficient
};

struct FourierSeries {
  int num_modes = 0;
  int max_order = 0;  // N_F
  std::vector<double> wavevectors;     // k_n = 2 pi / L_n
  std::vector<double> domain_lengths;  // L_n
  std::vector<double> quadrature_angles;
  double constant_term = 0.0;  // m=0 cosine coefficient; global phase only
  std::vector<FourierTerm> terms;  // lexicographic in m, pruned

  std::vector<double> mu_of(const FourierTerm& t) const;
  bool empty() const { return terms.empty(); }
};

inline constexpr double kPruneThreshold = 1e-12;

// Enumerates the canonical representatives of {-max_order..max_order}^N
// (first nonzero entry positive), in lexicographic order, excluding zero.
std::vector<std::vector<int>> canonical_multi_indices(int num_modes, int max_order);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Coefficients by Gauss-Legendre product quadrature of the defining integral.
// points_per_dim <= 0 selects the default max(64, 4*max_order + 8).
FourierSeries coefficients_quadrature(const PotentialSpec& spec, int max_order,
                                      int points_per_dim = 0,
                                      double prune_threshold = kPruneThreshold);

// Exact coefficients for polynomial potentials via the recursive closed form
// of integral x^p exp(-i m k x) dx, combined per monomial by separability.
FourierSeries coefficients_polynomial(const PotentialSpec& spec, int max_order,
                                      double prune_threshold = kPruneThreshold);

double evaluate_series(const FourierSeries& series, const std::vector<double>& point);

struct ReconstructionError {
  double max_abs = 0.0;
  double rms = 0.0;
};
ReconstructionError reconstruction_error(const FourierSeries& series,
                                         const PotentialSpec& spec,
                                         int samples_per_dim);

// Structured-text table, one row per multi-index: m_1 ... m_N  A  B.
std::string series_table(const FourierSeries& series);

}  // namespace bqsp
