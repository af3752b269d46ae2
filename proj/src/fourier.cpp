#include "bqsp/fourier.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

namespace bqsp {

namespace {

using Complex = std::complex<double>;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void PotentialSpec::validate() const {
  if (num_modes < 1) throw std::invalid_argument("potential needs at least one mode");
  if (static_cast<int>(domain_lengths.size()) != num_modes) {
    throw std::invalid_argument("domain_lengths must have one entry per mode");
  }
  for (double l : domain_lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("domain lengths must be strictly positive and finite");
    }
  }
  if (!quadrature_angles.empty() &&
      static_cast<int>(quadrature_angles.size()) != num_modes) {
    throw std::invalid_argument("quadrature_angles must be empty or one per mode");
  }
  if (polynomial.empty() && !callable) {
    throw std::invalid_argument("potential needs either monomial terms or a callable");
  }
  for (const auto& t : polynomial) {
    if (!std::isfinite(t.coefficient)) {
      throw std::invalid_argument("monomial coefficient must be finite");
    }
    if (static_cast<int>(t.exponents.size()) != num_modes) {
      throw std::invalid_argument("monomial exponent multi-index length mismatch");
    }
    for (int e : t.exponents) {
      if (e < 0) throw std::invalid_argument("monomial exponents must be non-negative");
    }
  }
}

double PotentialSpec::evaluate(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != num_modes) {
    throw std::invalid_argument("evaluation point length mismatch");
  }
  if (!polynomial.empty()) {
    double v = 0.0;
    for (const auto& t : polynomial) {
      double p = t.coefficient;
      for (int n = 0; n < num_modes; ++n) p *= std::pow(point[n], t.exponents[n]);
      v += p;
    }
    return v;
  }
  return callable(point);
}

PotentialSpec polynomial_potential(int num_modes, std::vector<MonomialTerm> terms,
                                   std::vector<double> domain_lengths) {
  PotentialSpec s;
  s.num_modes = num_modes;
  s.polynomial = std::move(terms);
  s.domain_lengths = std::move(domain_lengths);
  s.validate();
  return s;
}

PotentialSpec callable_potential(int num_modes,
                                 std::function<double(const std::vector<double>&)> f,
                                 std::vector<double> domain_lengths) {
  PotentialSpec s;
  s.num_modes = num_modes;
  s.callable = std::move(f);
  s.domain_lengths = std::move(domain_lengths);
  s.validate();
  return s;
}

double default_domain_length(double mean_q, double sigma_q) {
  return 2.0 * (std::abs(mean_q) + 4.0 * sigma_q);
}

std::vector<double> FourierSeries::mu_of(const FourierTerm& t) const {
  std::vector<double> mu(num_modes);
  for (int n = 0; n < num_modes; ++n) mu[n] = t.m[n] * wavevectors[n];
  return mu;
}

std::vector<std::vector<int>> canonical_multi_indices(int num_modes, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> m(num_modes, -max_order);
  while (true) {
    int first_nonzero = 0;
    for (int v : m) {
      if (v != 0) { first_nonzero = v; break; }
    }
    if (first_nonzero > 0) out.push_back(m);
    int n = num_modes - 1;
    while (n >= 0 && m[n] == max_order) m[n--] = -max_order;
    if (n < 0) break;
    ++m[n];
  }
  return out;  // odometer order is lexicographic
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    weights[i] = 2.0 * v0 * v0;
  }
}

namespace {

FourierSeries make_series_shell(const PotentialSpec& spec, int max_order) {
  FourierSeries s;
  s.num_modes = spec.num_modes;
  s.max_order = max_order;
  s.domain_lengths = spec.domain_lengths;
  s.quadrature_angles = spec.quadrature_angles.empty()
                            ? std::vector<double>(spec.num_modes, 0.0)
                            : spec.quadrature_angles;
  s.wavevectors.resize(spec.num_modes);
  for (int n = 0; n < spec.num_modes; ++n) {
    s.wavevectors[n] = 2.0 * M_PI / spec.domain_lengths[n];
  }
  return s;
}

void push_term(FourierSeries& s, const std::vector<int>& m, Complex c,
               double prune_threshold) {
  // A = 2 Re C, B = -2 Im C for the canonical (paired) indices.
  double a = 2.0 * c.real();
  double b = -2.0 * c.imag();
  if (std::abs(a) <= prune_threshold) a = 0.0;
  if (std::abs(b) <= prune_threshold) b = 0.0;
  if (a != 0.0 || b != 0.0) s.terms.push_back({m, a, b});
}

// integral over [-L/2, L/2] of x^p exp(-i m k x) dx with k = 2 pi / L,
// by the integration-by-parts recursion; exact up to rounding.
Complex monomial_fourier_integral(int p, int m, double L) {
  if (m == 0) {
    if (p % 2 == 1) return 0.0;
    return 2.0 * std::pow(L / 2.0, p + 1) / (p + 1);
  }
  double a = m * 2.0 * M_PI / L;
  double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
  Complex integral = 0.0;                   // p = 0 term vanishes for m != 0
  for (int q = 1; q <= p; ++q) {
    Complex boundary = 0.0;
    if (q % 2 == 1) {
      boundary = sign * 2.0 * std::pow(L / 2.0, q) / Complex(0, -a);
    }
    integral = boundary + (static_cast<double>(q) / Complex(0, a)) * integral;
  }
  return integral;
}

}  // namespace

FourierSeries coefficients_polynomial(const PotentialSpec& spec, int max_order,
                                      double prune_threshold) {
  spec.validate();
  if (spec.polynomial.empty()) {
    throw std::invalid_argument("coefficients_polynomial requires a polynomial potential");
  }
  FourierSeries s = make_series_shell(spec, max_order);
  double vol = 1.0;
  for (double l : spec.domain_lengths) vol *= l;

  auto coeff_at = [&](const std::vector<int>& m) {
    Complex c = 0.0;
    for (const auto& t : spec.polynomial) {
      Complex prod = t.coefficient / vol;
      for (int n = 0; n < spec.num_modes; ++n) {
        prod *= monomial_fourier_integral(t.exponents[n], m[n], spec.domain_lengths[n]);
      }
      c += prod;
    }
    return c;
  };

  s.constant_term = coeff_at(std::vector<int>(spec.num_modes, 0)).real();
  for (const auto& m : canonical_multi_indices(spec.num_modes, max_order)) {
    push_term(s, m, coeff_at(m), prune_threshold);
  }
  return s;
}

FourierSeries coefficients_quadrature(const PotentialSpec& spec, int max_order,
                                      int points_per_dim, double prune_threshold) {
  spec.validate();
  if (points_per_dim <= 0) points_per_dim = std::max(64, 4 * max_order + 8);
  if (points_per_dim < 4 * max_order) {
    throw std::invalid_argument("points_per_dim below the 4*N_F Nyquist margin");
  }
  FourierSeries s = make_series_shell(spec, max_order);

  std::vector<double> nodes1, weights1;
  gauss_legendre(points_per_dim, nodes1, weights1);
  // Enforce exact +- symmetry of the rule so that parity cancellations below
  // happen bitwise instead of accumulating eigensolver rounding.
  const int np = points_per_dim;
  for (int i = 0; i < np / 2; ++i) {
    double a = 0.5 * (nodes1[np - 1 - i] - nodes1[i]);
    nodes1[i] = -a;
    nodes1[np - 1 - i] = a;
    double w = 0.5 * (weights1[i] + weights1[np - 1 - i]);
    weights1[i] = w;
    weights1[np - 1 - i] = w;
  }
  if (np % 2 == 1) nodes1[np / 2] = 0.0;

  const int nm = spec.num_modes;
  // Flattened product grid; dimensions here are small (N <= 2 in practice).
  long long total = 1;
  for (int n = 0; n < nm; ++n) total *= points_per_dim;

  std::vector<double> values(total);
  std::vector<double> wprod(total);
  std::vector<std::vector<double>> coords(nm, std::vector<double>(total));
  std::vector<int> idx(nm, 0);
  std::vector<double> point(nm);
  for (long long g = 0; g < total; ++g) {
    double w = 1.0;
    for (int n = 0; n < nm; ++n) {
      double half = spec.domain_lengths[n] / 2.0;
      point[n] = half * nodes1[idx[n]];
      w *= half * weights1[idx[n]];
      coords[n][g] = point[n];
    }
    double v = spec.evaluate(point);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("potential evaluated to a non-finite value inside the domain");
    }
    values[g] = v;
    wprod[g] = w;
    int n = nm - 1;
    while (n >= 0 && ++idx[n] == points_per_dim) idx[n--] = 0;
  }

  // Index of the globally reflected grid point q -> -q.
  auto reflected = [&](long long g) {
    long long out = 0;
    long long rest = g;
    long long stride = total;
    for (int n = 0; n < nm; ++n) {
      stride /= points_per_dim;
      long long in = rest / stride;
      rest %= stride;
      out += (points_per_dim - 1 - in) * stride;
    }
    return out;
  };

  double vol = 1.0;
  for (double l : spec.domain_lengths) vol *= l;

  // Reflection pairs are summed together: the odd part of the integrand
  // cancels exactly within each pair, so parity-forbidden coefficients come
  // out as clean zeros.
  auto coeff_at = [&](const std::vector<int>& m) {
    double re = 0.0, im = 0.0;
    for (long long g = 0; g < total; ++g) {
      long long rg = reflected(g);
      if (rg < g) continue;
      double phase = 0.0;
      for (int n = 0; n < nm; ++n) phase += m[n] * s.wavevectors[n] * coords[n][g];
      if (rg == g) {
        re += wprod[g] * values[g] * std::cos(phase);
        im -= wprod[g] * values[g] * std::sin(phase);
      } else {
        re += wprod[g] * std::cos(phase) * (values[g] + values[rg]);
        im -= wprod[g] * std::sin(phase) * (values[g] - values[rg]);
      }
    }
    return Complex(re, im) / vol;
  };

  s.constant_term = coeff_at(std::vector<int>(nm, 0)).real();
  for (const auto& m : canonical_multi_indices(nm, max_order)) {
    push_term(s, m, coeff_at(m), prune_threshold);
  }
  return s;
}

double evaluate_series(const FourierSeries& series, const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != series.num_modes) {
    throw std::invalid_argument("evaluation point length mismatch");
  }
  double v = series.constant_term;
  for (const auto& t : series.terms) {
    double phase = 0.0;
    for (int n = 0; n < series.num_modes; ++n) {
      phase += t.m[n] * series.wavevectors[n] * point[n];
    }
    v += t.a * std::cos(phase) + t.b * std::sin(phase);
  }
  return v;
}

ReconstructionError reconstruction_error(const FourierSeries& series,
                                         const PotentialSpec& spec,
                                         int samples_per_dim) {
  if (samples_per_dim < 2) throw std::invalid_argument("need at least 2 samples per dim");
  const int nm = spec.num_modes;
  long long total = 1;
  for (int n = 0; n < nm; ++n) total *= samples_per_dim;
  std::vector<int> idx(nm, 0);
  std::vector<double> point(nm);
  ReconstructionError err;
  double sq = 0.0;
  for (long long g = 0; g < total; ++g) {
    for (int n = 0; n < nm; ++n) {
      double half = spec.domain_lengths[n] / 2.0;
      point[n] = -half + spec.domain_lengths[n] * idx[n] / (samples_per_dim - 1.0);
    }
    double d = std::abs(evaluate_series(series, point) - spec.evaluate(point));
    err.max_abs = std::max(err.max_abs, d);
    sq += d * d;
    int n = nm - 1;
    while (n >= 0 && ++idx[n] == samples_per_dim) idx[n--] = 0;
  }
  err.rms = std::sqrt(sq / total);
  return err;
}

std::string series_table(const FourierSeries& series) {
  std::string out;
  out += "# fourier series table v1\n";
  out += "# modes=" + std::to_string(series.num_modes) +
         " max_order=" + std::to_string(series.max_order) + "\n";
  out += "# L";
  for (double l : series.domain_lengths) out += " " + format_g17(l);
  out += "\n# k";
  for (double k : series.wavevectors) out += " " + format_g17(k);
  out += "\n# theta";
  for (double t : series.quadrature_angles) out += " " + format_g17(t);
  out += "\n# constant " + format_g17(series.constant_term) + "\n";
  out += "# columns: m_1..m_N A B\n";
  for (const auto& t : series.terms) {
    for (int v : t.m) out += std::to_string(v) + " ";
    out += format_g17(t.a) + " " + format_g17(t.b) + "\n";
  }
  return out;
}

}  // namespace bqsp
