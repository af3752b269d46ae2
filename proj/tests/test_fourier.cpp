#include "bqsp/fourier.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>

using namespace bqsp;

namespace {

const FourierTerm* find_term(const FourierSeries& s, const std::vector<int>& m) {
  for (const auto& t : s.terms) {
    if (t.m == m) return &t;
  }
  return nullptr;
}

double term_a(const FourierSeries& s, const std::vector<int>& m) {
  const FourierTerm* t = find_term(s, m);
  return t ? t->a : 0.0;
}

double term_b(const FourierSeries& s, const std::vector<int>& m) {
  const FourierTerm* t = find_term(s, m);
  return t ? t->b : 0.0;
}

}  // namespace

TEST_CASE("gauss-legendre rule") {
  std::vector<double> x, w;
  gauss_legendre(24, x, w);
  double sum = 0, second = 0;
  for (int i = 0; i < 24; ++i) {
    sum += w[i];
    second += w[i] * x[i] * x[i];
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(second == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("canonical multi-index enumeration") {
  auto one = canonical_multi_indices(1, 3);
  CHECK(one.size() == 3);  // {1}, {2}, {3}
  CHECK(one.front() == std::vector<int>{1});

  auto two = canonical_multi_indices(2, 2);
  // (0,1), (0,2) plus (m1 in 1..2) x (m2 in -2..2): 2 + 10.
  CHECK(two.size() == 12);
  for (const auto& m : two) {
    int first = 0;
    for (int v : m) {
      if (v != 0) { first = v; break; }
    }
    CHECK(first > 0);
  }
}

TEST_CASE("x^2 series on L = 2 pi") {
  PotentialSpec spec = polynomial_potential(1, {{1.0, {2}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 4);
  CHECK(s.constant_term == doctest::Approx(M_PI * M_PI / 3.0).epsilon(1e-12));
  CHECK(term_a(s, {1}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(term_a(s, {2}) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& t : s.terms) CHECK(t.b == 0.0);

  FourierSeries q = coefficients_quadrature(spec, 4);
  CHECK(q.constant_term == doctest::Approx(s.constant_term).epsilon(1e-12));
  for (const auto& t : s.terms) {
    CHECK(term_a(q, t.m) == doctest::Approx(t.a).epsilon(1e-11));
  }
}

TEST_CASE("sawtooth series of x on L = 2 pi") {
  PotentialSpec spec = polynomial_potential(1, {{1.0, {1}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 3);
  CHECK(term_b(s, {1}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(term_b(s, {2}) == doctest::Approx(-1.0).epsilon(1e-12));
  for (const auto& t : s.terms) CHECK(t.a == 0.0);
}

TEST_CASE("x^4 leading coefficient") {
  PotentialSpec spec = polynomial_potential(1, {{1.0, {4}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 3);
  CHECK(term_a(s, {1}) == doctest::Approx(48.0 - 8.0 * M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("constant potential keeps only the constant term") {
  PotentialSpec spec = polynomial_potential(1, {{2.5, {0}}}, {3.0});
  FourierSeries s = coefficients_polynomial(spec, 4);
  CHECK(s.constant_term == doctest::Approx(2.5));
  CHECK(s.terms.empty());
}

TEST_CASE("zero potential gives an empty series") {
  PotentialSpec spec = polynomial_potential(1, {{0.0, {2}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 4);
  CHECK(s.constant_term == 0.0);
  CHECK(s.empty());
  FourierSeries q = coefficients_quadrature(spec, 4);
  CHECK(q.empty());
}

TEST_CASE("two-mode x1 x2^2 coefficients") {
  PotentialSpec spec = polynomial_potential(2, {{1.0, {1, 2}}}, {2 * M_PI, 2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 3);
  // Odd under joint reflection: sine-only.
  for (const auto& t : s.terms) CHECK(t.a == 0.0);
  // Closed forms: B(m1, m2 != 0) = -4 (-1)^{m1 + m2} / (m1 m2^2);
  // B(m1, 0) = (2 pi^2 / 3) (-1)^{m1 + 1} / m1; B(0, m2) = 0.
  CHECK(term_b(s, {1, 1}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(term_b(s, {1, -1}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(term_b(s, {1, 0}) == doctest::Approx(2.0 * M_PI * M_PI / 3.0).epsilon(1e-12));
  CHECK(term_b(s, {2, 1}) == doctest::Approx(-2.0 * (-1.0)).epsilon(1e-12));
  CHECK(find_term(s, {0, 1}) == nullptr);
  CHECK(find_term(s, {0, 2}) == nullptr);

  FourierSeries q = coefficients_quadrature(spec, 3);
  for (const auto& t : s.terms) {
    CHECK(term_b(q, t.m) == doctest::Approx(t.b).epsilon(1e-10));
  }
}

TEST_CASE("polynomial and quadrature engines agree on random polynomials") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> expo(0, 3);
  std::uniform_real_distribution<double> length(2.0, 9.0);
  for (int trial = 0; trial < 8; ++trial) {
    int num_modes = 1 + trial % 2;
    std::vector<MonomialTerm> terms;
    for (int t = 0; t < 3; ++t) {
      MonomialTerm mt;
      mt.coefficient = coeff(rng);
      for (int n = 0; n < num_modes; ++n) mt.exponents.push_back(expo(rng));
      terms.push_back(mt);
    }
    std::vector<double> lengths;
    for (int n = 0; n < num_modes; ++n) lengths.push_back(length(rng));
    PotentialSpec spec = polynomial_potential(num_modes, terms, lengths);
    int nf = 2 + trial % 5;
    FourierSeries a = coefficients_polynomial(spec, nf, 0.0);
    FourierSeries b = coefficients_quadrature(spec, nf, 0, 0.0);
    CHECK(std::abs(a.constant_term - b.constant_term) < 1e-10);
    for (const auto& m : canonical_multi_indices(num_modes, nf)) {
      CHECK(std::abs(term_a(a, m) - term_a(b, m)) < 1e-10);
      CHECK(std::abs(term_b(a, m) - term_b(b, m)) < 1e-10);
    }
  }
}

TEST_CASE("parity pruning is clean before the prune step") {
  // Even potential: every sine coefficient below 1e-12 pre-pruning.
  PotentialSpec even = polynomial_potential(1, {{1.0, {4}}, {-0.5, {2}}}, {5.0});
  FourierSeries se = coefficients_quadrature(even, 8, 0, 0.0);
  for (const auto& t : se.terms) CHECK(std::abs(t.b) <= 1e-12);

  PotentialSpec odd = polynomial_potential(1, {{1.0, {3}}, {0.7, {1}}}, {5.0});
  FourierSeries so = coefficients_quadrature(odd, 8, 0, 0.0);
  for (const auto& t : so.terms) CHECK(std::abs(t.a) <= 1e-12);
}

TEST_CASE("conjugate symmetry of the defining integral") {
  // Test-side quadrature oracle for C_m on the asymmetric quartic potential.
  auto v = [](double x) { return 0.05 * x * x * x * x - 0.7 * x * x + 0.2 * x; };
  double L = 12.0;
  std::vector<double> nodes, weights;
  gauss_legendre(96, nodes, weights);
  auto cm = [&](int m) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
      double x = 0.5 * L * nodes[i];
      acc += 0.5 * L * weights[i] * v(x) *
             std::exp(std::complex<double>(0, -m * 2.0 * M_PI / L * x));
    }
    return acc / L;
  };
  for (int m = 1; m <= 6; ++m) {
    CHECK(std::abs(cm(-m) - std::conj(cm(m))) < 1e-12);
  }
}

TEST_CASE("series evaluation") {
  FourierSeries empty;
  empty.num_modes = 1;
  empty.wavevectors = {1.0};
  CHECK(evaluate_series(empty, {0.3}) == 0.0);

  // Truncated x^2 series at x = 0: the defect equals the alternating tail
  // -sum_{m > NF} 4 (-1)^m / m^2, evaluated here as the oracle.
  PotentialSpec spec = polynomial_potential(1, {{1.0, {2}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 8);
  double tail = 0.0;
  for (int m = 9; m < 200000; ++m) {
    tail += 4.0 * ((m % 2 == 0) ? 1.0 : -1.0) / (static_cast<double>(m) * m);
  }
  double at_zero = evaluate_series(s, {0.0});
  CHECK(at_zero == doctest::Approx(-tail).epsilon(1e-4));
  CHECK(std::abs(at_zero) < 0.03);
}

TEST_CASE("asymmetric quartic reconstruction improves with order") {
  PotentialSpec spec = polynomial_potential(
      1, {{0.05, {4}}, {-0.7, {2}}, {0.2, {1}}}, {12.0});
  FourierSeries s8 = coefficients_polynomial(spec, 8);
  bool has_cos = false, has_sin = false;
  for (const auto& t : s8.terms) {
    if (t.a != 0.0) has_cos = true;
    if (t.b != 0.0) has_sin = true;
  }
  CHECK(has_cos);
  CHECK(has_sin);

  double previous = 1e300;
  for (int nf : {2, 4, 8, 16}) {
    FourierSeries s = coefficients_polynomial(spec, nf);
    ReconstructionError err = reconstruction_error(s, spec, 501);
    CHECK(err.rms <= previous);
    previous = err.rms;
  }
  ReconstructionError e2 = reconstruction_error(coefficients_polynomial(spec, 2), spec, 501);
  ReconstructionError e8 = reconstruction_error(s8, spec, 501);
  CHECK(e8.max_abs < e2.max_abs);
  CHECK(e8.rms < e2.rms);
}

TEST_CASE("band-limited input is reproduced exactly") {
  double L = 4.0, k = 2.0 * M_PI / L;
  PotentialSpec spec = callable_potential(
      1, [k](const std::vector<double>& q) { return std::cos(k * q[0]); }, {L});
  FourierSeries s = coefficients_quadrature(spec, 3);
  CHECK(term_a(s, {1}) == doctest::Approx(1.0).epsilon(1e-12));
  ReconstructionError err = reconstruction_error(s, spec, 301);
  CHECK(err.max_abs <= 1e-10);

  PotentialSpec zero = polynomial_potential(1, {{0.0, {1}}}, {L});
  ReconstructionError zerr = reconstruction_error(coefficients_polynomial(zero, 3), zero, 101);
  CHECK(zerr.max_abs == 0.0);
}

TEST_CASE("validation failures") {
  CHECK_THROWS_AS(polynomial_potential(1, {{1.0, {2}}}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(polynomial_potential(1, {{1.0, {2, 1}}}, {2.0}), std::invalid_argument);
  PotentialSpec spec = polynomial_potential(1, {{1.0, {2}}}, {2.0});
  CHECK_THROWS_AS(coefficients_quadrature(spec, 10, 16), std::invalid_argument);
  CHECK_THROWS_AS(coefficients_polynomial(
                      callable_potential(1, [](const std::vector<double>&) { return 0.0; }, {2.0}), 3),
                  std::invalid_argument);
  PotentialSpec nan_pot = callable_potential(
      1, [](const std::vector<double>& q) { return q[0] > 0 ? std::nan("") : 0.0; }, {2.0});
  CHECK_THROWS_AS(coefficients_quadrature(nan_pot, 3), std::invalid_argument);
}

TEST_CASE("series table serialization") {
  PotentialSpec spec = polynomial_potential(1, {{1.0, {2}}}, {2 * M_PI});
  FourierSeries s = coefficients_polynomial(spec, 2);
  std::string table = series_table(s);
  CHECK(table.find("# fourier series table v1") == 0);
  CHECK(table.find("modes=1 max_order=2") != std::string::npos);
  CHECK(table.find("\n1 -4") != std::string::npos);
}

TEST_CASE("default domain sizing") {
  CHECK(default_domain_length(2.0, 0.5) == doctest::Approx(8.0));
  CHECK(default_domain_length(-1.0, 1.0) == doctest::Approx(10.0));
}
