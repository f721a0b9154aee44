#pragma once

// Test-only oracles, deliberately independent of the library implementation
// paths they check: a plain Taylor-series matrix exponential, exact integer
// binomials, a polynomial-differentiation route to the Gaussian moments, and
// a pinned random-state generator.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "focklab/fock.hpp"

namespace oracle {

using focklab::CMatrix;
using focklab::Complex;
using focklab::CVector;

/// Unscaled term-by-term Taylor sum; valid for moderate norms, no squaring,
/// no Pade step. Independent of the production exponential.
inline CMatrix expm_taylor(const CMatrix& a, int max_terms = 200) {
  CMatrix sum = CMatrix::Identity(a.rows(), a.cols());
  CMatrix term = sum;
  for (int k = 1; k <= max_terms; ++k) {
    term = (term * a) / double(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

/// Exact integer binomial (n <= 60 stays within 64 bits for the cases used).
inline std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * std::uint64_t(n - k + i) / std::uint64_t(i);
  }
  return acc;
}

/// d^k/dq^k e^{q^2} = P_k(q) e^{q^2} with P_0 = 1 and P_{k+1} = P_k' + 2q P_k.
/// Returns P_k evaluated at q, divided by 2^k — the moment-table oracle built
/// by symbolic differentiation rather than the three-term recurrence.
inline double gaussian_moment_by_differentiation(double q, int k) {
  std::vector<double> poly{1.0};  // coefficients, ascending powers
  for (int step = 0; step < k; ++step) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (size_t i = 1; i < poly.size(); ++i) next[i - 1] += double(i) * poly[i];
    for (size_t i = 0; i < poly.size(); ++i) next[i + 1] += 2.0 * poly[i];
    poly = std::move(next);
  }
  double value = 0.0;
  for (size_t i = poly.size(); i-- > 0;) value = value * q + poly[i];
  return value / std::pow(2.0, k);
}

/// Pinned generator (splitmix64 + Box-Muller), reproducible everywhere.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  Complex gaussian() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return Complex(mag * std::cos(6.283185307179586 * u2),
                   mag * std::sin(6.283185307179586 * u2));
  }
};

inline focklab::StateVector random_state(focklab::CutoffSpec cutoff, Rng& rng,
                                         bool normalized = true) {
  CVector v(cutoff.dim());
  for (int i = 0; i < cutoff.dim(); ++i) v(i) = rng.gaussian();
  if (normalized) v /= v.norm();
  return focklab::StateVector(cutoff, std::move(v));
}

inline CMatrix random_anti_hermitian(int dim, double scale, Rng& rng) {
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = scale * rng.gaussian();
  }
  return 0.5 * (m - m.adjoint().eval());
}

}  // namespace oracle
