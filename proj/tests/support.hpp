#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "matsing/linalg.hpp"

namespace test_support {

using matsing::Complex;

/// Greedy multiset match: every element of a has a distinct partner in b within tol.
inline bool same_multiset(std::vector<Complex> a, std::vector<Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  for (const Complex x : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](Complex p, Complex q) { return std::abs(p - x) < std::abs(q - x); });
    if (best == b.end() || std::abs(*best - x) > tol) return false;
    b.erase(best);
  }
  return true;
}

/// Expands prod_i (z + r_i) into ascending coefficients.
inline std::vector<Complex> expand_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> p = {1.0};
  for (const Complex r : roots) {
    std::vector<Complex> q(p.size() + 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += r * p[i];
      q[i + 1] += p[i];
    }
    p = q;
  }
  return p;
}

/// Taylor coefficients of prod_i (z + l_i)/(1 + z conj(l_i)) up to z^kmax, one Blaschke factor at a time.
inline std::vector<Complex> blaschke_product_series(const std::vector<Complex>& eigs, int kmax) {
  const auto len = static_cast<std::size_t>(kmax) + 1;
  std::vector<Complex> p(len);
  p[0] = 1.0;
  for (const Complex l : eigs) {
    // (z + l) sum_m (-conj(l) z)^m = l + sum_{m>=1} (1 - |l|^2) (-conj(l))^{m-1} z^m
    std::vector<Complex> f(len);
    f[0] = l;
    Complex power = 1.0;
    for (std::size_t m = 1; m < len; ++m) {
      f[m] = (1.0 - std::norm(l)) * power;
      power *= -std::conj(l);
    }
    std::vector<Complex> q(len);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = 0; i + j < len; ++j) q[i + j] += p[i] * f[j];
    }
    p = q;
  }
  return p;
}

inline double max_abs_diff(const matsing::ComplexMatrix& a, const matsing::ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace test_support
