#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"
#include "matsing/linalg.hpp"

namespace matsing {

/// Power series c_0 + c_1 z + ... + c_K z^K, cut at order K.
class TruncatedSeries {
 public:
  /// The zero series of the given order.
  explicit TruncatedSeries(std::size_t order = 0);
  /// Takes ownership of the coefficients; the order is coeffs.size() - 1.
  explicit TruncatedSeries(std::vector<Complex> coeffs);

  std::size_t order() const { return coeffs_.size() - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex& operator[](std::size_t k) { return coeffs_[k]; }
  const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

  /// Horner evaluation of the truncated polynomial.
  Complex evaluate(Complex z) const;

  /// Copy re-cut (or zero-padded) to a new order.
  TruncatedSeries truncated(std::size_t order) const;

 private:
  std::vector<Complex> coeffs_;
};

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(Complex s, const TruncatedSeries& a);

/// Cauchy product cut at `order`.
TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b, std::size_t order);

/// Reciprocal series cut at `order`; requires a nonzero constant term.
TruncatedSeries reciprocal(const TruncatedSeries& a, std::size_t order);

/// {"order":K,"re":[...],"im":[...]}
nlohmann::json series_to_json(const TruncatedSeries& s);
TruncatedSeries series_from_json(const nlohmann::json& j);

/// Conjugacy class of S_k: multiplicities[j] = number of j-cycles.
struct CycleType {
  int k = 0;
  std::map<int, int> multiplicities;
  /// k! / prod_j (j^{m_j} m_j!), the number of permutations of this type.
  double permutation_count = 0.0;

  int cycle_count() const;
  /// Sign of any permutation of this type, (-1)^(k - cycles).
  int sign() const;
};

/// All cycle types (integer partitions) of k, largest parts first.
std::vector<CycleType> cycle_types(int k);

/// d_j = Tr(V^{-j}) - Tr((V^*)^j) for j = 1..kmax, from the eigenvalues of V.
///
/// Throws SingularMatrixError when the smallest singular value of V is at most
/// 1e-12 |V|_2.
std::vector<Complex> trace_power_differences(const ComplexMatrix& v, int kmax);

/// k-th derivative at 0 of det(zI + V) / det(I + z V^*) by the cycle-sum formula
///   f^(k)(0) = det V * sum over pi in S_k of sgn(pi) prod_{cycles c} d_{|c|},
/// summed by cycle type in 50-digit arithmetic. k is limited to 64.
Complex blaschke_derivative(const ComplexMatrix& v, int k);

/// All derivatives f^(k)(0), k = 0..kmax, sharing one eigen-decomposition.
std::vector<Complex> blaschke_derivatives(const ComplexMatrix& v, int kmax);

/// Taylor coefficients of det(zI + V) / det(I + z V^*) up to z^kmax by direct
/// series division of the two characteristic polynomials.
TruncatedSeries series_ratio(const ComplexMatrix& v, int kmax);

/// Square matrix whose entries are truncated series, stored row-major.
class SeriesMatrix {
 public:
  SeriesMatrix(int n, std::size_t order);

  int size() const { return n_; }
  TruncatedSeries& at(int i, int j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  const TruncatedSeries& at(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * n_ + j)];
  }

  /// Entry (i, j) has coefficients (C_0)_{ij}, (C_1)_{ij}, ...
  static SeriesMatrix from_coefficients(std::span<const ComplexMatrix> coefficients);

 private:
  int n_;
  std::vector<TruncatedSeries> entries_;
};

/// Leibniz expansion of the determinant, every product cut at kmax. n <= 8.
TruncatedSeries det_series(const SeriesMatrix& entries, std::size_t kmax);

/// N^{n/2} times the coefficients of det(zI + V)/det(I + z V^*) for an N x N V.
///
/// With `sign_convention` the series of (-1)^n f(-z) is returned instead, whose
/// large-N limit is det(G_0 + z G_1 + ...) with no alternating signs.
TruncatedSeries scaled_fN_coefficients(const ComplexMatrix& v, int n, int kmax,
                                       bool sign_convention);

}  // namespace matsing
