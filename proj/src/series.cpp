#include "matsing/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_complex.hpp>

#include "matsing/error.hpp"

namespace matsing {

TruncatedSeries::TruncatedSeries(std::size_t order) : coeffs_(order + 1, Complex{}) {}

TruncatedSeries::TruncatedSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DimensionError("TruncatedSeries: needs at least one coefficient");
}

Complex TruncatedSeries::evaluate(Complex z) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

TruncatedSeries TruncatedSeries::truncated(std::size_t order) const {
  TruncatedSeries out(order);
  const std::size_t n = std::min(order, this->order()) + 1;
  std::copy_n(coeffs_.begin(), n, out.coeffs_.begin());
  return out;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  const std::size_t order = std::min(a.order(), b.order());
  TruncatedSeries out(order);
  for (std::size_t k = 0; k <= order; ++k) out[k] = a[k] + b[k];
  return out;
}

TruncatedSeries operator*(Complex s, const TruncatedSeries& a) {
  TruncatedSeries out(a.order());
  for (std::size_t k = 0; k <= a.order(); ++k) out[k] = s * a[k];
  return out;
}

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b, std::size_t order) {
  TruncatedSeries out(order);
  const std::size_t na = std::min(a.order(), order);
  for (std::size_t i = 0; i <= na; ++i) {
    if (a[i] == Complex{}) continue;
    const std::size_t nb = std::min(b.order(), order - i);
    for (std::size_t j = 0; j <= nb; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

TruncatedSeries reciprocal(const TruncatedSeries& a, std::size_t order) {
  if (a[0] == Complex{}) throw SingularMatrixError("reciprocal: constant term is zero");
  TruncatedSeries out(order);
  const Complex inv0 = 1.0 / a[0];
  out[0] = inv0;
  for (std::size_t k = 1; k <= order; ++k) {
    Complex acc{};
    const std::size_t top = std::min(k, a.order());
    for (std::size_t j = 1; j <= top; ++j) acc += a[j] * out[k - j];
    out[k] = -acc * inv0;
  }
  return out;
}

nlohmann::json series_to_json(const TruncatedSeries& s) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const Complex c : s.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"order", s.order()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

TruncatedSeries series_from_json(const nlohmann::json& j) {
  const auto order = j.at("order").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != order + 1 || im.size() != order + 1) {
    throw DimensionError("series_from_json: coefficient arrays must have order+1 entries");
  }
  std::vector<Complex> coeffs(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    coeffs[k] = {re[k].get<double>(), im[k].get<double>()};
    if (!std::isfinite(coeffs[k].real()) || !std::isfinite(coeffs[k].imag())) {
      throw DomainError("series_from_json: non-finite coefficient");
    }
  }
  return TruncatedSeries(std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Cycle types

int CycleType::cycle_count() const {
  int total = 0;
  for (const auto& [length, count] : multiplicities) total += count;
  return total;
}

int CycleType::sign() const { return (k - cycle_count()) % 2 == 0 ? 1 : -1; }

namespace {

double permutation_count_of(int k, const std::map<int, int>& multiplicities) {
  if (k <= 20) {
    std::uint64_t numerator = 1;
    for (int i = 2; i <= k; ++i) numerator *= static_cast<std::uint64_t>(i);
    std::uint64_t denominator = 1;
    for (const auto& [length, count] : multiplicities) {
      for (int c = 1; c <= count; ++c) denominator *= static_cast<std::uint64_t>(length) * c;
    }
    return static_cast<double>(numerator / denominator);
  }
  double log_count = std::lgamma(k + 1.0);
  for (const auto& [length, count] : multiplicities) {
    log_count -= count * std::log(static_cast<double>(length)) + std::lgamma(count + 1.0);
  }
  return std::round(std::exp(log_count));
}

void enumerate_partitions(int remaining, int max_part, std::vector<int>& parts,
                          const std::function<void(const std::vector<int>&)>& emit) {
  if (remaining == 0) {
    emit(parts);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    parts.push_back(part);
    enumerate_partitions(remaining - part, part, parts, emit);
    parts.pop_back();
  }
}

}  // namespace

std::vector<CycleType> cycle_types(int k) {
  if (k < 1) throw DomainError("cycle_types: k must be positive");
  std::vector<CycleType> out;
  std::vector<int> parts;
  enumerate_partitions(k, k, parts, [&](const std::vector<int>& p) {
    CycleType type;
    type.k = k;
    for (const int part : p) ++type.multiplicities[part];
    type.permutation_count = permutation_count_of(k, type.multiplicities);
    out.push_back(std::move(type));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Cycle-sum coefficients

namespace {

constexpr int kMaxDerivativeOrder = 64;

void require_invertible(const ComplexMatrix& v, const char* what) {
  require_square(v, what);
  require_finite(v, what);
  Eigen::BDCSVD<ComplexMatrix> svd(v);
  const auto& sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-12 * sv.maxCoeff()) {
    std::ostringstream msg;
    msg << what << ": matrix is numerically singular (sigma_min = " << sv.minCoeff()
        << ", sigma_max = " << sv.maxCoeff() << "); resample";
    throw SingularMatrixError(msg.str());
  }
}

// 50 significant digits: for small |lambda| the terms grow like |lambda|^-k while
// f^(k)(0) / k! stays moderate, so the cycle sum cancels heavily.
using WideComplex = boost::multiprecision::cpp_complex_50;

Complex narrow(const WideComplex& c) { return {static_cast<double>(c.real()), static_cast<double>(c.imag())}; }
std::vector<WideComplex> differences_from_eigenvalues(const std::vector<Complex>& lambda, int kmax) {
  std::vector<WideComplex> d(static_cast<std::size_t>(kmax) + 1, WideComplex{});
  for (const Complex l : lambda) {
    const WideComplex wide(l.real(), l.imag());
    const WideComplex inv = WideComplex(1) / wide;
    const WideComplex conj_l = conj(wide);
    WideComplex inv_pow(1);
    WideComplex conj_pow(1);
    for (int j = 1; j <= kmax; ++j) {
      inv_pow *= inv;
      conj_pow *= conj_l;
      d[j] += inv_pow - conj_pow;
    }
  }
  return d;
}

// sum over cycle types of sgn * prod_j d_j^{m_j} / (j^{m_j} m_j!), i.e. f^(k)(0) / (k! det V).
WideComplex normalized_cycle_sum(const std::vector<WideComplex>& d, int k) {
  if (k == 0) return WideComplex(1);
  WideComplex total(0);
  for (const auto& type : cycle_types(k)) {
    WideComplex term(type.sign());
    for (const auto& [length, count] : type.multiplicities) {
      const WideComplex base = d[static_cast<std::size_t>(length)] / length;
      WideComplex power(1);
      for (int i = 1; i <= count; ++i) power *= base / i;
      term *= power;
    }
    total += term;
  }
  return total;
}

}  // namespace

std::vector<Complex> trace_power_differences(const ComplexMatrix& v, int kmax) {
  if (kmax < 1) throw DomainError("trace_power_differences: kmax must be positive");
  require_invertible(v, "trace_power_differences");
  const auto wide = differences_from_eigenvalues(eigenvalues(v), kmax);
  std::vector<Complex> d;
  for (std::size_t j = 1; j < wide.size(); ++j) {
    d.push_back(narrow(wide[j]));
  }
  return d;
}

std::vector<Complex> blaschke_derivatives(const ComplexMatrix& v, int kmax) {
  if (kmax < 0) throw DomainError("blaschke_derivatives: k must be nonnegative");
  if (kmax > kMaxDerivativeOrder) {
    throw GuardError("blaschke_derivatives: order " + std::to_string(kmax) + " exceeds the limit of " +
                     std::to_string(kMaxDerivativeOrder));
  }
  require_invertible(v, "blaschke_derivatives");
  const Complex det = Eigen::PartialPivLU<ComplexMatrix>(v).determinant();
  const auto d = differences_from_eigenvalues(eigenvalues(v), std::max(kmax, 1));
  std::vector<Complex> out(static_cast<std::size_t>(kmax) + 1);
  WideComplex factorial(1);
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) factorial *= k;
    out[static_cast<std::size_t>(k)] = det * narrow(factorial * normalized_cycle_sum(d, k));
  }
  return out;
}

Complex blaschke_derivative(const ComplexMatrix& v, int k) { return blaschke_derivatives(v, k).back(); }

TruncatedSeries series_ratio(const ComplexMatrix& v, int kmax) {
  if (kmax < 0) throw DomainError("series_ratio: kmax must be nonnegative");
  const auto a = char_poly_coefficients(v);  // det(zI + V), ascending
  const std::size_t n = a.size() - 1;
  const auto order = static_cast<std::size_t>(kmax);

  TruncatedSeries numerator(order);
  TruncatedSeries denominator(order);
  for (std::size_t k = 0; k <= std::min(order, n); ++k) {
    numerator[k] = a[k];
    // det(I + zV^*) = sum_k e_k(V^*) z^k and e_k(V^*) = conj(e_k(V)) = conj(a_{n-k}).
    denominator[k] = std::conj(a[n - k]);
  }
  return multiply(numerator, reciprocal(denominator, order), order);
}

// ---------------------------------------------------------------------------
// Determinants of series matrices

SeriesMatrix::SeriesMatrix(int n, std::size_t order)
    : n_(n), entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), TruncatedSeries(order)) {
  if (n < 1) throw DimensionError("SeriesMatrix: size must be positive");
}

SeriesMatrix SeriesMatrix::from_coefficients(std::span<const ComplexMatrix> coefficients) {
  if (coefficients.empty()) throw DimensionError("SeriesMatrix: need at least one coefficient matrix");
  const auto n = static_cast<int>(coefficients.front().rows());
  for (const auto& c : coefficients) {
    if (c.rows() != n || c.cols() != n) {
      throw DimensionError("SeriesMatrix: coefficient matrices must all be the same square size");
    }
  }
  SeriesMatrix out(n, coefficients.size() - 1);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.at(i, j)[k] = coefficients[k](i, j);
    }
  }
  return out;
}

namespace {

constexpr int kMaxLeibnizSize = 8;

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j] ? 1 : 0;
  }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

TruncatedSeries det_series(const SeriesMatrix& entries, std::size_t kmax) {
  const int n = entries.size();
  if (n > kMaxLeibnizSize) {
    throw GuardError("det_series: size " + std::to_string(n) + " exceeds the Leibniz limit of " +
                     std::to_string(kMaxLeibnizSize));
  }
  TruncatedSeries total(kmax);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    TruncatedSeries product = entries.at(0, perm[0]).truncated(kmax);
    for (int i = 1; i < n; ++i) product = multiply(product, entries.at(i, perm[i]), kmax);
    const double sign = permutation_sign(perm);
    for (std::size_t k = 0; k <= kmax; ++k) total[k] += sign * product[k];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

TruncatedSeries scaled_fN_coefficients(const ComplexMatrix& v, int n, int kmax, bool sign_convention) {
  if (n < 1) throw DomainError("scaled_fN_coefficients: n must be positive");
  TruncatedSeries s = series_ratio(v, kmax);
  const double scale = std::pow(static_cast<double>(v.rows()), 0.5 * n);
  for (std::size_t k = 0; k <= s.order(); ++k) {
    double factor = scale;
    if (sign_convention && (n + static_cast<int>(k)) % 2 != 0) factor = -factor;
    s[k] *= factor;
  }
  return s;
}

}  // namespace matsing
