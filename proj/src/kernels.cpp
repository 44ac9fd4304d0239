#include "matsing/kernels.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "matsing/error.hpp"

namespace matsing {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-9;
constexpr double kPsdClamp = 1e-10;
constexpr double kMapTolerance = 1e-12;

void require_in_disk(const KernelFamily& family, Complex z, const char* what) {
  if (family.on_disk() && !(std::abs(z) < 1.0)) {
    std::ostringstream msg;
    msg << what << ": point " << z << " is outside the open unit disk required by " << family.name();
    throw DomainError(msg.str());
  }
}

double integrate_radial(const std::function<double(double)>& radial_density, double r) {
  // Angular integral done analytically: 2 pi s f(s) ds.
  auto integrand = [&](double s) { return 2.0 * kPi * s * radial_density(s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, r, 20,
                                                                        kQuadratureTolerance);
}

}  // namespace

KernelFamily KernelFamily::planar(int n) {
  KernelFamily f{Tag::planar, n, 0};
  f.validate();
  return f;
}

KernelFamily KernelFamily::spherical(int n) {
  KernelFamily f{Tag::spherical, n, 0};
  f.validate();
  return f;
}

KernelFamily KernelFamily::hyperbolic(int n) {
  KernelFamily f{Tag::hyperbolic, n, 0};
  f.validate();
  return f;
}

KernelFamily KernelFamily::truncated(int N, int n) {
  KernelFamily f{Tag::truncated, n, N};
  f.validate();
  return f;
}

void KernelFamily::validate() const {
  if (n < 1) throw DomainError("KernelFamily: n must be at least 1");
  if (tag == Tag::truncated && N < 1) throw DomainError("KernelFamily: truncated family needs N >= 1");
}

std::string KernelFamily::name() const {
  switch (tag) {
    case Tag::planar: return "planar(" + std::to_string(n) + ")";
    case Tag::spherical: return "spherical(" + std::to_string(n) + ")";
    case Tag::hyperbolic: return "hyperbolic(" + std::to_string(n) + ")";
    case Tag::truncated: return "truncated(" + std::to_string(N) + "," + std::to_string(n) + ")";
  }
  return "unknown";
}

MobiusMap MobiusMap::sphere(Complex alpha, Complex beta) {
  MobiusMap m{alpha, beta, Geometry::sphere};
  m.validate();
  return m;
}

MobiusMap MobiusMap::disk(Complex alpha, Complex beta) {
  MobiusMap m{alpha, beta, Geometry::disk};
  m.validate();
  return m;
}

void MobiusMap::validate() const {
  const double a2 = std::norm(alpha);
  const double b2 = std::norm(beta);
  const double det = geometry == Geometry::sphere ? a2 + b2 : a2 - b2;
  if (std::abs(det - 1.0) > kMapTolerance) {
    std::ostringstream msg;
    msg << "MobiusMap: " << (geometry == Geometry::sphere ? "|a|^2+|b|^2" : "|a|^2-|b|^2")
        << " = " << det << ", expected 1";
    throw DomainError(msg.str());
  }
}

Complex MobiusMap::denominator(Complex z) const {
  return geometry == Geometry::sphere ? -std::conj(beta) * z + std::conj(alpha)
                                      : std::conj(beta) * z + std::conj(alpha);
}

std::vector<double> truncated_kernel_coefficients(int count, int n) {
  std::vector<double> c(static_cast<std::size_t>(std::max(count, 0)));
  double value = 1.0;
  for (int k = 0; k < count; ++k) {
    c[k] = value;
    value *= static_cast<double>(n + k + 1) / static_cast<double>(k + 1);
  }
  return c;
}

Complex kernel_eval(const KernelFamily& family, Complex z, Complex w) {
  family.validate();
  require_in_disk(family, z, "kernel_eval");
  require_in_disk(family, w, "kernel_eval");
  const Complex x = z * std::conj(w);
  switch (family.tag) {
    case KernelFamily::Tag::planar: {
      Complex term{1.0, 0.0};
      Complex sum = term;
      for (int k = 1; k < family.n; ++k) {
        term *= x / static_cast<double>(k);
        sum += term;
      }
      return sum;
    }
    case KernelFamily::Tag::spherical:
      return std::pow(1.0 + x, family.n - 1);
    case KernelFamily::Tag::hyperbolic:
      return 1.0 / std::pow(1.0 - x, family.n + 1);
    case KernelFamily::Tag::truncated: {
      const auto c = truncated_kernel_coefficients(family.N, family.n);
      Complex sum{};
      for (auto it = c.rbegin(); it != c.rend(); ++it) sum = sum * x + *it;
      return sum;
    }
  }
  return {};
}

double reference_density(const KernelFamily& family, Complex z) {
  family.validate();
  require_in_disk(family, z, "reference_density");
  const double r2 = std::norm(z);
  const double n = family.n;
  switch (family.tag) {
    case KernelFamily::Tag::planar:
      return std::exp(-r2) / kPi;
    case KernelFamily::Tag::spherical:
      return n / kPi / std::pow(1.0 + r2, n + 1.0);
    case KernelFamily::Tag::hyperbolic:
    case KernelFamily::Tag::truncated:
      return n / kPi * std::pow(1.0 - r2, n - 1.0);
  }
  return 0.0;
}

double joint_intensity(const KernelFamily& family, std::span<const Complex> points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  if (k == 0) return 1.0;
  ComplexMatrix gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = kernel_eval(family, points[i], points[j]);
  }
  const double det = Eigen::FullPivLU<ComplexMatrix>(gram).determinant().real();
  if (det < -kPsdClamp) {
    std::ostringstream msg;
    msg << "joint_intensity: Gram determinant " << det << " is negative for " << family.name();
    throw KernelError(msg.str());
  }
  return std::max(det, 0.0);
}

double spherical_joint_density(std::span<const Complex> points, int n) {
  if (n < 1) throw DomainError("spherical_joint_density: n must be positive");
  if (points.size() != static_cast<std::size_t>(n)) {
    throw ArityError("spherical_joint_density: expected " + std::to_string(n) + " points, got " +
                     std::to_string(points.size()));
  }
  double value = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (is_infinite(points[i])) throw DomainError("spherical_joint_density: points must be finite");
    for (std::size_t j = i + 1; j < points.size(); ++j) value *= std::norm(points[i] - points[j]);
    value /= std::pow(1.0 + std::norm(points[i]), n + 1.0);
  }
  return value;
}

double expected_count(const KernelFamily& family, double r) {
  family.validate();
  if (std::isnan(r) || r < 0.0) throw DomainError("expected_count: radius must be nonnegative");
  const double n = family.n;
  switch (family.tag) {
    case KernelFamily::Tag::spherical:
      if (std::isinf(r)) return n;
      return n * r * r / (1.0 + r * r);
    case KernelFamily::Tag::hyperbolic:
      if (r >= 1.0) throw DomainError("expected_count: hyperbolic radius must be < 1");
      return n * r * r / (1.0 - r * r);
    case KernelFamily::Tag::planar: {
      if (std::isinf(r)) return n;
      const int terms = family.n;
      auto density = [terms](double s) {
        // sum_{k<n} s^{2k}/k! e^{-s^2}/pi, each term in log space.
        double sum = 0.0;
        const double log_s2 = s > 0.0 ? std::log(s * s) : -INFINITY;
        for (int k = 0; k < terms; ++k) {
          const double log_term = (k == 0 ? 0.0 : k * log_s2) - s * s - std::lgamma(k + 1.0);
          sum += std::exp(log_term);
        }
        return sum / kPi;
      };
      return integrate_radial(density, r);
    }
    case KernelFamily::Tag::truncated: {
      if (r > 1.0) throw DomainError("expected_count: truncated radius must be <= 1");
      const auto c = truncated_kernel_coefficients(family.N, family.n);
      auto density = [&c, n](double s) {
        const double s2 = s * s;
        double k_diag = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) k_diag = k_diag * s2 + *it;
        return k_diag * n / kPi * std::pow(1.0 - s2, n - 1.0);
      };
      return integrate_radial(density, r);
    }
  }
  return 0.0;
}

double beta_cdf_integer(int a, int b, double t) {
  if (a < 1 || b < 1) throw DomainError("beta_cdf_integer: parameters must be positive integers");
  if (std::isnan(t) || t < 0.0 || t > 1.0) throw DomainError("beta_cdf_integer: t must lie in [0,1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  // P(Beta(a,b) <= t) = P(Binomial(a+b-1, t) >= a).
  const int m = a + b - 1;
  const double log_t = std::log(t);
  const double log_1mt = std::log1p(-t);
  double sum = 0.0;
  for (int j = a; j <= m; ++j) {
    const double log_binom = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
    sum += std::exp(log_binom + j * log_t + (m - j) * log_1mt);
  }
  return std::min(sum, 1.0);
}

CountMoments predicted_count_moments(int N, int n, double t) {
  if (N < 1 || n < 1) throw DomainError("predicted_count_moments: N and n must be positive");
  if (std::isnan(t) || t < 0.0 || t > 1.0) {
    throw DomainError("predicted_count_moments: t must lie in [0,1]");
  }
  CountMoments out;
  for (int k = 0; k < N; ++k) {
    const double f = beta_cdf_integer(k + 1, n, t);
    out.mean += f;
    out.variance += f * (1.0 - f);
  }
  return out;
}

double blaschke_zero_moment(int N, int n) {
  if (N < 1 || n < 1) throw DomainError("blaschke_zero_moment: N and n must be positive");
  double value = 1.0;
  for (int k = 0; k < N; ++k) value *= static_cast<double>(k + 1) / static_cast<double>(n + k + 1);
  return value;
}

Complex mobius_apply(const MobiusMap& map, Complex z) {
  map.validate();
  if (map.geometry == MobiusMap::Geometry::disk && std::abs(z) > 1.0 + kMapTolerance) {
    throw DomainError("mobius_apply: disk automorphisms act on |z| <= 1");
  }
  if (is_infinite(z)) {
    // Sphere maps only; the image of infinity is alpha / (-conj(beta)).
    const Complex c = -std::conj(map.beta);
    return c == Complex{} ? complex_infinity() : map.alpha / c;
  }
  const Complex den = map.denominator(z);
  if (den == Complex{}) return complex_infinity();
  return (map.alpha * z + map.beta) / den;
}

Complex mobius_derivative(const MobiusMap& map, Complex z) {
  map.validate();
  // (ad - bc) / (cz + d)^2 for the matrix [[a, b], [c, d]] of the map.
  const Complex c = map.geometry == MobiusMap::Geometry::sphere ? -std::conj(map.beta) : std::conj(map.beta);
  const Complex det = map.alpha * std::conj(map.alpha) - map.beta * c;
  const Complex den = map.denominator(z);
  return det / (den * den);
}

}  // namespace matsing
