#pragma once

#include <span>
#include <string>
#include <vector>

#include "matsing/linalg.hpp"

namespace matsing {

/// The four determinantal families and their reference measures:
///  - planar(n):       K = sum_{k<n} (z w*)^k / k!,        dmu = e^{-|z|^2}/pi dm
///  - spherical(n):    K = (1 + z w*)^{n-1},               dmu = n/pi (1+|z|^2)^{-(n+1)} dm
///  - hyperbolic(n):   K = (1 - z w*)^{-(n+1)},            dmu = n/pi (1-|z|^2)^{n-1} dm on the disk
///  - truncated(N, n): K = sum_{k<N} C_k (z w*)^k,          same measure as hyperbolic(n)
/// where C_k = binom(n+k, k) are the truncated-kernel coefficients.
struct KernelFamily {
  enum class Tag { planar, spherical, hyperbolic, truncated };

  Tag tag = Tag::planar;
  int n = 1;
  int N = 0;  // truncated only

  static KernelFamily planar(int n);
  static KernelFamily spherical(int n);
  static KernelFamily hyperbolic(int n);
  static KernelFamily truncated(int N, int n);

  /// Throws DomainError when the parameters break the family invariants.
  void validate() const;
  bool on_disk() const { return tag == Tag::hyperbolic || tag == Tag::truncated; }
  std::string name() const;
};

/// Linear fractional map preserving the sphere or the unit disk.
///  - sphere: z -> (alpha z + beta) / (-conj(beta) z + conj(alpha)),  |alpha|^2 + |beta|^2 = 1
///  - disk:   z -> (alpha z + beta) / (conj(beta) z + conj(alpha)),   |alpha|^2 - |beta|^2 = 1
struct MobiusMap {
  enum class Geometry { sphere, disk };

  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
  Geometry geometry = Geometry::sphere;

  static MobiusMap sphere(Complex alpha, Complex beta);
  static MobiusMap disk(Complex alpha, Complex beta);

  void validate() const;
  /// The map's denominator at z.
  Complex denominator(Complex z) const;
};

/// Truncated-kernel coefficients C_0..C_{count-1}: C_0 = 1, C_{k+1} = C_k (n+k+1)/(k+1).
std::vector<double> truncated_kernel_coefficients(int count, int n);

Complex kernel_eval(const KernelFamily& family, Complex z, Complex w);

/// Density of the reference measure with respect to Lebesgue measure on the plane.
double reference_density(const KernelFamily& family, Complex z);

/// det(K(z_i, z_j)). Values within 1e-10 below zero are clamped to 0; anything
/// more negative throws KernelError.
double joint_intensity(const KernelFamily& family, std::span<const Complex> points);

/// prod_{i<j} |z_i - z_j|^2 prod_k (1 + |z_k|^2)^{-(n+1)}, unnormalized.
double spherical_joint_density(std::span<const Complex> points, int n);

/// Expected number of points in |z| < r: the integral of K(z,z) dmu over the disk.
///
/// Closed forms for spherical (n r^2/(1+r^2), r may be +inf) and hyperbolic
/// (n r^2/(1-r^2)); adaptive Gauss-Kronrod in the radius for planar and truncated.
double expected_count(const KernelFamily& family, double r);

/// CDF at t of Beta(a, b) for positive integers a, b, as a binomial tail sum.
double beta_cdf_integer(int a, int b, double t);

struct CountMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of #{k : Y_k <= t} for independent Y_k ~ Beta(k+1, n), k < N.
CountMoments predicted_count_moments(int N, int n, double t);

/// prod_{k<N} (k+1)/(n+k+1) = n! N! / (N+n)!.
double blaschke_zero_moment(int N, int n);

Complex mobius_apply(const MobiusMap& map, Complex z);
Complex mobius_derivative(const MobiusMap& map, Complex z);

}  // namespace matsing
