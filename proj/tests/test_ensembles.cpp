#include <cmath>
#include <numbers>

#include "doctest.h"
#include "matsing/ensembles.hpp"
#include "matsing/error.hpp"
#include "matsing/kernels.hpp"
#include "matsing/verify.hpp"
#include "support.hpp"

using namespace matsing;
using std::numbers::pi;

namespace {

// Angles of all points mapped to [0, 1).
std::vector<double> normalized_angles(const std::vector<PointConfiguration>& configs) {
  std::vector<double> a;
  for (const auto& c : configs) {
    for (const Complex z : c.points) a.push_back((std::arg(z) + pi) / (2.0 * pi));
  }
  return a;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TEST_CASE("Ginibre points") {
  RngStream a(41, 0);
  RngStream b(41, 0);
  const PointConfiguration one = ginibre_points(1, a);
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0] == sample_complex_gaussian(b));
  CHECK(one.family == EnsembleFamily::planar);

  RngStream rng(42, 0);
  for (const int n : {2, 7, 20}) CHECK(ginibre_points(n, rng).points.size() == static_cast<std::size_t>(n));

  DriverOptions opts;
  opts.trials = 1000;
  opts.seed = 43;
  CHECK(ginibre_intensity_test(20, 3.0, opts).passed);
  const TestReport all = ginibre_intensity_test(5, 3.0 * std::sqrt(5.0), opts);
  CHECK(all.statistic == 5.0);
  CHECK(all.std_error == 0.0);
}

TEST_CASE("spherical points") {
  RngStream rng(44, 0);
  for (const int n : {1, 3, 6}) {
    const PointConfiguration c = spherical_points(n, rng);
    CHECK(c.points.size() + c.infinity_count == static_cast<std::size_t>(n));
  }
  std::vector<PointConfiguration> draws;
  for (int t = 0; t < 10000; ++t) {
    RngStream r(45, static_cast<std::uint64_t>(t));
    draws.push_back(spherical_points(2, r));
  }
  const auto angles = normalized_angles(draws);
  CHECK(ks_statistic(angles, uniform_cdf) < ks_critical_value(0.01, angles.size()));
}

TEST_CASE("truncated unitary points") {
  RngStream rng(46, 0);
  for (const auto& [N, n] : {std::pair{1, 1}, std::pair{8, 2}, std::pair{32, 1}, std::pair{20, 3}}) {
    const PointConfiguration c = truncated_unitary_points(N, n, rng);
    CHECK(c.points.size() == static_cast<std::size_t>(N));
    for (const Complex z : c.points) CHECK(std::abs(z) <= 1.0 + 1e-8);
  }
  DriverOptions opts;
  opts.trials = 2000;
  opts.seed = 47;
  const double t[] = {0.5};
  for (const auto& r : beta_count_reports(32, 1, t, opts)) CHECK(r.passed);
  const double one[] = {1.0};
  const auto full = beta_count_reports(6, 2, one, opts);
  CHECK(full[0].statistic == 6.0);
  CHECK(full[1].statistic == 0.0);
}

TEST_CASE("det-GAF truncation degree") {
  CHECK(det_gaf_truncation_degree(0.6, 1e-8) ==
        static_cast<int>(std::ceil(std::log(1e-8 * 0.4) / std::log(0.6))));
  CHECK(det_gaf_truncation_degree(0.1, 0.5) == 8);
  CHECK(det_gaf_truncation_degree(0.999, 1e-12) == 512);
  CHECK_THROWS_AS(det_gaf_truncation_degree(1.0, 1e-8), DomainError);
  CHECK_THROWS_AS(det_gaf_truncation_degree(0.5, 0.0), DomainError);
}

TEST_CASE("det-GAF zeros from known coefficients") {
  auto scalar = [](Complex c) {
    ComplexMatrix m(1, 1);
    m(0, 0) = c;
    return m;
  };
  // (z - 0.5)(z + 0.25) = -0.125 - 0.25 z + z^2
  const auto zeros = det_gaf_zeros_from_coefficients({scalar(-0.125), scalar(-0.25), scalar(1.0)}, 0.9);
  CHECK(test_support::same_multiset(zeros, {0.5, -0.25}, 1e-12));
  CHECK(det_gaf_zeros_from_coefficients({scalar(-0.125), scalar(-0.25), scalar(1.0)}, 0.4).size() == 1);

  // Diagonal coefficients: the determinant factors into the diagonal polynomials.
  ComplexMatrix g0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix g1 = ComplexMatrix::Identity(2, 2);
  g0(0, 0) = -0.3;
  g0(1, 1) = Complex(0.0, 0.6);
  const auto diag_zeros = det_gaf_zeros_from_coefficients({g0, g1}, 0.99);
  CHECK(test_support::same_multiset(diag_zeros, {0.3, Complex(0.0, -0.6)}, 1e-12));
}

TEST_CASE("det-GAF sampler") {
  RngStream rng(48, 0);
  const PointConfiguration c = det_gaf_zeros(2, 0.7, 1e-6, rng);
  for (const Complex z : c.points) CHECK(std::abs(z) < 0.7);
  CHECK(c.params.at("degree") == det_gaf_truncation_degree(0.7, 1e-6));
  CHECK_THROWS_AS(det_gaf_zeros(1, 1.0, 1e-6, rng), DomainError);
  CHECK_THROWS_AS(det_gaf_zeros(1, 0.5, -1.0, rng), DomainError);

  std::vector<PointConfiguration> draws;
  std::vector<double> counts;
  for (int t = 0; t < 1500; ++t) {
    RngStream r(49, static_cast<std::uint64_t>(t));
    draws.push_back(det_gaf_zeros(1, 0.6, 1e-8, r));
    counts.push_back(static_cast<double>(
        std::count_if(draws.back().points.begin(), draws.back().points.end(), [](Complex z) { return std::abs(z) < 0.4; })));
  }
  const auto angles = normalized_angles(draws);
  CHECK(ks_statistic(angles, uniform_cdf) < ks_critical_value(0.01, angles.size()));
  // n = 1: first intensity of the Gaussian power series zeros, 1/(pi (1 - |z|^2)^2).
  const MeanEstimate m = estimate_mean(counts);
  CHECK(std::abs(m.mean - expected_count(KernelFamily::hyperbolic(1), 0.4)) <= 3.0 * m.std_error);
}

TEST_CASE("structured contraction") {
  RngStream rng(50, 0);
  const ComplexMatrix a = sample_ginibre_matrix(3, rng);
  const ComplexMatrix v = structured_contraction(a, 9, rng);
  Eigen::JacobiSVD<ComplexMatrix> sa(a);
  Eigen::JacobiSVD<ComplexMatrix> sv(v);
  std::vector<Complex> expected;
  for (Eigen::Index i = 0; i < 3; ++i) expected.emplace_back(sa.singularValues()(i));
  for (int i = 0; i < 6; ++i) expected.emplace_back(1.0);
  std::vector<Complex> got;
  for (Eigen::Index i = 0; i < 9; ++i) got.emplace_back(sv.singularValues()(i));
  CHECK(test_support::same_multiset(got, expected, 1e-8));
  CHECK(std::abs(std::abs(v.determinant()) - std::abs(a.determinant())) <= 1e-10 * std::abs(a.determinant()));

  const ComplexMatrix u = structured_contraction(ComplexMatrix::Identity(2, 2), 5, rng);
  CHECK(test_support::max_abs_diff(u.adjoint() * u, ComplexMatrix::Identity(5, 5)) <= 1e-12);
  CHECK_THROWS_AS(structured_contraction(a, 2, rng), DomainError);
}

TEST_CASE("point configurations serialize and reproduce") {
  RngStream a(51, 9);
  RngStream b(51, 9);
  const PointConfiguration c = spherical_points(3, a);
  const PointConfiguration d = spherical_points(3, b);
  CHECK(c.points == d.points);
  const auto j = to_json(c);
  CHECK(j.at("family") == "spherical");
  CHECK(j.at("stream") == 9);
  const PointConfiguration back = point_configuration_from_json(j);
  CHECK(back.points == c.points);
  CHECK(back.params == c.params);
  CHECK(back.infinity_count == c.infinity_count);
  CHECK(ensemble_family_from_string("truncated") == EnsembleFamily::truncated_unitary);
  CHECK_THROWS_AS(ensemble_family_from_string("cubic"), DomainError);
}
