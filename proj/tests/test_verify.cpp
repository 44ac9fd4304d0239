#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "matsing/error.hpp"
#include "matsing/random.hpp"
#include "matsing/verify.hpp"

using namespace matsing;

namespace {

// sup over all real x of |F_n(x) - cdf(x)|, checked just below and at every sample point.
double brute_force_ks(const std::vector<double>& sample, const std::function<double(double)>& cdf) {
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (const double x : sample) {
    double at = 0.0;
    double below = 0.0;
    for (const double y : sample) {
      at += y <= x ? 1.0 : 0.0;
      below += y < x ? 1.0 : 0.0;
    }
    d = std::max({d, std::abs(at / n - cdf(x)), std::abs(below / n - cdf(x))});
  }
  return d;
}

double brute_force_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  auto ecdf = [](const std::vector<double>& s, double x) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double y) { return y <= x; })) /
           static_cast<double>(s.size());
  };
  double d = 0.0;
  for (const auto* s : {&a, &b}) {
    for (const double x : *s) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
  }
  return d;
}

DriverOptions small(std::int64_t trials, std::uint64_t seed) {
  DriverOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("one-sample KS statistic") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic(std::vector<double>{0.5}, uniform) == 0.5);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, uniform), DomainError);

  RngStream rng(61, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s;
    const int n = 1 + trial * 5;
    for (int i = 0; i < n; ++i) s.push_back(std::round(rng.uniform() * 20.0) / 20.0);  // with ties
    CHECK(ks_statistic(s, uniform) == doctest::Approx(brute_force_ks(s, uniform)).epsilon(1e-15));
    std::vector<double> shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    CHECK(ks_statistic(shuffled, uniform) == ks_statistic(s, uniform));
  }

  std::vector<double> big;
  for (int i = 0; i < 10000; ++i) big.push_back(rng.uniform());
  CHECK(ks_statistic(big, uniform) < 1.63 / 100.0);
}

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a = {0.1, 0.4, 0.4, 0.9};
  CHECK(two_sample_ks(a, a) == 0.0);
  CHECK(two_sample_ks(a, std::vector<double>{2.0, 3.0}) == 1.0);
  CHECK_THROWS_AS(two_sample_ks(a, std::vector<double>{}), DomainError);

  RngStream rng(62, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 3 + trial; ++i) x.push_back(std::round(rng.uniform() * 10.0));
    for (int i = 0; i < 5 + 2 * trial; ++i) y.push_back(std::round(rng.uniform() * 10.0 + 1.0));
    CHECK(two_sample_ks(x, y) == doctest::Approx(brute_force_two_sample(x, y)).epsilon(1e-15));
    CHECK(two_sample_ks(x, y) == two_sample_ks(y, x));
  }
}

TEST_CASE("critical values") {
  CHECK(ks_critical_value(0.01, 10000) == doctest::Approx(0.016276).epsilon(1e-4));
  CHECK(two_sample_ks_critical_value(0.05, 100, 100) == doctest::Approx(1.3581 * std::sqrt(0.02)).epsilon(1e-4));
  CHECK_THROWS_AS(ks_critical_value(1.5, 10), DomainError);
}

TEST_CASE("report decisions") {
  TestReport r;
  r.statistic = 1.1;
  r.predicted = 1.0;
  r.threshold = 0.2;
  r.decide();
  CHECK(r.passed);
  r.threshold = 0.05;
  r.decide();
  CHECK_FALSE(r.passed);
  r.mode = TestReport::Mode::upper_bound;
  r.threshold = 1.2;
  r.decide();
  CHECK(r.passed);
  r.statistic = NAN;
  r.decide();
  CHECK_FALSE(r.passed);
  const auto j = to_json(r);
  CHECK(j.at("mode") == "upper_bound");
  CHECK(j.contains("stderr"));

  MomentTable t;
  t.add("x", Complex(1.0, 0.0), Complex(1.0, 0.0), 0.0);
  t.add("y", Complex(0.3, 0.4), Complex(0.0, 0.0), 0.1);
  CHECK(t.z_score(0) == 0.0);
  CHECK(t.z_score(1) == doctest::Approx(5.0));
  CHECK(to_json(t).size() == 2);
}

TEST_CASE("drivers are reproducible") {
  const DriverOptions opts = small(1000, 63);
  const TestReport a = f0_moment_test(4, 1, opts);
  const TestReport b = f0_moment_test(4, 1, opts);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(spherical_radial_law_test(opts)) == to_json(spherical_radial_law_test(opts)));
}

TEST_CASE("f0 moment predictions") {
  CHECK(f0_moment_test(2, 1, small(2000, 64)).predicted == doctest::Approx(1.0 / 3.0));
  const TestReport one = f0_moment_test(1, 1, small(4000, 65));
  CHECK(one.predicted == 0.5);
  CHECK(one.passed);
}

TEST_CASE("radial law drivers") {
  CHECK(radial_law_test(KernelFamily::spherical(1), small(2000, 66)).passed);
  CHECK(radial_law_test(KernelFamily::truncated(16, 2), small(2000, 67)).passed);
  CHECK_THROWS_AS(radial_law_test(KernelFamily::spherical(2), small(2000, 66)), DomainError);
  CHECK_THROWS_AS(radial_law_test(KernelFamily::planar(2), small(2000, 66)), DomainError);
}

TEST_CASE("invariance drivers") {
  SUBCASE("identity map") {
    const TestReport r =
        invariance_test(KernelFamily::spherical(2), MobiusMap::sphere(1.0, 0.0), 0.0, 0.0, small(1000, 68));
    CHECK(r.mode == TestReport::Mode::upper_bound);
    CHECK(r.passed);
  }
  SUBCASE("hyperbolic count is preserved by a disk automorphism") {
    const MobiusMap m = MobiusMap::disk(std::cosh(0.5), std::sinh(0.5));
    const TestReport r = invariance_test(KernelFamily::hyperbolic(1), m, 0.6, 1e-6, small(600, 69));
    CHECK(r.passed);
    CHECK(r.extras.at("sampler_radius") > 0.83);
  }
  SUBCASE("geometry mismatch") {
    CHECK_THROWS_AS(
        invariance_test(KernelFamily::spherical(2), MobiusMap::disk(1.0, 0.0), 0.5, 1e-6, small(100, 1)),
        DomainError);
    CHECK_THROWS_AS(
        invariance_test(KernelFamily::hyperbolic(2), MobiusMap::sphere(1.0, 0.0), 0.5, 1e-6, small(100, 1)),
        DomainError);
  }
}

TEST_CASE("Haar power moments") {
  const MomentTable t = haar_power_moments(32, 1, 2, small(2000, 70));
  // labels: 2 entries -> 2 |x|^2, 2 x^2, 1 cross, 2 |x|^4
  CHECK(t.size() == 7);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.z_score(i) <= 4.0);
  CHECK(t.labels.front() == "E|x[p=1,1,1]|^2");
  CHECK_THROWS_AS(haar_power_moments(16, 1, 3, small(2000, 70)), DomainError);
  for (const auto& r : moment_reports("", t, 4.0, small(2000, 70))) CHECK(r.passed);
}

TEST_CASE("limit coefficient moments") {
  CHECK(limit_coefficient_second_moment(1, 0) == 1.0);
  CHECK(limit_coefficient_second_moment(1, 5) == 1.0);
  CHECK(limit_coefficient_second_moment(2, 0) == 2.0);
  CHECK(limit_coefficient_second_moment(2, 1) == 4.0);
  CHECK(limit_coefficient_second_moment(3, 2) == doctest::Approx(36.0));

  // E|det G|^2 for 2 x 2 Gaussian G, by Wick pairing: only the identity pairing of each
  // monomial with its own conjugate survives, giving the permanent of the all-ones matrix.
  RngStream rng(71, 0);
  const int trials = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double x = std::norm(sample_ginibre_matrix(2, rng).determinant());
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum_sq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 2.0) <= 4.0 * se);
}

TEST_CASE("coefficient convergence driver") {
  const ConvergenceResult r = coefficient_convergence_test(64, 2, 2, small(400, 72));
  CHECK(r.finite.size() == 6);
  CHECK(r.limit.predicted[0] == Complex(2.0));
  CHECK(r.passed());
  CHECK_THROWS_AS(coefficient_convergence_test(32, 1, 2, small(400, 1)), DomainError);
  CHECK_THROWS_AS(coefficient_convergence_test(64, 4, 2, small(400, 1)), DomainError);
  CHECK_THROWS_AS(coefficient_convergence_test(64, 1, 7, small(400, 1)), DomainError);
}

TEST_CASE("exact checks") {
  CHECK(cycle_sum_oracle_check(100, 10, 1e-9, 73).passed);
  const MobiusIdentityResult m = mobius_identity_check(1000, 74);
  CHECK(m.derivative <= 1e-12);
  CHECK(m.metric <= 1e-12);
  CHECK(m.difference <= 1e-12);
  CHECK(m.disk_kernel <= 1e-12);
}

TEST_CASE("det-GAF intensity driver reports the truncation bias") {
  const TestReport r = det_gaf_intensity_test(1, 0.5, 1e-8, small(300, 75));
  CHECK(r.predicted == doctest::Approx(1.0 / 3.0));
  CHECK(r.extras.count("truncation_bias") == 1);
  CHECK(r.extras.at("truncation_bias_fraction") < 0.01);
}
