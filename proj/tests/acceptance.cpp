// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "matsing/error.hpp"
#include "matsing/kernels.hpp"
#include "matsing/random.hpp"
#include "matsing/series.hpp"
#include "matsing/verify.hpp"

using namespace matsing;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

DriverOptions options(std::int64_t trials) {
  DriverOptions opts;
  opts.trials = trials;
  opts.seed = kSeed;
  return opts;
}

Outcome oracle_equivalence() {
  const TestReport r = cycle_sum_oracle_check(100, 10, 1e-9, kSeed);
  return {r.passed, fmt("max relative error %.3e (limit 1e-9)", r.statistic)};
}

Outcome f0_moment() {
  const TestReport r = f0_moment_test(16, 2, options(10000));
  const bool predicted_ok = std::abs(r.predicted - 1.0 / 153.0) < 1e-15;
  return {r.passed && predicted_ok,
          fmt("E|f_N(0)|^2 = %.6f, predicted %.6f, 3 se = %.6f", r.statistic, r.predicted, r.threshold)};
}

Outcome beta_counts() {
  const double thresholds[] = {0.25, 0.5, 0.75};
  const auto reports = beta_count_reports(32, 1, thresholds, options(10000));
  bool ok = true;
  double worst = 0.0;
  for (const auto& r : reports) {
    ok = ok && r.passed;
    if (r.std_error > 0.0) worst = std::max(worst, std::abs(r.statistic - r.predicted) / r.std_error);
  }
  return {ok, fmt("%zu mean/variance reports, worst |z| = %.2f (limit 3)", reports.size(), worst)};
}

Outcome spherical_radial() {
  const TestReport r = spherical_radial_law_test(options(10000));
  return {r.statistic <= 0.0163, fmt("KS = %.5f (limit 0.0163)", r.statistic)};
}

Outcome spherical_invariance() {
  const MobiusMap map = MobiusMap::sphere({0.6, 0.0}, {0.0, 0.8});
  const TestReport r = invariance_test(KernelFamily::spherical(3), map, 0.0, 0.0, options(5000));
  return {r.passed, fmt("two-sample KS = %.5f, 1%% critical value %.5f", r.statistic, r.threshold)};
}

Outcome det_gaf_intensity() {
  const TestReport r = det_gaf_intensity_test(1, 0.6, 1e-8, options(2000));
  const bool predicted_ok = std::abs(r.predicted - 0.5625) < 1e-12;
  return {r.passed && predicted_ok,
          fmt("mean count %.4f, predicted %.4f, 3 se = %.4f, truncation degree %.0f, bias %.2e (%.3f%% of mean)",
              r.statistic, r.predicted, r.threshold, r.extras.at("truncation_degree"),
              r.extras.at("truncation_bias"), 100.0 * r.extras.at("truncation_bias_fraction"))};
}

Outcome haar_gaussianity() {
  const DriverOptions opts = options(10000);
  const MomentTable table = haar_power_moments(128, 2, 3, opts);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double z = table.z_score(i);
    worst = std::max(worst, z);
    ok = ok && z <= 4.0;
  }
  return {ok, fmt("%zu moments, worst |z| = %.2f (limit 4)", table.size(), worst)};
}

Outcome coefficient_convergence() {
  const ConvergenceResult result = coefficient_convergence_test(256, 1, 3, options(2000));
  double worst_second = 0.0;
  for (std::size_t i = 0; i < result.finite.size(); ++i) {
    if (result.finite.labels[i].starts_with("E|")) {
      worst_second = std::max(worst_second, std::abs(result.finite.empirical[i] - 1.0));
    }
  }
  int failed = 0;
  for (const auto& r : result.reports) failed += r.passed ? 0 : 1;
  return {result.passed(), fmt("%zu reports, %d failed, worst |E|c_k|^2 - 1| = %.4f", result.reports.size(), failed,
                               worst_second)};
}

Outcome mobius_identities() {
  const MobiusIdentityResult r = mobius_identity_check(1000, kSeed);
  const double worst = std::max({r.derivative, r.metric, r.difference, r.disk_kernel});
  return {worst <= 1e-12, fmt("max deviation: derivative %.1e, metric %.1e, difference %.1e, disk %.1e", r.derivative,
                              r.metric, r.difference, r.disk_kernel)};
}

ComplexMatrix gram(const KernelFamily& family, const std::vector<Complex>& pts) {
  const auto k = static_cast<Eigen::Index>(pts.size());
  ComplexMatrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = kernel_eval(family, pts[i], pts[j]);
  }
  return g;
}

Outcome kernel_consistency() {
  RngStream rng(kSeed, 0);
  auto point = [&](double max_radius) {
    return std::polar(max_radius * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
  };
  // Every family has rank at least 6, so Gram matrices of up to 6 distinct points are nonsingular.
  const std::vector<std::pair<KernelFamily, double>> families = {
      {KernelFamily::planar(8), 1.5},     {KernelFamily::spherical(8), 1.0},
      {KernelFamily::hyperbolic(2), 0.7}, {KernelFamily::truncated(12, 2), 0.7}};

  double hermitian = 0.0;
  for (const auto& [family, radius] : families) {
    for (int i = 0; i < 1000; ++i) {
      const Complex z = point(radius);
      const Complex w = point(radius);
      hermitian = std::max(hermitian, std::abs(kernel_eval(family, z, w) - std::conj(kernel_eval(family, w, z))));
    }
  }

  double min_det = 1.0;
  bool psd_threw = false;
  for (const auto& [family, radius] : families) {
    for (int trial = 0; trial < 200; ++trial) {
      const int k = 1 + trial % 6;
      std::vector<Complex> pts;
      for (int i = 0; i < k; ++i) pts.push_back(point(radius));
      min_det = std::min(min_det, gram(family, pts).determinant().real());
      try {
        (void)joint_intensity(family, pts);
      } catch (const KernelError&) {
        psd_threw = true;
      }
    }
  }

  double normalization = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto c = truncated_kernel_coefficients(21, n);
    for (int j = 0; j <= 20; ++j) {
      // Angular integral done analytically: int |z|^{2j} dmu_n = int_0^1 2 n r^{2j+1} (1-r^2)^{n-1} dr.
      auto integrand = [&](double r) { return 2.0 * n * std::pow(r, 2 * j + 1) * std::pow(1.0 - r * r, n - 1); };
      const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20, 1e-14);
      normalization = std::max(normalization, std::abs(c[static_cast<std::size_t>(j)] * integral - 1.0));
    }
  }

  double routes = 0.0;
  for (const int N : {1, 8, 32}) {
    for (int n = 1; n <= 3; ++n) {
      for (const double t : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        routes = std::max(routes, std::abs(expected_count(KernelFamily::truncated(N, n), std::sqrt(t)) -
                                           predicted_count_moments(N, n, t).mean));
      }
    }
  }

  const bool ok = hermitian <= 1e-12 && min_det >= -1e-10 && !psd_threw && normalization <= 1e-8 && routes <= 1e-6;
  return {ok, fmt("hermitian %.1e, min Gram det %.2e, normalization %.1e, first-moment routes %.1e", hermitian,
                  min_det, normalization, routes)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  const std::vector<Criterion> criteria = {
      {1, "cycle-sum derivative formula vs series division", 10.0, oracle_equivalence},
      {2, "E|f_N(0)|^2 product formula (N=16, n=2)", 60.0, f0_moment},
      {3, "truncated unitary Beta counts (N=32, n=1)", 120.0, beta_counts},
      {4, "spherical radial law (n=1)", 30.0, spherical_radial},
      {5, "spherical Mobius invariance (n=3)", 60.0, spherical_invariance},
      {6, "det-GAF first intensity (n=1, r=0.6)", 180.0, det_gaf_intensity},
      {7, "Haar power Gaussianity (N=128, n=2, p<=3)", 120.0, haar_gaussianity},
      {8, "scaled coefficient convergence (N=256, n=1, k<=3)", 300.0, coefficient_convergence},
      {9, "exact Mobius identities", 1.0, mobius_identities},
      {10, "kernel self-consistency", 10.0, kernel_consistency},
  };

  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.time_limit_s;
    const bool passed = outcome.passed && in_time;
    failures += passed ? 0 : 1;
    std::printf("%s [%2d] %s: %s; %.2f s (limit %.0f s)%s\n", passed ? "PASS" : "FAIL", c.id, c.title.c_str(),
                outcome.detail.c_str(), seconds, c.time_limit_s, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
