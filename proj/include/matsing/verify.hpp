#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "matsing/ensembles.hpp"
#include "matsing/kernels.hpp"
#include "matsing/trials.hpp"

namespace matsing {

/// Outcome of one statistical or exact check.
///
/// In absolute_deviation mode the check passes when |statistic - predicted| <= threshold;
/// in upper_bound mode (KS-type) when statistic <= threshold.
struct TestReport {
  enum class Mode { absolute_deviation, upper_bound };
  std::string name;
  double statistic = 0.0;
  double predicted = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;
  std::int64_t trials = 0;
  bool passed = false;
  std::uint64_t seed = 0;
  Mode mode = Mode::absolute_deviation;
  std::map<std::string, double> extras;

  /// Recomputes `passed` from the other fields.
  void decide();
};

nlohmann::json to_json(const TestReport& report);

/// Side-by-side empirical and predicted moments.
struct MomentTable {
  std::vector<std::string> labels;
  std::vector<Complex> empirical;
  std::vector<Complex> predicted;
  std::vector<double> std_error;

  void add(std::string label, Complex empirical_value, Complex predicted_value, double se);
  std::size_t size() const { return labels.size(); }
  /// |empirical - predicted| / stderr for row i (infinite when stderr is 0 and they differ).
  double z_score(std::size_t i) const;
};

nlohmann::json to_json(const MomentTable& table);

/// Significance levels shared by the drivers.
struct Significance {
  double z_sigma = 3.0;                 // count and mean tests
  double moment_sigma = 4.0;            // Haar moment tables
  double ks_alpha = 0.01;               // KS critical level
  double convergence_allowance = 0.05;  // relative slack for finite-N coefficient moments
};

/// Asymptotic Kolmogorov critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(double alpha, std::size_t n);
/// Two-sample version: sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
double two_sample_ks_critical_value(double alpha, std::size_t n, std::size_t m);

/// sup_x |F_n(x) - cdf(x)| for the empirical CDF F_n of the sample.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// sup_x |F_a(x) - F_b(x)|.
double two_sample_ks(std::span<const double> a, std::span<const double> b);

/// Mean and standard error of a sample of reals.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanEstimate estimate_mean(std::span<const double> values);

/// Common knobs for the Monte Carlo drivers.
struct DriverOptions {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  Significance significance;
  Execution execution = Execution::parallel;
};

/// Spherical n=1: KS distance of |lambda|^2 against t/(1+t).
TestReport spherical_radial_law_test(const DriverOptions& opts);

/// Truncated unitary: mean and variance of #{|lambda|^2 <= t} against the
/// independent-Beta predictions, two reports per threshold.
std::vector<TestReport> beta_count_reports(int N, int n, std::span<const double> thresholds,
                                           const DriverOptions& opts);

/// Radial law for spherical(1) or truncated(N, n). For the truncated family the
/// worst of the count reports at t = 0.25, 0.5, 0.75 is returned.
TestReport radial_law_test(const KernelFamily& family, const DriverOptions& opts);

/// Distributional invariance under a Mobius map.
///
/// Spherical: two-sample KS between the moduli of all transformed points and of
/// all points of independent fresh draws. Hyperbolic: the mean number of
/// transformed zeros in |z| < radius against fresh draws, within z_sigma joint
/// standard errors. Fresh draws use stream indices trials..2*trials-1.
TestReport invariance_test(const KernelFamily& family, const MobiusMap& map, double radius,
                           double tail_eps, const DriverOptions& opts);

/// Moments of x = sqrt(N) (U^p)_{ij}, p <= pmax, i, j < n, for Haar U of size N.
MomentTable haar_power_moments(int N, int n, int pmax, const DriverOptions& opts);
/// One report per table row at moment_sigma standard errors.
std::vector<TestReport> moment_reports(const std::string& prefix, const MomentTable& table,
                                       double sigma, const DriverOptions& opts);

/// Empirical E|det V|^2 over truncated unitary blocks against n! N! / (N+n)!.
TestReport f0_moment_test(int N, int n, const DriverOptions& opts);

/// Empirical mean count of Ginibre eigenvalues in |z| < r against expected_count.
TestReport ginibre_intensity_test(int n, double r, const DriverOptions& opts);

/// Mean number of det-GAF zeros in |z| < radius against n r^2 / (1 - r^2).
///
/// The truncation bias is estimated on the same draws by extending every series
/// to twice the degree and recording the mean absolute change in the count.
TestReport det_gaf_intensity_test(int n, double radius, double tail_eps, const DriverOptions& opts);

/// Exact limit moments of det(G_0 + z G_1 + ...): E|c_k|^2 = n! binom(k+n-1, n-1).
double limit_coefficient_second_moment(int n, int k);

struct ConvergenceResult {
  MomentTable finite;     // scaled coefficients of truncated unitary blocks
  MomentTable limit;      // coefficients of det(G_0 + z G_1 + ...)
  std::vector<TestReport> reports;
  bool passed() const;
};

/// Coefficient moments of N^{n/2} f_N for truncated unitary V against the limit
/// object, with a reference Monte Carlo of the limit at the same budget.
ConvergenceResult coefficient_convergence_test(int N, int n, int kmax, const DriverOptions& opts);

/// Cycle-sum derivatives against the series-division oracle on random Ginibre
/// matrices of sizes 2..6, k <= kmax. The statistic is the worst relative error.
TestReport cycle_sum_oracle_check(int matrices, int kmax, double tolerance, std::uint64_t seed);

/// Maximum absolute deviation of the exact Mobius identities over random inputs.
/// Each identity is compared with its denominators cleared, where den(z) is the
/// map's denominator, so that inputs near a pole do not inflate round-off.
struct MobiusIdentityResult {
  double derivative = 0.0;   // phi'(z) den(z)^2 = 1
  double metric = 0.0;       // (1 + |phi(z)|^2) |den(z)|^2 = 1 + |z|^2
  double difference = 0.0;   // (phi(z) - phi(w)) den(z) den(w) = z - w
  double disk_kernel = 0.0;  // phi'(z) conj(phi'(w)) (1 - z conj(w))^2 = (1 - phi(z) conj(phi(w)))^2
  int samples = 0;
};
MobiusIdentityResult mobius_identity_check(int samples, std::uint64_t seed);

}  // namespace matsing
