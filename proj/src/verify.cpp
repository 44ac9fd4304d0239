#include "matsing/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "matsing/error.hpp"
#include "matsing/random.hpp"
#include "matsing/series.hpp"

namespace matsing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

double kolmogorov_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS level must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

void require_trials(const DriverOptions& opts, std::int64_t minimum, const char* what) {
  if (opts.trials < minimum) {
    throw DomainError(std::string(what) + ": needs at least " + std::to_string(minimum) + " trials");
  }
}

TestReport mean_report(std::string name, std::span<const double> values, double predicted,
                       const DriverOptions& opts) {
  const MeanEstimate m = estimate_mean(values);
  TestReport r;
  r.name = std::move(name);
  r.statistic = m.mean;
  r.predicted = predicted;
  r.std_error = m.std_error;
  r.threshold = opts.significance.z_sigma * m.std_error;
  r.trials = static_cast<std::int64_t>(values.size());
  r.seed = opts.seed;
  r.decide();
  return r;
}

// Complex mean with the standard error of its modulus deviation.
struct ComplexMean {
  Complex mean;
  double std_error = 0.0;
};

ComplexMean complex_mean(const std::vector<Complex>& values) {
  ComplexMean out;
  const auto n = static_cast<double>(values.size());
  for (const Complex v : values) out.mean += v;
  out.mean /= n;
  double ss = 0.0;
  for (const Complex v : values) ss += std::norm(v - out.mean);
  out.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

// Fills a MomentTable from per-trial samples of each moment, walking trials in order.
void add_moment(MomentTable& table, std::string label, const std::vector<Complex>& samples, Complex predicted) {
  const ComplexMean m = complex_mean(samples);
  table.add(std::move(label), m.mean, predicted, m.std_error);
}

TestReport table_row_report(const std::string& name, const MomentTable& table, std::size_t i, double sigma,
                            double allowance, const DriverOptions& opts) {
  TestReport r;
  r.name = name;
  const Complex emp = table.empirical[i];
  const Complex pred = table.predicted[i];
  if (emp.imag() == 0.0 && pred.imag() == 0.0) {
    r.statistic = emp.real();
    r.predicted = pred.real();
  } else {
    r.statistic = std::abs(emp - pred);
    r.predicted = 0.0;
    r.extras["empirical_re"] = emp.real();
    r.extras["empirical_im"] = emp.imag();
    r.extras["predicted_re"] = pred.real();
    r.extras["predicted_im"] = pred.imag();
  }
  r.std_error = table.std_error[i];
  r.threshold = sigma * r.std_error + allowance * std::abs(pred);
  r.trials = opts.trials;
  r.seed = opts.seed;
  r.decide();
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports and tables

void TestReport::decide() {
  const double deviation = mode == Mode::upper_bound ? statistic : std::abs(statistic - predicted);
  passed = std::isfinite(deviation) && deviation <= threshold;
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json extras = nlohmann::json::object();
  for (const auto& [key, value] : report.extras) extras[key] = value;
  return {{"name", report.name},
          {"statistic", report.statistic},
          {"predicted", report.predicted},
          {"stderr", report.std_error},
          {"threshold", report.threshold},
          {"trials", report.trials},
          {"passed", report.passed},
          {"seed", report.seed},
          {"mode", report.mode == TestReport::Mode::upper_bound ? "upper_bound" : "absolute_deviation"},
          {"extras", std::move(extras)}};
}

void MomentTable::add(std::string label, Complex empirical_value, Complex predicted_value, double se) {
  labels.push_back(std::move(label));
  empirical.push_back(empirical_value);
  predicted.push_back(predicted_value);
  std_error.push_back(se);
}

double MomentTable::z_score(std::size_t i) const {
  const double dev = std::abs(empirical[i] - predicted[i]);
  if (std_error[i] > 0.0) return dev / std_error[i];
  return dev == 0.0 ? 0.0 : kInf;
}

nlohmann::json to_json(const MomentTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    rows.push_back({{"label", table.labels[i]},
                    {"empirical", {table.empirical[i].real(), table.empirical[i].imag()}},
                    {"predicted", {table.predicted[i].real(), table.predicted[i].imag()}},
                    {"stderr", table.std_error[i]}});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_critical_value(double alpha, std::size_t n) {
  if (n == 0) throw DomainError("ks_critical_value: empty sample");
  return kolmogorov_constant(alpha) / std::sqrt(static_cast<double>(n));
}

double two_sample_ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw DomainError("two_sample_ks_critical_value: empty sample");
  const auto a = static_cast<double>(n);
  const auto b = static_cast<double>(m);
  return kolmogorov_constant(alpha) * std::sqrt((a + b) / (a * b));
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("two_sample_ks: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate m;
  if (values.empty()) return m;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  m.mean = sum / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Radial laws

TestReport spherical_radial_law_test(const DriverOptions& opts) {
  require_trials(opts, 1000, "spherical_radial_law_test");
  const auto values = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const PointConfiguration c = spherical_points(1, rng);
        return c.infinity_count > 0 ? kInf : std::norm(c.points.front());
      },
      opts.execution);
  TestReport r;
  r.name = "radial spherical n=1: KS of |z|^2 against t/(1+t)";
  r.mode = TestReport::Mode::upper_bound;
  r.statistic = ks_statistic(values, [](double t) { return std::isinf(t) ? 1.0 : t / (1.0 + t); });
  r.threshold = ks_critical_value(opts.significance.ks_alpha, values.size());
  r.trials = opts.trials;
  r.seed = opts.seed;
  r.decide();
  return r;
}

std::vector<TestReport> beta_count_reports(int N, int n, std::span<const double> thresholds,
                                           const DriverOptions& opts) {
  require_trials(opts, 2, "beta_count_reports");
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("beta_count_reports: thresholds must lie in [0, 1]");
  }
  const auto per_trial = map_trials(
      opts.trials,
      [&](std::int64_t trial) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(trial));
        const PointConfiguration c = truncated_unitary_points(N, n, rng);
        std::vector<double> counts(thresholds.size(), 0.0);
        for (const Complex z : c.points) {
          const double y = std::norm(z);
          for (std::size_t i = 0; i < thresholds.size(); ++i) {
            // Eigenvalues of a contraction can sit a rounding error outside the disk.
            if (y <= thresholds[i] || (thresholds[i] == 1.0 && y <= 1.0 + 1e-8)) counts[i] += 1.0;
          }
        }
        return counts;
      },
      opts.execution);

  std::vector<TestReport> reports;
  const auto trials = static_cast<double>(opts.trials);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::vector<double> counts;
    counts.reserve(per_trial.size());
    for (const auto& row : per_trial) counts.push_back(row[i]);
    const CountMoments predicted = predicted_count_moments(N, n, thresholds[i]);
    const std::string tag = "beta counts N=" + std::to_string(N) + " n=" + std::to_string(n) +
                            " t=" + format_double(thresholds[i]);
    reports.push_back(mean_report(tag + ": mean", counts, predicted.mean, opts));

    const double mean = reports.back().statistic;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const double c : counts) {
      const double d2 = (c - mean) * (c - mean);
      m2 += d2;
      m4 += d2 * d2;
    }
    const double variance = m2 / (trials - 1.0);
    m4 /= trials;
    const double biased = m2 / trials;
    TestReport v;
    v.name = tag + ": variance";
    v.statistic = variance;
    v.predicted = predicted.variance;
    v.std_error = std::sqrt(std::max(m4 - biased * biased, 0.0) / trials);
    v.threshold = opts.significance.z_sigma * v.std_error;
    v.trials = opts.trials;
    v.seed = opts.seed;
    v.decide();
    reports.push_back(v);
  }
  return reports;
}

TestReport radial_law_test(const KernelFamily& family, const DriverOptions& opts) {
  family.validate();
  if (family.tag == KernelFamily::Tag::spherical) {
    if (family.n != 1) throw DomainError("radial_law_test: the spherical radial law is tested for n = 1");
    return spherical_radial_law_test(opts);
  }
  if (family.tag != KernelFamily::Tag::truncated) {
    throw DomainError("radial_law_test: family must be spherical(1) or truncated(N, n)");
  }
  require_trials(opts, 1000, "radial_law_test");
  const double thresholds[] = {0.25, 0.5, 0.75};
  const auto reports = beta_count_reports(family.N, family.n, thresholds, opts);
  // Worst report: the largest deviation relative to its threshold.
  auto ratio = [](const TestReport& r) {
    const double dev = std::abs(r.statistic - r.predicted);
    if (r.threshold > 0.0) return dev / r.threshold;
    return dev == 0.0 ? 0.0 : kInf;
  };
  TestReport worst = *std::max_element(reports.begin(), reports.end(),
                                       [&](const TestReport& a, const TestReport& b) { return ratio(a) < ratio(b); });
  worst.extras["reports"] = static_cast<double>(reports.size());
  worst.extras["failed"] = static_cast<double>(
      std::count_if(reports.begin(), reports.end(), [](const TestReport& r) { return !r.passed; }));
  worst.name = "radial " + family.name() + " worst: " + worst.name;
  return worst;
}

// ---------------------------------------------------------------------------
// Invariance

namespace {

TestReport spherical_invariance(int n, const MobiusMap& map, const DriverOptions& opts) {
  const auto transformed = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const PointConfiguration c = spherical_points(n, rng);
        std::vector<double> radii;
        for (const Complex z : c.points) radii.push_back(std::abs(mobius_apply(map, z)));
        for (std::size_t i = 0; i < c.infinity_count; ++i) {
          radii.push_back(std::abs(mobius_apply(map, complex_infinity())));
        }
        return radii;
      },
      opts.execution);
  const auto fresh = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(opts.trials + t));
        const PointConfiguration c = spherical_points(n, rng);
        std::vector<double> radii;
        for (const Complex z : c.points) radii.push_back(std::abs(z));
        radii.insert(radii.end(), c.infinity_count, kInf);
        return radii;
      },
      opts.execution);
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& r : transformed) a.insert(a.end(), r.begin(), r.end());
  for (const auto& r : fresh) b.insert(b.end(), r.begin(), r.end());

  TestReport r;
  r.name = "invariance spherical n=" + std::to_string(n) + ": two-sample KS of |z|";
  r.mode = TestReport::Mode::upper_bound;
  r.statistic = two_sample_ks(a, b);
  r.threshold = two_sample_ks_critical_value(opts.significance.ks_alpha, a.size(), b.size());
  r.trials = opts.trials;
  r.seed = opts.seed;
  r.extras["points_transformed"] = static_cast<double>(a.size());
  r.extras["points_fresh"] = static_cast<double>(b.size());
  r.decide();
  return r;
}

TestReport hyperbolic_invariance(int n, const MobiusMap& map, double radius, double tail_eps,
                                 const DriverOptions& opts) {
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("invariance_test: radius must lie in (0, 1)");
  // Preimages of |w| < radius lie in |z| < (|c| + radius) / (1 + |c| radius), c = -beta/alpha.
  const double c = std::abs(map.beta / map.alpha);
  const double reach = (c + radius) / (1.0 + c * radius);
  const double sampler_radius = std::min(reach + 1e-3, 0.5 * (1.0 + reach));

  const auto transformed = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const PointConfiguration cfg = det_gaf_zeros(n, sampler_radius, tail_eps, rng);
        double count = 0.0;
        for (const Complex z : cfg.points) {
          if (std::abs(mobius_apply(map, z)) < radius) count += 1.0;
        }
        return count;
      },
      opts.execution);
  const auto fresh = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(opts.trials + t));
        return static_cast<double>(det_gaf_zeros(n, radius, tail_eps, rng).points.size());
      },
      opts.execution);
  const MeanEstimate a = estimate_mean(transformed);
  const MeanEstimate b = estimate_mean(fresh);

  TestReport r;
  r.name = "invariance hyperbolic n=" + std::to_string(n) + ": count in |z|<" + format_double(radius);
  r.statistic = a.mean - b.mean;
  r.predicted = 0.0;
  r.std_error = std::hypot(a.std_error, b.std_error);
  r.threshold = opts.significance.z_sigma * r.std_error;
  r.trials = opts.trials;
  r.seed = opts.seed;
  r.extras["mean_transformed"] = a.mean;
  r.extras["mean_fresh"] = b.mean;
  r.extras["expected"] = expected_count(KernelFamily::hyperbolic(n), radius);
  r.extras["sampler_radius"] = sampler_radius;
  r.decide();
  return r;
}

}  // namespace

TestReport invariance_test(const KernelFamily& family, const MobiusMap& map, double radius,
                           double tail_eps, const DriverOptions& opts) {
  family.validate();
  map.validate();
  require_trials(opts, 2, "invariance_test");
  if (family.tag == KernelFamily::Tag::spherical) {
    if (map.geometry != MobiusMap::Geometry::sphere) {
      throw DomainError("invariance_test: the spherical family needs a sphere map");
    }
    return spherical_invariance(family.n, map, opts);
  }
  if (family.tag == KernelFamily::Tag::hyperbolic) {
    if (map.geometry != MobiusMap::Geometry::disk) {
      throw DomainError("invariance_test: the hyperbolic family needs a disk map");
    }
    return hyperbolic_invariance(family.n, map, radius, tail_eps, opts);
  }
  throw DomainError("invariance_test: family must be spherical or hyperbolic");
}

// ---------------------------------------------------------------------------
// Haar powers

MomentTable haar_power_moments(int N, int n, int pmax, const DriverOptions& opts) {
  if (n < 1 || pmax < 1) throw DomainError("haar_power_moments: n and pmax must be positive");
  if (N < 8 * pmax * n) throw DomainError("haar_power_moments: needs N >= 8 pmax n");
  require_trials(opts, 2, "haar_power_moments");

  const double scale = std::sqrt(static_cast<double>(N));
  const auto entries = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const ComplexMatrix u = sample_haar_unitary(N, rng);
        std::vector<Complex> x;
        x.reserve(static_cast<std::size_t>(pmax * n * n));
        ComplexMatrix rows = u.topRows(n);  // top rows of U^p
        for (int p = 1; p <= pmax; ++p) {
          if (p > 1) rows = rows * u;
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) x.push_back(scale * rows(i, j));
          }
        }
        return x;
      },
      opts.execution);

  std::vector<std::string> names;
  for (int p = 1; p <= pmax; ++p) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        names.push_back("x[p=" + std::to_string(p) + "," + std::to_string(i) + "," + std::to_string(j) + "]");
      }
    }
  }
  const std::size_t labels = names.size();
  const std::size_t trials = entries.size();
  MomentTable table;
  std::vector<Complex> samples(trials);
  auto collect = [&](auto&& f) {
    for (std::size_t t = 0; t < trials; ++t) samples[t] = f(entries[t]);
  };
  for (std::size_t a = 0; a < labels; ++a) {
    collect([&](const std::vector<Complex>& x) { return Complex(std::norm(x[a]), 0.0); });
    add_moment(table, "E|" + names[a] + "|^2", samples, 1.0);
  }
  for (std::size_t a = 0; a < labels; ++a) {
    collect([&](const std::vector<Complex>& x) { return x[a] * x[a]; });
    add_moment(table, "E " + names[a] + "^2", samples, 0.0);
  }
  for (std::size_t a = 0; a < labels; ++a) {
    for (std::size_t b = a + 1; b < labels; ++b) {
      collect([&](const std::vector<Complex>& x) { return x[a] * std::conj(x[b]); });
      add_moment(table, "E " + names[a] + " conj " + names[b], samples, 0.0);
    }
  }
  for (std::size_t a = 0; a < labels; ++a) {
    collect([&](const std::vector<Complex>& x) {
      const double m = std::norm(x[a]);
      return Complex(m * m, 0.0);
    });
    add_moment(table, "E|" + names[a] + "|^4", samples, 2.0);
  }
  return table;
}

std::vector<TestReport> moment_reports(const std::string& prefix, const MomentTable& table, double sigma,
                                       const DriverOptions& opts) {
  std::vector<TestReport> reports;
  for (std::size_t i = 0; i < table.size(); ++i) {
    reports.push_back(table_row_report(prefix + table.labels[i], table, i, sigma, 0.0, opts));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Single-statistic drivers

TestReport f0_moment_test(int N, int n, const DriverOptions& opts) {
  require_trials(opts, 2, "f0_moment_test");
  const auto values = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const ComplexMatrix v = sample_truncated_unitary(N, n, rng);
        // f_N(0) = det(V) / det(I), so |f_N(0)|^2 = |det V|^2.
        return std::norm(v.partialPivLu().determinant());
      },
      opts.execution);
  return mean_report("f0 moment N=" + std::to_string(N) + " n=" + std::to_string(n) + ": E|f_N(0)|^2", values,
                     blaschke_zero_moment(N, n), opts);
}

TestReport ginibre_intensity_test(int n, double r, const DriverOptions& opts) {
  require_trials(opts, 2, "ginibre_intensity_test");
  if (!(r > 0.0)) throw DomainError("ginibre_intensity_test: radius must be positive");
  const auto values = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        const PointConfiguration c = ginibre_points(n, rng);
        return static_cast<double>(
            std::count_if(c.points.begin(), c.points.end(), [&](Complex z) { return std::abs(z) < r; }));
      },
      opts.execution);
  return mean_report("ginibre intensity n=" + std::to_string(n) + ": count in |z|<" + format_double(r), values,
                     expected_count(KernelFamily::planar(n), r), opts);
}

TestReport det_gaf_intensity_test(int n, double radius, double tail_eps, const DriverOptions& opts) {
  require_trials(opts, 2, "det_gaf_intensity_test");
  const int degree = det_gaf_truncation_degree(radius, tail_eps);
  struct Counts {
    double base = 0.0;
    double change = 0.0;
  };
  const auto counts = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        for (int attempt = 0;; ++attempt) {
          std::vector<ComplexMatrix> g;
          for (int k = 0; k <= degree; ++k) g.push_back(sample_ginibre_matrix(n, rng));
          try {
            const auto base = det_gaf_zeros_from_coefficients(g, radius);
            // Extend the same series to twice the degree with further draws from the stream.
            for (int k = 0; k < degree; ++k) g.push_back(sample_ginibre_matrix(n, rng));
            const auto extended = det_gaf_zeros_from_coefficients(g, radius);
            return Counts{static_cast<double>(base.size()),
                          std::abs(static_cast<double>(extended.size()) - static_cast<double>(base.size()))};
          } catch (const SolverError&) {
            if (attempt >= 100) throw;
          }
        }
      },
      opts.execution);
  std::vector<double> base;
  std::vector<double> change;
  for (const Counts& c : counts) {
    base.push_back(c.base);
    change.push_back(c.change);
  }
  const double predicted = expected_count(KernelFamily::hyperbolic(n), radius);
  TestReport r = mean_report("det-GAF intensity n=" + std::to_string(n) + ": count in |z|<" + format_double(radius),
                             base, predicted, opts);
  const double bias = estimate_mean(change).mean;
  r.extras["truncation_degree"] = degree;
  r.extras["truncation_bias"] = bias;
  r.extras["truncation_bias_fraction"] = bias / predicted;
  r.extras["truncation_bias_ok"] = bias < 0.01 * predicted ? 1.0 : 0.0;
  r.passed = r.passed && bias < 0.01 * predicted;
  return r;
}

// ---------------------------------------------------------------------------
// Coefficient convergence

double limit_coefficient_second_moment(int n, int k) {
  if (n < 1 || k < 0) throw DomainError("limit_coefficient_second_moment: need n >= 1, k >= 0");
  double value = std::tgamma(n + 1.0);  // n!
  // binom(k+n-1, n-1) = prod_{i=1}^{n-1} (k+i)/i
  for (int i = 1; i < n; ++i) value *= static_cast<double>(k + i) / static_cast<double>(i);
  return value;
}

bool ConvergenceResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.passed; });
}

namespace {

MomentTable coefficient_moments(const std::vector<std::vector<Complex>>& coeffs, int n, int kmax) {
  MomentTable table;
  std::vector<Complex> samples(coeffs.size());
  for (int k = 0; k <= kmax; ++k) {
    for (std::size_t t = 0; t < coeffs.size(); ++t) samples[t] = std::norm(coeffs[t][static_cast<std::size_t>(k)]);
    add_moment(table, "E|c_" + std::to_string(k) + "|^2", samples, limit_coefficient_second_moment(n, k));
  }
  for (int k = 0; k <= kmax; ++k) {
    for (int m = k + 1; m <= kmax; ++m) {
      for (std::size_t t = 0; t < coeffs.size(); ++t) {
        samples[t] = coeffs[t][static_cast<std::size_t>(k)] * std::conj(coeffs[t][static_cast<std::size_t>(m)]);
      }
      add_moment(table, "E c_" + std::to_string(k) + " conj c_" + std::to_string(m), samples, 0.0);
    }
  }
  return table;
}

}  // namespace

ConvergenceResult coefficient_convergence_test(int N, int n, int kmax, const DriverOptions& opts) {
  if (N < 64) throw DomainError("coefficient_convergence_test: needs N >= 64");
  if (kmax < 0 || kmax > 6) throw DomainError("coefficient_convergence_test: needs 0 <= kmax <= 6");
  if (n < 1 || n > 3) throw DomainError("coefficient_convergence_test: needs 1 <= n <= 3");
  require_trials(opts, 2, "coefficient_convergence_test");

  auto to_vector = [](const TruncatedSeries& s) { return std::vector<Complex>(s.coeffs().begin(), s.coeffs().end()); };
  const auto finite = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(t));
        return to_vector(scaled_fN_coefficients(sample_truncated_unitary(N, n, rng), n, kmax, true));
      },
      opts.execution);
  const auto limit = map_trials(
      opts.trials,
      [&](std::int64_t t) {
        RngStream rng(opts.seed, static_cast<std::uint64_t>(opts.trials + t));
        std::vector<ComplexMatrix> g;
        for (int k = 0; k <= kmax; ++k) g.push_back(sample_ginibre_matrix(n, rng));
        return to_vector(det_series(SeriesMatrix::from_coefficients(g), static_cast<std::size_t>(kmax)));
      },
      opts.execution);

  ConvergenceResult result;
  result.finite = coefficient_moments(finite, n, kmax);
  result.limit = coefficient_moments(limit, n, kmax);
  const Significance& sig = opts.significance;
  const std::string tag = "convergence N=" + std::to_string(N) + " n=" + std::to_string(n) + " ";
  for (std::size_t i = 0; i < result.finite.size(); ++i) {
    const bool second_moment = result.finite.labels[i].starts_with("E|");
    const double allowance = second_moment ? sig.convergence_allowance : 0.0;
    result.reports.push_back(
        table_row_report(tag + "finite " + result.finite.labels[i], result.finite, i, sig.z_sigma, allowance, opts));
  }
  for (std::size_t i = 0; i < result.limit.size(); ++i) {
    result.reports.push_back(
        table_row_report(tag + "limit " + result.limit.labels[i], result.limit, i, sig.z_sigma, 0.0, opts));
  }
  for (std::size_t i = 0; i < result.finite.size(); ++i) {
    TestReport r;
    r.name = tag + "agreement " + result.finite.labels[i];
    r.statistic = std::abs(result.finite.empirical[i] - result.limit.empirical[i]);
    r.predicted = 0.0;
    r.std_error = std::hypot(result.finite.std_error[i], result.limit.std_error[i]);
    r.threshold = sig.z_sigma * r.std_error;
    r.trials = opts.trials;
    r.seed = opts.seed;
    r.decide();
    result.reports.push_back(r);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exact checks

TestReport cycle_sum_oracle_check(int matrices, int kmax, double tolerance, std::uint64_t seed) {
  if (matrices < 1 || kmax < 0) throw DomainError("cycle_sum_oracle_check: needs matrices >= 1, kmax >= 0");
  double worst = 0.0;
  double factorial_k = 1.0;
  std::vector<double> factorial(static_cast<std::size_t>(kmax) + 1, 1.0);
  for (int k = 1; k <= kmax; ++k) factorial[static_cast<std::size_t>(k)] = (factorial_k *= k);
  for (int m = 0; m < matrices; ++m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    const int size = 2 + m % 5;
    for (;;) {
      const ComplexMatrix v = sample_ginibre_matrix(size, rng);
      std::vector<Complex> derivs;
      try {
        derivs = blaschke_derivatives(v, kmax);
      } catch (const SingularMatrixError&) {
        continue;
      }
      const TruncatedSeries ratio = series_ratio(v, kmax);
      for (int k = 0; k <= kmax; ++k) {
        const Complex oracle = factorial[static_cast<std::size_t>(k)] * ratio[static_cast<std::size_t>(k)];
        const double scale = std::max(std::abs(oracle), std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(derivs[static_cast<std::size_t>(k)] - oracle) / scale);
      }
      break;
    }
  }
  TestReport r;
  r.name = "cycle-sum vs series division: max relative error";
  r.mode = TestReport::Mode::upper_bound;
  r.statistic = worst;
  r.threshold = tolerance;
  r.trials = matrices;
  r.seed = seed;
  r.extras["kmax"] = kmax;
  r.decide();
  return r;
}

MobiusIdentityResult mobius_identity_check(int samples, std::uint64_t seed) {
  MobiusIdentityResult out;
  out.samples = samples;
  RngStream rng(seed, 0);
  auto unit_disk_point = [&](double max_radius) {
    const double rho = max_radius * std::sqrt(rng.uniform());
    return std::polar(rho, 2.0 * std::numbers::pi * rng.uniform());
  };
  for (int s = 0; s < samples; ++s) {
    // Sphere map from a uniform point of S^3.
    Complex a = sample_complex_gaussian(rng);
    Complex b = sample_complex_gaussian(rng);
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    const MobiusMap sphere = MobiusMap::sphere(a / norm, b / norm);
    const Complex z = sample_complex_gaussian(rng);
    const Complex w = sample_complex_gaussian(rng);
    const Complex dz = sphere.denominator(z);
    const Complex dw = sphere.denominator(w);
    const Complex pz = mobius_apply(sphere, z);
    const Complex pw = mobius_apply(sphere, w);
    out.derivative = std::max(out.derivative, std::abs(mobius_derivative(sphere, z) * dz * dz - 1.0));
    out.metric = std::max(out.metric, std::abs((1.0 + std::norm(pz)) * std::norm(dz) - (1.0 + std::norm(z))));
    out.difference = std::max(out.difference, std::abs((pz - pw) * dz * dw - (z - w)));

    // Disk automorphism with hyperbolic displacement up to 1.5.
    const double t = 1.5 * rng.uniform();
    const MobiusMap disk = MobiusMap::disk(std::polar(std::cosh(t), 2.0 * std::numbers::pi * rng.uniform()),
                                           std::polar(std::sinh(t), 2.0 * std::numbers::pi * rng.uniform()));
    const Complex u = unit_disk_point(0.95);
    const Complex v = unit_disk_point(0.95);
    const Complex lhs = mobius_derivative(disk, u) * std::conj(mobius_derivative(disk, v)) *
                        (1.0 - u * std::conj(v)) * (1.0 - u * std::conj(v));
    const Complex image = 1.0 - mobius_apply(disk, u) * std::conj(mobius_apply(disk, v));
    out.disk_kernel = std::max(out.disk_kernel, std::abs(lhs - image * image));
  }
  return out;
}

}  // namespace matsing
