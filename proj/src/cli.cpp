#include "matsing/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <type_traits>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "matsing/ensembles.hpp"
#include "matsing/error.hpp"
#include "matsing/series.hpp"
#include "matsing/trials.hpp"
#include "matsing/verify.hpp"

namespace matsing::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"sample", "verify", "coeffs", "convergence", "invariance"};
const std::vector<std::string> kSuites = {"radial",        "invariance", "haar-moments",     "f0-moment",
                                          "ginibre-intensity", "beta-counts", "det-gaf-intensity",
                                          "cycle-sum-oracle",    "mobius-identities"};

struct Settings {
  std::string command;
  std::string family = "spherical";
  int n = 1;
  int N = 32;
  int kmax = 3;
  int pmax = 3;
  double radius = 0.6;
  double tail_eps = 1e-8;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string suite;
  std::string out = "-";
  std::string format = "jsonl";
  int threads = 0;
  std::string matrix;
  std::string gnuplot;
  std::vector<double> alpha = {0.6, 0.0};
  std::vector<double> beta = {0.0, 0.8};
  std::vector<double> thresholds = {0.25, 0.5, 0.75};
  double tolerance = 1e-9;
  Significance significance;
};

// One produced file (or the stdout stream when path is "-").
struct Artifact {
  std::string path;
  std::string content;
};

class Runner {
 public:
  Runner(const CLI::App& app, Settings& s) : app_(app), s_(s) {}

  bool given(const std::string& flag) const { return app_.get_option(flag)->count() > 0; }

  // Applies a command-specific default when the flag was not on the command line or in the config file.
  template <class T>
  void default_to(const std::string& flag, T& field, std::type_identity_t<T> value) const {
    if (!given(flag)) field = value;
  }

  DriverOptions driver_options() const {
    DriverOptions opts;
    opts.trials = s_.trials;
    opts.seed = s_.seed;
    opts.significance = s_.significance;
    return opts;
  }

  std::vector<Artifact> sample();
  std::vector<Artifact> verify(bool& passed);
  std::vector<Artifact> coeffs();
  std::vector<Artifact> convergence(bool& passed);
  std::vector<Artifact> invariance(bool& passed);

  json resolved() const;

 private:
  TestReport run_invariance();
  std::vector<TestReport> run_suite();

  const CLI::App& app_;
  Settings& s_;
};

Complex pair_to_complex(const std::vector<double>& v, const char* flag) {
  if (v.size() != 2) throw DomainError(std::string(flag) + " takes two numbers: real and imaginary parts");
  return {v[0], v[1]};
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string reports_document(const std::vector<TestReport>& reports) {
  json array = json::array();
  for (const auto& r : reports) array.push_back(to_json(r));
  return array.dump(2) + "\n";
}

bool all_passed(const std::vector<TestReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.passed; });
}

// ---------------------------------------------------------------------------
// sample

std::vector<Artifact> Runner::sample() {
  default_to("--trials", s_.trials, std::int64_t{100});
  const EnsembleFamily family = ensemble_family_from_string(s_.family);
  if (s_.format != "jsonl" && s_.format != "csv") throw DomainError("--format must be jsonl or csv");
  if (s_.trials < 1) throw DomainError("--trials must be positive");

  const auto configs = map_trials(s_.trials, [&](std::int64_t t) {
    RngStream rng(s_.seed, static_cast<std::uint64_t>(t));
    switch (family) {
      case EnsembleFamily::planar: return ginibre_points(s_.n, rng);
      case EnsembleFamily::spherical: return spherical_points(s_.n, rng);
      case EnsembleFamily::truncated_unitary: return truncated_unitary_points(s_.N, s_.n, rng);
      case EnsembleFamily::hyperbolic_det_gaf: return det_gaf_zeros(s_.n, s_.radius, s_.tail_eps, rng);
    }
    throw DomainError("unsupported family");
  });

  std::string content;
  if (s_.format == "jsonl") {
    for (const auto& c : configs) content += to_json(c).dump() + "\n";
  } else {
    content = "trial,index,re,im\n";
    for (std::size_t t = 0; t < configs.size(); ++t) {
      const auto& pts = configs[t].points;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        content += std::to_string(t) + "," + std::to_string(i) + "," + number(pts[i].real()) + "," +
                   number(pts[i].imag()) + "\n";
      }
    }
  }
  std::vector<Artifact> artifacts = {{s_.out, std::move(content)}};
  if (!s_.gnuplot.empty()) {
    // Each point weighted by 1/trials, so binned weights estimate the first intensity.
    const std::string weight = number(1.0 / static_cast<double>(s_.trials));
    std::string plot = "# x y weight\n";
    for (const auto& c : configs) {
      for (const Complex z : c.points) plot += number(z.real()) + " " + number(z.imag()) + " " + weight + "\n";
    }
    artifacts.push_back({s_.gnuplot, std::move(plot)});
  }
  return artifacts;
}

// ---------------------------------------------------------------------------
// verify

TestReport Runner::run_invariance() {
  const EnsembleFamily family = ensemble_family_from_string(s_.family);
  if (family == EnsembleFamily::spherical) {
    default_to("--n", s_.n, 3);
    default_to("--trials", s_.trials, std::int64_t{5000});
    const MobiusMap map = MobiusMap::sphere(pair_to_complex(s_.alpha, "--alpha"), pair_to_complex(s_.beta, "--beta"));
    return invariance_test(KernelFamily::spherical(s_.n), map, s_.radius, s_.tail_eps, driver_options());
  }
  if (family == EnsembleFamily::hyperbolic_det_gaf) {
    default_to("--trials", s_.trials, std::int64_t{2000});
    default_to("--alpha", s_.alpha, {std::cosh(0.5), 0.0});
    default_to("--beta", s_.beta, {std::sinh(0.5), 0.0});
    const MobiusMap map = MobiusMap::disk(pair_to_complex(s_.alpha, "--alpha"), pair_to_complex(s_.beta, "--beta"));
    return invariance_test(KernelFamily::hyperbolic(s_.n), map, s_.radius, s_.tail_eps, driver_options());
  }
  throw DomainError("invariance needs --family spherical or hyperbolic-det-gaf");
}

std::vector<TestReport> Runner::run_suite() {
  const std::string& suite = s_.suite;
  if (suite == "radial") {
    default_to("--trials", s_.trials, std::int64_t{10000});
    const EnsembleFamily family = ensemble_family_from_string(s_.family);
    if (family == EnsembleFamily::spherical) return {radial_law_test(KernelFamily::spherical(s_.n), driver_options())};
    if (family == EnsembleFamily::truncated_unitary) {
      return {radial_law_test(KernelFamily::truncated(s_.N, s_.n), driver_options())};
    }
    throw DomainError("radial needs --family spherical or truncated-unitary");
  }
  if (suite == "invariance") return {run_invariance()};
  if (suite == "haar-moments") {
    default_to("--N", s_.N, 128);
    default_to("--n", s_.n, 2);
    default_to("--trials", s_.trials, std::int64_t{10000});
    const DriverOptions opts = driver_options();
    return moment_reports("haar N=" + std::to_string(s_.N) + ": ", haar_power_moments(s_.N, s_.n, s_.pmax, opts),
                          s_.significance.moment_sigma, opts);
  }
  if (suite == "f0-moment") {
    default_to("--N", s_.N, 16);
    default_to("--n", s_.n, 2);
    default_to("--trials", s_.trials, std::int64_t{10000});
    return {f0_moment_test(s_.N, s_.n, driver_options())};
  }
  if (suite == "ginibre-intensity") {
    default_to("--n", s_.n, 20);
    default_to("--radius", s_.radius, 3.0);
    return {ginibre_intensity_test(s_.n, s_.radius, driver_options())};
  }
  if (suite == "beta-counts") {
    default_to("--trials", s_.trials, std::int64_t{10000});
    return beta_count_reports(s_.N, s_.n, s_.thresholds, driver_options());
  }
  if (suite == "det-gaf-intensity") {
    default_to("--trials", s_.trials, std::int64_t{2000});
    return {det_gaf_intensity_test(s_.n, s_.radius, s_.tail_eps, driver_options())};
  }
  if (suite == "cycle-sum-oracle") {
    default_to("--trials", s_.trials, std::int64_t{100});
    default_to("--kmax", s_.kmax, 10);
    if (s_.trials > std::numeric_limits<int>::max()) throw DomainError("--trials is too large");
    return {cycle_sum_oracle_check(static_cast<int>(s_.trials), s_.kmax, s_.tolerance, s_.seed)};
  }
  if (suite == "mobius-identities") {
    default_to("--trials", s_.trials, std::int64_t{1000});
    const MobiusIdentityResult m = mobius_identity_check(static_cast<int>(s_.trials), s_.seed);
    std::vector<TestReport> reports;
    for (const auto& [name, value] : {std::pair{"derivative", m.derivative}, std::pair{"metric", m.metric},
                                      std::pair{"difference", m.difference}, std::pair{"disk kernel", m.disk_kernel}}) {
      TestReport r;
      r.name = std::string("mobius identity: ") + name;
      r.mode = TestReport::Mode::upper_bound;
      r.statistic = value;
      r.threshold = 1e-12;
      r.trials = s_.trials;
      r.seed = s_.seed;
      r.decide();
      reports.push_back(r);
    }
    return reports;
  }
  throw DomainError("unknown suite '" + suite + "'");
}

std::vector<Artifact> Runner::verify(bool& passed) {
  if (s_.suite.empty()) throw DomainError("verify needs --suite");
  const auto reports = run_suite();
  passed = all_passed(reports);
  return {{s_.out, reports_document(reports)}};
}

std::vector<Artifact> Runner::invariance(bool& passed) {
  const std::vector<TestReport> reports = {run_invariance()};
  passed = all_passed(reports);
  return {{s_.out, reports_document(reports)}};
}

// ---------------------------------------------------------------------------
// coeffs and convergence

ComplexMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  json j;
  try {
    in >> j;
    return matrix_from_json(j);
  } catch (const json::exception& e) {
    throw DomainError("malformed matrix file '" + path + "': " + e.what());
  }
}

std::vector<Artifact> Runner::coeffs() {
  default_to("--kmax", s_.kmax, 10);
  ComplexMatrix v;
  std::string source;
  if (!s_.matrix.empty()) {
    v = read_matrix_file(s_.matrix);
    source = "file";
  } else {
    RngStream rng(s_.seed, 0);
    v = sample_truncated_unitary(s_.N, s_.n, rng);
    source = "truncated-unitary";
  }
  require_square(v, "coeffs");
  require_finite(v, "coeffs");

  const auto derivatives = blaschke_derivatives(v, s_.kmax);
  TruncatedSeries cycle(static_cast<std::size_t>(s_.kmax));
  double factorial = 1.0;
  for (int k = 0; k <= s_.kmax; ++k) {
    if (k > 0) factorial *= k;
    cycle[static_cast<std::size_t>(k)] = derivatives[static_cast<std::size_t>(k)] / factorial;
  }
  const TruncatedSeries oracle = series_ratio(v, s_.kmax);
  double largest = 0.0;
  for (const Complex c : oracle.coeffs()) largest = std::max(largest, std::abs(c));
  double discrepancy = 0.0;
  for (std::size_t k = 0; k <= oracle.order(); ++k) {
    const double scale = std::max({std::abs(oracle[k]), 1e-12 * largest, std::numeric_limits<double>::min()});
    discrepancy = std::max(discrepancy, std::abs(cycle[k] - oracle[k]) / scale);
  }

  json doc = {{"source", source},
              {"rows", v.rows()},
              {"kmax", s_.kmax},
              {"cycle_sum", series_to_json(cycle)},
              {"series_division", series_to_json(oracle)},
              {"max_relative_discrepancy", discrepancy}};
  if (v.rows() <= 16) doc["matrix"] = matrix_to_json(v);
  return {{s_.out, doc.dump(2) + "\n"}};
}

std::vector<Artifact> Runner::convergence(bool& passed) {
  default_to("--N", s_.N, 256);
  default_to("--trials", s_.trials, std::int64_t{2000});
  const ConvergenceResult result = coefficient_convergence_test(s_.N, s_.n, s_.kmax, driver_options());
  passed = result.passed();
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  const json doc = {{"finite", to_json(result.finite)},
                    {"limit", to_json(result.limit)},
                    {"reports", std::move(reports)},
                    {"passed", passed}};
  return {{s_.out, doc.dump(2) + "\n"}};
}

json Runner::resolved() const {
  json given_flags = json::array();
  for (const CLI::Option* opt : app_.get_options()) {
    if (opt->count() > 0 && !opt->get_lnames().empty()) given_flags.push_back("--" + opt->get_lnames().front());
  }
  return {{"command", s_.command},
          {"family", s_.family},
          {"n", s_.n},
          {"N", s_.N},
          {"kmax", s_.kmax},
          {"pmax", s_.pmax},
          {"radius", s_.radius},
          {"tail_eps", s_.tail_eps},
          {"trials", s_.trials},
          {"seed", s_.seed},
          {"suite", s_.suite},
          {"out", s_.out},
          {"format", s_.format},
          {"threads", thread_count()},
          {"matrix", s_.matrix},
          {"gnuplot", s_.gnuplot},
          {"alpha", s_.alpha},
          {"beta", s_.beta},
          {"thresholds", s_.thresholds},
          {"tolerance", s_.tolerance},
          {"z_sigma", s_.significance.z_sigma},
          {"moment_sigma", s_.significance.moment_sigma},
          {"ks_alpha", s_.significance.ks_alpha},
          {"convergence_allowance", s_.significance.convergence_allowance},
          {"given", std::move(given_flags)}};
}

// ---------------------------------------------------------------------------
// output

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << content;
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

void emit(const std::vector<Artifact>& artifacts, const json& config, std::ostream& out, std::ostream& err) {
  json outputs = json::array();
  for (const auto& a : artifacts) {
    if (a.path == "-") {
      out << a.content;
      out.flush();
      if (!out) throw IoError("failed writing to standard output");
    } else {
      write_file(a.path, a.content);
    }
    outputs.push_back({{"path", a.path}, {"bytes", a.content.size()}, {"git_blob_sha1", git_blob_sha1(a.content)}});
  }
  const json manifest = {{"tool", "matsing"},
                         {"version", kVersion},
                         {"created_utc", utc_timestamp()},
                         {"config", config},
                         {"outputs", std::move(outputs)}};
  const std::string& primary = artifacts.front().path;
  if (primary == "-") {
    err << manifest.dump(2) << "\n";
  } else {
    write_file(primary + ".manifest.json", manifest.dump(2) + "\n");
  }
}

void add_options(CLI::App& app, Settings& s) {
  app.add_option("command", s.command, "sample | verify | coeffs | convergence | invariance")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--family", s.family, "planar | spherical | hyperbolic-det-gaf | truncated-unitary");
  app.add_option("--n", s.n, "Matrix size of the Gaussian coefficients, or rows removed for truncated-unitary");
  app.add_option("--N", s.N, "Size of the truncated unitary block");
  app.add_option("--kmax", s.kmax, "Highest series coefficient");
  app.add_option("--pmax", s.pmax, "Highest Haar power for haar-moments");
  app.add_option("--radius", s.radius, "Disk radius (det-GAF sampling, counting tests)");
  app.add_option("--tail-eps", s.tail_eps, "Tail tolerance fixing the det-GAF truncation degree");
  app.add_option("--trials", s.trials, "Monte Carlo trials (command-specific default)");
  app.add_option("--seed", s.seed, "Random seed; trial t uses stream t");
  app.add_option("--suite", s.suite, "Verification suite")->check(CLI::IsMember(kSuites));
  app.add_option("--out", s.out, "Output path, '-' for standard output");
  app.add_option("--format", s.format, "jsonl | csv (sample only)");
  app.add_option("--threads", s.threads, "OpenMP threads (0: runtime default)");
  app.add_option("--matrix", s.matrix, "JSON matrix file for coeffs");
  app.add_option("--gnuplot", s.gnuplot, "Also write 'x y weight' rows to this path (sample only)");
  app.add_option("--alpha", s.alpha, "Mobius alpha as: re im")->expected(2);
  app.add_option("--beta", s.beta, "Mobius beta as: re im")->expected(2);
  app.add_option("--t", s.thresholds, "Thresholds on |z|^2 for beta-counts")->expected(1, 16);
  app.add_option("--tolerance", s.tolerance, "Relative tolerance for cycle-sum-oracle");
  app.add_option("--z-sigma", s.significance.z_sigma, "Standard errors allowed for mean tests");
  app.add_option("--moment-sigma", s.significance.moment_sigma, "Standard errors allowed for Haar moments");
  app.add_option("--ks-alpha", s.significance.ks_alpha, "KS significance level");
  app.add_option("--allowance", s.significance.convergence_allowance, "Relative slack for finite-N moments");
  app.set_config("--config", "", "Read 'key = value' settings from a file");
  app.set_version_flag("--version", kVersion);
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error("SHA-1 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Samplers, kernels and statistical checks for random matrix-valued analytic functions", "matsing"};
  Settings s;
  add_options(app, s);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidParams;
  }

  Runner runner(app, s);
  try {
    set_thread_count(s.threads);
    if (s.command != "sample" && s.format != "jsonl") throw DomainError("--format applies to sample only");
    bool passed = true;
    std::vector<Artifact> artifacts;
    if (s.command == "sample") {
      artifacts = runner.sample();
    } else if (s.command == "verify") {
      artifacts = runner.verify(passed);
    } else if (s.command == "coeffs") {
      artifacts = runner.coeffs();
    } else if (s.command == "convergence") {
      artifacts = runner.convergence(passed);
    } else {
      artifacts = runner.invariance(passed);
    }
    emit(artifacts, runner.resolved(), out, err);
    return passed ? kOk : kVerifyFailed;
  } catch (const SingularMatrixError& e) {
    err << "error: " << e.what() << "\nhint: the matrix must be invertible; resample with another --seed\n";
    return kSingularMatrix;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace matsing::cli
