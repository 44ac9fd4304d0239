#include "matsing/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matsing/error.hpp"
#include "matsing/series.hpp"

namespace matsing {

namespace {

constexpr int kMinTruncationDegree = 8;
constexpr int kMaxTruncationDegree = 512;
constexpr int kMaxResamples = 100;

void require_positive(int value, const char* what) {
  if (value < 1) throw DomainError(std::string(what) + " must be positive");
}

PointConfiguration make_config(EnsembleFamily family, const RngStream& rng) {
  PointConfiguration c;
  c.family = family;
  c.seed = rng.seed();
  c.stream = rng.stream_index();
  return c;
}

// Roots of sum_k c_k z^k. Trailing zero coefficients lower the degree.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  std::size_t degree = coeffs.size() - 1;
  while (degree > 0 && coeffs[degree] == Complex{}) --degree;
  if (degree == 0) return {};
  ComplexMatrix companion = ComplexMatrix::Zero(static_cast<Eigen::Index>(degree),
                                                static_cast<Eigen::Index>(degree));
  const auto d = static_cast<Eigen::Index>(degree);
  for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  const Complex lead = coeffs[degree];
  for (Eigen::Index i = 0; i < d; ++i) companion(i, d - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
  return eigenvalues(companion);
}

}  // namespace

std::string to_string(EnsembleFamily family) {
  switch (family) {
    case EnsembleFamily::planar: return "planar";
    case EnsembleFamily::spherical: return "spherical";
    case EnsembleFamily::hyperbolic_det_gaf: return "hyperbolic-det-gaf";
    case EnsembleFamily::truncated_unitary: return "truncated-unitary";
  }
  return "unknown";
}

EnsembleFamily ensemble_family_from_string(const std::string& name) {
  if (name == "planar" || name == "ginibre") return EnsembleFamily::planar;
  if (name == "spherical") return EnsembleFamily::spherical;
  if (name == "hyperbolic-det-gaf" || name == "hyperbolic" || name == "det-gaf") {
    return EnsembleFamily::hyperbolic_det_gaf;
  }
  if (name == "truncated-unitary" || name == "truncated") return EnsembleFamily::truncated_unitary;
  throw DomainError("unknown ensemble family '" + name + "'");
}

nlohmann::json to_json(const PointConfiguration& config) {
  nlohmann::json points = nlohmann::json::array();
  for (const Complex z : config.points) points.push_back({z.real(), z.imag()});
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : config.params) {
    // Integral parameters print as integers.
    if (value == std::floor(value) && std::abs(value) < 9.0e15) {
      params[key] = static_cast<long long>(value);
    } else {
      params[key] = value;
    }
  }
  if (config.resamples > 0) params["resamples"] = config.resamples;
  return {{"family", to_string(config.family)},
          {"params", std::move(params)},
          {"points", std::move(points)},
          {"infinity_count", config.infinity_count},
          {"seed", config.seed},
          {"stream", config.stream}};
}

PointConfiguration point_configuration_from_json(const nlohmann::json& j) {
  PointConfiguration c;
  c.family = ensemble_family_from_string(j.at("family").get<std::string>());
  for (const auto& [key, value] : j.at("params").items()) {
    if (key == "resamples") {
      c.resamples = value.get<std::size_t>();
    } else {
      c.params[key] = value.get<double>();
    }
  }
  for (const auto& p : j.at("points")) c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  c.infinity_count = j.at("infinity_count").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.stream = j.at("stream").get<std::uint64_t>();
  return c;
}

PointConfiguration ginibre_points(int n, RngStream& rng) {
  require_positive(n, "ginibre_points: n");
  PointConfiguration c = make_config(EnsembleFamily::planar, rng);
  c.params["n"] = n;
  c.points = eigenvalues(sample_ginibre_matrix(n, rng));
  return c;
}

PointConfiguration spherical_points(int n, RngStream& rng) {
  require_positive(n, "spherical_points: n");
  PointConfiguration c = make_config(EnsembleFamily::spherical, rng);
  c.params["n"] = n;
  for (;;) {
    const ComplexMatrix g1 = sample_ginibre_matrix(n, rng);
    const ComplexMatrix g2 = sample_ginibre_matrix(n, rng);
    try {
      // det(z G1 - G2) = 0  <=>  generalized eigenvalue of the pencil (G2, G1).
      for (const Complex z : generalized_eigenvalues(g2, g1)) {
        if (is_infinite(z)) {
          ++c.infinity_count;
        } else {
          c.points.push_back(z);
        }
      }
      return c;
    } catch (const DegeneratePencilError&) {
      if (++c.resamples > kMaxResamples) throw;
      c.infinity_count = 0;
      c.points.clear();
    }
  }
}

ComplexMatrix sample_truncated_unitary(int N, int n, RngStream& rng) {
  require_positive(N, "sample_truncated_unitary: N");
  require_positive(n, "sample_truncated_unitary: n");
  const ComplexMatrix u = sample_haar_unitary(N + n, rng);
  return u.bottomRightCorner(N, N);
}

PointConfiguration truncated_unitary_points(int N, int n, RngStream& rng) {
  PointConfiguration c = make_config(EnsembleFamily::truncated_unitary, rng);
  c.params["N"] = N;
  c.params["n"] = n;
  c.points = eigenvalues(sample_truncated_unitary(N, n, rng));
  return c;
}

int det_gaf_truncation_degree(double radius, double tail_eps) {
  if (!(radius > 0.0 && radius < 1.0)) {
    throw DomainError("det_gaf_truncation_degree: radius must lie in (0, 1)");
  }
  if (!(tail_eps > 0.0)) throw DomainError("det_gaf_truncation_degree: tail_eps must be positive");
  const double raw = std::ceil(std::log(tail_eps * (1.0 - radius)) / std::log(radius));
  return static_cast<int>(std::clamp(raw, static_cast<double>(kMinTruncationDegree),
                                     static_cast<double>(kMaxTruncationDegree)));
}

std::vector<Complex> det_gaf_zeros_from_coefficients(const std::vector<ComplexMatrix>& coefficients,
                                                     double radius) {
  if (coefficients.empty()) throw DimensionError("det_gaf_zeros: no coefficient matrices");
  const auto n = static_cast<std::size_t>(coefficients.front().rows());
  const std::size_t degree = n * (coefficients.size() - 1);
  const auto entries = SeriesMatrix::from_coefficients(coefficients);
  const TruncatedSeries poly = det_series(entries, degree);
  std::vector<Complex> zeros;
  for (const Complex z : polynomial_roots(poly.coeffs())) {
    if (std::abs(z) < radius) zeros.push_back(z);
  }
  return zeros;
}

PointConfiguration det_gaf_zeros(int n, double radius, double tail_eps, RngStream& rng) {
  require_positive(n, "det_gaf_zeros: n");
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("det_gaf_zeros: radius must lie in (0, 1)");
  const int degree = det_gaf_truncation_degree(radius, tail_eps);
  PointConfiguration c = make_config(EnsembleFamily::hyperbolic_det_gaf, rng);
  c.params["n"] = n;
  c.params["radius"] = radius;
  c.params["tail_eps"] = tail_eps;
  c.params["degree"] = degree;
  for (;;) {
    std::vector<ComplexMatrix> coefficients;
    coefficients.reserve(static_cast<std::size_t>(degree) + 1);
    for (int k = 0; k <= degree; ++k) coefficients.push_back(sample_ginibre_matrix(n, rng));
    try {
      c.points = det_gaf_zeros_from_coefficients(coefficients, radius);
      return c;
    } catch (const SolverError&) {
      if (++c.resamples > kMaxResamples) throw;
    }
  }
}

ComplexMatrix structured_contraction(const ComplexMatrix& a, int N, RngStream& rng) {
  require_square(a, "structured_contraction");
  const auto n = static_cast<int>(a.rows());
  if (N < n) {
    std::ostringstream msg;
    msg << "structured_contraction: N = " << N << " is smaller than the block size " << n;
    throw DomainError(msg.str());
  }
  const ComplexMatrix p = sample_haar_unitary(N, rng);
  const ComplexMatrix q = sample_haar_unitary(N, rng);
  ComplexMatrix block = ComplexMatrix::Identity(N, N);
  block.topLeftCorner(n, n) = a;
  return q.adjoint() * block * p.adjoint();
}

}  // namespace matsing
