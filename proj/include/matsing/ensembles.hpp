#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "matsing/linalg.hpp"
#include "matsing/random.hpp"

namespace matsing {

enum class EnsembleFamily { planar, spherical, hyperbolic_det_gaf, truncated_unitary };

std::string to_string(EnsembleFamily family);
EnsembleFamily ensemble_family_from_string(const std::string& name);

/// One draw of a point process, in the plane chart.
struct PointConfiguration {
  EnsembleFamily family = EnsembleFamily::planar;
  std::map<std::string, double> params;
  std::vector<Complex> points;      // finite points only
  std::size_t infinity_count = 0;   // spherical only: points at infinity
  std::size_t resamples = 0;        // degenerate draws thrown away before this one
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// One JSONL record: {"family","params","points":[[re,im],...],"infinity_count","seed","stream"}.
nlohmann::json to_json(const PointConfiguration& config);
PointConfiguration point_configuration_from_json(const nlohmann::json& j);

/// Eigenvalues of an n x n Ginibre matrix.
PointConfiguration ginibre_points(int n, RngStream& rng);

/// Zeros of det(z G1 - G2) for independent n x n Ginibre G1, G2.
PointConfiguration spherical_points(int n, RngStream& rng);

/// Lower-right N x N block of a Haar unitary of size N + n.
ComplexMatrix sample_truncated_unitary(int N, int n, RngStream& rng);

/// Eigenvalues of sample_truncated_unitary(N, n).
PointConfiguration truncated_unitary_points(int N, int n, RngStream& rng);

/// Degree at which the Gaussian power series is cut for a sampling radius:
/// ceil(log(tail_eps (1 - radius)) / log(radius)) clamped to [8, 512].
int det_gaf_truncation_degree(double radius, double tail_eps);

/// Zeros in |z| < radius of det(sum_{k<=M} G_k z^k) for given coefficient matrices.
/// The determinant is expanded to a scalar polynomial of degree n M and solved
/// through its companion matrix.
std::vector<Complex> det_gaf_zeros_from_coefficients(const std::vector<ComplexMatrix>& coefficients,
                                                     double radius);

/// Zeros of det(G_0 + z G_1 + z^2 G_2 + ...) in |z| < radius.
PointConfiguration det_gaf_zeros(int n, double radius, double tail_eps, RngStream& rng);

/// V = Q^* diag(A, I_{N-n}) P^* for independent Haar P, Q of size N (P drawn first).
ComplexMatrix structured_contraction(const ComplexMatrix& a, int N, RngStream& rng);

}  // namespace matsing
