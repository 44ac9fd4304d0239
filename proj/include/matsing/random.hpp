#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "matsing/linalg.hpp"

namespace matsing {

/// A reproducible random stream keyed by (seed, stream_index).
///
/// The engine is a 64-bit Mersenne Twister seeded through std::seed_seq with the
/// four 32-bit halves of the key. The seed sequence decorrelates neighbouring
/// keys, so distinct stream indices under one seed are treated as independent;
/// Monte Carlo drivers use the trial number as the stream index.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Standard real normal N(0, 1).
  double normal();
  /// Uniform on [0, 1).
  double uniform();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// x + iy with x, y independent N(0, 1/2); density exp(-|z|^2)/pi.
Complex sample_complex_gaussian(RngStream& rng);

/// n x n matrix of independent standard complex Gaussians (filled row by row).
ComplexMatrix sample_ginibre_matrix(int n, RngStream& rng);

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q, so that R has a positive real diagonal.
ComplexMatrix sample_haar_unitary(int size, RngStream& rng);

}  // namespace matsing
