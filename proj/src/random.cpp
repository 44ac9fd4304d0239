#include "matsing/random.hpp"

#include <cmath>

#include "matsing/error.hpp"

namespace matsing {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {
  auto seq = make_seed_seq(seed, stream_index);
  engine_.seed(seq);
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() { return uniform_(engine_); }

Complex sample_complex_gaussian(RngStream& rng) {
  static const double scale = std::sqrt(0.5);
  const double x = rng.normal();
  const double y = rng.normal();
  return {scale * x, scale * y};
}

ComplexMatrix sample_ginibre_matrix(int n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_ginibre_matrix: n must be positive");
  ComplexMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = sample_complex_gaussian(rng);
  }
  return g;
}

ComplexMatrix sample_haar_unitary(int size, RngStream& rng) {
  if (size < 1) throw DomainError("sample_haar_unitary: size must be positive");
  const ComplexMatrix g = sample_ginibre_matrix(size, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const auto& r = qr.matrixQR();
  // Without this phase fix Q is not Haar distributed.
  for (int j = 0; j < size; ++j) {
    const Complex d = r(j, j);
    const double mod = std::abs(d);
    if (mod > 0.0) q.col(j) *= d / mod;
  }
  return q;
}

}  // namespace matsing
