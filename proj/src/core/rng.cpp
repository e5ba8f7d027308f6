#include "georeg/rng.hpp"

namespace georeg {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(a + 0x1000));
  h = mix64(h ^ mix64(b + 0x2000));
  h = mix64(h ^ mix64(c + 0x3000));
  return h;
}

Eigen::MatrixXd NormalSampler::matrix(Eigen::Index rows, Eigen::Index cols, double stddev) {
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order so a row of samples is contiguous in the stream.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = draw(stddev);
  return m;
}

Eigen::VectorXd NormalSampler::vector(Eigen::Index n, double stddev) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = draw(stddev);
  return v;
}

}  // namespace georeg
