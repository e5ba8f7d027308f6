#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace georeg {

/// Named random streams. A single experiment seed is expanded into one
/// independent generator per stream so that, e.g., drawing a second training
/// set never shifts the draws of the test set.
namespace streams {
inline constexpr std::uint64_t teacher = 1;
inline constexpr std::uint64_t weights = 2;
inline constexpr std::uint64_t train = 3;
inline constexpr std::uint64_t train_pair = 4;
inline constexpr std::uint64_t test = 5;
inline constexpr std::uint64_t perturbation = 6;
inline constexpr std::uint64_t probe = 7;
inline constexpr std::uint64_t bootstrap = 8;
inline constexpr std::uint64_t label_nonlinearity = 9;
}  // namespace streams

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based child seed: a pure function of (seed, a, b, c).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) noexcept;

class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double draw(double stddev = 1.0) { return stddev * unit_(engine_); }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double stddev);
  Eigen::VectorXd vector(Eigen::Index n, double stddev);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

}  // namespace georeg
