#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace georeg {

enum class Activation { identity, linear, relu, custom };

/// Optional non-linear component added to the teacher labels. Each choice is
/// uncorrelated with Gaussian inputs, so the teacher's linear coefficients
/// remain exactly beta.
enum class LabelNonlinearity { none, relu_residual, quadratic };

struct ExperimentConfig {
  std::size_t m = 256;       // training-set size
  std::size_t m_test = 256;  // test-set size
  std::size_t n_f = 64;      // input features
  std::size_t n_p = 256;     // fit parameters
  double sigma_x = 1.0;
  double sigma_eps = 0.0;
  double sigma_beta = 1.0;
  double sigma_w = 1.0;
  double lambda = 0.0;
  Activation activation = Activation::relu;
  std::string custom_activation;  // registry name when activation == custom
  double custom_scale = 1.0;      // prefactor C for custom activations
  LabelNonlinearity label_nonlinearity = LabelNonlinearity::none;
  double label_nonlinearity_scale = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);  // unknown names map to custom
std::string_view to_string(LabelNonlinearity k);
LabelNonlinearity parse_label_nonlinearity(std::string_view name);

/// Noise scale giving the requested label signal-to-noise ratio
/// sigma_x^2 sigma_beta^2 / sigma_eps^2. An infinite ratio means no noise.
double sigma_eps_for_snr(double snr, double sigma_x, double sigma_beta);

/// floor(ratio * m), never below one.
std::size_t scaled_dimension(double ratio, std::size_t m);

}  // namespace georeg
