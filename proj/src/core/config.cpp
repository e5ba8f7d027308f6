#include "georeg/config.hpp"

#include <cmath>
#include <limits>

#include "georeg/error.hpp"

namespace georeg {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(m >= 1, "M must be at least 1");
  require(m_test >= 1, "M_test must be at least 1");
  require(n_f >= 1, "N_f must be at least 1");
  require(n_p >= 1, "N_p must be at least 1");
  require(std::isfinite(sigma_x) && sigma_x > 0, "sigma_X must be positive");
  require(std::isfinite(sigma_beta) && sigma_beta > 0, "sigma_beta must be positive");
  require(std::isfinite(sigma_eps) && sigma_eps >= 0, "sigma_eps must be nonnegative");
  require(std::isfinite(sigma_w) && sigma_w >= 0, "sigma_W must be nonnegative");
  require(std::isfinite(lambda) && lambda >= 0, "lambda must be nonnegative");
  require(std::isfinite(label_nonlinearity_scale), "label nonlinearity scale must be finite");
  if (activation == Activation::identity)
    require(n_p == n_f, "identity activation requires N_p == N_f (got N_p=" + std::to_string(n_p) +
                            ", N_f=" + std::to_string(n_f) + ")");
  if (activation == Activation::custom) {
    require(!custom_activation.empty(), "custom activation needs a name");
    require(std::isfinite(custom_scale) && custom_scale > 0,
            "custom activation scale must be positive");
  }
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::custom: return "custom";
  }
  return "custom";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "linear") return Activation::linear;
  if (name == "relu") return Activation::relu;
  return Activation::custom;
}

std::string_view to_string(LabelNonlinearity k) {
  switch (k) {
    case LabelNonlinearity::none: return "none";
    case LabelNonlinearity::relu_residual: return "relu_residual";
    case LabelNonlinearity::quadratic: return "quadratic";
  }
  return "none";
}

LabelNonlinearity parse_label_nonlinearity(std::string_view name) {
  if (name == "none") return LabelNonlinearity::none;
  if (name == "relu_residual") return LabelNonlinearity::relu_residual;
  if (name == "quadratic") return LabelNonlinearity::quadratic;
  throw ConfigError("unknown label nonlinearity '" + std::string(name) + "'");
}

double sigma_eps_for_snr(double snr, double sigma_x, double sigma_beta) {
  if (std::isnan(snr) || snr <= 0) throw ConfigError("SNR must be positive");
  if (std::isinf(snr)) return 0.0;
  return sigma_x * sigma_beta / std::sqrt(snr);
}

std::size_t scaled_dimension(double ratio, std::size_t m) {
  if (!std::isfinite(ratio) || ratio <= 0) throw ConfigError("grid ratios must be positive");
  // The small slack keeps exact products such as 1.2 * 5 from rounding down.
  const double scaled = std::floor(ratio * static_cast<double>(m) * (1.0 + 1e-12));
  return scaled < 1.0 ? 1 : static_cast<std::size_t>(scaled);
}

}  // namespace georeg
