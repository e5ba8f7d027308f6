#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "georeg/config.hpp"
#include "georeg/geometry.hpp"

namespace georeg {

enum class Metric {
  train_error,
  test_error,
  geom_error,
  bias_sq,
  variance,
  frob_I_minus_Pl,
  frob_I_minus_Pf,
  sigma_Z_min,
  sigma_max,
  theta_max_deg,
  delta_phi_max_deg,
};

inline constexpr std::size_t kMetricCount = 11;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::train_error,     Metric::test_error,       Metric::geom_error,
    Metric::bias_sq,         Metric::variance,         Metric::frob_I_minus_Pl,
    Metric::frob_I_minus_Pf, Metric::sigma_Z_min,      Metric::sigma_max,
    Metric::theta_max_deg,   Metric::delta_phi_max_deg};

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);
/// Errors divided by sigma_y^2 when normalization is on.
bool is_error_metric(Metric m);

struct Summary {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Arithmetic mean and sample-stddev / sqrt(n). Throws ContractError on empty input.
Summary summarize(const std::vector<double>& values);

struct SweepSpec {
  ExperimentConfig base_config;
  std::vector<double> np_over_m_grid;
  std::vector<double> nf_over_m_grid;  // empty: keep base_config.n_f
  bool tie_nf_to_np = false;           // N_f = N_p at every point (identity model sweeps)
  std::size_t n_replicas = 100;
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  bool normalize = true;
  std::size_t workers = 1;
  double max_drop_fraction = 0.1;

  void validate() const;
};

struct SweepRow {
  double np_over_m = 0.0;
  double nf_over_m = 0.0;
  std::size_t n_p = 0;
  std::size_t n_f = 0;
  std::array<Summary, kMetricCount> metrics{};
  std::size_t n_used = 0;
  std::size_t n_dropped = 0;
  std::optional<std::string> failure;

  const Summary& operator[](Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Metric> metrics;
  std::size_t n_replicas = 0;
  bool normalized = false;
  double elapsed_seconds = 0.0;

  bool has_failures() const;
};

struct FrobeniusComplements {
  double frob_I_minus_Pl;
  double frob_I_minus_Pf;
};

FrobeniusComplements metric_frobenius_complements(const Matrix& p_l, const Matrix& p_f);

/// Configuration of grid point `index` of the sweep (dimensions resolved).
ExperimentConfig grid_point_config(const SweepSpec& spec, std::size_t point_index);
std::size_t grid_point_count(const SweepSpec& spec);

SweepResult run_sweep(const SweepSpec& spec);

/// Run `body(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace georeg
