#include "georeg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "georeg/decomposition.hpp"
#include "georeg/error.hpp"
#include "georeg/rng.hpp"

namespace georeg {

namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "train_error",     "test_error",      "geom_error",  "bias_sq",
    "variance",        "frob_I_minus_Pl", "frob_I_minus_Pf", "sigma_Z_min",
    "sigma_max",       "theta_max_deg",   "delta_phi_max_deg"};

std::size_t index_of(Metric m) { return static_cast<std::size_t>(m); }

bool wants(const std::vector<Metric>& metrics, Metric m) {
  return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

struct ReplicaMetrics {
  std::array<double, kMetricCount> values{};
  bool ok = false;
  std::string error;  // non-numeric failure, fails the whole grid point
};

ReplicaMetrics run_replica(const ExperimentConfig& cfg, const SweepSpec& spec) {
  ReplicaMetrics out;
  const auto& want = spec.metrics;
  const bool need_pair = wants(want, Metric::bias_sq) || wants(want, Metric::variance);
  const bool need_analysis = wants(want, Metric::sigma_max) ||
                             wants(want, Metric::theta_max_deg) ||
                             wants(want, Metric::delta_phi_max_deg);
  try {
    const ReplicaSimulation sim = simulate_replica(cfg, need_pair);
    auto& v = out.values;
    v.fill(std::numeric_limits<double>::quiet_NaN());
    const double scale = spec.normalize ? label_variance(sim.train) : 1.0;

    v[index_of(Metric::train_error)] = training_error(sim.model, sim.train);
    v[index_of(Metric::test_error)] = mean_test_error(sim.model, sim.test);
    const Matrix& p_f2 = need_pair ? *sim.p_f_pair : sim.p_f;
    const PairedGeometricTerms t =
        paired_geometric_terms(sim.p_f, p_f2, sim.teacher.beta, sim.test.x);
    v[index_of(Metric::geom_error)] = t.geometric_error;
    if (need_pair) {
      v[index_of(Metric::bias_sq)] = t.bias_squared;
      v[index_of(Metric::variance)] = t.variance;
    }
    if (wants(want, Metric::frob_I_minus_Pl))
      v[index_of(Metric::frob_I_minus_Pl)] = frobenius_complement(label_projector(sim.model).p_l);
    v[index_of(Metric::frob_I_minus_Pf)] = frobenius_complement(sim.p_f);
    v[index_of(Metric::sigma_Z_min)] = sim.model.sigma_z_min;
    if (need_analysis) {
      const FeatureOperatorAnalysis a = analyze_operator(sim.p_f);
      v[index_of(Metric::sigma_max)] = a.sigma_max;
      v[index_of(Metric::theta_max_deg)] = a.theta_max_deg;
      v[index_of(Metric::delta_phi_max_deg)] = a.delta_phi_max_deg;
    }
    for (Metric m : kAllMetrics)
      if (is_error_metric(m)) v[index_of(m)] /= scale;

    out.ok = std::isfinite(scale) && scale > 0.0;
    for (Metric m : want) out.ok = out.ok && std::isfinite(v[index_of(m)]);
  } catch (const NumericError&) {
    out.ok = false;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::string_view metric_name(Metric m) { return kMetricNames[index_of(m)]; }

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (metric_name(m) == name) return m;
  return std::nullopt;
}

bool is_error_metric(Metric m) {
  switch (m) {
    case Metric::train_error:
    case Metric::test_error:
    case Metric::geom_error:
    case Metric::bias_sq:
    case Metric::variance: return true;
    default: return false;
  }
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw ContractError("cannot summarize an empty list");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

void SweepSpec::validate() const {
  ExperimentConfig probe = base_config;  // grid points override the dimensions
  probe.n_p = probe.n_f;
  probe.validate();
  if (np_over_m_grid.empty()) throw ConfigError("N_p/M grid is empty");
  if (n_replicas < 1) throw ConfigError("need at least one replica");
  if (metrics.empty()) throw ConfigError("no metrics requested");
  for (double r : np_over_m_grid) scaled_dimension(r, base_config.m);
  for (double r : nf_over_m_grid) scaled_dimension(r, base_config.m);
  if (!(max_drop_fraction >= 0.0 && max_drop_fraction <= 1.0))
    throw ConfigError("drop fraction must lie in [0, 1]");
}

bool SweepResult::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failure.has_value(); });
}

FrobeniusComplements metric_frobenius_complements(const Matrix& p_l, const Matrix& p_f) {
  return {frobenius_complement(p_l), frobenius_complement(p_f)};
}

std::size_t grid_point_count(const SweepSpec& spec) {
  return spec.np_over_m_grid.size() * std::max<std::size_t>(1, spec.nf_over_m_grid.size());
}

namespace {

struct GridPoint {
  double np_ratio;
  double nf_ratio;
  ExperimentConfig config;
};

GridPoint grid_point(const SweepSpec& spec, std::size_t index) {
  const std::size_t n_np = spec.np_over_m_grid.size();
  const std::size_t np_i = index % n_np;
  const std::size_t nf_i = index / n_np;
  GridPoint p;
  p.config = spec.base_config;
  p.np_ratio = spec.np_over_m_grid.at(np_i);
  p.config.n_p = scaled_dimension(p.np_ratio, p.config.m);
  if (spec.tie_nf_to_np) {
    p.nf_ratio = p.np_ratio;
    p.config.n_f = p.config.n_p;
  } else if (spec.nf_over_m_grid.empty()) {
    p.nf_ratio = static_cast<double>(p.config.n_f) / static_cast<double>(p.config.m);
  } else {
    p.nf_ratio = spec.nf_over_m_grid.at(nf_i);
    p.config.n_f = scaled_dimension(p.nf_ratio, p.config.m);
  }
  return p;
}

}  // namespace

ExperimentConfig grid_point_config(const SweepSpec& spec, std::size_t point_index) {
  return grid_point(spec, point_index).config;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_points = grid_point_count(spec);
  const std::size_t reps = spec.n_replicas;

  SweepResult result;
  result.metrics = spec.metrics;
  result.n_replicas = reps;
  result.normalized = spec.normalize;
  result.rows.resize(n_points);

  std::vector<GridPoint> points;
  std::vector<bool> feasible(n_points, true);
  for (std::size_t p = 0; p < n_points; ++p) {
    points.push_back(grid_point(spec, p));
    SweepRow& row = result.rows[p];
    row.np_over_m = points[p].np_ratio;
    row.nf_over_m = points[p].nf_ratio;
    row.n_p = points[p].config.n_p;
    row.n_f = points[p].config.n_f;
    try {
      points[p].config.validate();
    } catch (const ConfigError& e) {
      feasible[p] = false;
      row.failure = e.what();
      for (auto& s : row.metrics)
        s = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
  }

  std::vector<ReplicaMetrics> replicas(n_points * reps);
  parallel_for(n_points * reps, spec.workers, [&](std::size_t task) {
    const std::size_t p = task / reps;
    const std::size_t r = task % reps;
    if (!feasible[p]) return;
    ExperimentConfig cfg = points[p].config;
    cfg.seed = derive_seed(spec.base_config.seed, p, r);
    replicas[task] = run_replica(cfg, spec);
  });

  for (std::size_t p = 0; p < n_points; ++p) {
    if (!feasible[p]) continue;
    SweepRow& row = result.rows[p];
    std::array<std::vector<double>, kMetricCount> columns;
    for (std::size_t r = 0; r < reps; ++r) {
      const ReplicaMetrics& rm = replicas[p * reps + r];
      if (!rm.error.empty() && !row.failure) row.failure = rm.error;
      if (!rm.ok) {
        ++row.n_dropped;
        continue;
      }
      ++row.n_used;
      for (Metric m : spec.metrics) columns[index_of(m)].push_back(rm.values[index_of(m)]);
    }
    for (auto& s : row.metrics)
      s = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    if (row.n_used > 0)
      for (Metric m : spec.metrics) row.metrics[index_of(m)] = summarize(columns[index_of(m)]);
    if (!row.failure &&
        (row.n_used == 0 ||
         static_cast<double>(row.n_dropped) > spec.max_drop_fraction * static_cast<double>(reps)))
      row.failure = std::to_string(row.n_dropped) + " of " + std::to_string(reps) +
                    " replicas were numerically degenerate";
  }

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace georeg
