#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "georeg/geometry.hpp"

namespace georeg {

inline constexpr double kDefaultEta = 1e-2;
inline constexpr double kDegenerateDirectionTol = 1e-12;

enum class PerturbationKind { adversarial, invariant };

const char* to_string(PerturbationKind kind);

struct PerturbationRecord {
  PerturbationKind kind;
  double d_y_true;
  double d_y_pred;
  double eta;
  Vector direction;
};

struct DirectionSplit {
  Vector e_par;   // unit vector in span{f_W,i}
  Vector e_perp;  // unit vector in the kernel of P_f
};

/// Least-squares line d_y_pred = slope * d_y_true + intercept plus Pearson r.
struct CorrelationLine {
  double r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
};

struct PerturbationSummary {
  CorrelationLine adversarial;
  CorrelationLine invariant;
  double gap = 0.0;            // r_adversarial - r_invariant
  double gap_bootstrap_se = 0.0;
  std::size_t bootstrap_resamples = 0;
  std::size_t skipped_degenerate = 0;
  std::size_t n_pairs = 0;
  double eta = kDefaultEta;
};

struct PerturbationResult {
  std::vector<PerturbationRecord> records;
  PerturbationSummary summary;
};

DirectionSplit decompose_perturbation(const Vector& e, const FeatureOperatorAnalysis& analysis);

/// One-sided finite difference (f(x + eta e) - f(x)) / eta.
double directional_derivative(const std::function<double(const Vector&)>& f, const Vector& x,
                              const Vector& e_hat, double eta);

CorrelationLine correlation_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct PerturbationOptions {
  std::size_t n_pairs = 200;
  double eta = kDefaultEta;
  std::size_t bootstrap_resamples = 1000;
};

/// Random adversarial/invariant pairs at a single test point. Directions are
/// drawn from the input distribution using `stream_seed`.
PerturbationResult perturbation_experiment(const FittedModel& model, const TeacherModel& teacher,
                                           const FeatureOperatorAnalysis& analysis,
                                           const ExperimentConfig& config, const Vector& x,
                                           const PerturbationOptions& options,
                                           std::uint64_t stream_seed);

}  // namespace georeg
