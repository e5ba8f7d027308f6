#pragma once

#include <cstddef>

#include "georeg/geometry.hpp"

namespace georeg {

/// Means over replicas with their standard errors.
struct BiasVarianceEstimate {
  double geometric_error = 0.0;
  double bias_squared = 0.0;
  double variance = 0.0;
  double total_test_error = 0.0;
  double label_variance = 0.0;  // mean training-label variance sigma_y^2
  double se_geometric_error = 0.0;
  double se_bias_squared = 0.0;
  double se_variance = 0.0;
  double se_total_test_error = 0.0;
  double se_label_variance = 0.0;
  std::size_t n_replicas = 0;
  std::size_t n_test_points = 0;

  /// sqrt(se_b^2 + se_v^2 + se_g^2).
  double combined_identity_se() const;
  double identity_gap() const { return bias_squared + variance - geometric_error; }
};

/// Test-set averages for one pair of independently trained models.
struct PairedGeometricTerms {
  double geometric_error;
  double bias_squared;
  double variance;
};

double geometric_test_error(const FeatureOperatorAnalysis& analysis, const Vector& beta,
                            const Vector& x);
double geometric_test_error(const Matrix& p_f, const Vector& beta, const Vector& x);

/// x_test rows are test inputs; p_f1/p_f2 come from fits on independent
/// training sets sharing the same teacher and weights.
PairedGeometricTerms paired_geometric_terms(const Matrix& p_f1, const Matrix& p_f2,
                                            const Vector& beta, const Matrix& x_test);

/// Everything one simulation produces: the teacher, weights, primary fit and
/// its operator, an optional second fit on an independent training set, and
/// a fresh test set.
struct ReplicaSimulation {
  ExperimentConfig config;
  TeacherModel teacher;
  FeatureMap map;
  Dataset train;
  Dataset test;
  FittedModel model;
  Matrix p_f;
  std::optional<Dataset> train_pair;
  std::optional<FittedModel> model_pair;
  std::optional<Matrix> p_f_pair;
};

ReplicaSimulation simulate_replica(const ExperimentConfig& config, bool with_pair);

/// Per-point (y - y_hat)^2 averaged over the test set.
double mean_test_error(const FittedModel& model, const Dataset& test);

/// Sample variance of the training labels.
double label_variance(const Dataset& data);

BiasVarianceEstimate bias_variance_mc(const ExperimentConfig& config, std::size_t n_replicas,
                                      std::size_t workers = 1);

struct ErrorReductionRecord {
  double total;
  double geometric;
  double gap;
};

/// Per-point comparison of (y - y_hat)^2 against (dx . beta)^2 using the
/// noiseless teacher label at x.
ErrorReductionRecord error_reduction_check(const FittedModel& model, const TeacherModel& teacher,
                                           const Dataset& data, const Vector& x);

}  // namespace georeg
