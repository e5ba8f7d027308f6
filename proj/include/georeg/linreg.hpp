#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "georeg/config.hpp"

namespace georeg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Scalar function of an input-feature vector.
using LabelFunction = std::function<double(const Vector&)>;

struct TeacherModel {
  Vector beta;
  LabelFunction nonlinear_label;  // delta y*_NL; empty means a purely linear teacher
  double sigma_eps = 0.0;

  double linear_part(const Vector& x) const { return x.dot(beta); }
  double nonlinear_part(const Vector& x) const;
  /// y*(x), without label noise.
  double noiseless_label(const Vector& x) const { return linear_part(x) + nonlinear_part(x); }
};

struct Dataset {
  Matrix x;          // M x N_f, one input-feature vector per row
  Vector y;          // labels
  Vector eps;        // realized label noise
  Vector nonlinear;  // delta y*_NL evaluated on each row
  ExperimentConfig config_snapshot;

  Eigen::Index rows() const { return x.rows(); }
};

enum class FeatureKind { identity, linear, nonlinear };

struct ActivationFunction {
  std::string name;
  double (*fn)(double) = nullptr;
  double scale = 1.0;  // prefactor C

  double operator()(double a) const { return scale * fn(a); }
};

struct FeatureMap {
  FeatureKind kind = FeatureKind::identity;
  Matrix w;  // N_f x N_p effective linear component
  ActivationFunction activation;
  /// False when W only approximates the effective linear component
  /// (custom activations).
  bool exact_linear_component = true;

  Eigen::Index n_f() const { return w.rows(); }
  Eigen::Index n_p() const { return w.cols(); }
};

/// Minimum-norm or ridge solution, with the thin SVD of Z kept so the
/// (filtered) inverse can be applied to other right-hand sides.
struct FittedModel {
  Vector w_hat;
  double lambda = 0.0;
  FeatureMap feature_map;
  Matrix z;
  Eigen::Index rank_z = 0;
  double sigma_z_min = 0.0;  // smallest singular value above the rank cutoff
  double rel_tol = 0.0;

  Matrix u;       // M x k
  Vector sigma;   // k singular values, descending
  Matrix v;       // N_p x k
  Vector filter;  // per singular value: 1/s, s/(s^2+lambda), or 0

  /// G b, where G is Z^+ (lambda = 0) or the ridge-filtered inverse.
  Vector apply_inverse(const Vector& b) const;
  Matrix apply_inverse(const Matrix& b) const;
  Matrix inverse() const;
};

/// Default relative cutoff for the minimum-norm path.
struct ThinSvd {
  Matrix u;
  Vector sigma;  // descending
  Matrix v;
};

/// Thin SVD, checked for finiteness and reconstruction error.
ThinSvd thin_svd(const Matrix& a);

double default_rel_tol(Eigen::Index rows, Eigen::Index cols);

TeacherModel sample_teacher(const ExperimentConfig& config);
Dataset sample_dataset(const ExperimentConfig& config, const TeacherModel& teacher,
                       std::uint64_t stream_tag);
/// Rows drawn from the input distribution only.
Matrix sample_inputs(const ExperimentConfig& config, Eigen::Index rows, std::uint64_t seed);

FeatureMap make_feature_map(const ExperimentConfig& config);
ActivationFunction lookup_activation(const std::string& name, double scale);

Matrix apply_features(const FeatureMap& map, const Matrix& x);
Vector apply_features(const FeatureMap& map, const Vector& x);
/// z(x) - W^T x.
Vector nonlinear_features(const FeatureMap& map, const Vector& x);

/// Sample estimate of the effective linear component Sigma^-1 Cov[x, z^T]
/// from `samples` Gaussian inputs; for activations without an exact W.
Matrix estimate_linear_component(const FeatureMap& map, const ExperimentConfig& config,
                                 Eigen::Index samples, std::uint64_t seed);

Matrix pseudoinverse(const Matrix& a, std::optional<double> rel_tol = std::nullopt);

FittedModel fit(const FeatureMap& map, const Matrix& z, const Vector& y, double lambda,
                std::optional<double> rel_tol = std::nullopt);
/// Fit on raw features: the model's map is the identity on Z's columns.
FittedModel fit(const Matrix& z, const Vector& y, double lambda,
                std::optional<double> rel_tol = std::nullopt);
FittedModel fit_dataset(const FeatureMap& map, const Dataset& data, double lambda,
                        std::optional<double> rel_tol = std::nullopt);

double predict(const FittedModel& model, const Vector& x);
Vector predict(const FittedModel& model, const Matrix& x);

double training_error(const FittedModel& model, const Dataset& data);

}  // namespace georeg
