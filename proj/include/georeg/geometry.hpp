#pragma once

#include <optional>
#include <vector>

#include "georeg/linreg.hpp"

namespace georeg {

/// Vector route: delta_phi is reported as 0 when ||x_hat - x_hat_W|| falls at
/// or below this multiple of sigma.
inline constexpr double kDegenerateMappingTol = 1e-12;
/// Formula route: theta = 0 and sigma = 1 are tested to this tolerance.
/// Singular vectors inside a cluster of near-equal sigma carry ~1e-10 angle
/// noise, which would otherwise decide delta_phi.
inline constexpr double kDegenerateFormulaTol = 1e-8;
inline constexpr double kDefaultOperatorRankTol = 1e-10;

struct LabelProjector {
  Matrix p_l;  // M x M, Z Z^+
};

struct SingularTriple {
  double sigma;
  Vector f_x;  // left singular vector (training-data side)
  Vector f_w;  // right singular vector (model side)
};

struct AnglePair {
  double theta_deg;
  double delta_phi_deg;
};

/// SVD of the feature-space operator with the per-direction angles.
/// Columns of f_x / f_w are the paired singular vectors, sorted by
/// descending sigma.
struct FeatureOperatorAnalysis {
  Matrix p_f;
  Vector sigma;
  Matrix f_x;
  Matrix f_w;
  std::vector<double> thetas_deg;
  std::vector<double> delta_phis_deg;
  double sigma_max = 0.0;
  double theta_max_deg = 0.0;
  double delta_phi_max_deg = 0.0;
  double rank_tol = kDefaultOperatorRankTol;

  Eigen::Index rank() const { return sigma.size(); }
  SingularTriple triple(Eigen::Index i) const { return {sigma(i), f_x.col(i), f_w.col(i)}; }
  /// Orthogonal projector onto span{f_W,i}.
  Matrix model_subspace_projector() const { return f_w * f_w.transpose(); }
};

struct Representation {
  Vector x_hat;
  Vector x_hat_w;
  Vector delta_x;
};

struct PredictionParts {
  double x_hat_dot_beta;
  double delta_y_hat;
};

LabelProjector label_projector(const Matrix& z, std::optional<double> rel_tol = std::nullopt);
LabelProjector label_projector(const FittedModel& model);

/// P_f = (W G X)^T where G is Z^+ (lambda = 0) or the ridge-filtered inverse.
Matrix feature_operator(const FeatureMap& map, const Matrix& z, const Matrix& x, double lambda,
                        std::optional<double> rel_tol = std::nullopt);
Matrix feature_operator(const FittedModel& model, const Matrix& x);

FeatureOperatorAnalysis analyze_operator(const Matrix& p_f,
                                         double rank_tol = kDefaultOperatorRankTol);

/// Angles evaluated from the geometric construction: x = f_W is mapped to
/// x_hat = sigma f_X and x_hat_W = f_W.
AnglePair angles_from_vectors(const SingularTriple& triple);
/// Angles from sigma and the singular-vector overlap (closed-form route).
AnglePair angles_from_formula(double sigma, const Vector& f_x, const Vector& f_w);

Representation internal_representation(const FeatureOperatorAnalysis& analysis, const Vector& x);

/// Precomputed pieces of y_hat(x) = x_hat . beta + delta_y_hat(x) for one
/// fitted model, so many test points can be split cheaply.
class PredictionDecomposer {
 public:
  PredictionDecomposer(const FittedModel& model, const TeacherModel& teacher, const Dataset& data);
  PredictionDecomposer(const FittedModel& model, const TeacherModel& teacher, const Dataset& data,
                       const Matrix& p_f);

  PredictionParts operator()(const Vector& x) const;
  const Matrix& p_f() const { return p_f_; }

 private:
  FeatureMap map_;
  Vector w_hat_;
  Matrix p_f_;
  Vector pf_t_beta_;    // P_f^T beta
  Vector noise_coef_;   // G (delta y*_NL + eps)
};

PredictionParts prediction_decomposition(const FittedModel& model, const TeacherModel& teacher,
                                         const Dataset& data, const Vector& x);

/// Rank-one truncation at the largest singular value, with sigma replaced by
/// 1/cos(theta_max). Returns ||P~^2 - P~||_F / ||P~||_F.
double rank_one_oblique_defect(const FeatureOperatorAnalysis& analysis);

double frobenius_complement(const Matrix& p);

}  // namespace georeg
