#include "georeg/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "georeg/error.hpp"

namespace georeg {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double angle_between(const Vector& a, const Vector& b) {
  // Unit vectors: the half-angle form stays accurate near 0 and 180 degrees.
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

void require_unit(const Vector& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw ContractError(std::string(name) + " must be a unit vector (norm " +
                        std::to_string(v.norm()) + ")");
}

}  // namespace

LabelProjector label_projector(const Matrix& z, std::optional<double> rel_tol) {
  if (!z.allFinite()) throw NumericError("Z contains non-finite entries");
  return label_projector(fit(z, Vector::Zero(z.rows()), 0.0, rel_tol));
}

LabelProjector label_projector(const FittedModel& model) {
  const Matrix u_r = model.u.leftCols(model.rank_z);
  return {u_r * u_r.transpose()};
}

Matrix feature_operator(const FeatureMap& map, const Matrix& z, const Matrix& x, double lambda,
                        std::optional<double> rel_tol) {
  if (z.rows() != x.rows())
    throw ShapeError("Z and X must have the same number of rows (" + std::to_string(z.rows()) +
                     " vs " + std::to_string(x.rows()) + ")");
  return feature_operator(fit(map, z, Vector::Zero(z.rows()), lambda, rel_tol), x);
}

Matrix feature_operator(const FittedModel& model, const Matrix& x) {
  const FeatureMap& map = model.feature_map;
  if (x.cols() != map.n_f())
    throw ShapeError("X has " + std::to_string(x.cols()) + " columns but W has " +
                     std::to_string(map.n_f()) + " rows");
  if (x.rows() != model.u.rows())
    throw ShapeError("X has " + std::to_string(x.rows()) + " rows but the fit used " +
                     std::to_string(model.u.rows()));
  const Matrix gx = model.apply_inverse(x);  // N_p x N_f
  if (map.kind == FeatureKind::identity) return gx.transpose();
  return (map.w * gx).transpose();
}

AnglePair angles_from_formula(double sigma, const Vector& f_x, const Vector& f_w) {
  const double theta = angle_between(f_x, f_w);
  const double a = sigma * std::cos(theta) - 1.0;
  const double b = sigma * std::sin(theta);
  double delta_phi = 0.0;
  if (std::hypot(a, b) > kDegenerateFormulaTol * sigma) delta_phi = std::atan2(a, b);
  return {theta * kRadToDeg, delta_phi * kRadToDeg};
}

AnglePair angles_from_vectors(const SingularTriple& triple) {
  if (!(triple.sigma > 0.0)) throw ContractError("singular value must be positive");
  require_unit(triple.f_x, "f_X");
  require_unit(triple.f_w, "f_W");
  const Vector& x = triple.f_w;
  const Vector x_hat = triple.sigma * triple.f_x * triple.f_w.dot(x);
  const Vector x_hat_w = triple.f_w * triple.f_w.dot(x);
  const Vector d = x_hat - x_hat_w;

  const double c = triple.f_x.dot(triple.f_w);
  const double theta = std::atan2((triple.f_x - c * triple.f_w).norm(), c);

  double delta_phi = 0.0;
  if (d.norm() > kDegenerateMappingTol * triple.sigma) {
    const double along = triple.f_w.dot(d);
    const double across = (d - along * triple.f_w).norm();
    delta_phi = std::numbers::pi / 2 - std::atan2(across, along);
  }
  return {theta * kRadToDeg, delta_phi * kRadToDeg};
}

FeatureOperatorAnalysis analyze_operator(const Matrix& p_f, double rank_tol) {
  if (p_f.rows() != p_f.cols())
    throw ShapeError("P_f must be square, got " + std::to_string(p_f.rows()) + "x" +
                     std::to_string(p_f.cols()));
  if (!p_f.allFinite()) throw NumericError("P_f contains non-finite entries");
  if (!(rank_tol > 0.0)) throw ContractError("rank tolerance must be positive");

  FeatureOperatorAnalysis out;
  out.p_f = p_f;
  out.rank_tol = rank_tol;
  const Eigen::Index n = p_f.rows();
  out.sigma.resize(0);
  out.f_x.resize(n, 0);
  out.f_w.resize(n, 0);
  if (n == 0) return out;

  const ThinSvd svd = thin_svd(p_f);
  const Vector& s = svd.sigma;
  const double cutoff = rank_tol * s(0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff && s(rank) > 0.0) ++rank;

  out.sigma = s.head(rank);
  out.f_x = svd.u.leftCols(rank);
  out.f_w = svd.v.leftCols(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    // Flipping a (f_X, f_W) pair leaves P_f unchanged; fix the sign so the
    // largest component of f_W is positive.
    Eigen::Index k = 0;
    out.f_w.col(i).cwiseAbs().maxCoeff(&k);
    if (out.f_w(k, i) < 0.0) {
      out.f_w.col(i) *= -1.0;
      out.f_x.col(i) *= -1.0;
    }
    const AnglePair angles = angles_from_formula(out.sigma(i), out.f_x.col(i), out.f_w.col(i));
    out.thetas_deg.push_back(angles.theta_deg);
    out.delta_phis_deg.push_back(angles.delta_phi_deg);
  }
  if (rank > 0) {
    out.sigma_max = out.sigma(0);
    out.theta_max_deg = out.thetas_deg.front();
    out.delta_phi_max_deg = out.delta_phis_deg.front();
  }
  return out;
}

Representation internal_representation(const FeatureOperatorAnalysis& analysis, const Vector& x) {
  if (x.size() != analysis.p_f.cols())
    throw ShapeError("x has length " + std::to_string(x.size()) + " but P_f acts on " +
                     std::to_string(analysis.p_f.cols()));
  Representation r;
  r.x_hat = analysis.p_f * x;
  r.x_hat_w = analysis.f_w * (analysis.f_w.transpose() * x);
  r.delta_x = x - r.x_hat;
  return r;
}

PredictionDecomposer::PredictionDecomposer(const FittedModel& model, const TeacherModel& teacher,
                                           const Dataset& data)
    : PredictionDecomposer(model, teacher, data, feature_operator(model, data.x)) {}

PredictionDecomposer::PredictionDecomposer(const FittedModel& model, const TeacherModel& teacher,
                                           const Dataset& data, const Matrix& p_f)
    : map_(model.feature_map), w_hat_(model.w_hat), p_f_(p_f) {
  if (teacher.beta.size() != p_f_.rows())
    throw ShapeError("teacher beta length does not match P_f");
  if (data.y.size() != model.u.rows()) throw ShapeError("dataset is not the model's training set");
  pf_t_beta_ = p_f_.transpose() * teacher.beta;
  Vector label_noise = data.eps;
  if (data.nonlinear.size() == data.eps.size()) label_noise += data.nonlinear;
  noise_coef_ = model.apply_inverse(label_noise);
}

PredictionParts PredictionDecomposer::operator()(const Vector& x) const {
  if (x.size() != map_.n_f()) throw ShapeError("x has the wrong length");
  const double linear = x.dot(pf_t_beta_);
  double noise = nonlinear_features(map_, x).dot(w_hat_);
  if (map_.kind == FeatureKind::identity)
    noise += x.dot(noise_coef_);
  else
    noise += (map_.w.transpose() * x).dot(noise_coef_);
  return {linear, noise};
}

PredictionParts prediction_decomposition(const FittedModel& model, const TeacherModel& teacher,
                                         const Dataset& data, const Vector& x) {
  return PredictionDecomposer(model, teacher, data)(x);
}

double rank_one_oblique_defect(const FeatureOperatorAnalysis& analysis) {
  if (analysis.rank() == 0) throw ContractError("operator has no singular triples");
  const double c = std::cos(analysis.theta_max_deg / kRadToDeg);
  const Matrix approx = (1.0 / c) * analysis.f_x.col(0) * analysis.f_w.col(0).transpose();
  const double norm = approx.norm();
  if (!std::isfinite(norm) || norm == 0.0) throw NumericError("degenerate rank-one approximation");
  return (approx * approx - approx).norm() / norm;
}

double frobenius_complement(const Matrix& p) {
  if (p.rows() != p.cols()) throw ShapeError("expected a square matrix");
  return (Matrix::Identity(p.rows(), p.cols()) - p).norm();
}

}  // namespace georeg
