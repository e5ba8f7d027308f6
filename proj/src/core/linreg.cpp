#include "georeg/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "georeg/error.hpp"
#include "georeg/rng.hpp"

namespace georeg {

namespace {

double relu(double a) { return a > 0.0 ? a : 0.0; }
double identity_fn(double a) { return a; }
double tanh_fn(double a) { return std::tanh(a); }
double softplus(double a) { return a > 30.0 ? a : std::log1p(std::exp(a)); }
double erf_fn(double a) { return std::erf(a); }

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw NumericError(std::string(what) + " contains non-finite entries");
}

void require_finite(const Vector& a, const char* what) {
  if (!a.allFinite()) throw NumericError(std::string(what) + " contains non-finite entries");
}

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

ThinSvd thin_svd(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() == Eigen::Success && svd.matrixU().allFinite() && svd.matrixV().allFinite()) {
    ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    const double err = (out.u * out.sigma.asDiagonal() * out.v.transpose() - a).norm();
    if (err <= 1e-8 * a.norm()) return out;
  }
  // BDCSVD in Eigen 3.4 can return NaN vectors when many singular values
  // coincide (e.g. orthogonal projectors); Jacobi is slower but robust.
  Eigen::JacobiSVD<Matrix> jacobi(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (jacobi.info() != Eigen::Success || !jacobi.matrixU().allFinite() ||
      !jacobi.matrixV().allFinite())
    throw NumericError("SVD of a " + dims(a.rows(), a.cols()) + " matrix did not converge");
  return {jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV()};
}

double TeacherModel::nonlinear_part(const Vector& x) const {
  return nonlinear_label ? nonlinear_label(x) : 0.0;
}

Vector FittedModel::apply_inverse(const Vector& b) const {
  if (b.size() != u.rows())
    throw ShapeError("inverse expects a vector of length " + std::to_string(u.rows()));
  return v * filter.cwiseProduct(u.transpose() * b);
}

Matrix FittedModel::apply_inverse(const Matrix& b) const {
  if (b.rows() != u.rows())
    throw ShapeError("inverse expects " + std::to_string(u.rows()) + " rows, got " +
                     std::to_string(b.rows()));
  return v * (filter.asDiagonal() * (u.transpose() * b));
}

Matrix FittedModel::inverse() const { return v * filter.asDiagonal() * u.transpose(); }

double default_rel_tol(Eigen::Index rows, Eigen::Index cols) {
  return 1e-10 * static_cast<double>(std::max(rows, cols));
}

TeacherModel sample_teacher(const ExperimentConfig& config) {
  config.validate();
  TeacherModel teacher;
  NormalSampler sampler(derive_seed(config.seed, streams::teacher));
  const auto n_f = static_cast<Eigen::Index>(config.n_f);
  teacher.beta = sampler.vector(n_f, config.sigma_beta);
  teacher.sigma_eps = config.sigma_eps;

  if (config.label_nonlinearity != LabelNonlinearity::none &&
      config.label_nonlinearity_scale != 0.0) {
    NormalSampler dir_sampler(derive_seed(config.seed, streams::label_nonlinearity));
    Vector u = dir_sampler.vector(n_f, 1.0);
    u /= u.norm();
    // u . x has standard deviation sigma_x / sqrt(N_f); rescale to unit variance.
    const double inv_tau = std::sqrt(static_cast<double>(n_f)) / config.sigma_x;
    const double scale = config.label_nonlinearity_scale;
    if (config.label_nonlinearity == LabelNonlinearity::relu_residual) {
      teacher.nonlinear_label = [u, inv_tau, scale](const Vector& x) {
        const double t = inv_tau * u.dot(x);
        return scale * (2.0 * relu(t) - t);
      };
    } else {
      teacher.nonlinear_label = [u, inv_tau, scale](const Vector& x) {
        const double t = inv_tau * u.dot(x);
        return scale * (t * t - 1.0);
      };
    }
  }
  return teacher;
}

Matrix sample_inputs(const ExperimentConfig& config, Eigen::Index rows, std::uint64_t seed) {
  NormalSampler sampler(seed);
  const double stddev = config.sigma_x / std::sqrt(static_cast<double>(config.n_f));
  return sampler.matrix(rows, static_cast<Eigen::Index>(config.n_f), stddev);
}

Dataset sample_dataset(const ExperimentConfig& config, const TeacherModel& teacher,
                       std::uint64_t stream_tag) {
  config.validate();
  if (teacher.beta.size() != static_cast<Eigen::Index>(config.n_f))
    throw ConfigError("teacher has " + std::to_string(teacher.beta.size()) +
                      " coefficients but N_f = " + std::to_string(config.n_f));
  const auto rows =
      static_cast<Eigen::Index>(stream_tag == streams::test ? config.m_test : config.m);
  const std::uint64_t stream_seed = derive_seed(config.seed, stream_tag);

  Dataset data;
  data.config_snapshot = config;
  data.x = sample_inputs(config, rows, derive_seed(stream_seed, 0));
  if (teacher.sigma_eps > 0.0) {
    NormalSampler noise(derive_seed(stream_seed, 1));
    data.eps = noise.vector(rows, teacher.sigma_eps);
  } else {
    data.eps = Vector::Zero(rows);
  }
  data.nonlinear = Vector::Zero(rows);
  if (teacher.nonlinear_label) {
    for (Eigen::Index a = 0; a < rows; ++a)
      data.nonlinear(a) = teacher.nonlinear_label(data.x.row(a).transpose());
  }
  data.y = data.x * teacher.beta + data.nonlinear + data.eps;
  return data;
}

ActivationFunction lookup_activation(const std::string& name, double scale) {
  if (name == "relu") return {name, relu, scale};
  if (name == "linear" || name == "identity") return {name, identity_fn, scale};
  if (name == "tanh") return {name, tanh_fn, scale};
  if (name == "softplus") return {name, softplus, scale};
  if (name == "erf") return {name, erf_fn, scale};
  throw ConfigError("unknown activation '" + name + "' (known: relu, tanh, softplus, erf)");
}

FeatureMap make_feature_map(const ExperimentConfig& config) {
  config.validate();
  FeatureMap map;
  const auto n_f = static_cast<Eigen::Index>(config.n_f);
  const auto n_p = static_cast<Eigen::Index>(config.n_p);
  if (config.activation == Activation::identity) {
    map.kind = FeatureKind::identity;
    map.w = Matrix::Identity(n_f, n_f);
    map.activation = lookup_activation("identity", 1.0);
    return map;
  }

  NormalSampler sampler(derive_seed(config.seed, streams::weights));
  map.w = sampler.matrix(n_f, n_p, config.sigma_w / std::sqrt(static_cast<double>(n_p)));
  switch (config.activation) {
    case Activation::linear:
      map.kind = FeatureKind::linear;
      map.activation = lookup_activation("linear", 1.0);
      break;
    case Activation::relu:
      // C = 2 makes W the exact linear component for Gaussian inputs.
      map.kind = FeatureKind::nonlinear;
      map.activation = lookup_activation("relu", 2.0);
      break;
    default:
      map.kind = FeatureKind::nonlinear;
      map.activation = lookup_activation(config.custom_activation, config.custom_scale);
      map.exact_linear_component = false;
      break;
  }
  return map;
}

Matrix apply_features(const FeatureMap& map, const Matrix& x) {
  if (x.cols() != map.n_f())
    throw ShapeError("feature map expects " + std::to_string(map.n_f()) + " input columns, got " +
                     dims(x.rows(), x.cols()));
  switch (map.kind) {
    case FeatureKind::identity: return x;
    case FeatureKind::linear: return x * map.w;
    case FeatureKind::nonlinear: {
      Matrix pre = x * map.w;
      return pre.unaryExpr([&](double a) { return map.activation(a); });
    }
  }
  return x;
}

Vector apply_features(const FeatureMap& map, const Vector& x) {
  if (x.size() != map.n_f())
    throw ShapeError("feature map expects input length " + std::to_string(map.n_f()) + ", got " +
                     std::to_string(x.size()));
  switch (map.kind) {
    case FeatureKind::identity: return x;
    case FeatureKind::linear: return map.w.transpose() * x;
    case FeatureKind::nonlinear: {
      Vector pre = map.w.transpose() * x;
      return pre.unaryExpr([&](double a) { return map.activation(a); });
    }
  }
  return x;
}

Vector nonlinear_features(const FeatureMap& map, const Vector& x) {
  if (map.kind != FeatureKind::nonlinear) return Vector::Zero(map.n_p());
  return apply_features(map, x) - map.w.transpose() * x;
}

Matrix estimate_linear_component(const FeatureMap& map, const ExperimentConfig& config,
                                 Eigen::Index samples, std::uint64_t seed) {
  if (samples <= map.n_f()) throw ConfigError("need more samples than input features");
  Matrix xs = sample_inputs(config, samples, seed);
  Matrix zs = apply_features(map, xs);
  Matrix xc = xs.rowwise() - xs.colwise().mean();
  Matrix zc = zs.rowwise() - zs.colwise().mean();
  return xc.colPivHouseholderQr().solve(zc);
}

Matrix pseudoinverse(const Matrix& a, std::optional<double> rel_tol) {
  require_finite(a, "matrix");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const ThinSvd svd = thin_svd(a);
  const double tol = rel_tol.value_or(default_rel_tol(a.rows(), a.cols()));
  const double cutoff = tol * (svd.sigma.size() ? svd.sigma(0) : 0.0);
  Vector inv = Vector::Zero(svd.sigma.size());
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
    if (svd.sigma(i) > cutoff && svd.sigma(i) > 0.0) inv(i) = 1.0 / svd.sigma(i);
  return svd.v * inv.asDiagonal() * svd.u.transpose();
}

FittedModel fit(const FeatureMap& map, const Matrix& z, const Vector& y, double lambda,
                std::optional<double> rel_tol) {
  if (z.rows() != y.size())
    throw ShapeError("Z has " + std::to_string(z.rows()) + " rows but y has length " +
                     std::to_string(y.size()));
  if (z.cols() != map.n_p())
    throw ShapeError("Z has " + std::to_string(z.cols()) + " columns but the map produces " +
                     std::to_string(map.n_p()));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be nonnegative");
  require_finite(z, "Z");
  require_finite(y, "y");

  FittedModel model;
  model.lambda = lambda;
  model.feature_map = map;
  model.z = z;
  model.rel_tol = rel_tol.value_or(default_rel_tol(z.rows(), z.cols()));

  ThinSvd svd = thin_svd(z);
  const Eigen::Index k = svd.sigma.size();
  const double cutoff = model.rel_tol * (k ? svd.sigma(0) : 0.0);
  model.filter = Vector::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s = svd.sigma(i);
    const bool kept = s > cutoff && s > 0.0;
    if (kept) {
      ++model.rank_z;
      model.sigma_z_min = s;
    }
    if (lambda == 0.0) {
      if (kept) model.filter(i) = 1.0 / s;
    } else if (s > 0.0) {
      model.filter(i) = s / (s * s + lambda);
    }
  }
  model.u = std::move(svd.u);
  model.sigma = std::move(svd.sigma);
  model.v = std::move(svd.v);
  model.w_hat = model.apply_inverse(y);
  return model;
}

FittedModel fit(const Matrix& z, const Vector& y, double lambda, std::optional<double> rel_tol) {
  FeatureMap map;
  map.kind = FeatureKind::identity;
  map.w = Matrix::Identity(z.cols(), z.cols());
  map.activation = lookup_activation("identity", 1.0);
  return fit(map, z, y, lambda, rel_tol);
}

FittedModel fit_dataset(const FeatureMap& map, const Dataset& data, double lambda,
                        std::optional<double> rel_tol) {
  return fit(map, apply_features(map, data.x), data.y, lambda, rel_tol);
}

double predict(const FittedModel& model, const Vector& x) {
  return apply_features(model.feature_map, x).dot(model.w_hat);
}

Vector predict(const FittedModel& model, const Matrix& x) {
  return apply_features(model.feature_map, x) * model.w_hat;
}

double training_error(const FittedModel& model, const Dataset& data) {
  if (data.x.rows() != data.y.size()) throw ShapeError("dataset rows and labels disagree");
  const Vector residual = data.y - predict(model, data.x);
  return residual.squaredNorm() / static_cast<double>(data.y.size());
}

}  // namespace georeg
