#include <doctest.h>

#include <cmath>
#include <limits>

#include "georeg/error.hpp"
#include "georeg/geometry.hpp"
#include "georeg/linreg.hpp"
#include "georeg/rng.hpp"
#include "oracles.hpp"

using namespace georeg;

namespace {

ExperimentConfig small_config(Activation a, std::size_t m, std::size_t n_f, std::size_t n_p) {
  ExperimentConfig c;
  c.activation = a;
  c.m = c.m_test = m;
  c.n_f = n_f;
  c.n_p = n_p;
  return c;
}

double entry_variance(const Matrix& a) {
  const double mean = a.mean();
  return (a.array() - mean).square().sum() / static_cast<double>(a.size() - 1);
}

}  // namespace

TEST_SUITE("linreg") {

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.activation = Activation::identity;
  c.n_f = 4;
  c.n_p = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.n_p = 4;
  CHECK_NOTHROW(c.validate());

  ExperimentConfig bad;
  bad.m = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.sigma_x = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.lambda = -1e-3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.sigma_eps = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("snr and grid rounding helpers") {
  CHECK(sigma_eps_for_snr(10.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(10.0)));
  CHECK(sigma_eps_for_snr(std::numeric_limits<double>::infinity(), 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(sigma_eps_for_snr(0.0, 1.0, 1.0), ConfigError);

  CHECK(scaled_dimension(0.25, 256) == 64);
  CHECK(scaled_dimension(1.2, 256) == 307);
  CHECK(scaled_dimension(0.3, 10) == 3);
  CHECK(scaled_dimension(1.2, 5) == 6);
  CHECK(scaled_dimension(0.001, 64) == 1);
  CHECK_THROWS_AS(scaled_dimension(0.0, 64), ConfigError);
}

TEST_CASE("noiseless data: eps is zero and y = X beta exactly") {
  ExperimentConfig c = small_config(Activation::relu, 32, 8, 16);
  c.sigma_eps = 0.0;
  c.seed = 11;
  const TeacherModel t = sample_teacher(c);
  const Dataset d = sample_dataset(c, t, streams::train);
  CHECK(d.eps.isZero(0.0));
  CHECK((d.y - d.x * t.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.x.rows() == d.y.size());
  CHECK(d.eps.size() == d.y.size());
}

TEST_CASE("input entries have variance sigma_x^2 / N_f") {
  ExperimentConfig c = small_config(Activation::relu, 512, 128, 16);
  c.seed = 3;
  const Dataset d = sample_dataset(c, sample_teacher(c), streams::train);
  CHECK(entry_variance(d.x) == doctest::Approx(1.0 / 128).epsilon(0.05));
  CHECK(std::abs(d.x.mean()) < 5.0 * std::sqrt(1.0 / 128 / d.x.size()));
}

TEST_CASE("noise entries have variance sigma_eps^2") {
  ExperimentConfig c = small_config(Activation::relu, 20000, 1, 1);
  c.sigma_eps = 0.5;
  const Dataset d = sample_dataset(c, sample_teacher(c), streams::train);
  CHECK(entry_variance(d.eps) == doctest::Approx(0.25).epsilon(0.05));
  CHECK((d.y - d.x * sample_teacher(c).beta - d.eps).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sampling is a pure function of config and stream") {
  ExperimentConfig c = small_config(Activation::relu, 16, 4, 8);
  c.sigma_eps = 0.3;
  c.seed = 99;
  const TeacherModel t = sample_teacher(c);
  const Dataset a = sample_dataset(c, t, streams::train);
  const Dataset b = sample_dataset(c, t, streams::train);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.eps == b.eps);

  const Dataset other = sample_dataset(c, t, streams::train_pair);
  CHECK(other.x != a.x);

  c.m_test = 7;
  CHECK(sample_dataset(c, t, streams::test).x.rows() == 7);
  CHECK(sample_dataset(c, t, streams::train).x.rows() == 16);
}

TEST_CASE("teacher coefficients") {
  ExperimentConfig c = small_config(Activation::relu, 4, 10000, 4);
  c.seed = 5;
  const TeacherModel t = sample_teacher(c);
  CHECK(entry_variance(t.beta) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(sample_teacher(c).beta == t.beta);
  CHECK_FALSE(t.nonlinear_label);

  ExperimentConfig one = small_config(Activation::relu, 4, 1, 4);
  const TeacherModel t1 = sample_teacher(one);
  REQUIRE(t1.beta.size() == 1);
  CHECK(std::isfinite(t1.beta(0)));
}

TEST_CASE("label nonlinearity keeps the linear part of the teacher") {
  ExperimentConfig c = small_config(Activation::relu, 50000, 6, 4);
  c.label_nonlinearity_scale = 0.7;
  for (auto kind : {LabelNonlinearity::relu_residual, LabelNonlinearity::quadratic}) {
    c.label_nonlinearity = kind;
    const TeacherModel t = sample_teacher(c);
    REQUIRE(t.nonlinear_label);
    const Dataset d = sample_dataset(c, t, streams::train);
    CHECK(d.nonlinear.cwiseAbs().maxCoeff() > 0.1);
    // Least-squares regression of y on X recovers beta.
    const Vector b = d.x.colPivHouseholderQr().solve(d.y);
    CHECK((b - t.beta).norm() / t.beta.norm() < 0.05);
  }
}

TEST_CASE("feature maps") {
  SUBCASE("identity") {
    const FeatureMap m = make_feature_map(small_config(Activation::identity, 5, 3, 3));
    CHECK(m.kind == FeatureKind::identity);
    CHECK(m.w == Matrix::Identity(3, 3));
    CHECK_THROWS_AS(make_feature_map(small_config(Activation::identity, 5, 3, 4)), ConfigError);
  }
  SUBCASE("relu uses C = 2") {
    const FeatureMap m = make_feature_map(small_config(Activation::relu, 5, 3, 4));
    CHECK(m.kind == FeatureKind::nonlinear);
    CHECK(m.activation(-1.0) == 0.0);
    CHECK(m.activation(0.5) == 1.0);
    CHECK(m.exact_linear_component);
  }
  SUBCASE("linear weights have variance sigma_w^2 / N_p") {
    ExperimentConfig c = small_config(Activation::linear, 5, 4, 10000);
    c.seed = 8;
    const FeatureMap m = make_feature_map(c);
    CHECK(m.kind == FeatureKind::linear);
    CHECK(m.w.rows() == 4);
    CHECK(m.w.cols() == 10000);
    CHECK(entry_variance(m.w) == doctest::Approx(1e-4).epsilon(0.05));
  }
  SUBCASE("custom activations") {
    ExperimentConfig c = small_config(Activation::custom, 5, 3, 4);
    c.custom_activation = "tanh";
    const FeatureMap m = make_feature_map(c);
    CHECK_FALSE(m.exact_linear_component);
    CHECK(m.activation(0.3) == doctest::Approx(std::tanh(0.3)));
    c.custom_activation = "nope";
    CHECK_THROWS_AS(make_feature_map(c), ConfigError);
  }
}

TEST_CASE("apply_features") {
  ExperimentConfig c = small_config(Activation::identity, 4, 3, 3);
  const FeatureMap id = make_feature_map(c);
  oracle::Rng rng(1);
  const Matrix x = rng.gaussian(4, 3);
  CHECK(apply_features(id, x) == x);

  ExperimentConfig lc = small_config(Activation::linear, 3, 3, 5);
  const FeatureMap lin = make_feature_map(lc);
  CHECK(apply_features(lin, Matrix(Matrix::Identity(3, 3))).isApprox(lin.w, 0.0));

  FeatureMap relu = make_feature_map(small_config(Activation::relu, 2, 2, 1));
  relu.w = (Matrix(2, 1) << 1.0, -1.0).finished();
  const Vector z = apply_features(relu, Vector(Vector::Ones(2)));
  REQUIRE(z.size() == 1);
  CHECK(z(0) == 0.0);

  CHECK_THROWS_AS(apply_features(lin, rng.gaussian(2, 4)), ShapeError);
  CHECK_THROWS_AS(apply_features(lin, Vector(Vector::Ones(4))), ShapeError);
}

TEST_CASE("relu with C = 2 has W as its exact linear component") {
  ExperimentConfig c = small_config(Activation::relu, 4, 4, 3);
  c.seed = 21;
  const FeatureMap m = make_feature_map(c);
  const Matrix est = estimate_linear_component(m, c, 200000, 77);
  CHECK((est - m.w).norm() / m.w.norm() < 0.03);
}

TEST_CASE("pseudoinverse examples") {
  CHECK(pseudoinverse(Matrix::Identity(4, 4)).isApprox(Matrix::Identity(4, 4), 1e-14));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 0.5;
  CHECK((pseudoinverse(d) - expect).norm() < 1e-15);

  oracle::Rng rng(2);
  const Matrix a = rng.gaussian(5, 3);
  const Matrix ap = pseudoinverse(a);
  CHECK((a * ap * a - a).norm() <= 1e-10 * a.norm());
  CHECK(oracle::rel_frob(ap, oracle::pinv(a)) < 1e-10);

  Matrix bad = a;
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pseudoinverse(bad), NumericError);
}

TEST_CASE("Penrose conditions on random matrices up to 64x64") {
  oracle::Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = rng.uniform_int(1, 64), c = rng.uniform_int(1, 64);
    Matrix a = rng.gaussian(r, c);
    if (trial % 3 == 0) {  // rank deficient
      const int k = rng.uniform_int(1, std::max(1, std::min(r, c) - 1));
      a = rng.gaussian(r, k) * rng.gaussian(k, c);
    }
    const Matrix ap = pseudoinverse(a);
    CAPTURE(trial);
    CHECK(oracle::rel_frob(a * ap * a, a) <= 1e-10);
    CHECK(oracle::rel_frob(ap * a * ap, ap) <= 1e-10);
    const Matrix aap = a * ap, apa = ap * a;
    CHECK(oracle::rel_frob(aap.transpose(), aap) <= 1e-10);
    CHECK(oracle::rel_frob(apa.transpose(), apa) <= 1e-10);
  }
}

TEST_CASE("fit examples") {
  oracle::Rng rng(3);
  const Vector y = rng.gaussian(4);
  CHECK(fit(Matrix::Identity(4, 4), y, 0.0).w_hat.isApprox(y, 1e-14));

  // Minimum-norm interpolant of w1 + w2 = 2, frozen from the normal-equation oracle.
  const Matrix z = (Matrix(1, 2) << 1.0, 1.0).finished();
  const Vector y1 = (Vector(1) << 2.0).finished();
  const Vector expected = (Vector(2) << 1.0, 1.0).finished();
  CHECK((oracle::min_norm_interpolant(z, y1) - expected).norm() < 1e-15);
  const FittedModel m = fit(z, y1, 0.0);
  CHECK((m.w_hat - expected).norm() < 1e-14);
  CHECK((fit(z, y1, 1e-12).w_hat - expected).norm() < 1e-10);
  CHECK(m.rank_z == 1);
  CHECK(m.sigma_z_min == doctest::Approx(std::sqrt(2.0)));

  const Matrix zr = rng.gaussian(6, 3);
  CHECK(fit(zr, rng.gaussian(6), 1e14).w_hat.norm() < 1e-12);
  CHECK_THROWS_AS(fit(zr, rng.gaussian(5), 0.0), ShapeError);
  CHECK_THROWS_AS(fit(zr, rng.gaussian(6), -1.0), ConfigError);
}

TEST_CASE("ridge fit matches the normal equations") {
  oracle::Rng rng(4);
  for (double lambda : {1e-3, 0.1, 2.0}) {
    const Matrix z = rng.gaussian(12, 20);
    const Vector y = rng.gaussian(12);
    CHECK((fit(z, y, lambda).w_hat - oracle::ridge(z, y, lambda)).norm() <
          1e-9 * (1.0 + oracle::ridge(z, y, lambda).norm()));
  }
}

TEST_CASE("ridge with tiny lambda agrees with the pseudoinverse fit") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix z = rng.gaussian(20, 8) + 3.0 * Matrix::Identity(20, 8);
    const Vector y = rng.gaussian(20);
    const Vector w0 = fit(z, y, 0.0).w_hat;
    CHECK((fit(z, y, 1e-12).w_hat - w0).norm() <= 1e-6 * w0.norm());
    CHECK((w0 - oracle::pinv(z) * y).norm() <= 1e-10 * w0.norm());
  }
}

TEST_CASE("minimum-norm property against kernel perturbations") {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix z = rng.gaussian(10, 25);
    const Vector y = rng.gaussian(10);
    const FittedModel m = fit(z, y, 0.0);
    const Matrix kernel = Matrix::Identity(25, 25) - pseudoinverse(z) * z;
    for (int k = 0; k < 100; ++k) {
      const Vector w2 = m.w_hat + kernel * rng.gaussian(25);
      CHECK((z * w2 - z * m.w_hat).norm() < 1e-10 * y.norm());
      CHECK(m.w_hat.norm() <= w2.norm() + 1e-12);
    }
    // Row-space membership.
    CHECK((kernel * m.w_hat).norm() < 1e-12 * m.w_hat.norm());
  }
}

TEST_CASE("predict") {
  ExperimentConfig c = small_config(Activation::relu, 30, 5, 12);
  const FeatureMap map = make_feature_map(c);
  oracle::Rng rng(7);
  FittedModel zero = fit(map, apply_features(map, rng.gaussian(30, 5)), Vector::Zero(30), 0.0);
  CHECK(zero.w_hat.isZero(0.0));
  CHECK(predict(zero, rng.gaussian(5)) == 0.0);

  ExperimentConfig ic = small_config(Activation::identity, 40, 6, 6);
  ic.sigma_eps = 0.0;
  const TeacherModel t = sample_teacher(ic);
  const Dataset d = sample_dataset(ic, t, streams::train);
  const FittedModel exact = fit_dataset(make_feature_map(ic), d, 0.0);
  const Vector x = rng.gaussian(6);
  CHECK(predict(exact, x) == doctest::Approx(t.linear_part(x)).epsilon(1e-12));

  CHECK_THROWS_AS(predict(exact, rng.gaussian(5)), ShapeError);
}

TEST_CASE("over-parameterized fit interpolates the training labels") {
  ExperimentConfig c = small_config(Activation::relu, 64, 16, 160);
  c.sigma_eps = 0.3;
  c.seed = 17;
  const TeacherModel t = sample_teacher(c);
  const Dataset d = sample_dataset(c, t, streams::train);
  const FittedModel m = fit_dataset(make_feature_map(c), d, 0.0);
  REQUIRE(m.rank_z == 64);
  CHECK((predict(m, d.x) - d.y).norm() <= 1e-8 * d.y.norm());
  double var_y = (d.y.array() - d.y.mean()).square().sum() / 63.0;
  CHECK(training_error(m, d) <= 1e-8 * var_y);
}

TEST_CASE("training error") {
  // Hand oracle: Z = [[1],[1]], y = (0, 2) gives w = 1 and error 1.
  const Matrix z = (Matrix(2, 1) << 1.0, 1.0).finished();
  Dataset d;
  d.x = z;
  d.y = (Vector(2) << 0.0, 2.0).finished();
  const FittedModel m = fit(z, d.y, 0.0);
  CHECK(m.w_hat(0) == doctest::Approx(1.0));
  CHECK(training_error(m, d) == doctest::Approx(1.0));

  FittedModel zero = m;
  zero.w_hat.setZero();
  CHECK(training_error(zero, d) == doctest::Approx(2.0));

  ExperimentConfig c = small_config(Activation::relu, 50, 8, 20);
  c.sigma_eps = 0.2;
  const Dataset data = sample_dataset(c, sample_teacher(c), streams::train);
  const FittedModel fitted = fit_dataset(make_feature_map(c), data, 0.0);
  const Matrix p_l = label_projector(fitted).p_l;
  const double via_projector =
      ((Matrix::Identity(50, 50) - p_l) * data.y).squaredNorm() / 50.0;
  CHECK(training_error(fitted, data) == doctest::Approx(via_projector).epsilon(1e-8));
}

}  // TEST_SUITE
