#include "georeg/decomposition.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "georeg/error.hpp"
#include "georeg/experiments.hpp"
#include "georeg/rng.hpp"

namespace georeg {

double BiasVarianceEstimate::combined_identity_se() const {
  return std::sqrt(se_bias_squared * se_bias_squared + se_variance * se_variance +
                   se_geometric_error * se_geometric_error);
}

double geometric_test_error(const Matrix& p_f, const Vector& beta, const Vector& x) {
  if (p_f.rows() != p_f.cols() || beta.size() != p_f.rows() || x.size() != p_f.cols())
    throw ShapeError("geometric test error: P_f, beta and x dimensions disagree");
  const double residual = (x - p_f * x).dot(beta);
  return residual * residual;
}

double geometric_test_error(const FeatureOperatorAnalysis& analysis, const Vector& beta,
                            const Vector& x) {
  return geometric_test_error(analysis.p_f, beta, x);
}

PairedGeometricTerms paired_geometric_terms(const Matrix& p_f1, const Matrix& p_f2,
                                            const Vector& beta, const Matrix& x_test) {
  if (p_f1.rows() != beta.size() || p_f2.rows() != beta.size() || x_test.cols() != beta.size())
    throw ShapeError("paired geometric terms: dimensions disagree");
  const double n = static_cast<double>(x_test.rows());
  const Vector truth = x_test * beta;
  const Vector h1 = x_test * (p_f1.transpose() * beta);  // x_hat_1 . beta per test point
  const Vector h2 = x_test * (p_f2.transpose() * beta);
  const Vector r1 = truth - h1;                            // dx_1 . beta
  const Vector r2 = truth - h2;
  PairedGeometricTerms t;
  t.geometric_error = r1.squaredNorm() / n;
  t.bias_squared = r1.dot(r2) / n;
  t.variance = h1.squaredNorm() / n - h1.dot(h2) / n;
  return t;
}

ReplicaSimulation simulate_replica(const ExperimentConfig& config, bool with_pair) {
  ReplicaSimulation sim;
  sim.config = config;
  sim.teacher = sample_teacher(config);
  sim.map = make_feature_map(config);
  sim.train = sample_dataset(config, sim.teacher, streams::train);
  sim.test = sample_dataset(config, sim.teacher, streams::test);
  sim.model = fit_dataset(sim.map, sim.train, config.lambda);
  sim.p_f = feature_operator(sim.model, sim.train.x);
  if (with_pair) {
    sim.train_pair = sample_dataset(config, sim.teacher, streams::train_pair);
    sim.model_pair = fit_dataset(sim.map, *sim.train_pair, config.lambda);
    sim.p_f_pair = feature_operator(*sim.model_pair, sim.train_pair->x);
  }
  return sim;
}

double mean_test_error(const FittedModel& model, const Dataset& test) {
  const Vector residual = test.y - predict(model, test.x);
  return residual.squaredNorm() / static_cast<double>(test.y.size());
}

double label_variance(const Dataset& data) {
  const Eigen::Index n = data.y.size();
  if (n < 2) return 0.0;
  const double mean = data.y.mean();
  return (data.y.array() - mean).square().sum() / static_cast<double>(n - 1);
}

BiasVarianceEstimate bias_variance_mc(const ExperimentConfig& config, std::size_t n_replicas,
                                      std::size_t workers) {
  if (n_replicas < 2) throw ConfigError("bias-variance estimation needs at least 2 replicas");
  config.validate();

  struct Sample {
    bool ok = false;
    double geom, bias, var, test, label_var;
  };
  std::vector<Sample> samples(n_replicas);
  parallel_for(n_replicas, workers, [&](std::size_t r) {
    ExperimentConfig cfg = config;
    cfg.seed = derive_seed(config.seed, 0, r);
    try {
      const ReplicaSimulation sim = simulate_replica(cfg, true);
      const PairedGeometricTerms t =
          paired_geometric_terms(sim.p_f, *sim.p_f_pair, sim.teacher.beta, sim.test.x);
      Sample s{true, t.geometric_error, t.bias_squared, t.variance,
               mean_test_error(sim.model, sim.test), label_variance(sim.train)};
      s.ok = std::isfinite(s.geom) && std::isfinite(s.bias) && std::isfinite(s.var) &&
             std::isfinite(s.test);
      samples[r] = s;
    } catch (const NumericError&) {
      samples[r].ok = false;
    }
  });

  std::vector<double> geom, bias, var, test, lv;
  for (const Sample& s : samples) {
    if (!s.ok) continue;
    geom.push_back(s.geom);
    bias.push_back(s.bias);
    var.push_back(s.var);
    test.push_back(s.test);
    lv.push_back(s.label_var);
  }
  if (geom.empty()) throw ExperimentError("every bias-variance replica was degenerate");

  BiasVarianceEstimate est;
  const Summary g = summarize(geom), b = summarize(bias), v = summarize(var),
                t = summarize(test), l = summarize(lv);
  est.geometric_error = g.mean;
  est.se_geometric_error = g.standard_error;
  est.bias_squared = b.mean;
  est.se_bias_squared = b.standard_error;
  est.variance = v.mean;
  est.se_variance = v.standard_error;
  est.total_test_error = t.mean;
  est.se_total_test_error = t.standard_error;
  est.label_variance = l.mean;
  est.se_label_variance = l.standard_error;
  est.n_replicas = geom.size();
  est.n_test_points = config.m_test;
  return est;
}

ErrorReductionRecord error_reduction_check(const FittedModel& model, const TeacherModel& teacher,
                                           const Dataset& data, const Vector& x) {
  const Matrix p_f = feature_operator(model, data.x);
  const double residual = teacher.noiseless_label(x) - predict(model, x);
  const double total = residual * residual;
  const double geometric = geometric_test_error(p_f, teacher.beta, x);
  return {total, geometric, total - geometric};
}

}  // namespace georeg
