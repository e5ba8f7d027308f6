#include "georeg/perturbation.hpp"

#include <cmath>
#include <random>
#include <string>

#include "georeg/error.hpp"
#include "georeg/rng.hpp"

namespace georeg {

const char* to_string(PerturbationKind kind) {
  return kind == PerturbationKind::adversarial ? "adversarial" : "invariant";
}

DirectionSplit decompose_perturbation(const Vector& e, const FeatureOperatorAnalysis& analysis) {
  if (e.size() != analysis.f_w.rows())
    throw ShapeError("perturbation has length " + std::to_string(e.size()) + ", expected " +
                     std::to_string(analysis.f_w.rows()));
  const double norm = e.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ContractError("perturbation must be a nonzero finite vector");
  if (analysis.rank() == 0) throw ContractError("operator has no singular triples");

  const Vector par = analysis.f_w * (analysis.f_w.transpose() * e);
  const Vector perp = e - par;
  if (par.norm() <= kDegenerateDirectionTol * norm)
    throw DegenerateDirectionError(DegenerateSide::parallel,
                                   "adversarial component vanishes: e is in the kernel of P_f");
  if (perp.norm() <= kDegenerateDirectionTol * norm)
    throw DegenerateDirectionError(DegenerateSide::perpendicular,
                                   "invariant component vanishes: e lies in span{f_W}");
  return {par / par.norm(), perp / perp.norm()};
}

double directional_derivative(const std::function<double(const Vector&)>& f, const Vector& x,
                              const Vector& e_hat, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ContractError("eta must be positive");
  if (x.size() != e_hat.size()) throw ShapeError("x and direction lengths differ");
  const double f0 = f(x);
  const double f1 = f(x + eta * e_hat);
  if (!std::isfinite(f0) || !std::isfinite(f1))
    throw NumericError("function value is not finite along the direction");
  return (f1 - f0) / eta;
}

CorrelationLine correlation_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ShapeError("correlation inputs differ in length");
  CorrelationLine line;
  line.n = xs.size();
  if (line.n < 2) return line;
  const double n = static_cast<double>(line.n);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < line.n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < line.n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx > 0) line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  if (sxx > 0 && syy > 0) line.r = sxy / std::sqrt(sxx * syy);
  return line;
}

namespace {

double bootstrap_gap_se(const std::vector<double>& adv_x, const std::vector<double>& adv_y,
                        const std::vector<double>& inv_x, const std::vector<double>& inv_y,
                        std::size_t resamples, std::uint64_t seed) {
  if (resamples < 2 || adv_x.size() < 2 || inv_x.size() < 2) return 0.0;
  std::mt19937_64 engine(seed);
  std::vector<double> gaps;
  gaps.reserve(resamples);
  std::vector<double> bx, by;
  auto resample_r = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
    bx.resize(xs.size());
    by.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t j = pick(engine);
      bx[i] = xs[j];
      by[i] = ys[j];
    }
    return correlation_line(bx, by).r;
  };
  for (std::size_t b = 0; b < resamples; ++b) {
    const double ra = resample_r(adv_x, adv_y);
    const double ri = resample_r(inv_x, inv_y);
    gaps.push_back(ra - ri);
  }
  double mean = 0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double ss = 0;
  for (double g : gaps) ss += (g - mean) * (g - mean);
  return std::sqrt(ss / static_cast<double>(gaps.size() - 1));
}

}  // namespace

PerturbationResult perturbation_experiment(const FittedModel& model, const TeacherModel& teacher,
                                           const FeatureOperatorAnalysis& analysis,
                                           const ExperimentConfig& config, const Vector& x,
                                           const PerturbationOptions& options,
                                           std::uint64_t stream_seed) {
  if (options.n_pairs < 2) throw ConfigError("perturbation experiment needs at least 2 pairs");
  if (!(options.eta > 0.0)) throw ConfigError("eta must be positive");
  if (x.size() != static_cast<Eigen::Index>(config.n_f)) throw ShapeError("x has the wrong length");

  auto truth = [&](const Vector& v) { return teacher.noiseless_label(v); };
  auto pred = [&](const Vector& v) { return predict(model, v); };
  const double stddev = config.sigma_x / std::sqrt(static_cast<double>(config.n_f));

  PerturbationResult result;
  PerturbationSummary& summary = result.summary;
  summary.n_pairs = options.n_pairs;
  summary.eta = options.eta;
  summary.bootstrap_resamples = options.bootstrap_resamples;

  std::vector<double> adv_x, adv_y, inv_x, inv_y;
  for (std::size_t i = 0; i < options.n_pairs; ++i) {
    NormalSampler sampler(derive_seed(stream_seed, streams::perturbation, i));
    const Vector e = sampler.vector(x.size(), stddev);
    DirectionSplit split;
    try {
      split = decompose_perturbation(e, analysis);
    } catch (const DegenerateDirectionError&) {
      ++summary.skipped_degenerate;
      continue;
    }
    for (auto [kind, dir] : {std::pair{PerturbationKind::adversarial, &split.e_par},
                             std::pair{PerturbationKind::invariant, &split.e_perp}}) {
      PerturbationRecord rec{kind, directional_derivative(truth, x, *dir, options.eta),
                             directional_derivative(pred, x, *dir, options.eta), options.eta,
                             *dir};
      if (kind == PerturbationKind::adversarial) {
        adv_x.push_back(rec.d_y_true);
        adv_y.push_back(rec.d_y_pred);
      } else {
        inv_x.push_back(rec.d_y_true);
        inv_y.push_back(rec.d_y_pred);
      }
      result.records.push_back(std::move(rec));
    }
  }
  if (result.records.empty())
    throw ExperimentError("all " + std::to_string(options.n_pairs) +
                          " perturbation pairs were degenerate");

  summary.adversarial = correlation_line(adv_x, adv_y);
  summary.invariant = correlation_line(inv_x, inv_y);
  summary.gap = summary.adversarial.r - summary.invariant.r;
  summary.gap_bootstrap_se =
      bootstrap_gap_se(adv_x, adv_y, inv_x, inv_y, options.bootstrap_resamples,
                       derive_seed(stream_seed, streams::bootstrap));
  return result;
}

}  // namespace georeg
