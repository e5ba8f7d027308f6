#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "georeg/experiments.hpp"
#include "georeg/perturbation.hpp"

namespace georeg {

/// Shortest round-trip rendering with 17 significant digits and '.' decimal point.
std::string format_double(double v);

/// Header x_0..x_{N_f-1},y; one row per sample.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);
/// Reads the layout written above. eps and nonlinear are zero-filled.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

/// One row per grid point: np_over_m, nf_over_m, n_p, n_f, then each metric
/// followed by <metric>_se, then n_replicas, n_dropped, status.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// np_over_m, nf_over_m, geom_error, bias_sq, variance, test_error,
/// train_error, then se_<metric> for the same five, then n_replicas, status.
void write_bias_variance_csv(std::ostream& out, const SweepResult& result);

std::string analysis_json(const FeatureOperatorAnalysis& analysis);

void write_perturbation_csv(std::ostream& out, const std::vector<PerturbationRecord>& records);
std::string perturbation_summary_json(const PerturbationSummary& summary);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace georeg
