#include "georeg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "georeg/error.hpp"

namespace georeg {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

double parse_cell(const std::string& cell, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw IoError("line " + std::to_string(line) + ": '" + cell + "' is not a number");
  return v;
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  if (data.x.rows() != data.y.size()) throw ShapeError("dataset rows and labels disagree");
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << "x_" << j << ',';
  out << "y\n";
  for (Eigen::Index a = 0; a < data.x.rows(); ++a) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << format_double(data.x(a, j)) << ',';
    out << format_double(data.y(a)) << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "y")
    throw IoError("dataset CSV header must be x_0,...,x_{N_f-1},y");
  for (std::size_t j = 0; j + 1 < header.size(); ++j)
    if (header[j] != "x_" + std::to_string(j))
      throw IoError("unexpected column '" + header[j] + "' at position " + std::to_string(j));
  const std::size_t n_f = header.size() - 1;

  std::vector<double> values;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(parse_cell(cell, line_no));
      ++count;
    }
    if (count != n_f + 1)
      throw IoError("line " + std::to_string(line_no) + " has " + std::to_string(count) +
                    " fields, expected " + std::to_string(n_f + 1));
    ++rows;
  }
  Dataset data;
  const auto r = static_cast<Eigen::Index>(rows), c = static_cast<Eigen::Index>(n_f);
  data.x.resize(r, c);
  data.y.resize(r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index j = 0; j < c; ++j) data.x(a, j) = values[a * (c + 1) + j];
    data.y(a) = values[a * (c + 1) + c];
  }
  data.eps = Vector::Zero(r);
  data.nonlinear = Vector::Zero(r);
  data.config_snapshot.m = rows;
  data.config_snapshot.n_f = n_f;
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "np_over_m,nf_over_m,n_p,n_f";
  for (Metric m : result.metrics) out << ',' << metric_name(m) << ',' << metric_name(m) << "_se";
  out << ",n_replicas,n_dropped,status\n";
  for (const SweepRow& row : result.rows) {
    out << format_double(row.np_over_m) << ',' << format_double(row.nf_over_m) << ',' << row.n_p
        << ',' << row.n_f;
    for (Metric m : result.metrics)
      out << ',' << format_double(row[m].mean) << ',' << format_double(row[m].standard_error);
    out << ',' << row.n_used << ',' << row.n_dropped << ','
        << (row.failure ? csv_safe(*row.failure) : std::string("ok")) << '\n';
  }
}

void write_bias_variance_csv(std::ostream& out, const SweepResult& result) {
  static constexpr Metric cols[] = {Metric::geom_error, Metric::bias_sq, Metric::variance,
                                    Metric::test_error, Metric::train_error};
  out << "np_over_m,nf_over_m";
  for (Metric m : cols) out << ',' << metric_name(m);
  for (Metric m : cols) out << ",se_" << metric_name(m);
  out << ",n_replicas,status\n";
  for (const SweepRow& row : result.rows) {
    out << format_double(row.np_over_m) << ',' << format_double(row.nf_over_m);
    for (Metric m : cols) out << ',' << format_double(row[m].mean);
    for (Metric m : cols) out << ',' << format_double(row[m].standard_error);
    out << ',' << row.n_used << ','
        << (row.failure ? csv_safe(*row.failure) : std::string("ok")) << '\n';
  }
}

std::string analysis_json(const FeatureOperatorAnalysis& analysis) {
  json doc;
  doc["sigma"] = json::array();
  for (Eigen::Index i = 0; i < analysis.sigma.size(); ++i) doc["sigma"].push_back(analysis.sigma(i));
  doc["theta_deg"] = analysis.thetas_deg;
  doc["delta_phi_deg"] = analysis.delta_phis_deg;
  doc["sigma_max"] = json_number(analysis.sigma_max);
  doc["theta_max_deg"] = json_number(analysis.theta_max_deg);
  doc["delta_phi_max_deg"] = json_number(analysis.delta_phi_max_deg);
  doc["frob_I_minus_Pf"] = json_number(frobenius_complement(analysis.p_f));
  doc["rank"] = analysis.rank();
  doc["rank_tol"] = analysis.rank_tol;
  return doc.dump(2) + "\n";
}

void write_perturbation_csv(std::ostream& out, const std::vector<PerturbationRecord>& records) {
  out << "kind,d_y_true,d_y_pred\n";
  for (const PerturbationRecord& r : records)
    out << to_string(r.kind) << ',' << format_double(r.d_y_true) << ','
        << format_double(r.d_y_pred) << '\n';
}

std::string perturbation_summary_json(const PerturbationSummary& s) {
  json doc;
  doc["corr_adversarial"] = json_number(s.adversarial.r);
  doc["corr_invariant"] = json_number(s.invariant.r);
  doc["slope_adversarial"] = json_number(s.adversarial.slope);
  doc["slope_invariant"] = json_number(s.invariant.slope);
  doc["intercept_adversarial"] = json_number(s.adversarial.intercept);
  doc["intercept_invariant"] = json_number(s.invariant.intercept);
  doc["n_adversarial"] = s.adversarial.n;
  doc["n_invariant"] = s.invariant.n;
  doc["corr_gap"] = json_number(s.gap);
  doc["corr_gap_bootstrap_se"] = json_number(s.gap_bootstrap_se);
  doc["bootstrap_resamples"] = s.bootstrap_resamples;
  doc["skipped_degenerate"] = s.skipped_degenerate;
  doc["n_pairs"] = s.n_pairs;
  doc["eta"] = s.eta;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace georeg
