#include "georeg/georeg.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "georeg/decomposition.hpp"
#include "georeg/error.hpp"
#include "georeg/io.hpp"
#include "georeg/rng.hpp"
#include "georeg/run_settings.hpp"
#include "georeg/svg.hpp"

struct georeg_config {
  georeg::RunSettings settings;
  georeg::Command command;
};

struct georeg_sweep {
  georeg::SweepResult result;
  georeg::Command command;
};

struct georeg_perturb {
  georeg::PerturbationResult result;
};

struct georeg_dataset {
  georeg::Dataset data;
};

namespace {

thread_local std::string g_last_error;

georeg_status fail(georeg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

georeg_status status_for(const georeg::Error& e) {
  using georeg::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::config: return GEOREG_ERR_CONFIG;
    case ErrorKind::shape: return GEOREG_ERR_SHAPE;
    case ErrorKind::numeric: return GEOREG_ERR_NUMERIC;
    case ErrorKind::contract: return GEOREG_ERR_INVALID_ARGUMENT;
    case ErrorKind::degenerate: return GEOREG_ERR_DEGENERATE;
    case ErrorKind::experiment: return GEOREG_ERR_EXPERIMENT;
    case ErrorKind::io: return GEOREG_ERR_IO;
  }
  return GEOREG_ERR_INTERNAL;
}

template <typename F>
georeg_status guarded(F&& body) {
  try {
    body();
    return GEOREG_OK;
  } catch (const georeg::Error& e) {
    return fail(status_for(e), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GEOREG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GEOREG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GEOREG_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::ofstream open_out(const char* path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw georeg::IoError(std::string("cannot open '") + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const char* path) {
  out.flush();
  if (!out) throw georeg::IoError(std::string("failed writing '") + path + "'");
}

georeg::Command to_command(georeg_command c) {
  switch (c) {
    case GEOREG_CMD_SWEEP: return georeg::Command::sweep;
    case GEOREG_CMD_BIAS_VARIANCE: return georeg::Command::bias_variance;
    case GEOREG_CMD_ANGLES: return georeg::Command::angles;
    case GEOREG_CMD_PERTURB: return georeg::Command::perturb;
  }
  throw georeg::ContractError("unknown command");
}

#define GEOREG_REQUIRE(cond, what) \
  if (!(cond)) return fail(GEOREG_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* georeg_version(void) { return GEOREG_VERSION_STRING; }

const char* georeg_last_error(void) { return g_last_error.c_str(); }

const char* georeg_status_name(georeg_status status) {
  switch (status) {
    case GEOREG_OK: return "ok";
    case GEOREG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GEOREG_ERR_CONFIG: return "config error";
    case GEOREG_ERR_NUMERIC: return "numeric error";
    case GEOREG_ERR_SHAPE: return "shape error";
    case GEOREG_ERR_IO: return "io error";
    case GEOREG_ERR_DEGENERATE: return "degenerate direction";
    case GEOREG_ERR_EXPERIMENT: return "experiment error";
    case GEOREG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void georeg_string_free(char* s) { std::free(s); }

georeg_status georeg_config_parse(const char* json, georeg_command command, georeg_config** out) {
  GEOREG_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const georeg::Command cmd = to_command(command);
    auto cfg = std::make_unique<georeg_config>();
    cfg->settings = georeg::resolve_settings(georeg::parse_settings(json), cmd);
    cfg->command = cmd;
    *out = cfg.release();
  });
}

void georeg_config_destroy(georeg_config* config) { delete config; }

georeg_status georeg_config_to_json(const georeg_config* config, char** out_json) {
  GEOREG_REQUIRE(config && out_json, "null argument");
  return guarded([&] { *out_json = duplicate(georeg::settings_json(config->settings)); });
}

georeg_status georeg_sweep_run(const georeg_config* config, georeg_sweep** out) {
  GEOREG_REQUIRE(config && out, "null argument");
  GEOREG_REQUIRE(config->command == georeg::Command::sweep ||
                     config->command == georeg::Command::bias_variance,
                 "config was not resolved for a sweep command");
  *out = nullptr;
  return guarded([&] {
    auto sweep = std::make_unique<georeg_sweep>();
    sweep->result = georeg::run_sweep(georeg::to_sweep_spec(config->settings, config->command));
    sweep->command = config->command;
    *out = sweep.release();
  });
}

void georeg_sweep_destroy(georeg_sweep* sweep) { delete sweep; }

size_t georeg_sweep_row_count(const georeg_sweep* sweep) {
  return sweep ? sweep->result.rows.size() : 0;
}

georeg_status georeg_sweep_metric(const georeg_sweep* sweep, size_t row, const char* metric,
                                  double* mean, double* se) {
  GEOREG_REQUIRE(sweep && metric && mean && se, "null argument");
  GEOREG_REQUIRE(row < sweep->result.rows.size(), "row index out of range");
  const auto m = georeg::parse_metric(metric);
  GEOREG_REQUIRE(m.has_value(), std::string("unknown metric '") + metric + "'");
  const georeg::Summary s = sweep->result.rows[row][*m];
  *mean = s.mean;
  *se = s.standard_error;
  return GEOREG_OK;
}

georeg_status georeg_sweep_point(const georeg_sweep* sweep, size_t row, double* np_over_m,
                                 double* nf_over_m) {
  GEOREG_REQUIRE(sweep && np_over_m && nf_over_m, "null argument");
  GEOREG_REQUIRE(row < sweep->result.rows.size(), "row index out of range");
  *np_over_m = sweep->result.rows[row].np_over_m;
  *nf_over_m = sweep->result.rows[row].nf_over_m;
  return GEOREG_OK;
}

const char* georeg_sweep_failure(const georeg_sweep* sweep, size_t row) {
  if (!sweep || row >= sweep->result.rows.size()) return nullptr;
  const auto& f = sweep->result.rows[row].failure;
  return f ? f->c_str() : nullptr;
}

double georeg_sweep_elapsed_seconds(const georeg_sweep* sweep) {
  return sweep ? sweep->result.elapsed_seconds : 0.0;
}

georeg_status georeg_sweep_write_csv(const georeg_sweep* sweep, const char* path) {
  GEOREG_REQUIRE(sweep && path, "null argument");
  return guarded([&] {
    auto out = open_out(path);
    if (sweep->command == georeg::Command::bias_variance)
      georeg::write_bias_variance_csv(out, sweep->result);
    else
      georeg::write_sweep_csv(out, sweep->result);
    finish(out, path);
  });
}

georeg_status georeg_sweep_write_svg(const georeg_sweep* sweep, const char* path) {
  GEOREG_REQUIRE(sweep && path, "null argument");
  return guarded([&] {
    georeg::write_text_file(path, sweep->command == georeg::Command::bias_variance
                                      ? georeg::bias_variance_svg(sweep->result)
                                      : georeg::sweep_svg(sweep->result));
  });
}

georeg_status georeg_angles_run(const georeg_config* config, char** out_json) {
  GEOREG_REQUIRE(config && out_json, "null argument");
  return guarded([&] {
    const georeg::ReplicaSimulation sim =
        georeg::simulate_replica(georeg::point_config(config->settings), false);
    *out_json = duplicate(georeg::analysis_json(georeg::analyze_operator(sim.p_f)));
  });
}

georeg_status georeg_perturb_run(const georeg_config* config, georeg_perturb** out) {
  GEOREG_REQUIRE(config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const georeg::RunSettings& s = config->settings;
    const georeg::ExperimentConfig cfg = georeg::point_config(s);
    const georeg::ReplicaSimulation sim = georeg::simulate_replica(cfg, false);
    const georeg::FeatureOperatorAnalysis analysis = georeg::analyze_operator(sim.p_f);
    const georeg::Vector x = sim.test.x.row(0).transpose();
    georeg::PerturbationOptions options;
    options.n_pairs = s.pairs;
    options.eta = s.eta;
    options.bootstrap_resamples = s.bootstrap;
    auto p = std::make_unique<georeg_perturb>();
    p->result = georeg::perturbation_experiment(
        sim.model, sim.teacher, analysis, cfg, x, options,
        georeg::derive_seed(cfg.seed, georeg::streams::probe));
    *out = p.release();
  });
}

void georeg_perturb_destroy(georeg_perturb* perturb) { delete perturb; }

size_t georeg_perturb_record_count(const georeg_perturb* perturb) {
  return perturb ? perturb->result.records.size() : 0;
}

georeg_status georeg_perturb_write_csv(const georeg_perturb* perturb, const char* path) {
  GEOREG_REQUIRE(perturb && path, "null argument");
  return guarded([&] {
    auto out = open_out(path);
    georeg::write_perturbation_csv(out, perturb->result.records);
    finish(out, path);
  });
}

georeg_status georeg_perturb_summary_json(const georeg_perturb* perturb, char** out_json) {
  GEOREG_REQUIRE(perturb && out_json, "null argument");
  return guarded(
      [&] { *out_json = duplicate(georeg::perturbation_summary_json(perturb->result.summary)); });
}

georeg_status georeg_perturb_write_svg(const georeg_perturb* perturb, const char* path) {
  GEOREG_REQUIRE(perturb && path, "null argument");
  return guarded([&] { georeg::write_text_file(path, georeg::perturbation_svg(perturb->result)); });
}

georeg_status georeg_dataset_sample(const georeg_config* config, uint64_t stream_tag,
                                    georeg_dataset** out) {
  GEOREG_REQUIRE(config && out, "null argument");
  GEOREG_REQUIRE(stream_tag == GEOREG_STREAM_TRAIN || stream_tag == GEOREG_STREAM_TRAIN_PAIR ||
                     stream_tag == GEOREG_STREAM_TEST,
                 "unknown data stream");
  *out = nullptr;
  return guarded([&] {
    const georeg::ExperimentConfig cfg = georeg::point_config(config->settings);
    auto d = std::make_unique<georeg_dataset>();
    d->data = georeg::sample_dataset(cfg, georeg::sample_teacher(cfg), stream_tag);
    *out = d.release();
  });
}

georeg_status georeg_dataset_read_csv(const char* path, georeg_dataset** out) {
  GEOREG_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto d = std::make_unique<georeg_dataset>();
    d->data = georeg::read_dataset_csv(std::string(path));
    *out = d.release();
  });
}

georeg_status georeg_dataset_write_csv(const georeg_dataset* data, const char* path) {
  GEOREG_REQUIRE(data && path, "null argument");
  return guarded([&] { georeg::write_dataset_csv(std::string(path), data->data); });
}

void georeg_dataset_destroy(georeg_dataset* data) { delete data; }

size_t georeg_dataset_rows(const georeg_dataset* data) {
  return data ? static_cast<size_t>(data->data.x.rows()) : 0;
}

size_t georeg_dataset_features(const georeg_dataset* data) {
  return data ? static_cast<size_t>(data->data.x.cols()) : 0;
}

georeg_status georeg_dataset_copy_inputs(const georeg_dataset* data, double* buffer,
                                         size_t length) {
  GEOREG_REQUIRE(data && buffer, "null argument");
  const auto& x = data->data.x;
  GEOREG_REQUIRE(length == static_cast<size_t>(x.size()), "buffer length must equal rows*features");
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index j = 0; j < x.cols(); ++j) buffer[a * x.cols() + j] = x(a, j);
  return GEOREG_OK;
}

georeg_status georeg_dataset_copy_labels(const georeg_dataset* data, double* buffer,
                                         size_t length) {
  GEOREG_REQUIRE(data && buffer, "null argument");
  const auto& y = data->data.y;
  GEOREG_REQUIRE(length == static_cast<size_t>(y.size()), "buffer length must equal rows");
  for (Eigen::Index a = 0; a < y.size(); ++a) buffer[a] = y(a);
  return GEOREG_OK;
}

}  // extern "C"
