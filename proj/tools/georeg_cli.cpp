// georeg command-line driver. Thin layer over the C API: merges a JSON config
// file with flags (flags win), runs one command and writes outputs plus a
// run manifest next to --out.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "georeg/georeg.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3 };

struct Options {
  std::string config_path;
  std::string out;
  bool plot = false;

  std::optional<std::string> preset, model, snr;
  std::optional<std::size_t> m, replicas, workers, pairs, bootstrap;
  std::optional<double> nf_ratio, np_ratio, lambda, eta;
  std::optional<std::uint64_t> seed;
  std::vector<double> np_grid, nf_grid;
  std::optional<bool> normalize;
};

int exit_code(georeg_status s) {
  switch (s) {
    case GEOREG_OK: return kOk;
    case GEOREG_ERR_CONFIG:
    case GEOREG_ERR_INVALID_ARGUMENT: return kConfig;
    case GEOREG_ERR_NUMERIC:
    case GEOREG_ERR_DEGENERATE:
    case GEOREG_ERR_EXPERIMENT:
    case GEOREG_ERR_SHAPE: return kNumeric;
    default: return kFailure;
  }
}

int report(georeg_status s, const std::string& context) {
  std::cerr << "georeg: " << context << ": " << georeg_status_name(s) << ": "
            << georeg_last_error() << "\n";
  return exit_code(s);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  georeg_string_free(s);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw std::runtime_error("config '" + path + "' is not a JSON object");
  if (doc.contains("resolved_config")) {
    json inner = doc.at("resolved_config");
    doc.swap(inner);
  }
  return doc;
}

json settings_document(const Options& o) {
  json doc = o.config_path.empty() ? json::object() : read_json_file(o.config_path);
  if (o.preset) {
    // A preset named on the command line replaces the file's base values,
    // but keys set explicitly in the file still apply on top.
    doc["preset"] = *o.preset;
  }
  if (o.model) doc["model"] = *o.model;
  if (o.m) doc["m"] = *o.m;
  if (o.nf_ratio) doc["nf_ratio"] = *o.nf_ratio;
  if (o.np_ratio) doc["np_ratio"] = *o.np_ratio;
  if (!o.np_grid.empty()) doc["np_grid"] = o.np_grid;
  if (!o.nf_grid.empty()) doc["nf_grid"] = o.nf_grid;
  if (o.replicas) doc["replicas"] = *o.replicas;
  if (o.lambda) doc["lambda"] = *o.lambda;
  if (o.snr) {
    doc.erase("sigma_eps");
    if (*o.snr == "inf" || *o.snr == "infinity") {
      doc["snr"] = "inf";
    } else {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(*o.snr, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != o.snr->size())
        throw std::runtime_error("--snr must be a number or 'inf'");
      doc["snr"] = v;
    }
  }
  if (o.seed) doc["seed"] = *o.seed;
  if (o.normalize) doc["normalize"] = *o.normalize;
  if (o.workers) doc["workers"] = *o.workers;
  if (o.pairs) doc["pairs"] = *o.pairs;
  if (o.eta) doc["eta"] = *o.eta;
  if (o.bootstrap) doc["bootstrap"] = *o.bootstrap;
  return doc;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return (p.parent_path() / p.stem()).string() + suffix;
}

bool write_manifest(const std::string& command, const georeg_config* cfg, const std::string& out,
                    std::vector<std::string> outputs) {
  char* text = nullptr;
  if (georeg_config_to_json(cfg, &text) != GEOREG_OK) return false;
  const json resolved = json::parse(take_string(text));
  const std::string path = sibling(out, ".manifest.json");
  outputs.push_back(path);
  json manifest;
  manifest["command"] = command;
  manifest["resolved_config"] = resolved;
  manifest["seed"] = resolved.at("seed");
  manifest["output_paths"] = outputs;
  manifest["timestamp"] = utc_timestamp();
  manifest["code_version"] = georeg_version();
  std::ofstream f(path, std::ios::binary);
  f << manifest.dump(2) << "\n";
  if (!f) {
    std::cerr << "georeg: cannot write manifest '" << path << "'\n";
    return false;
  }
  return true;
}

int run_sweep_command(const std::string& name, const georeg_config* cfg, const Options& o) {
  georeg_sweep* sweep = nullptr;
  georeg_status s = georeg_sweep_run(cfg, &sweep);
  if (s != GEOREG_OK) return report(s, name);

  std::vector<std::string> outputs{o.out};
  s = georeg_sweep_write_csv(sweep, o.out.c_str());
  if (s == GEOREG_OK && o.plot) {
    outputs.push_back(sibling(o.out, ".svg"));
    s = georeg_sweep_write_svg(sweep, outputs.back().c_str());
  }
  if (s != GEOREG_OK) {
    georeg_sweep_destroy(sweep);
    return report(s, "writing outputs");
  }
  int code = write_manifest(name, cfg, o.out, outputs) ? kOk : kFailure;

  for (std::size_t r = 0; r < georeg_sweep_row_count(sweep); ++r) {
    if (const char* failure = georeg_sweep_failure(sweep, r)) {
      double np = 0, nf = 0;
      georeg_sweep_point(sweep, r, &np, &nf);
      std::cerr << "georeg: grid point N_p/M=" << np << " N_f/M=" << nf << " failed: " << failure
                << "\n";
      code = kNumeric;
    }
  }
  std::cout << "wrote " << o.out << " (" << georeg_sweep_row_count(sweep) << " grid points, "
            << georeg_sweep_elapsed_seconds(sweep) << " s)\n";
  georeg_sweep_destroy(sweep);
  return code;
}

int run_angles_command(const georeg_config* cfg, const Options& o) {
  char* text = nullptr;
  const georeg_status s = georeg_angles_run(cfg, &text);
  if (s != GEOREG_OK) return report(s, "angles");
  std::ofstream f(o.out, std::ios::binary);
  f << take_string(text);
  if (!f) {
    std::cerr << "georeg: cannot write '" << o.out << "'\n";
    return kFailure;
  }
  f.close();
  std::cout << "wrote " << o.out << "\n";
  return write_manifest("angles", cfg, o.out, {o.out}) ? kOk : kFailure;
}

int run_perturb_command(const georeg_config* cfg, const Options& o) {
  georeg_perturb* p = nullptr;
  georeg_status s = georeg_perturb_run(cfg, &p);
  if (s != GEOREG_OK) return report(s, "perturb");

  std::vector<std::string> outputs{o.out, sibling(o.out, ".summary.json")};
  s = georeg_perturb_write_csv(p, o.out.c_str());
  char* summary = nullptr;
  if (s == GEOREG_OK) s = georeg_perturb_summary_json(p, &summary);
  if (s == GEOREG_OK) {
    std::ofstream f(outputs[1], std::ios::binary);
    f << take_string(summary);
    if (!f) s = GEOREG_ERR_IO;
  }
  if (s == GEOREG_OK && o.plot) {
    outputs.push_back(sibling(o.out, ".svg"));
    s = georeg_perturb_write_svg(p, outputs.back().c_str());
  }
  const std::size_t records = georeg_perturb_record_count(p);
  georeg_perturb_destroy(p);
  if (s != GEOREG_OK) return report(s, "writing outputs");
  std::cout << "wrote " << o.out << " (" << records << " records)\n";
  return write_manifest("perturb", cfg, o.out, outputs) ? kOk : kFailure;
}

void add_common(CLI::App* sub, Options& o, const std::string& default_out) {
  o.out = default_out;
  sub->add_option("--config", o.config_path, "JSON settings file or run manifest");
  sub->add_option("--preset", o.preset, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  sub->add_option("--model", o.model, "identity | linear | relu | tanh | softplus | erf");
  sub->add_option("--m", o.m, "training-set size M");
  sub->add_option("--nf-ratio", o.nf_ratio, "N_f / M");
  sub->add_option("--lambda", o.lambda, "ridge parameter");
  sub->add_option("--snr", o.snr, "label signal-to-noise ratio (number or inf)");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--out", o.out, "output path")->capture_default_str();
  sub->add_option("--workers", o.workers, "worker threads")->envname("GEOREG_WORKERS");
  sub->add_flag("--plot", o.plot, "also write an SVG plot next to --out");
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--np-grid", o.np_grid, "N_p / M values, comma separated")->delimiter(',');
  sub->add_option("--nf-grid", o.nf_grid, "N_f / M values, comma separated")->delimiter(',');
  sub->add_option("--replicas", o.replicas, "independent simulations per grid point");
  sub->add_flag("--normalize,!--no-normalize", o.normalize,
                "scale errors by the training-label variance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-space geometry of over-parameterized least squares"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(georeg_version()));

  Options sweep_o, bv_o, angles_o, perturb_o;
  CLI::App* sweep = app.add_subcommand("sweep", "test/train error and geometry vs N_p/M");
  add_common(sweep, sweep_o, "sweep.csv");
  add_grid(sweep, sweep_o);

  CLI::App* bv = app.add_subcommand("bias-variance", "geometric bias and variance vs N_p/M");
  add_common(bv, bv_o, "bias_variance.csv");
  add_grid(bv, bv_o);

  CLI::App* angles = app.add_subcommand("angles", "singular spectrum and angles of P_f");
  add_common(angles, angles_o, "angles.json");
  angles->add_option("--np-ratio", angles_o.np_ratio, "N_p / M");

  CLI::App* perturb = app.add_subcommand("perturb", "adversarial vs invariant perturbations");
  add_common(perturb, perturb_o, "perturb.csv");
  perturb->add_option("--np-ratio", perturb_o.np_ratio, "N_p / M");
  perturb->add_option("--pairs", perturb_o.pairs, "perturbation pairs (default 200)");
  perturb->add_option("--eta", perturb_o.eta, "finite-difference step (default 1e-2)");
  perturb->add_option("--bootstrap", perturb_o.bootstrap, "bootstrap resamples for the gap SE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Options& o = chosen == sweep ? sweep_o : chosen == bv ? bv_o : chosen == angles ? angles_o : perturb_o;
  const georeg_command command = chosen == sweep     ? GEOREG_CMD_SWEEP
                                 : chosen == bv      ? GEOREG_CMD_BIAS_VARIANCE
                                 : chosen == angles  ? GEOREG_CMD_ANGLES
                                                     : GEOREG_CMD_PERTURB;

  json doc;
  try {
    doc = settings_document(o);
  } catch (const std::exception& e) {
    std::cerr << "georeg: " << e.what() << "\n";
    return kConfig;
  }
  if (!doc.contains("model")) {
    std::cerr << "georeg: --model is required\n\n" << chosen->help();
    return kConfig;
  }

  georeg_config* cfg = nullptr;
  const georeg_status s = georeg_config_parse(doc.dump().c_str(), command, &cfg);
  if (s != GEOREG_OK) {
    const int code = report(s, "config");
    std::cerr << "\n" << chosen->help();
    return code;
  }

  const std::string model = doc.at("model").is_string() ? doc.at("model").get<std::string>() : "";
  if (model != "identity" && model != "linear" && model != "relu")
    std::cerr << "georeg: warning: '" << model
              << "' has no closed-form linear component; W is a Monte Carlo estimate\n";

  int code = kOk;
  switch (command) {
    case GEOREG_CMD_SWEEP: code = run_sweep_command("sweep", cfg, o); break;
    case GEOREG_CMD_BIAS_VARIANCE: code = run_sweep_command("bias-variance", cfg, o); break;
    case GEOREG_CMD_ANGLES: code = run_angles_command(cfg, o); break;
    case GEOREG_CMD_PERTURB: code = run_perturb_command(cfg, o); break;
  }
  georeg_config_destroy(cfg);
  return code;
}
