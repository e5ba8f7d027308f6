#include "georeg/run_settings.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "georeg/error.hpp"
#include "georeg/linreg.hpp"

namespace georeg {

using nlohmann::json;

namespace {

constexpr double kDefaultSnr = 10.0;
constexpr double kDefaultLambda = 1e-8;

template <typename T>
T get_as(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

double get_number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity")
      return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 &&
                                 !v.is_number_unsigned()))
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> get_grid(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError("config key '" + key + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

void apply_keys(RunSettings& s, const json& doc) {
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    if (key == "model") s.model = get_as<std::string>(doc, key);
    else if (key == "m") s.base.m = get_count(doc, key);
    else if (key == "m_test") s.base.m_test = get_count(doc, key);
    else if (key == "nf_ratio") s.nf_ratio = get_number(doc, key);
    else if (key == "np_ratio") s.np_ratio = get_number(doc, key);
    else if (key == "np_grid") s.np_grid = get_grid(doc, key);
    else if (key == "nf_grid") s.nf_grid = get_grid(doc, key);
    else if (key == "replicas") s.replicas = get_count(doc, key);
    else if (key == "lambda") s.base.lambda = get_number(doc, key);
    else if (key == "snr") {
      if (value.is_null()) s.snr.reset();
      else s.snr = get_number(doc, key);
    } else if (key == "sigma_eps") {
      s.base.sigma_eps = get_number(doc, key);
      s.snr.reset();
    } else if (key == "sigma_x") s.base.sigma_x = get_number(doc, key);
    else if (key == "sigma_beta") s.base.sigma_beta = get_number(doc, key);
    else if (key == "sigma_w") s.base.sigma_w = get_number(doc, key);
    else if (key == "activation_scale") s.base.custom_scale = get_number(doc, key);
    else if (key == "label_nonlinearity")
      s.base.label_nonlinearity = parse_label_nonlinearity(get_as<std::string>(doc, key));
    else if (key == "label_nonlinearity_scale")
      s.base.label_nonlinearity_scale = get_number(doc, key);
    else if (key == "seed") {
      if (!value.is_number_integer()) throw ConfigError("config key 'seed' must be an integer");
      s.base.seed = value.get<std::uint64_t>();
    } else if (key == "normalize") s.normalize = get_as<bool>(doc, key);
    else if (key == "workers") s.workers = get_count(doc, key);
    else if (key == "pairs") s.pairs = get_count(doc, key);
    else if (key == "eta") s.eta = get_number(doc, key);
    else if (key == "bootstrap") s.bootstrap = get_count(doc, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (doc.contains("m") && !doc.contains("m_test")) s.base.m_test = s.base.m;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::sweep: return "sweep";
    case Command::bias_variance: return "bias-variance";
    case Command::angles: return "angles";
    case Command::perturb: return "perturb";
  }
  return "sweep";
}

RunSettings preset_settings(std::string_view name) {
  RunSettings s;
  s.base.lambda = kDefaultLambda;
  s.snr = kDefaultSnr;
  s.np_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
  s.normalize = true;
  if (name == "desk") {
    s.preset = "desk";
    s.base.m = s.base.m_test = 256;
    s.replicas = 100;
  } else if (name == "paper") {
    s.preset = "paper";
    s.base.m = s.base.m_test = 512;
    s.replicas = 500;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
  }
  return s;
}

RunSettings parse_settings(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (doc.contains("resolved_config")) {
    json inner = doc.at("resolved_config");
    doc.swap(inner);
  }
  if (!doc.is_object()) throw ConfigError("resolved_config must be a JSON object");
  const std::string preset =
      doc.contains("preset") ? get_as<std::string>(doc, "preset") : std::string("desk");
  RunSettings s = preset_settings(preset);
  apply_keys(s, doc);
  return s;
}

RunSettings resolve_settings(RunSettings s, Command command) {
  if (s.model.empty()) throw ConfigError("--model is required (identity, linear, relu or custom)");
  s.base.activation = parse_activation(s.model);
  if (s.base.activation == Activation::custom) {
    s.base.custom_activation = s.model;
    lookup_activation(s.model, s.base.custom_scale);  // throws for unknown names
  } else {
    s.base.custom_activation.clear();
  }
  if (s.base.m < 1) throw ConfigError("M must be at least 1");

  if (!s.nf_ratio) s.nf_ratio = command == Command::perturb ? 1.2 : 0.25;
  if (!s.np_ratio) s.np_ratio = command == Command::perturb ? 3.0 : 1.0;
  s.base.n_f = scaled_dimension(*s.nf_ratio, s.base.m);
  s.base.n_p = scaled_dimension(*s.np_ratio, s.base.m);
  if (s.base.activation == Activation::identity) s.base.n_p = s.base.n_f;
  if (s.snr) s.base.sigma_eps = sigma_eps_for_snr(*s.snr, s.base.sigma_x, s.base.sigma_beta);

  if (!(s.eta > 0.0) || !std::isfinite(s.eta)) throw ConfigError("eta must be positive");
  if (command == Command::perturb && s.pairs < 2)
    throw ConfigError("perturb needs at least 2 pairs");
  if (s.replicas < 1) throw ConfigError("replicas must be at least 1");
  if (command == Command::bias_variance && s.replicas < 2)
    throw ConfigError("bias-variance needs at least 2 replicas (got " +
                      std::to_string(s.replicas) + ")");
  if (s.workers < 1) s.workers = 1;

  if (command == Command::sweep || command == Command::bias_variance) {
    to_sweep_spec(s, command).validate();
  } else {
    point_config(s).validate();
  }
  return s;
}

std::string settings_json(const RunSettings& s) {
  json doc;
  doc["preset"] = s.preset;
  doc["model"] = s.model;
  doc["m"] = s.base.m;
  doc["m_test"] = s.base.m_test;
  doc["nf_ratio"] = s.nf_ratio ? json(*s.nf_ratio) : json(nullptr);
  doc["np_ratio"] = s.np_ratio ? json(*s.np_ratio) : json(nullptr);
  doc["np_grid"] = s.np_grid;
  doc["nf_grid"] = s.nf_grid;
  doc["replicas"] = s.replicas;
  doc["lambda"] = s.base.lambda;
  if (s.snr) doc["snr"] = number_or_inf(*s.snr);
  else doc["sigma_eps"] = s.base.sigma_eps;
  doc["sigma_x"] = s.base.sigma_x;
  doc["sigma_beta"] = s.base.sigma_beta;
  doc["sigma_w"] = s.base.sigma_w;
  doc["activation_scale"] = s.base.custom_scale;
  doc["label_nonlinearity"] = std::string(to_string(s.base.label_nonlinearity));
  doc["label_nonlinearity_scale"] = s.base.label_nonlinearity_scale;
  doc["seed"] = s.base.seed;
  doc["normalize"] = s.normalize;
  doc["workers"] = s.workers;
  doc["pairs"] = s.pairs;
  doc["eta"] = s.eta;
  doc["bootstrap"] = s.bootstrap;
  // null ratios are not valid input; drop them so the document parses back
  if (doc["nf_ratio"].is_null()) doc.erase("nf_ratio");
  if (doc["np_ratio"].is_null()) doc.erase("np_ratio");
  return doc.dump(2);
}

SweepSpec to_sweep_spec(const RunSettings& s, Command command) {
  SweepSpec spec;
  spec.base_config = s.base;
  spec.np_over_m_grid = s.np_grid;
  spec.nf_over_m_grid = s.nf_grid;
  spec.tie_nf_to_np = s.base.activation == Activation::identity && s.nf_grid.empty();
  spec.n_replicas = s.replicas;
  spec.normalize = s.normalize;
  spec.workers = s.workers;
  if (command == Command::bias_variance)
    spec.metrics = {Metric::geom_error, Metric::bias_sq, Metric::variance, Metric::test_error,
                    Metric::train_error};
  return spec;
}

ExperimentConfig point_config(const RunSettings& s) { return s.base; }

}  // namespace georeg
