// Exercises the shared library through the C header only.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "georeg/georeg.h"

using nlohmann::json;

namespace {

georeg_config* parse(const char* text, georeg_command command) {
  georeg_config* cfg = nullptr;
  REQUIRE(georeg_config_parse(text, command, &cfg) == GEOREG_OK);
  return cfg;
}

std::string take(char* s) {
  std::string out = s;
  georeg_string_free(s);
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("georeg_capi_" + name)).string();
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::string(georeg_version()).size() > 0);
  CHECK(std::string(georeg_status_name(GEOREG_ERR_CONFIG)) == "config error");
}

TEST_CASE("config errors map to status codes") {
  georeg_config* cfg = nullptr;
  CHECK(georeg_config_parse("{}", GEOREG_CMD_SWEEP, &cfg) == GEOREG_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(georeg_last_error()).find("model") != std::string::npos);
  CHECK(georeg_config_parse("not json", GEOREG_CMD_SWEEP, &cfg) == GEOREG_ERR_CONFIG);
  CHECK(georeg_config_parse(nullptr, GEOREG_CMD_SWEEP, &cfg) == GEOREG_ERR_INVALID_ARGUMENT);
  CHECK(georeg_config_parse(R"({"model":"relu","replicas":1})", GEOREG_CMD_BIAS_VARIANCE, &cfg) ==
        GEOREG_ERR_CONFIG);
}

TEST_CASE("config round trip") {
  georeg_config* cfg = parse(R"({"model":"relu","m":16,"seed":4})", GEOREG_CMD_SWEEP);
  char* text = nullptr;
  REQUIRE(georeg_config_to_json(cfg, &text) == GEOREG_OK);
  const json doc = json::parse(take(text));
  CHECK(doc["m"] == 16);
  CHECK(doc["seed"] == 4);
  CHECK(doc["model"] == "relu");
  georeg_config_destroy(cfg);
}

TEST_CASE("sweep handle") {
  georeg_config* cfg =
      parse(R"({"model":"relu","m":16,"np_grid":[0.5,2],"replicas":3})", GEOREG_CMD_SWEEP);
  georeg_sweep* sweep = nullptr;
  REQUIRE(georeg_sweep_run(cfg, &sweep) == GEOREG_OK);
  CHECK(georeg_sweep_row_count(sweep) == 2);
  double mean = 0, se = 0, np = 0, nf = 0;
  CHECK(georeg_sweep_metric(sweep, 1, "test_error", &mean, &se) == GEOREG_OK);
  CHECK(std::isfinite(mean));
  CHECK(georeg_sweep_metric(sweep, 1, "nope", &mean, &se) == GEOREG_ERR_INVALID_ARGUMENT);
  CHECK(georeg_sweep_metric(sweep, 9, "test_error", &mean, &se) == GEOREG_ERR_INVALID_ARGUMENT);
  CHECK(georeg_sweep_point(sweep, 1, &np, &nf) == GEOREG_OK);
  CHECK(np == 2.0);
  CHECK(nf == 0.25);
  CHECK(georeg_sweep_failure(sweep, 0) == nullptr);
  const std::string path = temp_path("sweep.csv");
  CHECK(georeg_sweep_write_csv(sweep, path.c_str()) == GEOREG_OK);
  CHECK(std::filesystem::file_size(path) > 0);
  CHECK(georeg_sweep_write_csv(sweep, "/nonexistent/x.csv") == GEOREG_ERR_IO);
  std::filesystem::remove(path);
  georeg_sweep_destroy(sweep);

  georeg_config* angles = parse(R"({"model":"relu","m":16})", GEOREG_CMD_ANGLES);
  CHECK(georeg_sweep_run(angles, &sweep) == GEOREG_ERR_INVALID_ARGUMENT);
  georeg_config_destroy(angles);
  georeg_config_destroy(cfg);
}

TEST_CASE("angles") {
  georeg_config* cfg = parse(R"({"model":"identity","m":32,"nf_ratio":0.5})", GEOREG_CMD_ANGLES);
  char* text = nullptr;
  REQUIRE(georeg_angles_run(cfg, &text) == GEOREG_OK);
  const json doc = json::parse(take(text));
  CHECK(doc["theta_max_deg"].get<double>() <= 1e-6);
  CHECK(doc["sigma"].size() == 16);
  georeg_config_destroy(cfg);
}

TEST_CASE("perturb") {
  georeg_config* cfg = parse(R"({"model":"relu","m":24,"pairs":20})", GEOREG_CMD_PERTURB);
  georeg_perturb* p = nullptr;
  REQUIRE(georeg_perturb_run(cfg, &p) == GEOREG_OK);
  CHECK(georeg_perturb_record_count(p) == 40);
  char* text = nullptr;
  REQUIRE(georeg_perturb_summary_json(p, &text) == GEOREG_OK);
  CHECK(json::parse(take(text))["n_pairs"] == 20);
  georeg_perturb_destroy(p);
  georeg_config_destroy(cfg);

  georeg_config* degenerate =
      parse(R"({"model":"identity","m":24,"nf_ratio":0.25,"pairs":5})", GEOREG_CMD_PERTURB);
  CHECK(georeg_perturb_run(degenerate, &p) == GEOREG_ERR_EXPERIMENT);
  CHECK(p == nullptr);
  georeg_config_destroy(degenerate);
}

TEST_CASE("datasets") {
  georeg_config* cfg = parse(R"({"model":"relu","m":10,"nf_ratio":0.3})", GEOREG_CMD_ANGLES);
  georeg_dataset* d = nullptr;
  CHECK(georeg_dataset_sample(cfg, 42, &d) == GEOREG_ERR_INVALID_ARGUMENT);
  REQUIRE(georeg_dataset_sample(cfg, GEOREG_STREAM_TRAIN, &d) == GEOREG_OK);
  CHECK(georeg_dataset_rows(d) == 10);
  CHECK(georeg_dataset_features(d) == 3);
  std::vector<double> x(30), y(10), x2(30);
  CHECK(georeg_dataset_copy_inputs(d, x.data(), 29) == GEOREG_ERR_INVALID_ARGUMENT);
  REQUIRE(georeg_dataset_copy_inputs(d, x.data(), x.size()) == GEOREG_OK);
  REQUIRE(georeg_dataset_copy_labels(d, y.data(), y.size()) == GEOREG_OK);

  const std::string path = temp_path("data.csv");
  REQUIRE(georeg_dataset_write_csv(d, path.c_str()) == GEOREG_OK);
  georeg_dataset* back = nullptr;
  REQUIRE(georeg_dataset_read_csv(path.c_str(), &back) == GEOREG_OK);
  REQUIRE(georeg_dataset_copy_inputs(back, x2.data(), x2.size()) == GEOREG_OK);
  CHECK(x2 == x);
  georeg_dataset_destroy(back);
  std::filesystem::remove(path);
  CHECK(georeg_dataset_read_csv("/nonexistent.csv", &back) == GEOREG_ERR_IO);

  georeg_dataset* test = nullptr;
  REQUIRE(georeg_dataset_sample(cfg, GEOREG_STREAM_TEST, &test) == GEOREG_OK);
  REQUIRE(georeg_dataset_copy_inputs(test, x2.data(), x2.size()) == GEOREG_OK);
  CHECK(x2 != x);
  georeg_dataset_destroy(test);
  georeg_dataset_destroy(d);
  georeg_config_destroy(cfg);
}

TEST_CASE("null handles") {
  CHECK(georeg_sweep_row_count(nullptr) == 0);
  georeg_sweep_destroy(nullptr);
  char* text = nullptr;
  CHECK(georeg_angles_run(nullptr, &text) == GEOREG_ERR_INVALID_ARGUMENT);
}

}  // TEST_SUITE
