#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmtfid/rmtfid.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

namespace {

rmtfid_config* small_config() {
  rmtfid_config* c = nullptr;
  REQUIRE(rmtfid_config_new(&c) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_int(c, "n_levels", 12) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_int(c, "n_realizations", 20) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_real(c, "tau_max", 1.0) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_real(c, "tau_step", 0.25) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_real(c, "lambda_par", 0.3) == RMTFID_OK);
  REQUIRE(rmtfid_config_set_real(c, "lambda_perp", 0.3) == RMTFID_OK);
  return c;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  rmtfid_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and formatting") {
  CHECK(std::strlen(rmtfid_version()) > 0);
  char buf[32];
  CHECK(rmtfid_format_real(0.1, buf, sizeof buf) == RMTFID_OK);
  CHECK(std::string(buf) == "0.10000000000000001");
  CHECK(rmtfid_format_real(0.1, buf, 4) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_format_real(0.1, nullptr, 4) == RMTFID_ERR_CONFIG);
}

TEST_CASE("config handle") {
  rmtfid_config* c = nullptr;
  REQUIRE(rmtfid_config_new(&c) == RMTFID_OK);
  int64_t v = 0;
  CHECK(rmtfid_config_get_int(c, "n_levels", &v) == RMTFID_OK);
  CHECK(v == 256);
  CHECK(rmtfid_config_set_int(c, "beta", 4) == RMTFID_OK);
  CHECK(rmtfid_config_get_int(c, "beta", &v) == RMTFID_OK);
  CHECK(v == 4);

  CHECK(rmtfid_config_set_int(c, "beta", 3) == RMTFID_ERR_CONFIG);
  CHECK(std::string(rmtfid_last_error()).find("beta") != std::string::npos);
  CHECK(rmtfid_config_set_int(c, "bogus", 1) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_config_set_int(c, "n_levels", 1) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_config_set_string(c, "mode", "gaussian") == RMTFID_OK);
  CHECK(rmtfid_config_set_string(c, "mode", "wigner") == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_config_set_seed(c, 18446744073709551615ULL) == RMTFID_OK);
  CHECK(rmtfid_config_validate(c) == RMTFID_OK);
  CHECK(rmtfid_config_set_int(nullptr, "beta", 2) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_config_new(nullptr) == RMTFID_ERR_CONFIG);

  const std::string json = [&] {
    char* s = nullptr;
    REQUIRE(rmtfid_config_to_json(c, &s) == RMTFID_OK);
    return take(s);
  }();
  CHECK(json.find("18446744073709551615") != std::string::npos);
  rmtfid_config* parsed = nullptr;
  CHECK(rmtfid_config_parse(json.c_str(), &parsed) == RMTFID_OK);
  CHECK(rmtfid_config_get_int(parsed, "beta", &v) == RMTFID_OK);
  CHECK(v == 4);
  rmtfid_config_free(parsed);
  rmtfid_config_free(c);
  rmtfid_config_free(nullptr);

  rmtfid_config* bad = nullptr;
  CHECK(rmtfid_config_parse("{\"extra\": 1}", &bad) == RMTFID_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(rmtfid_config_load("/nonexistent/dir/config.json", &bad) == RMTFID_ERR_IO);
}

TEST_CASE("simulate, serialize, merge, compare") {
  rmtfid_config* c = small_config();
  int calls = 0;
  rmtfid_run* run = nullptr;
  REQUIRE(rmtfid_run_simulate(
              c, [](int, int, void* user) { ++*static_cast<int*>(user); }, &calls, &run) == RMTFID_OK);
  CHECK(calls == 20);
  CHECK(rmtfid_run_size(run) == 5);
  CHECK(rmtfid_run_count(run) == 20);

  rmtfid_point p{};
  CHECK(rmtfid_run_point(run, 0, &p) == RMTFID_OK);
  CHECK(p.tau == 0.0);
  CHECK(p.f_re_mean == 1.0);
  CHECK(p.theory == 1.0);
  CHECK(rmtfid_run_point(run, 5, &p) == RMTFID_ERR_CONFIG);

  char* csv = nullptr;
  REQUIRE(rmtfid_run_serialize(run, RMTFID_FORMAT_CSV, &csv) == RMTFID_OK);
  const std::string csv_text = take(csv);
  CHECK(csv_text.rfind("tau,f_re_mean", 0) == 0);

  const auto path = (std::filesystem::temp_directory_path() / "rmtfid_c_api_run.json").string();
  REQUIRE(rmtfid_run_save(run, path.c_str(), RMTFID_FORMAT_JSON) == RMTFID_OK);
  rmtfid_run* loaded = nullptr;
  REQUIRE(rmtfid_run_load(path.c_str(), RMTFID_FORMAT_JSON, &loaded) == RMTFID_OK);
  char* again = nullptr;
  REQUIRE(rmtfid_run_serialize(loaded, RMTFID_FORMAT_CSV, &again) == RMTFID_OK);
  CHECK(take(again) == csv_text);

  rmtfid_run* merged = nullptr;
  REQUIRE(rmtfid_run_merge(run, loaded, &merged) == RMTFID_OK);
  CHECK(rmtfid_run_count(merged) == 40);

  rmtfid_config* other = small_config();
  REQUIRE(rmtfid_config_set_real(other, "lambda_par", 0.1) == RMTFID_OK);
  rmtfid_run* other_run = nullptr;
  REQUIRE(rmtfid_run_simulate(other, nullptr, nullptr, &other_run) == RMTFID_OK);
  rmtfid_run* nope = nullptr;
  CHECK(rmtfid_run_merge(run, other_run, &nope) == RMTFID_ERR_CONFIG);
  CHECK(nope == nullptr);

  rmtfid_thresholds t;
  rmtfid_thresholds_default(&t);
  CHECK(t.f_fraction == 0.95);
  CHECK(t.z_point == 3.0);
  CHECK(t.max_abs_deviation == 0.015);
  CHECK(t.fk_fraction == 0.90);
  CHECK(std::isinf(t.z_max));
  rmtfid_report* report = nullptr;
  REQUIRE(rmtfid_compare(run, &t, &report) == RMTFID_OK);
  const int passed = rmtfid_report_passed(report);
  CHECK((passed == 0 || passed == 1));
  char* rj = nullptr;
  REQUIRE(rmtfid_report_to_json(report, &rj) == RMTFID_OK);
  CHECK(take(rj).find("\"summary\"") != std::string::npos);
  rmtfid_report_free(report);
  CHECK(rmtfid_compare(run, nullptr, &report) == RMTFID_OK);
  rmtfid_report_free(report);

  CHECK(rmtfid_run_load("/nonexistent/run.json", RMTFID_FORMAT_JSON, &nope) == RMTFID_ERR_IO);
  CHECK(rmtfid_run_save(run, "/nonexistent/dir/run.csv", RMTFID_FORMAT_CSV) == RMTFID_ERR_IO);
  CHECK(std::string(rmtfid_last_error()).find("/nonexistent/dir/run.csv") != std::string::npos);

  rmtfid_run_free(other_run);
  rmtfid_run_free(merged);
  rmtfid_run_free(loaded);
  rmtfid_run_free(run);
  rmtfid_run_free(nullptr);
  rmtfid_config_free(other);
  rmtfid_config_free(c);
  std::remove(path.c_str());
}

TEST_CASE("invalid config is rejected before simulating") {
  for (const char* key : {"window_fraction", "tau_step", "lambda_par"}) {
    rmtfid_config* c = small_config();
    CHECK(rmtfid_config_set_real(c, key, -1.0) == RMTFID_OK);
    CHECK(rmtfid_config_validate(c) == RMTFID_ERR_CONFIG);
    rmtfid_run* run = nullptr;
    CHECK(rmtfid_run_simulate(c, nullptr, nullptr, &run) == RMTFID_ERR_CONFIG);
    CHECK(run == nullptr);
    rmtfid_config_free(c);
  }
  rmtfid_config* c = small_config();
  CHECK(rmtfid_config_set_real(c, "no_such_key", 1.0) == RMTFID_ERR_CONFIG);
  rmtfid_config_free(c);
}

TEST_CASE("theory entry points") {
  double v = 0.0;
  CHECK(rmtfid_theory_fidelity(0.1, 0.1, 2, 1.0, &v) == RMTFID_OK);
  CHECK(v == doctest::Approx(std::exp(-0.04 * M_PI * M_PI)).epsilon(1e-15));
  CHECK(rmtfid_theory_fidelity(0.1, 0.1, 2, -1.0, &v) == RMTFID_ERR_DOMAIN);
  CHECK(rmtfid_theory_fidelity(0.1, 0.1, 3, 1.0, &v) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_theory_fidelity(0.1, 0.1, 2, 1.0, nullptr) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_theory_log_perturbative(0.1, 2, 1.0, 0.0, &v) == RMTFID_OK);
  CHECK(v == doctest::Approx(-0.04 * M_PI * M_PI).epsilon(1e-15));
  CHECK(rmtfid_theory_identity_residual(0.1, 0.1, 2, 1.0, 1e-5, &v) == RMTFID_OK);
  CHECK(v <= 1e-8);
  CHECK(rmtfid_theory_identity_residual(0.1, 0.1, 2, 0.0, 1e-5, &v) == RMTFID_ERR_DOMAIN);
  CHECK(rmtfid_spreading_width(0.1, 1.0, &v) == RMTFID_OK);
  CHECK(v == doctest::Approx(0.0628318530717958).epsilon(1e-14));
}

TEST_CASE("moment check entry point") {
  char* json = nullptr;
  int passed = -1;
  REQUIRE(rmtfid_moment_check(2, 6, 5000, 3, &json, &passed) == RMTFID_OK);
  CHECK(passed == 1);
  CHECK(take(json).find("\"ijji\"") != std::string::npos);
  CHECK(rmtfid_moment_check(5, 6, 5000, 3, &json, &passed) == RMTFID_ERR_CONFIG);
  CHECK(rmtfid_moment_check(2, 6, 10, 3, &json, &passed) == RMTFID_ERR_CONFIG);
}
