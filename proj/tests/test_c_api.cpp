// Copyright 2026 The lnest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "lnest_c.h"

namespace {

struct Scenario {
  lnest_scenario* p = nullptr;
  explicit Scenario(const char* name) { REQUIRE(lnest_scenario_create(name, &p) == LNEST_OK); }
  ~Scenario() { lnest_scenario_free(p); }
};

struct Report {
  lnest_report* p = nullptr;
  ~Report() { lnest_report_free(p); }
};

std::string render(const lnest_report* r) {
  char* text = nullptr;
  REQUIRE(lnest_report_render(r, "jsonl", &text) == LNEST_OK);
  std::string out(text);
  lnest_string_free(text);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(lnest_version()) > 0);
  CHECK(std::string(lnest_status_name(LNEST_OK)) == "Ok");
  CHECK(std::string(lnest_status_name(LNEST_E_CONFIG_INVALID)).find("Config") != std::string::npos);
}

TEST_CASE("scenario registry") {
  REQUIRE(lnest_scenario_count() == 3);
  for (int i = 0; i < lnest_scenario_count(); ++i) {
    Scenario sc(lnest_scenario_name_at(i));
    CHECK(std::string(lnest_scenario_name(sc.p)) == lnest_scenario_name_at(i));
    CHECK(std::strlen(lnest_scenario_summary(sc.p)) > 0);
  }
  CHECK(lnest_scenario_name_at(7) == nullptr);
  lnest_scenario* bad = nullptr;
  CHECK(lnest_scenario_create("nope", &bad) == LNEST_E_CONFIG_INVALID);
  CHECK(bad == nullptr);
  CHECK(std::strlen(lnest_last_error()) > 0);
  CHECK(lnest_scenario_create("threelevel", nullptr) == LNEST_E_INVALID_ARGUMENT);
}

TEST_CASE("Bell sweep through the C API") {
  Scenario sc("ancilla-bell");
  int dim = 0, params = 0;
  REQUIRE(lnest_scenario_dims(sc.p, &dim, &params) == LNEST_OK);
  CHECK(dim == 4);
  CHECK(params == 2);
  Report r;
  REQUIRE(lnest_run_sweep(sc.p, &r.p) == LNEST_OK);
  CHECK(lnest_report_passed(r.p) == 1);
  CHECK(lnest_report_failed_count(r.p) == 0);
  CHECK(lnest_report_point_count(r.p) == 8);
  REQUIRE(lnest_report_check_count(r.p) > 0);

  const char* name = nullptr;
  int ok = 0;
  double value = 0.0;
  REQUIRE(lnest_report_check(r.p, 0, &name, &ok, &value) == LNEST_OK);
  CHECK(name != nullptr);
  CHECK(lnest_report_check(r.p, 10000, &name, &ok, &value) == LNEST_E_INVALID_ARGUMENT);
  REQUIRE(lnest_report_check_by_name(r.p, "delta_matrix_exact", &ok, &value) == LNEST_OK);
  CHECK(ok == 1);

  double scale = 0.0;
  REQUIRE(lnest_report_point_scale(r.p, 7, &scale) == LNEST_OK);
  CHECK(scale == 1e-2);
  double eps[2];
  int count = 0;
  REQUIRE(lnest_report_point_value(r.p, 7, "eps", eps, 2, &count) == LNEST_OK);
  CHECK(count == 2);
  CHECK(eps[0] == doctest::Approx(1e-2 / 3));
  CHECK(eps[1] == doctest::Approx(2e-2 / 3));
  double j[4];
  REQUIRE(lnest_report_point_value(r.p, 7, "J", j, 1, &count) == LNEST_OK);
  CHECK(count == 4);
  CHECK(lnest_report_point_value(r.p, 7, "no_such_quantity", j, 4, &count) == LNEST_E_INVALID_ARGUMENT);

  double slope = 0.0;
  int vanishing = 0;
  // the Bell channel is affine in eps, so the first-order residual is exactly zero
  REQUIRE(lnest_report_fit(r.p, "first_order_residual", &slope, &vanishing) == LNEST_OK);
  CHECK(vanishing == 1);
  CHECK(std::isnan(slope));
  CHECK(lnest_report_fit(r.p, "no_such_fit", &slope, &vanishing) == LNEST_E_INVALID_ARGUMENT);
  CHECK(std::string(lnest_report_summary(r.p)).find("PASSED") != std::string::npos);

  Scenario three("threelevel");
  Report t;
  REQUIRE(lnest_run_sweep(three.p, &t.p) == LNEST_OK);
  REQUIRE(lnest_report_fit(t.p, "first_order_residual", &slope, &vanishing) == LNEST_OK);
  CHECK(vanishing == 0);
  CHECK(std::abs(slope - 2.0) <= 0.15);
}

TEST_CASE("sweep settings and determinism") {
  Scenario sc("ancilla-bell");
  const double bad_dir[2] = {1.0, 1.0};
  CHECK(lnest_scenario_set_direction(sc.p, bad_dir, 2) == LNEST_E_CONFIG_INVALID);
  const double dir[2] = {1.0, 2.0};
  REQUIRE(lnest_scenario_set_direction(sc.p, dir, 2) == LNEST_OK);
  CHECK(lnest_scenario_set_scales(sc.p, nullptr, 0) == LNEST_E_CONFIG_INVALID);
  const double scales[5] = {1e-5, 1e-4, 1e-3, 3e-3, 1e-2};
  REQUIRE(lnest_scenario_set_scales(sc.p, scales, 5) == LNEST_OK);
  REQUIRE(lnest_scenario_set_shots(sc.p, 10000) == LNEST_OK);
  CHECK(lnest_scenario_set_shots(sc.p, -1) != LNEST_OK);
  REQUIRE(lnest_scenario_set_seed(sc.p, 99) == LNEST_OK);

  REQUIRE(lnest_scenario_set_workers(sc.p, 1) == LNEST_OK);
  Report a;
  REQUIRE(lnest_run_sweep(sc.p, &a.p) == LNEST_OK);
  REQUIRE(lnest_scenario_set_workers(sc.p, 4) == LNEST_OK);
  Report b;
  REQUIRE(lnest_run_sweep(sc.p, &b.p) == LNEST_OK);
  CHECK(render(a.p) == render(b.p));
  CHECK(lnest_report_point_count(a.p) == 5);
  int count = 0;
  double shots = 0.0;
  REQUIRE(lnest_report_point_value(a.p, 0, "mc_shots", &shots, 1, &count) == LNEST_OK);
  CHECK(shots == 10000.0);
}

TEST_CASE("scenario from JSON and bad documents") {
  lnest_scenario* sc = nullptr;
  CHECK(lnest_scenario_from_json("{not json", &sc) == LNEST_E_CONFIG_INVALID);
  CHECK(lnest_scenario_from_json("{\"kind\": \"threelevel\", \"sweep\": {\"scales\": []}}", &sc) ==
        LNEST_E_CONFIG_INVALID);
  CHECK(lnest_scenario_load("/nonexistent/cfg.json", &sc) != LNEST_OK);
  const char* doc =
      "{\"kind\": \"custom\", \"name\": \"damping\","
      " \"channel\": {\"dim\": 2, \"params\": 1, \"c_terms\": [{\"mu\": 0, \"matrix\": [[0, 1], [0, 0]]}]},"
      " \"input\": [0.6, 0.8], \"sweep\": {\"direction\": [1]}}";
  REQUIRE(lnest_scenario_from_json(doc, &sc) == LNEST_OK);
  CHECK(std::string(lnest_scenario_name(sc)) == "damping");
  lnest_report* r = nullptr;
  REQUIRE(lnest_run_sweep(sc, &r) == LNEST_OK);
  int ok = 0;
  double v = 0.0;
  REQUIRE(lnest_report_check_by_name(r, "tpcp", &ok, &v) == LNEST_OK);
  CHECK(ok == 1);
  lnest_report_free(r);
  lnest_scenario_free(sc);
}

TEST_CASE("low-level channel access") {
  lnest_channel* ch = nullptr;
  const char* doc =
      "{\"dim\": 2, \"params\": 2, \"builder\": \"explicit\", \"scalar_completion\": true,"
      " \"c_terms\": [{\"mu\": 0, \"matrix\": [[0, 1], [1, 0]]}, {\"mu\": 1, \"matrix\": [[1, 0], [0, -1]]}]}";
  REQUIRE(lnest_channel_from_json(doc, &ch) == LNEST_OK);
  int dim = 0, params = 0;
  REQUIRE(lnest_channel_dims(ch, &dim, &params) == LNEST_OK);
  CHECK(dim == 2);
  CHECK(params == 2);
  // |0><0| under bit flip 0.01, phase flip 0.02 -> diag(0.99, 0.01)
  const double rho[8] = {1, 0, 0, 0, 0, 0, 0, 0};
  const double eps[2] = {0.01, 0.02};
  double out[8];
  REQUIRE(lnest_channel_apply(ch, rho, eps, out) == LNEST_OK);
  CHECK(out[0] == doctest::Approx(0.99));
  CHECK(out[6] == doctest::Approx(0.01));
  CHECK(std::abs(out[2]) + std::abs(out[4]) <= 1e-15);
  double tpcp = 1.0;
  REQUIRE(lnest_channel_tpcp_residual(ch, eps, &tpcp) == LNEST_OK);
  CHECK(tpcp <= 1e-12);
  // |+> input: only the phase flip is visible
  const double plus[4] = {1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0), 0};
  const double small[2] = {1e-3, 2e-3};
  double fisher[4];
  REQUIRE(lnest_quantum_fisher_pure(ch, plus, small, fisher) == LNEST_OK);
  CHECK(fisher[3] * 2e-3 == doctest::Approx(1.0).epsilon(0.02));
  const double negative[2] = {-1e-3, 0.0};
  CHECK(lnest_channel_apply(ch, rho, negative, out) != LNEST_OK);
  lnest_channel_free(ch);

  lnest_channel* rc = nullptr;
  REQUIRE(lnest_channel_random(3, 2, 1, 5, 1, &rc) == LNEST_OK);
  REQUIRE(lnest_channel_tpcp_residual(rc, small, &tpcp) == LNEST_OK);
  CHECK(tpcp <= 1e-12);
  lnest_channel_free(rc);

  Scenario sc("threelevel");
  lnest_channel* from = nullptr;
  REQUIRE(lnest_channel_from_scenario(sc.p, &from) == LNEST_OK);
  REQUIRE(lnest_channel_dims(from, &dim, &params) == LNEST_OK);
  CHECK(dim == 3);
  lnest_channel_free(from);
}

TEST_CASE("random suite through the C API") {
  Report r;
  int lines = 0;
  auto cb = [](const char*, void* user) { ++*static_cast<int*>(user); };
  REQUIRE(lnest_random_suite(6, 1, 2, cb, &lines, &r.p) == LNEST_OK);
  CHECK(lines > 6);
  CHECK(lnest_report_passed(r.p) == 1);
}
