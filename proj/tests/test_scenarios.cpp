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

#include <chrono>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "lnest/scenarios.hpp"

using namespace lnest;
using fx::params;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

bool check_ok(const Report& r, const std::string& name) {
  const auto* c = r.check(name);
  return c && c->ok();
}

}  // namespace

TEST_CASE("named scenarios are constructible and finish quickly") {
  const auto names = scenario_names();
  REQUIRE(names.size() == 3);
  for (const auto& name : names) {
    CAPTURE(name);
    Scenario sc = make_scenario(name);
    CHECK_NOTHROW(validate_scenario(sc));
    CHECK_NOTHROW(sc.channel->validate());
    sc.sweep.workers = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run_sweep(sc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 60.0);
    CHECK(r.points.size() == sc.sweep.scales.size());
    CHECK(r.scenario == name);
    CHECK(r.config_hash.size() == 16);
    for (const auto& p : r.points) CHECK(p.error.empty());
  }
  CHECK(code_of([] { make_scenario("nope"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("Bell and Pauli scenarios pass every check") {
  for (const char* name : {"ancilla-bell", "pauli2"}) {
    const Report r = run_sweep(make_scenario(name));
    for (const auto& c : r.checks) {
      CAPTURE(name);
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.ok());
    }
  }
}

TEST_CASE("three-level closed forms and reductions") {
  const Report r = run_sweep(make_scenario("threelevel"));
  for (const char* name : {"closed_form_delta_p_lambda", "closed_form_delta_p_delta", "closed_form_J_inverse",
                           "lambda_reduction", "trace_power_identity", "unbiasedness_order2", "tpcp", "positivity",
                           "first_order_consistency", "nondegeneracy_gate"}) {
    CAPTURE(name);
    CHECK(check_ok(r, name));
  }
}

TEST_CASE("sweep validation") {
  Scenario sc = make_scenario("threelevel");
  CHECK(code_of([&] { set_scales(sc, {}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([&] { set_scales(sc, {1e-3, 1e-4}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([&] { set_scales(sc, {-1e-3, 1e-4}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([&] { set_direction(sc, params({1.0, -1.0})); }) == ErrorCode::ConfigInvalid);
  // eps1 dM11 = eps2 dM22 with dM11 = 2/9 and dM22 = 1/9
  CHECK(code_of([&] { set_direction(sc, params({1.0, 2.0})); }) == ErrorCode::ConfigInvalid);
  set_direction(sc, params({2.0, 2.0}));
  CHECK(sc.sweep.direction(0) == 0.5);
  CHECK(sc.sweep.direction(1) == 0.5);

  Scenario bell = make_scenario("ancilla-bell");
  CHECK(code_of([&] { set_direction(bell, params({1.0, 1.0})); }) == ErrorCode::ConfigInvalid);
  CHECK_NOTHROW(set_direction(bell, params({2.0, 1.0})));
}

TEST_CASE("random channels are deterministic and TPCP") {
  const json a = channel_to_config(random_channel(3, 2, {1, 2}, 17, true));
  const json b = channel_to_config(random_channel(3, 2, {1, 2}, 17, true));
  const json c = channel_to_config(random_channel(3, 2, {1, 2}, 18, true));
  CHECK(a == b);
  CHECK(a != c);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const auto ch = random_channel(n, 2, {1, 1 + static_cast<int>(seed % 2)}, seed, seed % 2 == 0);
    for (double s : {1e-5, 1e-3, 1e-2}) CHECK(tpcp_residual(ch, s * params({0.5, 0.5})) <= 1e-12);
  }
  const ComplexVector phi = random_pure_state(4, 3);
  CHECK(std::abs(phi.norm() - 1.0) <= 1e-15);
  CHECK((phi - random_pure_state(4, 3)).norm() == 0.0);
}

TEST_CASE("reports are deterministic and independent of the worker count") {
  Scenario sc = make_scenario("ancilla-bell");
  sc.sweep.shots = 20000;
  sc.sweep.workers = 1;
  const std::string one = render_report(run_sweep(sc), ReportFormat::JsonLines);
  CHECK(one == render_report(run_sweep(sc), ReportFormat::JsonLines));
  sc.sweep.workers = 4;
  CHECK(one == render_report(run_sweep(sc), ReportFormat::JsonLines));
  sc.sweep.seed += 1;
  CHECK(one != render_report(run_sweep(sc), ReportFormat::JsonLines));
}

TEST_CASE("scenario configs round-trip") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const Scenario a = make_scenario(name);
    const Scenario b = scenario_from_config(scenario_default_config(name));
    CHECK(render_report(run_sweep(a), ReportFormat::JsonLines) ==
          render_report(run_sweep(b), ReportFormat::JsonLines));
  }
  json bad = scenario_default_config("threelevel");
  bad["sweep"]["scales"] = json::array();
  CHECK(code_of([&] { scenario_from_config(bad); }) == ErrorCode::ConfigInvalid);
  bad = scenario_default_config("pauli2");
  bad["raise"] = "sideways";
  CHECK(code_of([&] { scenario_from_config(bad); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("custom scenario from a random channel") {
  json cfg = {{"kind", "custom"},
              {"name", "random-3"},
              {"channel", channel_to_config(random_channel(3, 2, {1, 1}, 5, true))},
              {"input", vector_to_json(random_pure_state(3, 5))},
              {"sweep", {{"direction", {0.4, 0.6}}}}};
  const Report r = run_sweep(scenario_from_config(cfg));
  CHECK(r.scenario == "random-3");
  CHECK(check_ok(r, "tpcp"));
  CHECK(check_ok(r, "unbiasedness_order2"));
}

TEST_CASE("random suite") {
  SuiteOptions opts;
  opts.seeds = 12;
  opts.mixed_fixtures = 4;
  opts.workers = 2;
  std::vector<std::string> lines;
  const Report r = run_random_suite(opts, [&](const std::string& l) { lines.push_back(l); });
  CHECK(lines.size() == 16);  // 12 channels plus 4 mixed-input fixtures
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.ok());
  }
  opts.workers = 1;
  CHECK(render_report(r, ReportFormat::JsonLines) == render_report(run_random_suite(opts), ReportFormat::JsonLines));
}
