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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lnest/config.hpp"
#include "lnest/estimator.hpp"
#include "lnest/report.hpp"

namespace lnest {

enum class ScenarioKind { ThreeLevel, Pauli2, AncillaBell, Custom };

/// eps = s * direction for every s in scales.
struct SweepConfig {
  RealVector direction;
  std::vector<double> scales = geometric_grid();
  std::uint64_t seed = 20260101;
  std::int64_t shots = 0;  // Monte Carlo shots per point, 0 disables sampling
  int workers = 0;         // 0 means hardware concurrency
};

struct Scenario {
  std::string name;
  std::string summary;
  ScenarioKind kind = ScenarioKind::Custom;
  std::shared_ptr<const LowNoiseChannel> channel;
  ComplexVector input;
  SweepConfig sweep;
  RaisePolicy raise = RaisePolicy::Strict;
  json config;  // the document the scenario was built from
};

std::vector<std::string> scenario_names();
/// "threelevel", "pauli2" or "ancilla-bell"; ConfigInvalid otherwise.
Scenario make_scenario(const std::string& name);

Scenario scenario_threelevel();
Scenario scenario_pauli2();
Scenario scenario_ancilla_bell();

/// Builds a scenario from a config document (docs/config-schema.md).
Scenario scenario_from_config(const json& cfg);

/// Default document of a named scenario, usable as a starting point for
/// custom configs.
json scenario_default_config(const std::string& name);

/// Throws ConfigInvalid when the sweep or the kind-specific conditions fail.
void validate_scenario(const Scenario& sc);

/// Sets the direction (renormalised to sum 1) and revalidates.
void set_direction(Scenario& sc, const RealVector& direction);
void set_scales(Scenario& sc, const std::vector<double>& scales);

/// Gaussian M_{mu a} scaled to unit operator norm, optional unit-norm
/// Hermitian generators, sqrt-completion builder. Deterministic in seed.
LowNoiseChannel random_channel(int dim, int D, const std::vector<int>& k_mu,
                               std::uint64_t seed, bool with_hamiltonian);

/// Haar-like random pure state from the same counter stream family.
ComplexVector random_pure_state(int dim, std::uint64_t seed);

Report run_sweep(const Scenario& sc);

struct SuiteOptions {
  int seeds = 100;
  std::uint64_t base_seed = 1;
  int mixed_fixtures = 20;
  int workers = 0;
};

/// Property suite over seeded random channels. progress, if set, receives
/// one line per finished case in case order.
Report run_random_suite(const SuiteOptions& opts,
                        const std::function<void(const std::string&)>& progress = {});

/// Runs the three named scenarios and the random suite.
std::vector<Report> run_verify(const SuiteOptions& opts,
                               const std::function<void(const std::string&)>& progress = {});

std::string library_version();

}  // namespace lnest
