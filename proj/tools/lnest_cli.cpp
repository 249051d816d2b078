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

// lnest: command-line front end. Talks to the library only through lnest_c.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lnest_c.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

int report_error(lnest_status s) {
  std::fprintf(stderr, "lnest: %s\n", lnest_last_error());
  (void)s;
  return kExitConfigError;
}

std::string default_out_dir() {
  const char* env = std::getenv("LNEST_OUT_DIR");
  return env && *env ? env : ".";
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

bool is_config_path(const std::string& arg) {
  return arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0;
}

struct RunArgs {
  std::string target;
  std::vector<double> direction;
  std::vector<double> scales;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t shots = -1;
  int workers = 0;
  std::string out;
  std::string format = "jsonl";
};

int cmd_run(const RunArgs& a) {
  lnest_scenario* sc = nullptr;
  lnest_status st = is_config_path(a.target) ? lnest_scenario_load(a.target.c_str(), &sc)
                                             : lnest_scenario_create(a.target.c_str(), &sc);
  if (st != LNEST_OK) return report_error(st);
  auto cleanup = [&](int code) {
    lnest_scenario_free(sc);
    return code;
  };
  if (!a.direction.empty() &&
      (st = lnest_scenario_set_direction(sc, a.direction.data(), static_cast<int>(a.direction.size()))) != LNEST_OK)
    return cleanup(report_error(st));
  if (!a.scales.empty() &&
      (st = lnest_scenario_set_scales(sc, a.scales.data(), static_cast<int>(a.scales.size()))) != LNEST_OK)
    return cleanup(report_error(st));
  if (a.seed_set) lnest_scenario_set_seed(sc, a.seed);
  if (a.shots >= 0 && (st = lnest_scenario_set_shots(sc, a.shots)) != LNEST_OK) return cleanup(report_error(st));
  lnest_scenario_set_workers(sc, a.workers);

  lnest_report* rep = nullptr;
  if ((st = lnest_run_sweep(sc, &rep)) != LNEST_OK) return cleanup(report_error(st));
  const bool to_stdout = a.out == "-";
  std::string path = a.out;
  if (path.empty()) {
    const std::string ext = a.format == "csv" ? "csv" : "jsonl";
    path = (std::filesystem::path(default_out_dir()) / (std::string(lnest_scenario_name(sc)) + "." + ext)).string();
  }
  int code = lnest_report_passed(rep) ? kExitPass : kExitCheckFailure;
  if (to_stdout) {
    char* text = nullptr;
    if ((st = lnest_report_render(rep, a.format.c_str(), &text)) != LNEST_OK) {
      code = report_error(st);
    } else {
      std::fputs(text, stdout);
      lnest_string_free(text);
      std::fputs(lnest_report_summary(rep), stderr);
    }
  } else if ((st = lnest_report_write(rep, path.c_str(), a.format.c_str())) != LNEST_OK) {
    code = report_error(st);
  } else {
    std::fputs(lnest_report_summary(rep), stdout);
    std::printf("report: %s\n", path.c_str());
  }
  lnest_report_free(rep);
  return cleanup(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lnest: low-noise channel estimation sweeps and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lnest_version()));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Sweep a named scenario or a scenario config file");
  run_cmd->add_option("scenario", run.target, "Scenario name (see 'list') or path to a .json config")->required();
  run_cmd->add_option("--direction", run.direction, "Sweep direction, renormalised to sum 1")->delimiter(',');
  run_cmd->add_option("--scales", run.scales, "Increasing list of scales s, eps = s * direction")->delimiter(',');
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Seed for random directions and sampling");
  run_cmd->add_option("--shots", run.shots, "Monte Carlo shots per sweep point (0 disables)");
  run_cmd->add_option("--workers", run.workers, "Worker threads, 0 for all cores");
  run_cmd->add_option("--out", run.out, "Report path, '-' for stdout (default $LNEST_OUT_DIR/<name>.<ext>)");
  run_cmd->add_option("--format", run.format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}));

  int verify_seeds = 100, verify_workers = 0;
  std::string verify_dir, verify_format = "jsonl";
  auto* verify_cmd = app.add_subcommand("verify", "Run every scenario and the random-channel property suite");
  verify_cmd->add_option("--seeds", verify_seeds, "Random channels in the property suite");
  verify_cmd->add_option("--workers", verify_workers, "Worker threads, 0 for all cores");
  verify_cmd->add_option("--out-dir", verify_dir, "Write one report per run into this directory");
  verify_cmd->add_option("--format", verify_format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}));

  int suite_seeds = 100, suite_workers = 0;
  std::uint64_t suite_base = 1;
  std::string suite_out, suite_format = "jsonl";
  auto* suite_cmd = app.add_subcommand("random-suite", "Property checks over seeded random channels");
  suite_cmd->add_option("--seeds", suite_seeds, "Number of random channels");
  suite_cmd->add_option("--base-seed", suite_base, "First seed");
  suite_cmd->add_option("--workers", suite_workers, "Worker threads, 0 for all cores");
  suite_cmd->add_option("--out", suite_out, "Report path (default: no file)");
  suite_cmd->add_option("--format", suite_format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}));

  app.add_subcommand("list", "List the named scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfigError;
  }

  if (app.got_subcommand("list")) {
    for (int i = 0; i < lnest_scenario_count(); ++i) {
      lnest_scenario* sc = nullptr;
      const char* name = lnest_scenario_name_at(i);
      if (lnest_scenario_create(name, &sc) == LNEST_OK) {
        std::printf("%-14s %s\n", name, lnest_scenario_summary(sc));
        lnest_scenario_free(sc);
      }
    }
    return kExitPass;
  }

  if (app.got_subcommand(run_cmd)) {
    run.seed_set = seed_opt->count() > 0;
    return cmd_run(run);
  }

  if (app.got_subcommand(verify_cmd)) {
    int all = 0;
    const lnest_status st = lnest_verify(verify_seeds, verify_workers, verify_dir.empty() ? nullptr : verify_dir.c_str(),
                                         verify_format.c_str(), print_line, nullptr, &all);
    if (st != LNEST_OK) return report_error(st);
    std::printf("verify: %s\n", all ? "PASSED" : "FAILED");
    return all ? kExitPass : kExitCheckFailure;
  }

  if (app.got_subcommand(suite_cmd)) {
    lnest_report* rep = nullptr;
    lnest_status st = lnest_random_suite(suite_seeds, suite_base, suite_workers, nullptr, nullptr, &rep);
    if (st != LNEST_OK) return report_error(st);
    std::fputs(lnest_report_summary(rep), stdout);
    int code = lnest_report_passed(rep) ? kExitPass : kExitCheckFailure;
    if (!suite_out.empty() && (st = lnest_report_write(rep, suite_out.c_str(), suite_format.c_str())) != LNEST_OK)
      code = report_error(st);
    lnest_report_free(rep);
    return code;
  }
  return kExitConfigError;
}
