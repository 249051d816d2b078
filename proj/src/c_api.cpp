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

#include "lnest_c.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "lnest/fisher.hpp"
#include "lnest/scenarios.hpp"

struct lnest_scenario {
  lnest::Scenario sc;
};

struct lnest_report {
  lnest::Report report;
  std::string summary;
};

struct lnest_channel {
  std::shared_ptr<const lnest::LowNoiseChannel> ch;
};

namespace {

thread_local std::string g_last_error;

lnest_status fail(lnest_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
lnest_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const lnest::Error& e) {
    return fail(static_cast<lnest_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LNEST_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LNEST_E_INTERNAL, e.what());
  } catch (...) {
    return fail(LNEST_E_INTERNAL, "unknown exception");
  }
}

lnest_status null_arg(const char* what) { return fail(LNEST_E_INVALID_ARGUMENT, std::string(what) + " is NULL"); }

lnest::ParamVector read_eps(const double* eps, int d) {
  lnest::ParamVector e(d);
  for (int i = 0; i < d; ++i) e(i) = eps[i];
  return e;
}

lnest::ComplexMatrix read_matrix(const double* v, int n) {
  lnest::ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = lnest::cplx(v[2 * (i * n + k)], v[2 * (i * n + k) + 1]);
  return m;
}

lnest_status make_report(lnest::Report r, lnest_report** out) {
  auto* h = new lnest_report{std::move(r), {}};
  h->summary = lnest::report_summary(h->report);
  *out = h;
  return LNEST_OK;
}

const char* extension(lnest::ReportFormat f) { return f == lnest::ReportFormat::Csv ? "csv" : "jsonl"; }

}  // namespace

extern "C" {

const char* lnest_version(void) {
  static const std::string v = lnest::library_version();
  return v.c_str();
}

const char* lnest_status_name(lnest_status status) {
  if (status == LNEST_OK) return "Ok";
  if (status == LNEST_E_INTERNAL) return "Internal";
  if (status >= LNEST_E_NON_HERMITIAN && status <= LNEST_E_INVALID_ARGUMENT)
    return lnest::error_code_name(static_cast<lnest::ErrorCode>(static_cast<int>(status)));
  return "Unknown";
}

const char* lnest_last_error(void) { return g_last_error.c_str(); }

int lnest_scenario_count(void) { return static_cast<int>(lnest::scenario_names().size()); }

const char* lnest_scenario_name_at(int index) {
  static const std::vector<std::string> names = lnest::scenario_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[index].c_str();
}

lnest_status lnest_scenario_create(const char* name, lnest_scenario** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lnest_scenario{lnest::make_scenario(name)};
    return LNEST_OK;
  });
}

lnest_status lnest_scenario_load(const char* path, lnest_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lnest_scenario{lnest::scenario_from_config(lnest::load_config_file(path))};
    return LNEST_OK;
  });
}

lnest_status lnest_scenario_from_json(const char* text, lnest_scenario** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    lnest::json cfg;
    try {
      cfg = lnest::json::parse(text);
    } catch (const lnest::json::exception& e) {
      throw lnest::Error(lnest::ErrorCode::ConfigInvalid, e.what());
    }
    *out = new lnest_scenario{lnest::scenario_from_config(cfg)};
    return LNEST_OK;
  });
}

void lnest_scenario_free(lnest_scenario* sc) { delete sc; }

const char* lnest_scenario_name(const lnest_scenario* sc) { return sc ? sc->sc.name.c_str() : nullptr; }

const char* lnest_scenario_summary(const lnest_scenario* sc) { return sc ? sc->sc.summary.c_str() : nullptr; }

lnest_status lnest_scenario_dims(const lnest_scenario* sc, int* dim, int* params) {
  if (!sc) return null_arg("scenario");
  if (dim) *dim = sc->sc.channel->dim();
  if (params) *params = sc->sc.channel->num_params();
  return LNEST_OK;
}

lnest_status lnest_scenario_set_direction(lnest_scenario* sc, const double* dir, int n) {
  if (!sc) return null_arg("scenario");
  if (!dir) return null_arg("direction");
  return guarded([&] {
    if (n != sc->sc.channel->num_params())
      throw lnest::Error(lnest::ErrorCode::ConfigInvalid, "direction needs one component per parameter");
    lnest::set_direction(sc->sc, read_eps(dir, n));
    return LNEST_OK;
  });
}

lnest_status lnest_scenario_set_scales(lnest_scenario* sc, const double* scales, int n) {
  if (!sc) return null_arg("scenario");
  if (!scales && n > 0) return null_arg("scales");
  return guarded([&] {
    lnest::set_scales(sc->sc, std::vector<double>(scales, scales + std::max(n, 0)));
    return LNEST_OK;
  });
}

lnest_status lnest_scenario_set_seed(lnest_scenario* sc, uint64_t seed) {
  if (!sc) return null_arg("scenario");
  sc->sc.sweep.seed = seed;
  return LNEST_OK;
}

lnest_status lnest_scenario_set_shots(lnest_scenario* sc, int64_t shots) {
  if (!sc) return null_arg("scenario");
  if (shots < 0) return fail(LNEST_E_CONFIG_INVALID, "shots must be >= 0");
  sc->sc.sweep.shots = shots;
  return LNEST_OK;
}

lnest_status lnest_scenario_set_workers(lnest_scenario* sc, int workers) {
  if (!sc) return null_arg("scenario");
  if (workers < 0) return fail(LNEST_E_INVALID_ARGUMENT, "workers must be >= 0");
  sc->sc.sweep.workers = workers;
  return LNEST_OK;
}

lnest_status lnest_run_sweep(const lnest_scenario* sc, lnest_report** out) {
  if (!sc) return null_arg("scenario");
  if (!out) return null_arg("out");
  return guarded([&] { return make_report(lnest::run_sweep(sc->sc), out); });
}

void lnest_report_free(lnest_report* r) { delete r; }

int lnest_report_passed(const lnest_report* r) { return r && r->report.passed() ? 1 : 0; }

int lnest_report_failed_count(const lnest_report* r) { return r ? r->report.failed_count() : -1; }

int lnest_report_point_count(const lnest_report* r) { return r ? static_cast<int>(r->report.points.size()) : -1; }

int lnest_report_check_count(const lnest_report* r) { return r ? static_cast<int>(r->report.checks.size()) : -1; }

lnest_status lnest_report_check(const lnest_report* r, int index, const char** name, int* ok, double* value) {
  if (!r) return null_arg("report");
  if (index < 0 || index >= static_cast<int>(r->report.checks.size()))
    return fail(LNEST_E_INVALID_ARGUMENT, "check index out of range");
  const auto& c = r->report.checks[index];
  if (name) *name = c.name.c_str();
  if (ok) *ok = c.ok() ? 1 : 0;
  if (value) *value = c.value;
  return LNEST_OK;
}

lnest_status lnest_report_check_by_name(const lnest_report* r, const char* name, int* ok, double* value) {
  if (!r) return null_arg("report");
  if (!name) return null_arg("name");
  const auto* c = r->report.check(name);
  if (!c) return fail(LNEST_E_INVALID_ARGUMENT, std::string("no check named ") + name);
  if (ok) *ok = c->ok() ? 1 : 0;
  if (value) *value = c->value;
  return LNEST_OK;
}

lnest_status lnest_report_point_value(const lnest_report* r, int point, const char* quantity, double* values,
                                      int capacity, int* count) {
  if (!r) return null_arg("report");
  if (!quantity) return null_arg("quantity");
  if (point < 0 || point >= static_cast<int>(r->report.points.size()))
    return fail(LNEST_E_INVALID_ARGUMENT, "point index out of range");
  const auto* q = r->report.points[point].find(quantity);
  if (!q) return fail(LNEST_E_INVALID_ARGUMENT, std::string("no quantity named ") + quantity);
  const int n = static_cast<int>(q->values.size());
  if (count) *count = n;
  if (values)
    for (int i = 0; i < std::min(n, capacity); ++i) values[i] = q->values[i];
  return LNEST_OK;
}

lnest_status lnest_report_point_scale(const lnest_report* r, int point, double* scale) {
  if (!r) return null_arg("report");
  if (!scale) return null_arg("scale");
  if (point < 0 || point >= static_cast<int>(r->report.points.size()))
    return fail(LNEST_E_INVALID_ARGUMENT, "point index out of range");
  *scale = r->report.points[point].scale;
  return LNEST_OK;
}

lnest_status lnest_report_fit(const lnest_report* r, const char* quantity, double* slope, int* vanishing) {
  if (!r) return null_arg("report");
  if (!quantity) return null_arg("quantity");
  const auto* f = r->report.fit(quantity);
  if (!f) return fail(LNEST_E_INVALID_ARGUMENT, std::string("no fit for ") + quantity);
  if (!f->assessment.fitted && !f->assessment.vanishing) return fail(LNEST_E_DEGENERATE_SAMPLES, f->note);
  if (slope)
    *slope = f->assessment.vanishing ? std::numeric_limits<double>::quiet_NaN() : f->assessment.fit.slope;
  if (vanishing) *vanishing = f->assessment.vanishing ? 1 : 0;
  return LNEST_OK;
}

lnest_status lnest_report_write(const lnest_report* r, const char* path, const char* format) {
  if (!r) return null_arg("report");
  if (!path) return null_arg("path");
  return guarded([&] {
    lnest::emit_report(r->report, lnest::parse_report_format(format ? format : "jsonl"), path);
    return LNEST_OK;
  });
}

lnest_status lnest_report_render(const lnest_report* r, const char* format, char** out) {
  if (!r) return null_arg("report");
  if (!out) return null_arg("out");
  return guarded([&] {
    const std::string s = lnest::render_report(r->report, lnest::parse_report_format(format ? format : "jsonl"));
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
    return LNEST_OK;
  });
}

const char* lnest_report_summary(const lnest_report* r) { return r ? r->summary.c_str() : nullptr; }

void lnest_string_free(char* s) { delete[] s; }

lnest_status lnest_random_suite(int seeds, uint64_t base_seed, int workers, lnest_line_fn progress, void* user,
                                lnest_report** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    lnest::SuiteOptions o;
    o.seeds = seeds;
    o.base_seed = base_seed;
    o.workers = workers;
    std::function<void(const std::string&)> cb;
    if (progress) cb = [&](const std::string& line) { progress(line.c_str(), user); };
    return make_report(lnest::run_random_suite(o, cb), out);
  });
}

lnest_status lnest_verify(int seeds, int workers, const char* out_dir, const char* format, lnest_line_fn progress,
                          void* user, int* all_passed) {
  return guarded([&] {
    lnest::SuiteOptions o;
    o.seeds = seeds;
    o.workers = workers;
    const auto fmt = lnest::parse_report_format(format ? format : "jsonl");
    std::function<void(const std::string&)> cb;
    if (progress) cb = [&](const std::string& line) { progress(line.c_str(), user); };
    const auto reports = lnest::run_verify(o, cb);
    bool ok = true;
    for (const auto& r : reports) {
      ok = ok && r.passed();
      if (out_dir) {
        const auto path = std::filesystem::path(out_dir) / (r.scenario + "." + extension(fmt));
        lnest::emit_report(r, fmt, path.string());
      }
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    return LNEST_OK;
  });
}

lnest_status lnest_channel_from_json(const char* text, lnest_channel** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    lnest::json cfg;
    try {
      cfg = lnest::json::parse(text);
    } catch (const lnest::json::exception& e) {
      throw lnest::Error(lnest::ErrorCode::ConfigInvalid, e.what());
    }
    *out = new lnest_channel{std::make_shared<const lnest::LowNoiseChannel>(lnest::channel_from_config(cfg))};
    return LNEST_OK;
  });
}

lnest_status lnest_channel_from_scenario(const lnest_scenario* sc, lnest_channel** out) {
  if (!sc) return null_arg("scenario");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new lnest_channel{sc->sc.channel};
    return LNEST_OK;
  });
}

lnest_status lnest_channel_random(int dim, int params, int kraus_per_param, uint64_t seed, int with_hamiltonian,
                                  lnest_channel** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    auto ch = lnest::random_channel(dim, params, std::vector<int>(std::max(params, 0), kraus_per_param), seed,
                                    with_hamiltonian != 0);
    *out = new lnest_channel{std::make_shared<const lnest::LowNoiseChannel>(std::move(ch))};
    return LNEST_OK;
  });
}

void lnest_channel_free(lnest_channel* ch) { delete ch; }

lnest_status lnest_channel_dims(const lnest_channel* ch, int* dim, int* params) {
  if (!ch) return null_arg("channel");
  if (dim) *dim = ch->ch->dim();
  if (params) *params = ch->ch->num_params();
  return LNEST_OK;
}

lnest_status lnest_channel_apply(const lnest_channel* ch, const double* rho, const double* eps, double* out) {
  if (!ch) return null_arg("channel");
  if (!rho || !eps || !out) return null_arg("array argument");
  return guarded([&] {
    const int n = ch->ch->dim();
    const auto res = lnest::apply_channel(*ch->ch, read_matrix(rho, n), read_eps(eps, ch->ch->num_params()));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        out[2 * (i * n + k)] = res(i, k).real();
        out[2 * (i * n + k) + 1] = res(i, k).imag();
      }
    return LNEST_OK;
  });
}

lnest_status lnest_channel_tpcp_residual(const lnest_channel* ch, const double* eps, double* out) {
  if (!ch) return null_arg("channel");
  if (!eps || !out) return null_arg("array argument");
  return guarded([&] {
    *out = lnest::tpcp_residual(*ch->ch, read_eps(eps, ch->ch->num_params()));
    return LNEST_OK;
  });
}

lnest_status lnest_quantum_fisher_pure(const lnest_channel* ch, const double* phi, const double* eps,
                                       double* fisher) {
  if (!ch) return null_arg("channel");
  if (!phi || !eps || !fisher) return null_arg("array argument");
  return guarded([&] {
    const int n = ch->ch->dim(), d = ch->ch->num_params();
    lnest::ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = lnest::cplx(phi[2 * i], phi[2 * i + 1]);
    const auto j = lnest::quantum_fisher_pure(*ch->ch, v, read_eps(eps, d));
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) fisher[i * d + k] = j.entries(i, k);
    return LNEST_OK;
  });
}

}  // extern "C"
