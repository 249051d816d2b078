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

#include "lnest/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace lnest {

namespace {

std::string jstr(const std::string& s) { return nlohmann::json(s).dump(); }

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void PointRecord::put(const std::string& name, double v) { quantities.push_back({name, {v}, 1, 1}); }

void PointRecord::put(const std::string& name, const RealVector& v) {
  Quantity q{name, std::vector<double>(v.data(), v.data() + v.size()), 1, static_cast<int>(v.size())};
  quantities.push_back(std::move(q));
}

void PointRecord::put(const std::string& name, const RealMatrix& m) {
  Quantity q{name, {}, static_cast<int>(m.rows()), static_cast<int>(m.cols())};
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) q.values.push_back(m(i, k));
  quantities.push_back(std::move(q));
}

const Quantity* PointRecord::find(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return &q;
  return nullptr;
}

double PointRecord::get(const std::string& name, std::size_t k) const {
  const auto* q = find(name);
  if (!q || k >= q->values.size()) return std::numeric_limits<double>::quiet_NaN();
  return q->values[k];
}

bool Report::passed() const { return failed_count() == 0; }

int Report::failed_count() const {
  int n = 0;
  for (const auto& c : checks)
    if (!c.ok()) ++n;
  return n;
}

const CheckRecord* Report::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const FitRecord* Report::fit(const std::string& name) const {
  for (const auto& f : fits)
    if (f.quantity == name) return &f;
  return nullptr;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "jsonl" || s == "json" || s == "jsonlines") return ReportFormat::JsonLines;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorCode::ConfigInvalid, "unknown report format '" + s + "'");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::string render_jsonl(const Report& r) {
  std::ostringstream os;
  os << "{\"record\":\"header\",\"scenario\":" << jstr(r.scenario) << ",\"seed\":" << r.seed
     << ",\"config_hash\":" << jstr(r.config_hash) << ",\"version\":" << jstr(r.version) << "}\n";
  for (const auto& p : r.points) {
    os << "{\"record\":\"point\",\"index\":" << p.index << ",\"scale\":" << format_number(p.scale)
       << ",\"error\":" << (p.error.empty() ? "null" : jstr(p.error)) << ",\"quantities\":{";
    for (std::size_t k = 0; k < p.quantities.size(); ++k) {
      const auto& q = p.quantities[k];
      if (k) os << ',';
      os << jstr(q.name) << ":{\"rows\":" << q.rows << ",\"cols\":" << q.cols << ",\"values\":[";
      for (std::size_t i = 0; i < q.values.size(); ++i) os << (i ? "," : "") << format_number(q.values[i]);
      os << "]}";
    }
    os << "}}\n";
  }
  for (const auto& f : r.fits) {
    const auto& a = f.assessment;
    os << "{\"record\":\"fit\",\"quantity\":" << jstr(f.quantity)
       << ",\"fitted\":" << jbool(a.fitted) << ",\"vanishing\":" << jbool(a.vanishing)
       << ",\"slope\":" << (a.fitted ? format_number(a.fit.slope) : "null")
       << ",\"intercept\":" << (a.fitted ? format_number(a.fit.intercept) : "null")
       << ",\"residual\":" << (a.fitted ? format_number(a.fit.residual) : "null")
       << ",\"note\":" << jstr(f.note) << "}\n";
  }
  for (const auto& c : r.checks) {
    os << "{\"record\":\"check\",\"name\":" << jstr(c.name) << ",\"criterion\":" << jstr(c.criterion)
       << ",\"holds\":" << jbool(c.holds) << ",\"expected\":" << jbool(c.expected)
       << ",\"informational\":" << jbool(c.informational) << ",\"ok\":" << jbool(c.ok())
       << ",\"value\":" << format_number(c.value) << ",\"detail\":" << jstr(c.detail) << "}\n";
  }
  os << "{\"record\":\"summary\",\"passed\":" << jbool(r.passed())
     << ",\"checks\":" << r.checks.size() << ",\"failed\":" << r.failed_count() << "}\n";
  return os.str();
}

static std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << "record,index,scale,quantity,component,value\n";
  auto row = [&](const std::string& rec, const std::string& idx, const std::string& scale,
                 const std::string& qty, const std::string& comp, const std::string& val) {
    os << rec << ',' << idx << ',' << scale << ',' << csv_field(qty) << ',' << comp << ','
       << csv_field(val) << '\n';
  };
  auto num = [](double v) { return std::isfinite(v) ? format_number(v) : std::string(); };
  row("header", "", "", "scenario", "", r.scenario);
  row("header", "", "", "seed", "", std::to_string(r.seed));
  row("header", "", "", "config_hash", "", r.config_hash);
  row("header", "", "", "version", "", r.version);
  for (const auto& p : r.points) {
    const std::string idx = std::to_string(p.index), sc = num(p.scale);
    if (!p.error.empty()) row("point_error", idx, sc, "error", "", p.error);
    for (const auto& q : p.quantities)
      for (std::size_t i = 0; i < q.values.size(); ++i) row("point", idx, sc, q.name, std::to_string(i), num(q.values[i]));
  }
  for (const auto& f : r.fits) {
    const auto& a = f.assessment;
    row("fit", "", "", f.quantity, "vanishing", a.vanishing ? "1" : "0");
    if (a.fitted) {
      row("fit", "", "", f.quantity, "slope", num(a.fit.slope));
      row("fit", "", "", f.quantity, "intercept", num(a.fit.intercept));
      row("fit", "", "", f.quantity, "residual", num(a.fit.residual));
    }
  }
  for (const auto& c : r.checks) {
    row("check", "", "", c.name, "holds", c.holds ? "1" : "0");
    row("check", "", "", c.name, "expected", c.expected ? "1" : "0");
    row("check", "", "", c.name, "ok", c.ok() ? "1" : "0");
    row("check", "", "", c.name, "value", num(c.value));
  }
  row("summary", "", "", "passed", "", r.passed() ? "1" : "0");
  row("summary", "", "", "failed", "", std::to_string(r.failed_count()));
  return os.str();
}

std::string render_report(const Report& r, ReportFormat fmt) {
  return fmt == ReportFormat::Csv ? render_csv(r) : render_jsonl(r);
}

void emit_report(const Report& r, ReportFormat fmt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open " + path + " for writing");
  out << render_report(r, fmt);
  out.flush();
  if (!out) throw Error(ErrorCode::IOFailure, "write to " + path + " failed");
}

std::string report_summary(const Report& r) {
  std::ostringstream os;
  os << r.scenario << " (seed " << r.seed << ", config " << r.config_hash << ")\n";
  for (const auto& c : r.checks) {
    const char* tag = c.informational ? "INFO" : (c.ok() ? "PASS" : "FAIL");
    os << "  " << tag << "  " << c.name << "  value=" << format_number(c.value);
    if (!c.expected) os << "  (expected not to hold)";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << (r.passed() ? "PASSED" : "FAILED") << " (" << r.failed_count() << " failing)\n";
  return os.str();
}

}  // namespace lnest
