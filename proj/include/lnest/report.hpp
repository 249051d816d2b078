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
#include <string>
#include <utility>
#include <vector>

#include "lnest/numkit.hpp"

namespace lnest {

/// One named quantity at a sweep point or suite case. Matrices are stored
/// row-major; NaN marks a value that could not be computed.
struct Quantity {
  std::string name;
  std::vector<double> values;
  int rows = 1;
  int cols = 1;
};

struct PointRecord {
  int index = 0;
  double scale = 0.0;
  std::vector<Quantity> quantities;
  std::string error;

  void put(const std::string& name, double v);
  void put(const std::string& name, const RealVector& v);
  void put(const std::string& name, const RealMatrix& m);
  const Quantity* find(const std::string& name) const;
  double get(const std::string& name, std::size_t k = 0) const;  // NaN if absent
};

struct FitRecord {
  std::string quantity;
  OrderAssessment assessment;
  std::string note;
};

/// holds: what was measured satisfies the criterion. expected: whether it
/// should. A check is ok when they agree.
struct CheckRecord {
  std::string name;
  std::string criterion;
  bool holds = false;
  bool expected = true;
  bool informational = false;
  double value = 0.0;
  std::string detail;
  bool ok() const { return informational || holds == expected; }
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version;
  std::vector<PointRecord> points;
  std::vector<FitRecord> fits;
  std::vector<CheckRecord> checks;

  bool passed() const;
  int failed_count() const;
  const CheckRecord* check(const std::string& name) const;
  const FitRecord* fit(const std::string& name) const;
};

enum class ReportFormat { JsonLines, Csv };

ReportFormat parse_report_format(const std::string& s);

/// %.17g; non-finite values become null (JSON) or empty (CSV).
std::string format_number(double v);

std::string render_report(const Report& r, ReportFormat fmt);

/// Writes render_report output; IOFailure if the file cannot be written.
void emit_report(const Report& r, ReportFormat fmt, const std::string& path);

/// Human summary: one PASS/FAIL line per check.
std::string report_summary(const Report& r);

}  // namespace lnest
