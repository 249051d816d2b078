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

#include "lnest/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "lnest/pipeline.hpp"
#include "lnest/rng.hpp"

#ifndef LNEST_VERSION
#define LNEST_VERSION "0.0.0"
#endif

namespace lnest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDefaultSeed = 20260101;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

int resolve_workers(int w) {
  if (w > 0) return w;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

template <class F>
void parallel_for(int n, int workers, F&& f) {
  const int nw = std::max(1, std::min(resolve_workers(workers), n));
  if (nw == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < nw; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::ThreeLevel: return "threelevel";
    case ScenarioKind::Pauli2: return "pauli2";
    case ScenarioKind::AncillaBell: return "ancilla-bell";
    case ScenarioKind::Custom: return "custom";
  }
  return "custom";
}

ScenarioKind parse_kind(const std::string& s) {
  if (s == "threelevel") return ScenarioKind::ThreeLevel;
  if (s == "pauli2") return ScenarioKind::Pauli2;
  if (s == "ancilla-bell") return ScenarioKind::AncillaBell;
  if (s == "custom") return ScenarioKind::Custom;
  bad("unknown scenario kind '" + s + "'");
}

ComplexVector bloch_state(const RealVector& r) {
  if (r.size() != 3 || !(r.norm() > 0.0)) bad("input_bloch must be a non-zero 3-vector");
  const RealVector u = r / r.norm();
  const double theta = std::acos(std::clamp(u(2), -1.0, 1.0));
  const double phase = std::atan2(u(1), u(0));
  ComplexVector v(2);
  v(0) = std::cos(0.5 * theta);
  v(1) = std::polar(std::sin(0.5 * theta), phase);
  return v;
}

double expect(const ComplexVector& phi, const ComplexMatrix& op) {
  return (phi.adjoint() * op * phi)(0).real();
}

// <phi|(M_mu - m_mu)^dag (M_nu - m_nu)|phi> for the single C term of each
// parameter.
ComplexMatrix covariance_matrix(const LowNoiseChannel& ch, const ComplexVector& phi) {
  const int d = ch.num_params();
  std::vector<ComplexVector> w(d);
  for (const auto& t : ch.c_terms()) {
    const cplx m = (phi.adjoint() * t.base * phi)(0);
    w[t.mu] = t.base * phi - m * phi;
  }
  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) out(i, k) = w[i].dot(w[k]);
  return out;
}

struct ThreeLevelForms {
  double a, b, c, det;
};

ThreeLevelForms threelevel_forms(const LowNoiseChannel& ch, const ComplexVector& phi) {
  const ComplexMatrix dm = covariance_matrix(ch, phi);
  ThreeLevelForms f;
  f.a = dm(0, 0).real();
  f.b = dm(1, 1).real();
  f.c = std::norm(dm(0, 1));
  f.det = f.a * f.b - f.c;
  return f;
}

RealVector threelevel_dp(const ThreeLevelForms& f, const ParamVector& e) {
  const double s = e(0) * f.a + e(1) * f.b;
  const double q = e(0) * f.a - e(1) * f.b;
  const double r = std::sqrt(q * q + 4.0 * e(0) * e(1) * f.c);
  RealVector out(2);
  out << 0.5 * (s + r), 0.5 * (s - r);
  return out;
}

RealMatrix threelevel_jinv(const ThreeLevelForms& f, const ParamVector& e) {
  const double e1 = e(0), e2 = e(1);
  const double q = e1 * f.a - e2 * f.b;
  const double den = f.det * q * q;
  RealMatrix j(2, 2);
  j(0, 0) = (e1 * e1 * e1 * f.a * f.det + e1 * e1 * e2 * f.b * (3.0 * f.c - 2.0 * f.a * f.b) +
             e1 * e2 * e2 * f.b * f.b * f.b) / den;
  j(1, 1) = (e2 * e2 * e2 * f.b * f.det + e2 * e2 * e1 * f.a * (3.0 * f.c - 2.0 * f.a * f.b) +
             e2 * e1 * e1 * f.a * f.a * f.a) / den;
  j(0, 1) = j(1, 0) = -e1 * e2 * f.c / f.det * (e1 * f.a + e2 * f.b) / (q * q);
  return j;
}

// Bloch-vector forms for the qubit Pauli channel with C_1 = sigma_x and
// C_2 = sigma_z.
struct PauliForms {
  Eigen::Vector3d r, d1, d2;
};

PauliForms pauli_forms(const ComplexVector& phi) {
  PauliForms p;
  p.r << expect(phi, pauli_x()), expect(phi, pauli_y()), expect(phi, pauli_z());
  p.r /= p.r.norm();
  p.d1 = p.r.cwiseProduct(Eigen::Vector3d(0.0, -2.0, -2.0));
  p.d2 = p.r.cwiseProduct(Eigen::Vector3d(-2.0, -2.0, 0.0));
  return p;
}

RealMatrix pauli_fisher(const PauliForms& p, const ParamVector& e) {
  const Eigen::Vector3d one_minus_f(2.0 * e(1), 2.0 * e(0) + 2.0 * e(1), 2.0 * e(0));
  const Eigen::Vector3d f = Eigen::Vector3d::Ones() - one_minus_f;
  const Eigen::Vector3d y = p.r.cwiseProduct(f);
  double purity_gap = 0.0;
  for (int i = 0; i < 3; ++i) purity_gap += p.r(i) * p.r(i) * one_minus_f(i) * (1.0 + f(i));
  const double g1 = 2.0 * y.dot(p.d1), g2 = 2.0 * y.dot(p.d2);
  RealMatrix j(2, 2);
  j(0, 0) = p.d1.dot(p.d1) + 0.25 * g1 * g1 / purity_gap;
  j(1, 1) = p.d2.dot(p.d2) + 0.25 * g2 * g2 / purity_gap;
  j(0, 1) = j(1, 0) = p.d1.dot(p.d2) + 0.25 * g1 * g2 / purity_gap;
  return j;
}

bool near_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).norm() <= 1e-12;
}

bool has_terms(const LowNoiseChannel& ch, const ComplexMatrix& c0, const ComplexMatrix& c1) {
  const auto& t = ch.c_terms();
  if (t.size() != 2) return false;
  return (t[0].mu == 0 && t[1].mu == 1 && near_matrix(t[0].base, c0) && near_matrix(t[1].base, c1)) ||
         (t[0].mu == 1 && t[1].mu == 0 && near_matrix(t[1].base, c0) && near_matrix(t[0].base, c1));
}

ComplexVector bell_input() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

ComplexMatrix bell_frame() {
  ComplexMatrix f = ComplexMatrix::Zero(4, 3);
  f(0, 0) = 1.0 / std::sqrt(2.0);
  f(3, 0) = -1.0 / std::sqrt(2.0);
  f(1, 1) = 1.0;
  f(2, 2) = 1.0;
  return f;
}

ComplexMatrix bell_printed_delta(const ParamVector& e) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = e(1);
  d.block(1, 1, 2, 2).setConstant(0.5 * e(0));
  return d;
}

json channel_doc_threelevel() {
  ComplexMatrix m1 = ComplexMatrix::Zero(3, 3), m2 = ComplexMatrix::Zero(3, 3);
  m1(1, 0) = 1.0;
  m2(1, 0) = m2(2, 0) = 1.0 / std::sqrt(2.0);
  return {{"dim", 3},
          {"params", 2},
          {"builder", "sqrt-completion"},
          {"c_terms", json::array({{{"mu", 0}, {"matrix", matrix_to_json(m1)}},
                                   {{"mu", 1}, {"matrix", matrix_to_json(m2)}}})}};
}

json channel_doc_pauli(bool ancilla) {
  json j = {{"dim", 2},
            {"params", 2},
            {"builder", "explicit"},
            {"scalar_completion", true},
            {"c_terms", json::array({{{"mu", 0}, {"matrix", matrix_to_json(pauli_x())}},
                                     {{"mu", 1}, {"matrix", matrix_to_json(pauli_z())}}})}};
  if (ancilla) j["ancilla"] = true;
  return j;
}

json effective_config(const Scenario& sc) {
  json cfg = sc.config;
  std::vector<double> dir(sc.sweep.direction.data(), sc.sweep.direction.data() + sc.sweep.direction.size());
  cfg["sweep"] = {{"direction", dir},
                  {"scales", sc.sweep.scales},
                  {"seed", sc.sweep.seed},
                  {"shots", sc.sweep.shots}};
  return cfg;
}

RealVector random_unit(CounterRng& rng, int n) {
  RealVector u(n);
  for (int i = 0; i < n; ++i) u(i) = rng.normal();
  return u / u.norm();
}

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> column(const std::vector<PointRecord>& pts, const std::string& name,
                           std::size_t k = 0) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(p.get(name, k));
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string fmt(double v) { return format_number(v); }

class ReportBuilder {
 public:
  explicit ReportBuilder(Report& r) : r_(r) {}

  void order(const std::string& name, const std::string& qty, const std::string& criterion,
             const std::vector<double>& scales, const std::vector<double>& values,
             const std::vector<double>& natural, double lo, double hi, bool allow_vanishing,
             bool expected = true, bool informational = false) {
    CheckRecord c{name, criterion, false, expected, informational, kNaN, ""};
    FitRecord f{qty, {}, ""};
    if (!all_finite(values)) {
      f.note = "missing values";
      c.detail = "quantity missing at some sweep points";
    } else {
      try {
        f.assessment = assess_order(scales, values, natural);
        if (f.assessment.vanishing) {
          f.note = "at numerical zero floor";
          c.holds = allow_vanishing;
          c.value = 0.0;
          c.detail = "vanishes at the numerical zero floor";
        } else {
          c.value = f.assessment.fit.slope;
          c.holds = c.value >= lo && c.value <= hi;
          c.detail = "slope " + fmt(c.value);
        }
      } catch (const Error& e) {
        f.note = e.what();
        c.detail = e.what();
      }
    }
    r_.fits.push_back(f);
    r_.checks.push_back(c);
  }

  void bound(const std::string& name, const std::string& criterion, double value, double limit,
             bool expected = true, bool informational = false) {
    CheckRecord c{name, criterion, std::isfinite(value) && value <= limit, expected, informational,
                  value, "max " + fmt(value) + " vs " + fmt(limit)};
    r_.checks.push_back(c);
  }

  void flag(const std::string& name, const std::string& criterion, bool holds, double value,
            const std::string& detail, bool expected = true, bool informational = false) {
    r_.checks.push_back({name, criterion, holds, expected, informational, value, detail});
  }

 private:
  Report& r_;
};

double series_max(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::isfinite(x) ? std::max(m, x) : std::numeric_limits<double>::infinity();
  return m;
}

double series_min(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::isfinite(x) ? std::min(m, x) : -std::numeric_limits<double>::infinity();
  return m;
}

// Value at s = 0 of the quadratic through three samples.
RealMatrix lagrange_at_zero(const std::vector<double>& s, const std::vector<RealMatrix>& y) {
  RealMatrix out = RealMatrix::Zero(y[0].rows(), y[0].cols());
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int k = 0; k < 3; ++k)
      if (k != i) w *= s[k] / (s[k] - s[i]);
    out += w * y[i];
  }
  return out;
}

struct PointWork {
  std::optional<PointAnalysis> pa;
  PointRecord rec;
};

void generic_point(const Scenario& sc, const ParamVector& eps, int index, PointWork& w) {
  const auto& ch = *sc.channel;
  const int d = ch.num_params();
  auto& rec = w.rec;
  const ComplexMatrix rho = pure_state(sc.input);
  rec.put("eps", RealVector(eps));
  rec.put("tpcp_residual", tpcp_residual(ch, eps));
  {
    const ComplexMatrix dev = output_deviation(ch, rho, eps);
    ComplexMatrix lin = ComplexMatrix::Zero(ch.dim(), ch.dim());
    for (int mu = 0; mu < d; ++mu) lin += eps(mu) * derivative_at_zero(ch, mu, rho);
    rec.put("first_order_residual", (dev - lin).norm());
  }
  PointOptions opts;
  opts.weights = sc.sweep.direction;
  opts.raise = sc.raise;
  w.pa = analyze_point(ch, sc.input, eps, opts);
  const auto& pa = *w.pa;
  rec.put("probs", pa.spec.probs);
  rec.put("min_probability", pa.spec.probs.minCoeff());
  rec.put("shift_order1_count", static_cast<double>(pa.shifts.count_order1()));
  {
    const DeltaMatrix full = delta_matrix(ch, sc.input, eps, DeltaVariant::Full);
    const DeltaMatrix lead = delta_matrix(ch, sc.input, eps, DeltaVariant::Leading, full.frame);
    rec.put("delta_full_minus_leading", (full.entries - lead.entries).norm());
  }
  rec.put("J", pa.J.entries);
  rec.put("J_condition", pa.J.condition_number);
  if (pa.J.inverse) rec.put("J_inv", *pa.J.inverse);
  rec.put("J_c", pa.Jc.entries);
  rec.put("det_nondegeneracy", pa.det);
  rec.put("det_normalized", pa.det_normalized);
  if (pa.jdiv_ok) {
    rec.put("J_div", pa.Jdiv.entries);
    rec.put("J_c_minus_J_div", (pa.Jc.entries - pa.Jdiv.entries).norm());
    try {
      const FisherMatrix inv = fisher_inverse(pa.Jdiv);
      rec.put("J_div_inv", *inv.inverse);
      if (pa.V) rec.put("V_minus_J_div_inv_norm", (pa.V->entries - *inv.inverse).norm());
    } catch (const Error&) {
      // rank-deficient J^div is expected for D > N - 1 without an ancilla
    }
  }
  if (pa.povm) {
    rec.put("povm_outcomes", static_cast<double>(pa.povm->projectors.size()));
    rec.put("povm_completeness", povm_completeness_residual(*pa.povm));
  }
  if (pa.V) {
    rec.put("V", pa.V->entries);
    rec.put("bias", pa.bias);
    rec.put("bias_norm", pa.bias.norm());
  }
  if (pa.V && pa.J.inverse) {
    const RealMatrix g = pa.V->entries - *pa.J.inverse;
    rec.put("V_minus_J_inv_norm", g.norm());
    rec.put("gap_min_eigenvalue", pa.gap ? pa.gap->min_eigenvalue : kNaN);
    CounterRng rng(sc.sweep.seed, 0xC0DE0000ull + static_cast<std::uint64_t>(index));
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
      const RealVector u = random_unit(rng, d);
      worst = std::min(worst, u.dot(g * u));
    }
    rec.put("cr_direction_min", worst);
  }
  std::string err = pa.fisher_error;
  if (!pa.estimator_error.empty()) err += (err.empty() ? "" : "; ") + pa.estimator_error;
  rec.error = err;
}

void bell_point(const Scenario& sc, const ParamVector& eps, PointWork& w) {
  const auto& ch = *sc.channel;
  auto& rec = w.rec;
  const auto& pa = *w.pa;
  const DeltaMatrix dm = delta_matrix(ch, sc.input, eps, DeltaVariant::Full, bell_frame());
  rec.put("delta_printed_residual", max_abs(dm.entries - bell_printed_delta(eps)));
  RealVector expected(3);
  expected << eps(0), eps(1), 0.0;
  std::sort(expected.data(), expected.data() + 3, std::greater<>());
  rec.put("shift_residual", (pa.spec.probs.tail(3) - expected).cwiseAbs().maxCoeff());
  rec.put("J11_eps1_minus_1", std::abs(pa.J.entries(0, 0) * eps(0) - 1.0));
  rec.put("J22_eps2_minus_1", std::abs(pa.J.entries(1, 1) * eps(1) - 1.0));
  if (pa.J.inverse) {
    RealMatrix diag = RealMatrix::Zero(2, 2);
    diag(0, 0) = eps(0);
    diag(1, 1) = eps(1);
    rec.put("J_inv_minus_diag_eps_norm", (*pa.J.inverse - diag).norm());
  }
}

void pauli_point(const Scenario& sc, const ParamVector& eps, PointWork& w) {
  auto& rec = w.rec;
  const auto& pa = *w.pa;
  const RealMatrix jc = pauli_fisher(pauli_forms(sc.input), eps);
  rec.put("J_closed", jc);
  rec.put("J_closed_abs_err", (pa.J.entries - jc).cwiseAbs().maxCoeff());
  if (pa.J.inverse) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(*pa.J.inverse);
    RealVector ev(2);
    ev << es.eigenvalues()(1), es.eigenvalues()(0);
    rec.put("J_inv_eigenvalues", ev);
    if (pa.V) {
      const RealVector u = es.eigenvectors().col(1);
      rec.put("bad_direction_gap", u.dot((pa.V->entries - *pa.J.inverse) * u));
    }
  }
}

void threelevel_point(const Scenario& sc, const ParamVector& eps, PointWork& w) {
  const auto& ch = *sc.channel;
  auto& rec = w.rec;
  const LambdaMatrix lm = lambda_matrix(ch, sc.input, eps);
  const DeltaMatrix lead = delta_matrix(ch, sc.input, eps, DeltaVariant::Leading);
  const RealVector red = reduced_eigenvalues(lm, ch.dim());
  const RealVector ds = delta_spectrum(lead);
  rec.put("lambda_eigenvalues", red);
  rec.put("lambda_vs_leading_delta", (red - ds).cwiseAbs().maxCoeff());
  rec.put("trace_power_residual", trace_power_check(lead, lm, ch.dim() - 1));
  const ThreeLevelForms f = threelevel_forms(ch, sc.input);
  rec.put("delta_p_closed", threelevel_dp(f, eps));
  rec.put("J_inv_closed", threelevel_jinv(f, eps));
}

void monte_carlo(const Scenario& sc, std::vector<PointWork>& work) {
  const int workers = resolve_workers(sc.sweep.workers);
  for (std::size_t i = 0; i < work.size(); ++i) {
    auto& w = work[i];
    if (!w.pa || !w.pa->povm || !w.pa->V) continue;
    const std::uint64_t seed = splitmix64(sc.sweep.seed ^ splitmix64(i + 1));
    try {
      const MSEMatrix mc = sample_measurements(*w.pa->povm, *sc.channel, sc.input, w.pa->eps,
                                               sc.sweep.shots, seed, workers);
      const RealMatrix& v = w.pa->V->entries;
      double z = 0.0;
      for (Eigen::Index r = 0; r < v.rows(); ++r)
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
          const double diff = std::abs(mc.entries(r, c) - v(r, c));
          const double se = mc.standard_error(r, c);
          z = std::max(z, se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : kNaN));
        }
      w.rec.put("V_mc", mc.entries);
      w.rec.put("V_mc_standard_error", mc.standard_error);
      w.rec.put("V_mc_zscore_max", z);
      w.rec.put("mc_shots", static_cast<double>(mc.sample_count));
    } catch (const Error& e) {
      w.rec.error += (w.rec.error.empty() ? "" : "; ") + std::string(e.what());
    }
  }
}

void threelevel_closed_checks(const Scenario& sc, ReportBuilder& rb) {
  const auto& ch = *sc.channel;
  const ThreeLevelForms f = threelevel_forms(ch, sc.input);
  double dp_lambda = 0.0, dp_delta = 0.0, jinv_err = 0.0, quantum_err = 0.0;
  try {
    for (double s : {1e-3, 2e-3}) {
      const ParamVector e = s * sc.sweep.direction;
      const RealVector dp = threelevel_dp(f, e);
      const RealVector red = reduced_eigenvalues(lambda_matrix(ch, sc.input, e), ch.dim());
      const RealVector ds = delta_spectrum(delta_matrix(ch, sc.input, e, DeltaVariant::Leading));
      for (int k = 0; k < 2; ++k) {
        dp_lambda = std::max(dp_lambda, std::abs(red(k) - dp(k)) / std::abs(dp(k)));
        dp_delta = std::max(dp_delta, std::abs(ds(k) - dp(k)) / std::abs(dp(k)));
      }
      const RealMatrix jc = threelevel_jinv(f, e);
      const FisherMatrix lead = fisher_inverse(divergent_fisher_leading(ch, sc.input, e));
      const FisherMatrix q = fisher_inverse(quantum_fisher_pure(ch, sc.input, e));
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          jinv_err = std::max(jinv_err, std::abs((*lead.inverse)(r, c) - jc(r, c)) / std::abs(jc(r, c)));
          quantum_err = std::max(quantum_err, std::abs((*q.inverse)(r, c) - jc(r, c)) / std::abs(jc(r, c)));
        }
    }
  } catch (const Error& e) {
    rb.flag("closed_form_evaluation", "closed forms evaluate at s in {1e-3, 2e-3}", false, kNaN, e.what());
    return;
  }
  rb.bound("closed_form_delta_p_lambda", "dp+- closed form vs Lambda eigenvalues, relative", dp_lambda, 1e-6);
  rb.bound("closed_form_delta_p_delta", "dp+- closed form vs leading Delta eigenvalues, relative", dp_delta, 1e-6);
  rb.bound("closed_form_J_inverse", "J^{11}, J^{22}, J^{12} closed forms vs inverse divergent Fisher, relative",
           jinv_err, 1e-6);
  rb.bound("closed_form_vs_quantum_J_inverse", "closed forms vs inverse quantum Fisher, relative", quantum_err,
           1e-6, true, true);
}

void pauli_limit_checks(const Scenario& sc, const std::vector<PointWork>& work, ReportBuilder& rb) {
  std::vector<double> s;
  std::vector<RealMatrix> y;
  for (std::size_t i = 0; i < work.size() && y.size() < 3; ++i) {
    const auto* q = work[i].rec.find("J_inv");
    if (!q) break;
    RealMatrix m(2, 2);
    m << q->values[0], q->values[1], q->values[2], q->values[3];
    s.push_back(work[i].rec.scale);
    y.push_back(m);
  }
  if (y.size() < 3) {
    rb.flag("J_inv_zero_limit_annihilates", "extrapolated J^-1(0) annihilates d|y|^2", false, kNaN,
            "needs J^-1 at the three smallest scales");
    rb.flag("J_inv_zero_limit_rank1", "extrapolated J^-1(0) equals w w^T / Phi", false, kNaN,
            "needs J^-1 at the three smallest scales");
    return;
  }
  const RealMatrix j0 = lagrange_at_zero(s, y);
  const PauliForms p = pauli_forms(sc.input);
  RealVector v(2);
  v << 2.0 * p.r.dot(p.d1), 2.0 * p.r.dot(p.d2);
  RealVector w(2);
  w << v(1), -v(0);
  const double phi = (v(1) * p.d1 - v(0) * p.d2).squaredNorm();
  const double annihilated = (j0 * v).norm();
  const double rank1 = (j0 - w * w.transpose() / phi).cwiseAbs().maxCoeff();
  rb.bound("J_inv_zero_limit_annihilates", "|J^-1(0) (d1|y|^2, d2|y|^2)| <= 1e-8", annihilated, 1e-8);
  rb.bound("J_inv_zero_limit_rank1", "max |J^-1(0) - w w^T / Phi| <= 1e-8", rank1, 1e-8);
}

void per_kind_checks(const Scenario& sc, const std::vector<PointWork>& work, Report& r) {
  ReportBuilder rb(r);
  const auto& pts = r.points;
  const auto& scales = sc.sweep.scales;
  const std::vector<double> ones(scales.size(), 1.0);
  const int d = sc.channel->num_params();

  std::string errs;
  int nerr = 0;
  for (const auto& p : pts)
    if (!p.error.empty()) {
      ++nerr;
      errs += (errs.empty() ? "" : " | ") + ("point " + std::to_string(p.index) + ": " + p.error);
    }
  rb.flag("point_errors", "no module error at any sweep point", nerr == 0, nerr, errs);
  rb.bound("tpcp", "TPCP residual <= 1e-10", series_max(column(pts, "tpcp_residual")), 1e-10);
  {
    const double m = series_min(column(pts, "min_probability"));
    rb.flag("positivity", "output eigenvalues >= -1e-10", m >= -1e-10, m, "min " + fmt(m));
  }
  rb.order("first_order_consistency", "first_order_residual", "Gamma - 1 - sum eps d_mu Gamma(0) is O(s^2)",
           scales, column(pts, "first_order_residual"), scales, 1.85, 2.15, true);

  std::vector<double> dets = column(pts, "det_nondegeneracy"), norms = column(pts, "det_normalized");
  const bool gate_expected = sc.kind != ScenarioKind::Pauli2;
  {
    NondegeneracyGate g;
    std::string detail;
    try {
      g = nondegeneracy_gate(scales, dets, norms, d);
      detail = g.order.vanishing ? "determinant vanishes"
                                 : "det slope " + fmt(g.order.fit.slope) + ", min normalized " +
                                       fmt(g.min_normalized);
    } catch (const Error& e) {
      detail = e.what();
    }
    rb.flag("nondegeneracy_gate", "det of the sqrt-probability Gram scales as s^-D and stays non-degenerate",
            g.passed, g.min_normalized, detail, gate_expected);
  }

  auto cr_direction = [&] {
    const auto cr = column(pts, "cr_direction_min");
    bool ok = all_finite(cr);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cr.size() && ok; ++i) {
      ok = cr[i] >= -1e-9 * scales[i];
      worst = std::min(worst, cr[i] / scales[i]);
    }
    rb.flag("cramer_rao_direction", "u (V - J^-1) u >= -1e-9 s for 100 random unit u at every point", ok,
            all_finite(cr) ? worst : kNaN, "min over points of u(V-J^-1)u / s");
  };

  switch (sc.kind) {
    case ScenarioKind::AncillaBell: {
      rb.bound("delta_matrix_exact", "Delta in the printed frame equals the printed matrix",
               series_max(column(pts, "delta_printed_residual")), 1e-14);
      rb.bound("shifts_exact", "eigenvalue shifts equal (eps2, eps1, 0)", series_max(column(pts, "shift_residual")),
               1e-14);
      double worst1 = 0.0, worst2 = 0.0;
      bool ok1 = true, ok2 = true;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double l1 = pts[i].get("eps", 0) + pts[i].get("eps", 1);
        const double a = pts[i].get("J11_eps1_minus_1"), b = pts[i].get("J22_eps2_minus_1");
        ok1 = ok1 && a <= 10.0 * l1;
        ok2 = ok2 && b <= 10.0 * l1;
        worst1 = std::max(worst1, a / l1);
        worst2 = std::max(worst2, b / l1);
      }
      rb.flag("J11_leading", "|J11 eps1 - 1| <= 10 |eps|_1", ok1, worst1, "max ratio to |eps|_1");
      rb.flag("J22_leading", "|J22 eps2 - 1| <= 10 |eps|_1", ok2, worst2, "max ratio to |eps|_1");
      rb.order("J_inv_diag_order2", "J_inv_minus_diag_eps_norm", "|J^-1 - diag(eps)| is O(s^2)", scales,
               column(pts, "J_inv_minus_diag_eps_norm"), scales, 1.8, 2.2, false);
      rb.order("unbiasedness_order2", "bias_norm", "unbiasedness residual is O(s^2)", scales,
               column(pts, "bias_norm"), scales, 1.8, 2.2, true);
      rb.order("V_minus_J_inv_order2", "V_minus_J_inv_norm", "|V - J^-1|_F is O(s^2)", scales,
               column(pts, "V_minus_J_inv_norm"), scales, 1.8, 2.2, true);
      cr_direction();
      break;
    }
    case ScenarioKind::Pauli2: {
      rb.bound("J_closed_form", "pipeline J vs Bloch closed form, absolute", series_max(column(pts, "J_closed_abs_err")),
               1e-8);
      rb.order("J_inv_eigen_order0", "J_inv_eigenvalues[0]", "large eigenvalue of J^-1 is O(1)", scales,
               column(pts, "J_inv_eigenvalues", 0), ones, -0.15, 0.15, false);
      rb.order("J_inv_eigen_order1", "J_inv_eigenvalues[1]", "small eigenvalue of J^-1 is O(s)", scales,
               column(pts, "J_inv_eigenvalues", 1), scales, 0.85, 1.15, false);
      pauli_limit_checks(sc, work, rb);
      std::vector<double> bad_gap = column(pts, "bad_direction_gap");
      for (double& x : bad_gap) x = std::abs(x);
      rb.order("bad_direction_gap", "bad_direction_gap", "|u_bad (V - J^-1) u_bad| has order <= 0.3", scales, bad_gap,
               ones, -std::numeric_limits<double>::infinity(), 0.3, false);
      rb.order("attainment", "V_minus_J_inv_norm", "|V - J^-1|_F is O(s^2)", scales,
               column(pts, "V_minus_J_inv_norm"), scales, 1.8, 2.2, true, false);
      break;
    }
    case ScenarioKind::ThreeLevel: {
      threelevel_closed_checks(sc, rb);
      rb.bound("lambda_reduction", "Lambda eigenvalues equal leading Delta eigenvalues",
               series_max(column(pts, "lambda_vs_leading_delta")), 1e-12);
      rb.bound("trace_power_identity", "Tr Delta^k = Tr Lambda^k", series_max(column(pts, "trace_power_residual")),
               1e-11);
      rb.order("unbiasedness_order2", "bias_norm", "unbiasedness residual is O(s^2)", scales,
               column(pts, "bias_norm"), scales, 1.8, 2.2, true);
      rb.order("V_minus_J_inv_order2", "V_minus_J_inv_norm", "|V - J^-1|_F is O(s^2)", scales,
               column(pts, "V_minus_J_inv_norm"), scales, 1.8, 2.2, true);
      cr_direction();
      rb.order("V_minus_J_div_inv_order2", "V_minus_J_div_inv_norm", "|V - (J^div)^-1|_F is O(s^2)", scales,
               column(pts, "V_minus_J_div_inv_norm"), scales, 1.8, 2.2, true, true, true);
      break;
    }
    case ScenarioKind::Custom: {
      rb.order("unbiasedness_order2", "bias_norm", "unbiasedness residual is O(s^2)", scales,
               column(pts, "bias_norm"), scales, 1.8, 2.2, true);
      rb.order("V_minus_J_inv_order2", "V_minus_J_inv_norm", "|V - J^-1|_F is O(s^2)", scales,
               column(pts, "V_minus_J_inv_norm"), scales, 1.8, 2.2, true);
      cr_direction();
      break;
    }
  }

  if (sc.sweep.shots > 0) {
    const auto z = column(pts, "V_mc_zscore_max");
    const double m = series_max(z);
    rb.flag("monte_carlo_4se", "sampled V within 4 standard errors of analytic V", std::isfinite(m) && m <= 4.0, m,
            std::to_string(sc.sweep.shots) + " shots per point");
  }
}

}  // namespace

std::string library_version() { return LNEST_VERSION; }

std::vector<std::string> scenario_names() { return {"threelevel", "pauli2", "ancilla-bell"}; }

json scenario_default_config(const std::string& name) {
  if (name == "threelevel") {
    const double c = 1.0 / std::sqrt(3.0);
    return {{"kind", "threelevel"},
            {"name", "threelevel"},
            {"channel", channel_doc_threelevel()},
            {"input", {c, c, c}},
            {"sweep", {{"direction", {0.5, 0.5}}, {"seed", kDefaultSeed}, {"shots", 0}}},
            {"raise", "strict"}};
  }
  if (name == "pauli2") {
    return {{"kind", "pauli2"},
            {"name", "pauli2"},
            {"channel", channel_doc_pauli(false)},
            {"input_bloch", {1.0, 1.0, 1.0}},
            {"sweep", {{"direction", {0.5, 0.5}}, {"seed", kDefaultSeed}, {"shots", 0}}},
            {"raise", "pseudo-inverse"}};
  }
  if (name == "ancilla-bell") {
    return {{"kind", "ancilla-bell"},
            {"name", "ancilla-bell"},
            {"channel", channel_doc_pauli(true)},
            {"input", vector_to_json(bell_input())},
            {"sweep", {{"direction", {1.0 / 3.0, 2.0 / 3.0}}, {"seed", kDefaultSeed}, {"shots", 0}}},
            {"raise", "strict"}};
  }
  bad("unknown scenario '" + name + "'");
}

Scenario make_scenario(const std::string& name) { return scenario_from_config(scenario_default_config(name)); }

Scenario scenario_threelevel() { return make_scenario("threelevel"); }
Scenario scenario_pauli2() { return make_scenario("pauli2"); }
Scenario scenario_ancilla_bell() { return make_scenario("ancilla-bell"); }

Scenario scenario_from_config(const json& cfg) {
  Scenario sc;
  try {
    if (!cfg.is_object()) bad("scenario config must be an object");
    sc.kind = parse_kind(cfg.value("kind", std::string("custom")));
    sc.name = cfg.value("name", std::string(kind_name(sc.kind)));
    if (!cfg.contains("channel")) bad("missing 'channel'");
    sc.channel = std::make_shared<const LowNoiseChannel>(channel_from_config(cfg["channel"]));
    const int d = sc.channel->num_params();
    if (cfg.contains("input") && cfg.contains("input_bloch")) bad("give either 'input' or 'input_bloch'");
    if (cfg.contains("input")) {
      sc.input = vector_from_json(cfg["input"]);
    } else if (cfg.contains("input_bloch")) {
      if (sc.channel->dim() != 2) bad("input_bloch needs a qubit channel");
      sc.input = bloch_state(real_vector_from_json(cfg["input_bloch"]));
    } else {
      bad("missing 'input'");
    }
    const json sw = cfg.value("sweep", json::object());
    if (!sw.is_object()) bad("'sweep' must be an object");
    sc.sweep.direction = sw.contains("direction") ? real_vector_from_json(sw["direction"])
                                                  : RealVector::Constant(d, 1.0 / d);
    if (sw.contains("scales")) {
      const RealVector s = real_vector_from_json(sw["scales"]);
      sc.sweep.scales.assign(s.data(), s.data() + s.size());
    }
    sc.sweep.seed = sw.value("seed", kDefaultSeed);
    sc.sweep.shots = sw.value("shots", std::int64_t{0});
    sc.sweep.workers = sw.value("workers", 0);
    const std::string raise = cfg.value("raise", std::string("strict"));
    if (raise == "strict")
      sc.raise = RaisePolicy::Strict;
    else if (raise == "pseudo-inverse")
      sc.raise = RaisePolicy::PseudoInverse;
    else
      bad("raise must be 'strict' or 'pseudo-inverse'");
    sc.summary = cfg.value("summary", std::string());
  } catch (const json::exception& e) {
    bad(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    bad(e.what());
  }
  sc.config = cfg;
  sc.config.erase("sweep");
  if (sc.summary.empty()) {
    switch (sc.kind) {
      case ScenarioKind::ThreeLevel: sc.summary = "qutrit, two dissipators, one Kraus term each"; break;
      case ScenarioKind::Pauli2: sc.summary = "qubit bit-flip plus phase-flip, no ancilla"; break;
      case ScenarioKind::AncillaBell: sc.summary = "Pauli channel on one half of a Bell pair"; break;
      case ScenarioKind::Custom: sc.summary = "user-supplied channel"; break;
    }
  }
  validate_scenario(sc);
  return sc;
}

void validate_scenario(const Scenario& sc) {
  if (!sc.channel) bad("scenario has no channel");
  const auto& ch = *sc.channel;
  const int d = ch.num_params();
  if (sc.input.size() != ch.dim()) bad("input dimension does not match the channel");
  if (std::abs(sc.input.norm() - 1.0) > 1e-12) bad("input must be normalized");
  const auto& sw = sc.sweep;
  if (sw.direction.size() != d) bad("direction needs one component per parameter");
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(sw.direction(i) > 0.0)) bad("direction components must be positive");
  if (std::abs(sw.direction.sum() - 1.0) > 1e-12) bad("direction components must sum to 1");
  if (sw.scales.empty()) bad("scales must not be empty");
  for (std::size_t i = 0; i < sw.scales.size(); ++i) {
    if (!(sw.scales[i] > 0.0) || !std::isfinite(sw.scales[i])) bad("scales must be positive");
    if (i > 0 && !(sw.scales[i] > sw.scales[i - 1])) bad("scales must be strictly increasing");
  }
  if (sw.shots < 0) bad("shots must be >= 0");

  switch (sc.kind) {
    case ScenarioKind::ThreeLevel: {
      if (ch.dim() != 3 || d != 2) bad("threelevel needs a 3-level channel with two parameters");
      const auto k = ch.k_mu();
      if (k[0] != 1 || k[1] != 1) bad("threelevel needs exactly one Kraus term per parameter");
      const ThreeLevelForms f = threelevel_forms(ch, sc.input);
      if (!(f.det > 1e-9 * std::max(f.a * f.b, 1e-300)))
        bad("the covariance matrix of M1, M2 on the input is singular");
      const double n1 = sw.direction(0), n2 = sw.direction(1);
      if (std::abs(n1 * f.a - n2 * f.b) <= 1e-9 * (n1 * f.a + n2 * f.b))
        bad("direction makes eps1 dM11 - eps2 dM22 vanish, where the closed forms are singular");
      break;
    }
    case ScenarioKind::Pauli2:
      if (ch.dim() != 2 || d != 2 || !has_terms(ch, pauli_x(), pauli_z()))
        bad("pauli2 needs the qubit channel with C_1 = sigma_x and C_2 = sigma_z");
      break;
    case ScenarioKind::AncillaBell: {
      const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
      if (ch.dim() != 4 || d != 2 ||
          !has_terms(ch, tensor_product(pauli_x(), one), tensor_product(pauli_z(), one)))
        bad("ancilla-bell needs the ancilla-extended Pauli channel");
      if (std::abs(bell_input().dot(sc.input)) < 1.0 - 1e-12) bad("ancilla-bell input must be the Bell state");
      if (std::abs(sw.direction(0) - sw.direction(1)) <= 1e-9)
        bad("ancilla-bell direction needs eps1 != eps2; equal components make the shifts degenerate");
      break;
    }
    case ScenarioKind::Custom:
      break;
  }
}

void set_direction(Scenario& sc, const RealVector& direction) {
  if (direction.size() == 0 || !(direction.minCoeff() > 0.0)) bad("direction components must be positive");
  Scenario next = sc;
  next.sweep.direction = direction / direction.sum();
  validate_scenario(next);
  sc = std::move(next);
}

void set_scales(Scenario& sc, const std::vector<double>& scales) {
  Scenario next = sc;
  next.sweep.scales = scales;
  validate_scenario(next);
  sc = std::move(next);
}

LowNoiseChannel random_channel(int dim, int D, const std::vector<int>& k_mu, std::uint64_t seed,
                               bool with_hamiltonian) {
  if (dim < 2 || dim > 8) throw Error(ErrorCode::InvalidArgument, "random_channel needs 2 <= N <= 8");
  if (D < 1 || D > dim * dim - 1) throw Error(ErrorCode::InvalidArgument, "random_channel needs 1 <= D <= N^2 - 1");
  if (static_cast<int>(k_mu.size()) != D) throw Error(ErrorCode::InvalidArgument, "need one K_mu per parameter");
  CounterRng rng(seed, 0x5EED0001ull);
  std::vector<CTerm> terms;
  for (int mu = 0; mu < D; ++mu) {
    if (k_mu[mu] < 1) throw Error(ErrorCode::InvalidArgument, "K_mu must be >= 1");
    for (int a = 0; a < k_mu[mu]; ++a) {
      ComplexMatrix m(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) m(i, k) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
      Eigen::JacobiSVD<ComplexMatrix> svd(m);
      m /= svd.singularValues()(0);
      terms.push_back({mu, m});
    }
  }
  std::vector<ComplexMatrix> gens;
  if (with_hamiltonian) {
    for (int mu = 0; mu < D; ++mu) {
      ComplexMatrix a(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) a(i, k) = cplx(rng.normal(), rng.normal());
      ComplexMatrix g = 0.5 * (a + a.adjoint());
      const auto sp = hermitian_eigendecompose_sym(g);
      g /= std::max(std::abs(sp.values(0)), std::abs(sp.values(dim - 1)));
      gens.push_back(hermitian_part(g));
    }
  }
  return LowNoiseChannel::sqrt_completion(dim, D, std::move(terms), std::move(gens));
}

ComplexVector random_pure_state(int dim, std::uint64_t seed) {
  CounterRng rng(seed, 0x5EED0002ull);
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(rng.normal(), rng.normal());
  return v / v.norm();
}

Report run_sweep(const Scenario& sc) {
  validate_scenario(sc);
  Report r;
  r.scenario = sc.name;
  r.seed = sc.sweep.seed;
  r.config_hash = config_hash(effective_config(sc));
  r.version = library_version();

  const auto& scales = sc.sweep.scales;
  const int n = static_cast<int>(scales.size());
  std::vector<PointWork> work(n);
  parallel_for(n, sc.sweep.workers, [&](int i) {
    auto& w = work[i];
    w.rec.index = i;
    w.rec.scale = scales[i];
    const ParamVector eps = scales[i] * sc.sweep.direction;
    try {
      generic_point(sc, eps, i, w);
      switch (sc.kind) {
        case ScenarioKind::AncillaBell: bell_point(sc, eps, w); break;
        case ScenarioKind::Pauli2: pauli_point(sc, eps, w); break;
        case ScenarioKind::ThreeLevel: threelevel_point(sc, eps, w); break;
        case ScenarioKind::Custom: break;
      }
    } catch (const Error& e) {
      w.rec.error += (w.rec.error.empty() ? "" : "; ") + std::string(e.what());
    }
  });
  if (sc.sweep.shots > 0) monte_carlo(sc, work);
  for (auto& w : work) r.points.push_back(w.rec);
  per_kind_checks(sc, work, r);
  return r;
}

Report run_random_suite(const SuiteOptions& opts, const std::function<void(const std::string&)>& progress) {
  if (opts.seeds < 0 || opts.mixed_fixtures < 0) throw Error(ErrorCode::InvalidArgument, "negative case count");
  Report r;
  r.scenario = "random-suite";
  r.seed = opts.base_seed;
  r.config_hash = config_hash(json{{"suite", "random"},
                                   {"seeds", opts.seeds},
                                   {"base_seed", opts.base_seed},
                                   {"mixed_fixtures", opts.mixed_fixtures}});
  r.version = library_version();
  const std::vector<double> grid = geometric_grid();
  const int nseed = opts.seeds, nmix = opts.mixed_fixtures;
  std::vector<PointRecord> recs(nseed + nmix);

  parallel_for(nseed + nmix, opts.workers, [&](int idx) {
    auto& rec = recs[idx];
    rec.index = idx;
    const std::uint64_t seed = splitmix64(opts.base_seed + static_cast<std::uint64_t>(idx));
    try {
      if (idx < nseed) {
        const int i = idx;
        const int dim = 2 + i % 3;
        const int d = 1 + (i / 3) % 3;
        const int kmu = 1 + (i / 9) % 2;
        const bool with_h = i % 2 == 0;
        const LowNoiseChannel ch = random_channel(dim, d, std::vector<int>(d, kmu), seed, with_h);
        const ComplexVector phi = random_pure_state(dim, seed);
        CounterRng rng(seed, 0x5EED0003ull);
        RealVector dir(d);
        for (int mu = 0; mu < d; ++mu) dir(mu) = 0.2 + rng.uniform();
        dir /= dir.sum();
        rec.put("N", dim);
        rec.put("D", d);
        rec.put("K", d * kmu);
        rec.put("with_hamiltonian", with_h ? 1.0 : 0.0);
        const ComplexMatrix rho = pure_state(phi);
        const bool reducible = d * kmu <= dim - 1;
        double tpcp = 0.0, pos = std::numeric_limits<double>::infinity(), tp = 0.0, compl_ = 0.0;
        std::vector<double> fo, gap;
        for (double s : grid) {
          const ParamVector eps = s * dir;
          tpcp = std::max(tpcp, tpcp_residual(ch, eps));
          pos = std::min(pos, hermitian_eigendecompose_sym(apply_channel(ch, rho, eps)).values.minCoeff());
          const ComplexMatrix dev = output_deviation(ch, rho, eps);
          ComplexMatrix lin = ComplexMatrix::Zero(dim, dim);
          for (int mu = 0; mu < d; ++mu) lin += eps(mu) * derivative_at_zero(ch, mu, rho);
          fo.push_back((dev - lin).norm());
          if (reducible)
            tp = std::max(tp, trace_power_check(delta_matrix(ch, phi, eps, DeltaVariant::Leading),
                                                lambda_matrix(ch, phi, eps), dim - 1));
          PointOptions po;
          po.weights = dir;
          po.raise = RaisePolicy::PseudoInverse;
          const PointAnalysis pa = analyze_point(ch, phi, eps, po);
          if (!pa.povm) throw Error(ErrorCode::EmptySum, "no estimator: " + pa.estimator_error);
          compl_ = std::max(compl_, povm_completeness_residual(*pa.povm));
          gap.push_back((pa.Jc.entries - pa.Jdiv.entries).norm());
        }
        rec.put("tpcp_max", tpcp);
        rec.put("positivity_min", pos);
        const OrderAssessment fa = assess_order(grid, fo, grid);
        rec.put("first_order_slope", fa.vanishing ? kNaN : fa.fit.slope);
        rec.put("first_order_vanishing", fa.vanishing ? 1.0 : 0.0);
        rec.put("trace_power_max", reducible ? tp : kNaN);
        rec.put("povm_completeness_max", compl_);
        const OrderAssessment ga = assess_order(grid, gap, std::vector<double>(grid.size(), 1.0));
        rec.put("jc_jdiv_slope", ga.vanishing ? 0.0 : ga.fit.slope);
      } else {
        const int j = idx - nseed;
        const int dim = 2 + j % 2;
        const LowNoiseChannel ch = random_channel(dim, 2, {1, 1}, seed, j % 2 == 1);
        const ComplexVector a = random_pure_state(dim, seed ^ 0xA1ull);
        const ComplexVector b = random_pure_state(dim, seed ^ 0xB2ull);
        const ComplexMatrix rho = 0.6 * pure_state(a) + 0.4 * pure_state(b);
        CounterRng rng(seed, 0x5EED0004ull);
        const RealVector u = random_unit(rng, 2);
        ParamVector eps(2);
        eps << 1e-3 * (0.3 + 0.4 * rng.uniform()), 0.0;
        eps(1) = 1e-3 - eps(0);
        const DominanceResult dr = pure_input_dominance(ch, rho, {{0.6, a}, {0.4, b}}, u, eps);
        rec.put("N", dim);
        rec.put("dominance_mixed", dr.mixed);
        rec.put("dominance_best_pure", dr.best_pure);
        rec.put("dominance_holds", dr.holds ? 1.0 : 0.0);
      }
    } catch (const Error& e) {
      rec.error = e.what();
    }
  });

  ReportBuilder rb(r);
  struct Tally {
    int fails = 0;
    double worst = 0.0;
    std::string who;
  };
  auto note = [](Tally& t, int idx, double v, bool fail, bool take_max) {
    if (std::isfinite(v)) t.worst = take_max ? std::max(t.worst, v) : std::min(t.worst, v);
    if (fail) {
      ++t.fails;
      if (t.fails <= 10) t.who += (t.who.empty() ? "" : ",") + std::to_string(idx);
    }
  };
  Tally tpcp, pos{0, std::numeric_limits<double>::infinity(), ""}, fo, tp, compl_, gap{0, std::numeric_limits<double>::infinity(), ""}, dom, errs;
  for (int idx = 0; idx < nseed + nmix; ++idx) {
    const auto& rec = recs[idx];
    if (!rec.error.empty()) {
      note(errs, idx, 1.0, true, true);
      if (progress) progress("case " + std::to_string(idx) + ": ERROR " + rec.error);
      continue;
    }
    bool ok = true;
    if (idx < nseed) {
      const double t = rec.get("tpcp_max"), p = rec.get("positivity_min");
      const double slope = rec.get("first_order_slope");
      const double trp = rec.get("trace_power_max"), c = rec.get("povm_completeness_max");
      const double g = rec.get("jc_jdiv_slope");
      const bool f1 = !(t <= 1e-10), f2 = !(p >= -1e-10);
      const bool f3 = rec.get("first_order_vanishing") == 0.0 && !(std::abs(slope - 2.0) <= 0.15);
      const bool f4 = std::isfinite(trp) && !(trp <= 1e-11);
      const bool f5 = !(c <= 1e-10), f6 = !(g >= -0.2);
      note(tpcp, idx, t, f1, true);
      note(pos, idx, p, f2, false);
      note(fo, idx, std::abs(slope - 2.0), f3, true);
      note(tp, idx, trp, f4, true);
      note(compl_, idx, c, f5, true);
      note(gap, idx, g, f6, false);
      ok = !(f1 || f2 || f3 || f4 || f5 || f6);
    } else {
      const bool f = rec.get("dominance_holds") != 1.0;
      note(dom, idx, rec.get("dominance_mixed") - rec.get("dominance_best_pure"), f, true);
      ok = !f;
    }
    if (progress) progress("case " + std::to_string(idx) + ": " + (ok ? "ok" : "FAIL"));
  }
  auto tally_check = [&](const std::string& name, const std::string& crit, const Tally& t) {
    rb.flag(name, crit, t.fails == 0, t.worst,
            std::to_string(t.fails) + " failing" + (t.who.empty() ? "" : " (cases " + t.who + ")"));
  };
  tally_check("case_errors", "every case completes without a module error", errs);
  tally_check("tpcp", "TPCP residual <= 1e-10 over the sweep", tpcp);
  tally_check("positivity", "output eigenvalues >= -1e-10", pos);
  tally_check("first_order_consistency", "first-order residual slope 2.0 +- 0.15", fo);
  tally_check("trace_power_identity", "Tr Delta^k = Tr Lambda^k within 1e-11 when K <= N-1", tp);
  tally_check("povm_completeness", "POVM completeness residual <= 1e-10", compl_);
  tally_check("jc_jdiv_bounded", "|J^c - J^div| fits order >= -0.2", gap);
  tally_check("pure_input_dominance", "mixed-input Fisher never beats the best pure component", dom);
  r.points = std::move(recs);
  return r;
}

std::vector<Report> run_verify(const SuiteOptions& opts, const std::function<void(const std::string&)>& progress) {
  std::vector<Report> out;
  for (const auto& name : scenario_names()) {
    Scenario sc = make_scenario(name);
    sc.sweep.workers = opts.workers;
    out.push_back(run_sweep(sc));
    if (progress) progress(report_summary(out.back()));
  }
  out.push_back(run_random_suite(opts));
  if (progress) progress(report_summary(out.back()));
  return out;
}

}  // namespace lnest
