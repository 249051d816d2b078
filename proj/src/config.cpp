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

#include "lnest/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace lnest {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

int get_int(const json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_number_integer()) bad(std::string("missing integer '") + key + "'");
  return cfg[key].get<int>();
}

std::vector<CTerm> c_terms_from(const json& cfg, int dim, int d) {
  std::vector<CTerm> out;
  if (!cfg.contains("c_terms") || !cfg["c_terms"].is_array()) bad("missing array 'c_terms'");
  for (const auto& t : cfg["c_terms"]) {
    if (!t.contains("mu") || !t["mu"].is_number_integer()) bad("c_terms entry needs integer 'mu'");
    const int mu = t["mu"].get<int>();
    if (mu < 0 || mu >= d) bad("c_terms 'mu' out of range");
    ComplexMatrix m = matrix_from_json(t.at("matrix"));
    if (m.rows() != dim || m.cols() != dim) bad("c_terms matrix must be dim x dim");
    out.push_back({mu, m});
  }
  return out;
}

// B = sqrt(1 - sum_mu w_mu eps^mu) 1 for channels whose sum_a M^dag M are
// multiples of the identity.
LowNoiseChannel scalar_completion(int dim, int d, std::vector<CTerm> terms) {
  std::vector<double> w(d, 0.0);
  std::vector<ComplexMatrix> s(d, ComplexMatrix::Zero(dim, dim));
  for (const auto& t : terms) s[t.mu] += t.base.adjoint() * t.base;
  const ComplexMatrix one = ComplexMatrix::Identity(dim, dim);
  for (int mu = 0; mu < d; ++mu) {
    w[mu] = s[mu].trace().real() / dim;
    if ((s[mu] - w[mu] * one).norm() > 1e-12 * std::max(1.0, s[mu].norm()))
      bad("scalar_completion needs sum_a M^dag M proportional to the identity");
  }
  BTerm b;
  b.kappa = 1.0;
  for (int mu = 0; mu < d; ++mu) b.linear.push_back(0.5 * w[mu] * one);
  auto total = [w](const ParamVector& e) {
    double x = 0.0;
    for (std::size_t mu = 0; mu < w.size(); ++mu) x += w[mu] * e(mu);
    if (x > 1.0 - 1e-12) throw Error(ErrorCode::TPCPViolation, "eps outside the completion region");
    return x;
  };
  HigherFn hb = [total, one](const ParamVector& e, std::size_t) {
    const double x = total(e);
    return ComplexMatrix((-x / (1.0 + std::sqrt(1.0 - x)) + 0.5 * x) * one);
  };
  HigherDerivFn dhb = [total, one, w](const ParamVector& e, std::size_t, int nu) {
    const double x = total(e);
    return ComplexMatrix(w[nu] * (0.5 - 0.5 / std::sqrt(1.0 - x)) * one);
  };
  return LowNoiseChannel::explicit_form(dim, d, {b}, std::move(terms), hb, {}, dhb, {});
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad("complex entries must be [re, im]");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) bad("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

json vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

ComplexVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad("vector must be a non-empty array");
  ComplexVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

json real_vector_to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector real_vector_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  RealVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad("expected an array of numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

LowNoiseChannel channel_from_config(const json& cfg) {
  try {
    if (!cfg.is_object()) bad("config must be an object");
    const int dim = get_int(cfg, "dim");
    const int d = get_int(cfg, "params");
    if (dim < 1 || dim > 8) bad("dim must be in 1..8");
    if (d < 1) bad("params must be >= 1");
    const std::string builder = cfg.value("builder", std::string("sqrt-completion"));
    auto terms = c_terms_from(cfg, dim, d);
    std::optional<LowNoiseChannel> ch;
    if (builder == "sqrt-completion") {
      std::vector<ComplexMatrix> gens;
      if (cfg.contains("generators")) {
        for (const auto& g : cfg["generators"]) gens.push_back(matrix_from_json(g));
        if (static_cast<int>(gens.size()) != d) bad("need one generator per parameter");
      }
      ch = LowNoiseChannel::sqrt_completion(dim, d, std::move(terms), std::move(gens));
    } else if (builder == "explicit") {
      if (cfg.value("scalar_completion", false)) {
        ch = scalar_completion(dim, d, std::move(terms));
      } else {
        if (!cfg.contains("b_terms") || !cfg["b_terms"].is_array()) bad("explicit builder needs 'b_terms'");
        std::vector<BTerm> bs;
        for (const auto& b : cfg["b_terms"]) {
          BTerm bt;
          bt.kappa = complex_from_json(b.at("kappa"));
          for (const auto& l : b.at("linear")) bt.linear.push_back(matrix_from_json(l));
          bs.push_back(bt);
        }
        ch = LowNoiseChannel::explicit_form(dim, d, std::move(bs), std::move(terms));
      }
    } else {
      bad("unknown builder '" + builder + "'");
    }
    if (cfg.value("ancilla", false)) ch = ancilla_extend(*ch);
    return *ch;
  } catch (const json::exception& e) {
    bad(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    bad(e.what());
  }
}

json channel_to_config(const LowNoiseChannel& ch) {
  if (ch.has_higher())
    throw Error(ErrorCode::InvalidArgument, "channel with higher-order closures has no config form");
  json cfg;
  cfg["dim"] = ch.dim();
  cfg["params"] = ch.num_params();
  json terms = json::array();
  for (const auto& c : ch.c_terms()) terms.push_back({{"mu", c.mu}, {"matrix", matrix_to_json(c.base)}});
  cfg["c_terms"] = terms;
  if (ch.builder() == Builder::SqrtCompletion) {
    cfg["builder"] = "sqrt-completion";
    if (!ch.generators().empty()) {
      json g = json::array();
      for (const auto& m : ch.generators()) g.push_back(matrix_to_json(m));
      cfg["generators"] = g;
    }
  } else {
    cfg["builder"] = "explicit";
    json bs = json::array();
    for (const auto& b : ch.b_terms()) {
      json lin = json::array();
      for (const auto& m : b.linear) lin.push_back(matrix_to_json(m));
      bs.push_back({{"kappa", complex_to_json(b.kappa)}, {"linear", lin}});
    }
    cfg["b_terms"] = bs;
  }
  return cfg;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

std::string config_hash(const json& cfg) {
  const std::string s = cfg.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lnest
