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

#include "lnest/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lnest {

namespace {

std::vector<ComplexMatrix> to_basis(const ComplexMatrix& u, const std::vector<ComplexMatrix>& ops) {
  std::vector<ComplexMatrix> out;
  out.reserve(ops.size());
  for (const auto& op : ops) out.push_back(u.adjoint() * op * u);
  return out;
}

void check_drho(const OutputSpectrum& spec, const std::vector<ComplexMatrix>& drho) {
  for (const auto& d : drho)
    if (d.rows() != spec.basis.rows() || d.cols() != spec.basis.rows())
      throw Error(ErrorCode::DimensionMismatch, "derivative and state differ in dimension");
}

RealMatrix symmetrize(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

double default_support_threshold(int dim) { return 1e-12 * dim; }

SpectralDerivatives spectral_derivatives(OutputSpectrum& spec,
                                         const std::vector<ComplexMatrix>& drho,
                                         const RealVector& weights) {
  check_drho(spec, drho);
  const Eigen::Index n = spec.probs.size();
  const int d = static_cast<int>(drho.size());
  double small = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) small = std::max(small, std::abs(spec.probs(k)));
  const double tol = 1e-9 * std::max(small, 1e-300);

  Eigen::Index k0 = 0;
  while (k0 < n) {
    Eigen::Index k1 = k0;
    while (k1 + 1 < n && std::abs(spec.probs(k1) - spec.probs(k1 + 1)) <= tol) ++k1;
    const Eigen::Index len = k1 - k0 + 1;
    if (len > 1) {
      const ComplexMatrix uc = spec.basis.middleCols(k0, len);
      ComplexMatrix mix = ComplexMatrix::Zero(len, len);
      for (int mu = 0; mu < d; ++mu) {
        const double w = mu < weights.size() ? weights(mu) : 1.0;
        mix += w * (uc.adjoint() * drho[mu] * uc);
      }
      const auto sp = hermitian_eigendecompose_sym(mix);
      spec.basis.middleCols(k0, len) = uc * sp.vectors;
    }
    k0 = k1 + 1;
  }
  fix_phases(spec.basis, spec.input);

  SpectralDerivatives out;
  out.drho = drho;
  out.in_basis = to_basis(spec.basis, drho);
  out.dprobs.resize(d, n);
  for (int mu = 0; mu < d; ++mu)
    for (Eigen::Index k = 0; k < n; ++k) out.dprobs(mu, k) = out.in_basis[mu](k, k).real();
  return out;
}

SLDSet sld_operators(const OutputSpectrum& spec, const std::vector<ComplexMatrix>& drho) {
  check_drho(spec, drho);
  const Eigen::Index n = spec.probs.size();
  SLDSet out;
  out.support_threshold = default_support_threshold(static_cast<int>(n));
  const auto db = to_basis(spec.basis, drho);
  for (const auto& d : db) {
    ComplexMatrix l = ComplexMatrix::Zero(n, n);
    int dropped = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double s = spec.probs(i) + spec.probs(j);
        if (s > out.support_threshold)
          l(i, j) = 2.0 * d(i, j) / s;
        else
          ++dropped;
      }
    out.dropped_pairs = std::max(out.dropped_pairs, dropped);
    out.operators.push_back(hermitian_part(spec.basis * l * spec.basis.adjoint()));
  }
  return out;
}

FisherMatrix quantum_fisher(const OutputSpectrum& spec, const SLDSet& slds,
                            const std::vector<ComplexMatrix>& drho) {
  check_drho(spec, drho);
  const Eigen::Index n = spec.probs.size();
  const int d = static_cast<int>(drho.size());
  const double thr = slds.support_threshold > 0.0 ? slds.support_threshold
                                                  : default_support_threshold(static_cast<int>(n));
  const auto db = to_basis(spec.basis, drho);
  FisherMatrix fm;
  fm.kind = FisherKind::Quantum;
  fm.entries = RealMatrix::Zero(d, d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu; nu < d; ++nu) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double s = spec.probs(i) + spec.probs(j);
          if (s <= thr) continue;
          acc += (db[mu](i, j) * std::conj(db[nu](i, j))).real() * 2.0 / s;
        }
      fm.entries(mu, nu) = fm.entries(nu, mu) = acc;
    }
  return fm;
}

RealMatrix sld_fisher(const OutputSpectrum& spec, const SLDSet& slds) {
  const ComplexMatrix rho =
      spec.basis * spec.probs.cast<cplx>().asDiagonal() * spec.basis.adjoint();
  const int d = static_cast<int>(slds.operators.size());
  RealMatrix out(d, d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      const auto& a = slds.operators[mu];
      const auto& b = slds.operators[nu];
      out(mu, nu) = 0.5 * (rho * (a * b + b * a)).trace().real();
    }
  return out;
}

FisherMatrix divergent_fisher(const EigenShifts& shifts, const RealMatrix& dshifts) {
  if (dshifts.cols() != shifts.values.size())
    throw Error(ErrorCode::DimensionMismatch, "one derivative column per shift expected");
  const Eigen::Index d = dshifts.rows();
  FisherMatrix fm;
  fm.kind = FisherKind::Divergent;
  fm.entries = RealMatrix::Zero(d, d);
  int used = 0;
  for (Eigen::Index k = 0; k < shifts.values.size(); ++k) {
    if (shifts.order[k] != ShiftOrder::Order1) continue;
    const RealVector g = dshifts.col(k);
    fm.entries += g * g.transpose() / shifts.values(k);
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::EmptySum, "no order-1 eigenvalue shift");
  fm.entries = symmetrize(fm.entries);
  return fm;
}

FisherMatrix classical_fisher(const OutputSpectrum& spec, const RealMatrix& dprobs) {
  const Eigen::Index n = spec.probs.size();
  if (dprobs.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "one derivative column per probability expected");
  const double thr = default_support_threshold(static_cast<int>(n));
  FisherMatrix fm;
  fm.kind = FisherKind::Classical;
  fm.entries = RealMatrix::Zero(dprobs.rows(), dprobs.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    if (spec.probs(k) <= thr) continue;
    const RealVector g = dprobs.col(k);
    fm.entries += g * g.transpose() / spec.probs(k);
  }
  fm.entries = symmetrize(fm.entries);
  return fm;
}

double classical_fisher_form_gap(const OutputSpectrum& spec, const RealMatrix& dprobs) {
  const Eigen::Index n = spec.probs.size();
  const double thr = default_support_threshold(static_cast<int>(n));
  RealMatrix root = RealMatrix::Zero(dprobs.rows(), dprobs.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    if (spec.probs(k) <= thr) continue;
    const RealVector g = dprobs.col(k) / (2.0 * std::sqrt(spec.probs(k)));
    root += 4.0 * g * g.transpose();
  }
  const RealMatrix direct = classical_fisher(spec, dprobs).entries;
  return (direct - root).norm() / std::max(1.0, direct.norm());
}

double nondegeneracy_det(const OutputSpectrum& spec, const RealMatrix& dprobs) {
  return (classical_fisher(spec, dprobs).entries / 4.0).determinant();
}

double normalized_det(const RealMatrix& g) {
  double prod = 1.0;
  for (Eigen::Index k = 0; k < g.rows(); ++k) prod *= g(k, k);
  if (!(prod > 0.0)) return 0.0;
  return g.determinant() / prod;
}

NondegeneracyGate nondegeneracy_gate(const std::vector<double>& scales,
                                     const std::vector<double>& dets,
                                     const std::vector<double>& normalized, int D) {
  NondegeneracyGate gate;
  gate.min_normalized = normalized.empty() ? 0.0
                                           : *std::min_element(normalized.begin(), normalized.end());
  std::vector<double> mag(dets.size());
  for (std::size_t t = 0; t < dets.size(); ++t) mag[t] = std::abs(dets[t]);
  bool positive = std::all_of(mag.begin(), mag.end(), [](double v) { return v > 0.0; });
  if (positive && mag.size() >= 4) {
    gate.order.fit = power_order_fit(scales, mag);
    gate.order.fitted = true;
  }
  gate.passed = gate.order.fitted && std::abs(gate.order.fit.slope + D) <= 0.3 &&
                gate.min_normalized > 1e-10;
  return gate;
}

FisherMatrix fisher_inverse(const FisherMatrix& fm) {
  FisherMatrix out = fm;
  const auto inv = symmetric_inverse(fm.entries, 1e-14);
  out.inverse = symmetrize(inv.inverse);
  out.condition_number = inv.condition;
  return out;
}

FisherMatrix quantum_fisher_state(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                  const ParamVector& eps) {
  const ComplexMatrix out = apply_channel(ch, rho, eps);
  const auto sp = hermitian_eigendecompose_sym(out);
  OutputSpectrum spec;
  spec.eps = eps;
  spec.probs = sp.values;
  spec.basis = sp.vectors;
  spec.input = ComplexVector::Zero(ch.dim());
  std::vector<ComplexMatrix> drho;
  for (int mu = 0; mu < ch.num_params(); ++mu) drho.push_back(channel_derivative(ch, rho, eps, mu));
  return quantum_fisher(spec, sld_operators(spec, drho), drho);
}

FisherMatrix quantum_fisher_pure(const LowNoiseChannel& ch, const ComplexVector& phi,
                                 const ParamVector& eps) {
  const auto spec = diagonalize_output(ch, phi, eps);
  const ComplexMatrix rho = pure_state(phi);
  std::vector<ComplexMatrix> drho;
  for (int mu = 0; mu < ch.num_params(); ++mu) drho.push_back(channel_derivative(ch, rho, eps, mu));
  return quantum_fisher(spec, sld_operators(spec, drho), drho);
}

DominanceResult pure_input_dominance(
    const LowNoiseChannel& ch, const ComplexMatrix& rho_mixed,
    const std::vector<std::pair<double, ComplexVector>>& decomposition, const RealVector& u,
    const ParamVector& eps) {
  if (decomposition.empty()) throw Error(ErrorCode::InvalidArgument, "empty decomposition");
  ComplexMatrix rebuilt = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& [w, v] : decomposition) rebuilt += w * pure_state(v);
  if ((rebuilt - rho_mixed).norm() > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "decomposition does not reproduce the mixed state");
  if (u.size() != ch.num_params())
    throw Error(ErrorCode::DimensionMismatch, "direction has the wrong length");
  DominanceResult r;
  r.mixed = u.dot(quantum_fisher_state(ch, rho_mixed, eps).entries * u);
  r.best_pure = -INFINITY;
  for (const auto& [w, v] : decomposition) {
    (void)w;
    r.best_pure = std::max(r.best_pure, u.dot(quantum_fisher_pure(ch, v, eps).entries * u));
  }
  r.holds = r.mixed <= r.best_pure + 1e-8 * std::max(1.0, std::abs(r.best_pure));
  return r;
}

bool pure_input_dominance_check(
    const LowNoiseChannel& ch, const ComplexMatrix& rho_mixed,
    const std::vector<std::pair<double, ComplexVector>>& decomposition, const RealVector& u,
    const ParamVector& eps) {
  return pure_input_dominance(ch, rho_mixed, decomposition, u, eps).holds;
}

FisherMatrix divergent_fisher_leading(const LowNoiseChannel& ch, const ComplexVector& phi,
                                      const ParamVector& eps) {
  const ComplexMatrix frame = complement_basis(phi);
  const int d = ch.num_params();
  std::vector<ComplexMatrix> parts;
  ComplexMatrix total = ComplexMatrix::Zero(frame.cols(), frame.cols());
  for (int mu = 0; mu < d; ++mu) {
    parts.push_back(leading_delta_component(ch, phi, mu, frame));
    total += eps(mu) * parts.back();
  }
  const auto sp = hermitian_eigendecompose_sym(total);
  const double top = sp.values.size() ? std::abs(sp.values(0)) : 0.0;
  FisherMatrix fm;
  fm.kind = FisherKind::Divergent;
  fm.entries = RealMatrix::Zero(d, d);
  int used = 0;
  for (Eigen::Index k = 0; k < sp.values.size(); ++k) {
    if (!(sp.values(k) > kZeroFloor * top)) continue;
    RealVector g(d);
    for (int mu = 0; mu < d; ++mu)
      g(mu) = sp.vectors.col(k).dot(parts[mu] * sp.vectors.col(k)).real();
    fm.entries += g * g.transpose() / sp.values(k);
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::EmptySum, "leading deviation matrix vanishes");
  fm.entries = symmetrize(fm.entries);
  return fm;
}

}  // namespace lnest
