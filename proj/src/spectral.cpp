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

#include "lnest/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lnest {

namespace {

// Beyond this size of the deviation the near-pure expansion is pointless.
constexpr double kDeflationLimit = 0.05;
constexpr int kMaxIterations = 80;

OutputSpectrum dense_spectrum(const ComplexVector& phi, const ComplexMatrix& drho) {
  OutputSpectrum out;
  auto sp = hermitian_eigendecompose_sym(pure_state(phi) + drho);
  out.probs = sp.values;
  out.basis = sp.vectors;
  out.input = phi;
  out.deflated = false;
  fix_phases(out.basis, phi);
  return out;
}

}  // namespace

int EigenShifts::count_order1() const {
  return static_cast<int>(std::count(order.begin(), order.end(), ShiftOrder::Order1));
}

void check_unit_vector(const ComplexVector& phi, double tol) {
  if (phi.size() < 1) throw Error(ErrorCode::InvalidArgument, "empty input vector");
  if (std::abs(phi.norm() - 1.0) > tol)
    throw Error(ErrorCode::InvalidArgument,
                "input vector is not normalised (norm " + std::to_string(phi.norm()) + ")");
}

ComplexMatrix complement_basis(const ComplexVector& phi) {
  const Eigen::Index n = phi.size();
  Eigen::Index skip = 0;
  phi.cwiseAbs().maxCoeff(&skip);
  ComplexMatrix out(n, n - 1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == skip) continue;
    ComplexVector v = ComplexVector::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      v -= phi * phi.dot(v);
      for (Eigen::Index c = 0; c < col; ++c) v -= out.col(c) * out.col(c).dot(v);
    }
    out.col(col++) = v.normalized();
  }
  return out;
}

void fix_phases(ComplexMatrix& basis, const ComplexVector& phi) {
  for (Eigen::Index n = 0; n < basis.cols(); ++n) {
    const cplx c = phi.dot(basis.col(n));
    if (std::abs(c) > 1e-13) {
      basis.col(n) *= std::conj(c) / std::abs(c);
    } else {
      Eigen::Index i = 0;
      basis.col(n).cwiseAbs().maxCoeff(&i);
      const cplx z = basis(i, n);
      if (std::abs(z) > 0.0) basis.col(n) *= std::conj(z) / std::abs(z);
    }
  }
}

OutputSpectrum diagonalize_near_pure(const ComplexVector& phi, const ComplexMatrix& drho) {
  check_unit_vector(phi);
  const Eigen::Index n = phi.size();
  if (drho.rows() != n || drho.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "deviation and input differ in dimension");
  OutputSpectrum out;
  out.input = phi;
  if (n == 1) {
    out.probs = RealVector::Constant(1, 1.0 + drho(0, 0).real());
    out.basis = ComplexMatrix::Identity(1, 1);
    out.basis(0, 0) = phi(0) / std::abs(phi(0));
    out.deflated = true;
    return out;
  }
  ComplexMatrix w(n, n);
  w.col(0) = phi;
  w.rightCols(n - 1) = complement_basis(phi);
  const ComplexMatrix dm = hermitian_part(w.adjoint() * drho * w);
  const double scale = dm.norm();
  if (scale > kDeflationLimit) return dense_spectrum(phi, drho);
  if (scale == 0.0) {
    out.probs = RealVector::Zero(n);
    out.probs(0) = 1.0;
    out.basis = w;
    out.deflated = true;
    fix_phases(out.basis, phi);
    return out;
  }

  const Eigen::Index m = n - 1;
  const double a = 1.0 + dm(0, 0).real();
  const ComplexVector b = dm.block(1, 0, m, 1);
  const ComplexMatrix c = dm.block(1, 1, m, m);
  const ComplexMatrix bb = b * b.adjoint();
  auto schur = [&](double p) { return ComplexMatrix(c - bb / (a - p)); };

  // Small eigenvalues: p_k is the k-th eigenvalue of S(p_k).
  RealVector p = hermitian_eigendecompose_sym(schur(0.0)).values;
  bool converged = false;
  double change = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    RealVector pn(m);
    for (Eigen::Index k = 0; k < m; ++k) pn(k) = hermitian_eigendecompose_sym(schur(p(k))).values(k);
    change = (pn - p).cwiseAbs().maxCoeff();
    p = pn;
    if (change <= 4e-16 * scale) {
      converged = true;
      break;
    }
  }
  if (!converged && change > 1e-13 * scale) return dense_spectrum(phi, drho);

  ComplexMatrix y(n, n);
  // Members of a near-degenerate cluster share one decomposition so their
  // vectors stay orthogonal.
  const double cluster_tol = 1e-9 * scale;
  Eigen::Index k0 = 0;
  while (k0 < m) {
    Eigen::Index k1 = k0;
    while (k1 + 1 < m && std::abs(p(k1) - p(k1 + 1)) <= cluster_tol) ++k1;
    const double pm = p.segment(k0, k1 - k0 + 1).mean();
    const auto sp = hermitian_eigendecompose_sym(schur(pm));
    for (Eigen::Index k = k0; k <= k1; ++k) {
      const ComplexVector u = sp.vectors.col(k);
      y(0, k + 1) = b.dot(u) / (p(k) - a);
      y.block(1, k + 1, m, 1) = u;
    }
    k0 = k1 + 1;
  }

  // Dominant eigenpair: p0 = a + b^dag (p0 - C)^{-1} b.
  double p0 = a;
  ComplexVector wv = ComplexVector::Zero(m);
  for (int it = 0; it < kMaxIterations; ++it) {
    const ComplexMatrix lhs = p0 * ComplexMatrix::Identity(m, m) - c;
    wv = lhs.partialPivLu().solve(b);
    const double pn = a + b.dot(wv).real();
    const double d = std::abs(pn - p0);
    p0 = pn;
    if (d <= 1e-16) break;
  }
  y(0, 0) = 1.0;
  y.block(1, 0, m, 1) = wv;
  for (Eigen::Index k = 0; k < n; ++k) y.col(k).normalize();

  if (p.maxCoeff() > 0.25 || !y.allFinite()) return dense_spectrum(phi, drho);

  out.basis = w * lowdin_orthonormalize(y);
  out.probs.resize(n);
  out.probs(0) = p0;
  out.probs.tail(m) = p;
  out.deflated = true;
  fix_phases(out.basis, phi);
  return out;
}

OutputSpectrum diagonalize_output(const LowNoiseChannel& ch, const ComplexVector& phi,
                                  const ParamVector& eps) {
  check_unit_vector(phi);
  if (phi.size() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "input vector does not match the channel");
  auto out = diagonalize_near_pure(phi, output_deviation(ch, pure_state(phi), eps));
  out.eps = eps;
  return out;
}

static void check_frame(const ComplexMatrix& frame, const ComplexVector& phi) {
  const Eigen::Index n = phi.size();
  if (frame.rows() != n || frame.cols() != n - 1)
    throw Error(ErrorCode::DimensionMismatch, "frame must be N x (N-1)");
  const double orth = (frame.adjoint() * frame - ComplexMatrix::Identity(n - 1, n - 1)).norm();
  const double perp = (frame.adjoint() * phi).norm();
  if (orth > 1e-12 || perp > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "frame is not an orthonormal complement of the input");
}

ComplexMatrix leading_delta_component(const LowNoiseChannel& ch, const ComplexVector& phi,
                                      int mu, const ComplexMatrix& frame) {
  ComplexMatrix out = ComplexMatrix::Zero(frame.cols(), frame.cols());
  for (const auto& c : ch.c_terms()) {
    if (c.mu != mu) continue;
    const ComplexVector v = frame.adjoint() * (c.base * phi);
    out += v * v.adjoint();
  }
  return out;
}

DeltaMatrix delta_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                         const ParamVector& eps, DeltaVariant variant,
                         const ComplexMatrix& frame) {
  check_unit_vector(phi);
  if (phi.size() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "input vector does not match the channel");
  check_params(eps, ch.num_params());
  check_frame(frame, phi);
  DeltaMatrix dm;
  dm.variant = variant;
  dm.frame = frame;
  if (variant == DeltaVariant::Full) {
    const ComplexMatrix dr = output_deviation(ch, pure_state(phi), eps);
    dm.entries = hermitian_part(frame.adjoint() * dr * frame);
  } else {
    dm.entries = ComplexMatrix::Zero(frame.cols(), frame.cols());
    for (int mu = 0; mu < ch.num_params(); ++mu)
      if (eps(mu) != 0.0) dm.entries += eps(mu) * leading_delta_component(ch, phi, mu, frame);
  }
  return dm;
}

DeltaMatrix delta_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                         const ParamVector& eps, DeltaVariant variant) {
  check_unit_vector(phi);
  return delta_matrix(ch, phi, eps, variant, complement_basis(phi));
}

RealVector delta_spectrum(const DeltaMatrix& dm) {
  if (dm.entries.size() == 0) return RealVector();
  return hermitian_eigendecompose_sym(dm.entries).values;
}

std::vector<ShiftOrder> classify_shift_curves(const std::vector<RealVector>& curves,
                                              const std::vector<double>& scales) {
  if (curves.size() != scales.size())
    throw Error(ErrorCode::DimensionMismatch, "one shift vector per scale expected");
  if (curves.empty()) return {};
  const Eigen::Index m = curves.front().size();
  std::vector<double> natural(curves.size());
  for (std::size_t t = 0; t < curves.size(); ++t)
    natural[t] = m > 0 ? curves[t].cwiseAbs().maxCoeff() : 0.0;
  std::vector<ShiftOrder> out(m, ShiftOrder::HigherOrZero);
  for (Eigen::Index k = 0; k < m; ++k) {
    std::vector<double> q(curves.size());
    bool positive = true;
    bool small = true;
    for (std::size_t t = 0; t < curves.size(); ++t) {
      q[t] = curves[t](k);
      if (!(q[t] > 0.0)) positive = false;
      if (std::abs(q[t]) > kZeroFloor * natural[t]) small = false;
    }
    if (small || !positive || natural.back() == 0.0) continue;
    const auto fit = power_order_fit(scales, q);
    if (fit.slope <= 1.5) out[k] = ShiftOrder::Order1;
  }
  return out;
}

std::vector<EigenShifts> delta_eigenvalues(const std::vector<DeltaMatrix>& sweep,
                                           const std::vector<double>& scales) {
  std::vector<RealVector> curves;
  for (const auto& dm : sweep) curves.push_back(delta_spectrum(dm));
  const auto order = classify_shift_curves(curves, scales);
  std::vector<EigenShifts> out;
  for (const auto& c : curves) out.push_back({c, order});
  return out;
}

LambdaMatrix lambda_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                           const ParamVector& eps) {
  check_unit_vector(phi);
  check_params(eps, ch.num_params());
  if (phi.size() != ch.dim())
    throw Error(ErrorCode::DimensionMismatch, "input vector does not match the channel");
  const auto& terms = ch.c_terms();
  const Eigen::Index k = static_cast<Eigen::Index>(terms.size());
  ComplexMatrix cols(phi.size(), k);
  LambdaMatrix lm;
  std::vector<int> seen(ch.num_params(), 0);
  for (Eigen::Index t = 0; t < k; ++t) {
    const ComplexVector mphi = terms[t].base * phi;
    const cplx mean = phi.dot(mphi);
    cols.col(t) = std::sqrt(eps(terms[t].mu)) * (mphi - mean * phi);
    lm.labels.emplace_back(terms[t].mu, seen[terms[t].mu]++);
  }
  lm.entries = hermitian_part(cols.adjoint() * cols);
  return lm;
}

RealVector reduced_eigenvalues(const LambdaMatrix& lm, int dim) {
  const Eigen::Index k = lm.entries.rows();
  if (k > dim - 1)
    throw Error(ErrorCode::ReductionInvalid,
                "K = " + std::to_string(k) + " exceeds N - 1 = " + std::to_string(dim - 1));
  RealVector out = RealVector::Zero(dim - 1);
  if (k > 0) out.head(k) = hermitian_eigendecompose_sym(lm.entries).values;
  return out;
}

double trace_power_check(const DeltaMatrix& dm_leading, const LambdaMatrix& lm, int kmax) {
  if (dm_leading.variant != DeltaVariant::Leading)
    throw Error(ErrorCode::InvalidArgument, "trace identity needs the leading variant");
  const Eigen::Index nd = dm_leading.entries.rows();
  const Eigen::Index nl = lm.entries.rows();
  if (nl > nd)
    throw Error(ErrorCode::ReductionInvalid, "K exceeds N - 1");
  ComplexMatrix pd = ComplexMatrix::Identity(nd, nd);
  ComplexMatrix pl = ComplexMatrix::Identity(nl, nl);
  double worst = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    pd = pd * dm_leading.entries;
    pl = pl * lm.entries;
    worst = std::max(worst, std::abs(pd.trace() - (nl > 0 ? pl.trace() : cplx(0.0))));
  }
  return worst;
}

}  // namespace lnest
