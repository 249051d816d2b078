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

#include "lnest/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lnest {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TPCPViolation: return "TPCPViolation";
    case ErrorCode::InconsistentKrausData: return "InconsistentKrausData";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ReductionInvalid: return "ReductionInvalid";
    case ErrorCode::EmptySum: return "EmptySum";
    case ErrorCode::SingularFisher: return "SingularFisher";
    case ErrorCode::BadProbabilities: return "BadProbabilities";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_residual(m) <= rel_tol * m.norm();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

static HermitianSpectrum sorted_spectrum(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver failed");
  const Eigen::Index n = m.rows();
  HermitianSpectrum out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  for (Eigen::Index k = 0; k < n; ++k)
    if (!std::isfinite(out.values(k)))
      throw Error(ErrorCode::NoConvergence, "non-finite eigenvalue");
  return out;
}

HermitianSpectrum hermitian_eigendecompose(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  if (!m.allFinite())
    throw Error(ErrorCode::NonHermitian, "matrix has non-finite entries");
  if (!is_hermitian(m))
    throw Error(ErrorCode::NonHermitian,
                "||M - M^dag|| = " + std::to_string(hermiticity_residual(m)));
  return sorted_spectrum(hermitian_part(m));
}

HermitianSpectrum hermitian_eigendecompose_sym(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  return sorted_spectrum(hermitian_part(m));
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double matrix_residual_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "residual of differently sized matrices");
  return (a - b).norm();
}

double matrix_residual_norm(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "residual of differently sized matrices");
  return (a - b).norm();
}

PowerFit power_order_fit(const std::vector<double>& scales,
                         const std::vector<double>& values) {
  if (scales.size() != values.size())
    throw Error(ErrorCode::DimensionMismatch, "scales and values differ in length");
  if (scales.size() < 4)
    throw Error(ErrorCode::DegenerateSamples, "need at least 4 samples");
  const std::size_t n = scales.size();
  std::vector<double> x(n), y(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (!(scales[t] > 0.0) || !std::isfinite(scales[t]))
      throw Error(ErrorCode::DegenerateSamples, "scale must be positive");
    if (!(values[t] > 0.0) || !std::isfinite(values[t]))
      throw Error(ErrorCode::DegenerateSamples, "value must be positive");
    x[t] = std::log(scales[t]);
    y[t] = std::log(values[t]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    sxy += (x[t] - mx) * (y[t] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorCode::DegenerateSamples, "scales are not distinct");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t t = 0; t < n; ++t)
    fit.residual = std::max(fit.residual,
                            std::abs(y[t] - (fit.intercept + fit.slope * x[t])));
  return fit;
}

OrderAssessment assess_order(const std::vector<double>& scales,
                             const std::vector<double>& values,
                             const std::vector<double>& natural_scale,
                             double floor) {
  OrderAssessment out;
  bool all_small = true;
  for (std::size_t t = 0; t < values.size(); ++t) {
    const double ref = t < natural_scale.size() ? natural_scale[t] : 1.0;
    if (std::abs(values[t]) > floor * ref) all_small = false;
  }
  if (all_small && !values.empty()) {
    out.vanishing = true;
    return out;
  }
  out.fit = power_order_fit(scales, values);
  out.fitted = true;
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo))
    throw Error(ErrorCode::InvalidArgument, "bad geometric grid");
  std::vector<double> out(count);
  const double ll = std::log10(lo), lh = std::log10(hi);
  for (int k = 0; k < count; ++k)
    out[k] = std::pow(10.0, ll + (lh - ll) * k / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ComplexMatrix lowdin_orthonormalize(const ComplexMatrix& cols) {
  ComplexMatrix gram = cols.adjoint() * cols;
  auto sp = hermitian_eigendecompose_sym(gram);
  ComplexMatrix inv_sqrt =
      hermitian_function(sp, [](double x) { return cplx(1.0 / std::sqrt(x)); });
  return cols * inv_sqrt;
}

SymmetricInverse symmetric_inverse(const RealMatrix& m, double det_floor_rel) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  RealMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "symmetric eigensolver failed");
  const auto& lam = es.eigenvalues();
  double det = 1.0, amax = 0.0, amin = INFINITY;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    det *= lam(k);
    amax = std::max(amax, std::abs(lam(k)));
    amin = std::min(amin, std::abs(lam(k)));
  }
  const double floor = det_floor_rel * std::pow(sym.norm(), static_cast<double>(m.rows()));
  if (!(std::abs(det) > floor) || amin == 0.0)
    throw Error(ErrorCode::SingularFisher,
                "determinant " + std::to_string(det) + " below floor");
  SymmetricInverse out;
  out.inverse = es.eigenvectors() * lam.cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
  out.condition = amax / amin;
  return out;
}

RealMatrix symmetric_pseudo_inverse(const RealMatrix& m, double rel_cut) {
  RealMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);
  const auto& lam = es.eigenvalues();
  const double amax = lam.cwiseAbs().maxCoeff();
  RealVector inv = RealVector::Zero(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (std::abs(lam(k)) > rel_cut * amax) inv(k) = 1.0 / lam(k);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace lnest
