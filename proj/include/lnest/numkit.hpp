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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lnest/error.hpp"

namespace lnest {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
struct HermitianSpectrum {
  RealVector values;
  ComplexMatrix vectors;  // columns
};

/// Least-squares line through (log s, log q).
struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |log q - fit|
};

/// Result of an O(s^k) check: either a genuine fit, or a series that sits at
/// the numerical zero floor at every sample.
struct OrderAssessment {
  PowerFit fit;
  bool vanishing = false;
  bool fitted = false;
};

constexpr double kHermitianTol = 1e-12;
constexpr double kZeroFloor = 1e-12;

double hermiticity_residual(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Throws NonHermitian unless ||M - M^dag||_F <= 1e-12 ||M||_F.
HermitianSpectrum hermitian_eigendecompose(const ComplexMatrix& m);
/// Same but symmetrises first; for matrices Hermitian only up to round-off.
HermitianSpectrum hermitian_eigendecompose_sym(const ComplexMatrix& m);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

double matrix_residual_norm(const ComplexMatrix& a, const ComplexMatrix& b);
double matrix_residual_norm(const RealMatrix& a, const RealMatrix& b);

/// Throws DegenerateSamples on fewer than 4 points or a non-positive value.
PowerFit power_order_fit(const std::vector<double>& scales,
                         const std::vector<double>& values);

/// Values below floor * natural_scale[t] at every t count as vanishing; any
/// non-positive value above the floor makes the fit fail with
/// DegenerateSamples.
OrderAssessment assess_order(const std::vector<double>& scales,
                             const std::vector<double>& values,
                             const std::vector<double>& natural_scale,
                             double floor = kZeroFloor);

/// 8-point geometric sweep 1e-5 .. 1e-2 unless told otherwise.
std::vector<double> geometric_grid(double lo = 1e-5, double hi = 1e-2,
                                   int count = 8);

/// (A^dag A)^{-1/2} orthonormalisation of columns.
ComplexMatrix lowdin_orthonormalize(const ComplexMatrix& cols);

/// Matrix function of a Hermitian matrix via its eigendecomposition.
template <class F>
ComplexMatrix hermitian_function(const HermitianSpectrum& sp, F f) {
  const auto& v = sp.vectors;
  ComplexMatrix out = ComplexMatrix::Zero(v.rows(), v.rows());
  for (Eigen::Index k = 0; k < sp.values.size(); ++k)
    out += f(sp.values(k)) * v.col(k) * v.col(k).adjoint();
  return out;
}

/// Real symmetric inverse with condition number; SingularFisher below floor.
struct SymmetricInverse {
  RealMatrix inverse;
  double condition = 0.0;
};
SymmetricInverse symmetric_inverse(const RealMatrix& m, double det_floor_rel);
RealMatrix symmetric_pseudo_inverse(const RealMatrix& m, double rel_cut = 1e-10);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace lnest
