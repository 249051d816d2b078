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

#include <utility>
#include <vector>

#include "lnest/channel.hpp"

namespace lnest {

/// Spectrum of the output for a pure input, probabilities sorted descending.
struct OutputSpectrum {
  ParamVector eps;
  RealVector probs;
  ComplexMatrix basis;
  ComplexVector input;
  bool deflated = false;  // false when the dense fallback was used
};

enum class DeltaVariant { Full, Leading };

struct DeltaMatrix {
  ComplexMatrix entries;
  DeltaVariant variant = DeltaVariant::Full;
  ComplexMatrix frame;  // N x (N-1)
};

enum class ShiftOrder { Order1, HigherOrZero };

struct EigenShifts {
  RealVector values;  // descending
  std::vector<ShiftOrder> order;
  int count_order1() const;
};

struct LambdaMatrix {
  ComplexMatrix entries;
  std::vector<std::pair<int, int>> labels;  // (mu, a)
};

void check_unit_vector(const ComplexVector& phi, double tol = 1e-12);

/// Columns orthonormal and orthogonal to phi: Gram-Schmidt on the standard
/// basis, skipping the basis vector with the largest overlap.
ComplexMatrix complement_basis(const ComplexVector& phi);

/// Diagonalises |phi><phi| + drho with the small eigenvalues resolved from
/// drho directly (Schur-complement fixed point in the frame [phi | V]).
OutputSpectrum diagonalize_near_pure(const ComplexVector& phi, const ComplexMatrix& drho);

OutputSpectrum diagonalize_output(const LowNoiseChannel& ch, const ComplexVector& phi,
                                  const ParamVector& eps);

/// Column phases chosen so <phi|n> is real and >= 0 (largest entry real and
/// positive when the overlap vanishes).
void fix_phases(ComplexMatrix& basis, const ComplexVector& phi);

DeltaMatrix delta_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                         const ParamVector& eps, DeltaVariant variant);
DeltaMatrix delta_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                         const ParamVector& eps, DeltaVariant variant,
                         const ComplexMatrix& frame);

/// sum_a V^dag M_{mu a} |phi><phi| M_{mu a}^dag V, the eps^mu coefficient of
/// the leading variant.
ComplexMatrix leading_delta_component(const LowNoiseChannel& ch, const ComplexVector& phi,
                                      int mu, const ComplexMatrix& frame);

RealVector delta_spectrum(const DeltaMatrix& dm);

/// Classifies each sorted curve by its power-law slope over the scales.
std::vector<ShiftOrder> classify_shift_curves(const std::vector<RealVector>& curves,
                                              const std::vector<double>& scales);

std::vector<EigenShifts> delta_eigenvalues(const std::vector<DeltaMatrix>& sweep,
                                           const std::vector<double>& scales);

LambdaMatrix lambda_matrix(const LowNoiseChannel& ch, const ComplexVector& phi,
                           const ParamVector& eps);

/// Eigenvalues of Lambda padded with zeros to N-1 entries.
RealVector reduced_eigenvalues(const LambdaMatrix& lm, int dim);

double trace_power_check(const DeltaMatrix& dm_leading, const LambdaMatrix& lm, int kmax);

}  // namespace lnest
