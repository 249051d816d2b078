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
#include <vector>

#include "lnest/fisher.hpp"

namespace lnest {

/// How A^mu = (J^div)^{-1} A is formed. PseudoInverse is used for channels
/// whose J^div is rank deficient, where no locally unbiased estimator of
/// this type exists.
enum class RaisePolicy { Strict, PseudoInverse };

struct AOperatorSet {
  std::vector<ComplexMatrix> lowered;
  std::vector<ComplexMatrix> raised;
  ParamVector reference_eps;
  std::vector<int> included;  // eigenbasis indices n >= 1
  ComplexMatrix basis;
  RealMatrix lowered_coeffs;  // D x N eigenvalues of A_mu
  RealMatrix raised_coeffs;   // D x N eigenvalues of A^mu
};

struct EstimatorPOVM {
  std::vector<ComplexMatrix> projectors;
  std::vector<RealVector> estimates;
  std::vector<std::vector<int>> members;  // eigenbasis columns per projector
  ComplexMatrix basis;
};

struct MSEMatrix {
  RealMatrix entries;
  bool monte_carlo = false;
  std::int64_t sample_count = 0;
  RealMatrix standard_error;
  RealVector mean;  // estimate mean
};

struct CRGap {
  RealMatrix gap;
  double norm = 0.0;
  double min_eigenvalue = 0.0;
};

/// A_mu = sum over order-1 n of (d_mu dp_n / dp_n) |n><n|. dshifts is
/// D x (N-1), column k belongs to eigenvector k + 1.
AOperatorSet build_lowered_A(const OutputSpectrum& spec, const EigenShifts& shifts,
                             const RealMatrix& dshifts);

AOperatorSet raise_index(AOperatorSet aset, const FisherMatrix& jdiv,
                         RaisePolicy policy = RaisePolicy::Strict);

double commutator_residual(const AOperatorSet& aset);

EstimatorPOVM build_povm(const AOperatorSet& aset);

double povm_completeness_residual(const EstimatorPOVM& povm);
double povm_orthogonality_residual(const EstimatorPOVM& povm);

/// Tr[P_n rho(eps)] evaluated from the output deviation.
RealVector outcome_probabilities(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                                 const ComplexVector& phi, const ParamVector& eps_true);

/// Signed sum_n x_n q_n - eps.
RealVector estimator_bias(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                          const ComplexVector& phi, const ParamVector& eps_true);

RealVector unbiasedness_residual(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                                 const ComplexVector& phi, const ParamVector& eps_true);

MSEMatrix analytic_mse(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                       const ComplexVector& phi, const ParamVector& eps_true);

/// 1/2 Tr[rho {A^mu, A^nu}] with rho diagonal in the A eigenbasis.
RealMatrix anticommutator_mse(const AOperatorSet& aset, const OutputSpectrum& spec);

CRGap cr_gap(const MSEMatrix& v, const FisherMatrix& jinv);

/// Shots are split into fixed blocks, each drawn from its own counter
/// stream, so the result does not depend on the number of workers.
MSEMatrix sample_measurements(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                              const ComplexVector& phi, const ParamVector& eps_true,
                              std::int64_t shots, std::uint64_t seed, int workers = 1);

MSEMatrix sample_from_probabilities(const RealVector& probs,
                                    const std::vector<RealVector>& estimates,
                                    const ParamVector& eps_true, std::int64_t shots,
                                    std::uint64_t seed, int workers = 1);

}  // namespace lnest
