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

#include <optional>
#include <utility>
#include <vector>

#include "lnest/spectral.hpp"

namespace lnest {

struct SLDSet {
  std::vector<ComplexMatrix> operators;
  double support_threshold = 0.0;
  int dropped_pairs = 0;  // (n, m) pairs with p_n + p_m below threshold
};

enum class FisherKind { Quantum, Classical, Divergent };

struct FisherMatrix {
  FisherKind kind = FisherKind::Quantum;
  RealMatrix entries;
  std::optional<RealMatrix> inverse;
  double condition_number = 0.0;
};

double default_support_threshold(int dim);

/// Derivatives of the output expressed in its eigenbasis.
struct SpectralDerivatives {
  std::vector<ComplexMatrix> drho;      // original frame
  std::vector<ComplexMatrix> in_basis;  // <n| d_mu rho |m>
  RealMatrix dprobs;                    // D x N, d_mu p_n
};

/// Rotates the basis inside near-degenerate clusters so that
/// sum_mu w_mu <n|d_mu rho|m> is diagonal there, then returns the
/// eigenvalue derivatives <n|d_mu rho|n>.
SpectralDerivatives spectral_derivatives(OutputSpectrum& spec,
                                         const std::vector<ComplexMatrix>& drho,
                                         const RealVector& weights);

SLDSet sld_operators(const OutputSpectrum& spec, const std::vector<ComplexMatrix>& drho);

FisherMatrix quantum_fisher(const OutputSpectrum& spec, const SLDSet& slds,
                            const std::vector<ComplexMatrix>& drho);

/// 1/2 Tr[rho {L_mu, L_nu}] for the cross-check of the two forms.
RealMatrix sld_fisher(const OutputSpectrum& spec, const SLDSet& slds);

/// Only order-1 shifts contribute. dshifts is D x (N-1).
FisherMatrix divergent_fisher(const EigenShifts& shifts, const RealMatrix& dshifts);

FisherMatrix classical_fisher(const OutputSpectrum& spec, const RealMatrix& dprobs);

/// Discrepancy between sum dp dp / p and 4 sum d sqrt(p) d sqrt(p).
double classical_fisher_form_gap(const OutputSpectrum& spec, const RealMatrix& dprobs);

/// det of [sum_n d_mu sqrt(p_n) d_nu sqrt(p_n)].
double nondegeneracy_det(const OutputSpectrum& spec, const RealMatrix& dprobs);

struct NondegeneracyGate {
  bool passed = false;
  OrderAssessment order;
  double min_normalized = 0.0;  // det / prod diag, scale free
};

/// det scales like eps^-D along a ray; gate requires that slope within 0.3
/// and a normalised determinant above 1e-10 at every scale.
NondegeneracyGate nondegeneracy_gate(const std::vector<double>& scales,
                                     const std::vector<double>& dets,
                                     const std::vector<double>& normalized, int D);

/// Normalised determinant det(G) / prod G_ii.
double normalized_det(const RealMatrix& g);

FisherMatrix fisher_inverse(const FisherMatrix& fm);

/// Quantum Fisher matrix of Gamma_eps[rho] for an arbitrary input state.
FisherMatrix quantum_fisher_state(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                  const ParamVector& eps);

/// Quantum Fisher matrix for a pure input through the deflated pipeline.
FisherMatrix quantum_fisher_pure(const LowNoiseChannel& ch, const ComplexVector& phi,
                                 const ParamVector& eps);

struct DominanceResult {
  bool holds = false;
  double mixed = 0.0;
  double best_pure = 0.0;
};

DominanceResult pure_input_dominance(
    const LowNoiseChannel& ch, const ComplexMatrix& rho_mixed,
    const std::vector<std::pair<double, ComplexVector>>& decomposition, const RealVector& u,
    const ParamVector& eps);

bool pure_input_dominance_check(
    const LowNoiseChannel& ch, const ComplexMatrix& rho_mixed,
    const std::vector<std::pair<double, ComplexVector>>& decomposition, const RealVector& u,
    const ParamVector& eps);

/// J^div from the leading deviation matrix alone: shifts are its eigenvalues
/// and their derivatives follow from the eps^mu components.
FisherMatrix divergent_fisher_leading(const LowNoiseChannel& ch, const ComplexVector& phi,
                                      const ParamVector& eps);

}  // namespace lnest
