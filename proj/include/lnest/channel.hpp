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

#include <functional>
#include <vector>

#include "lnest/numkit.hpp"

namespace lnest {

/// Noise parameters (eps^1, ..., eps^D), all non-negative.
using ParamVector = RealVector;

void check_params(const ParamVector& eps, int D);

/// B_alpha(eps) = kappa 1 - sum_mu eps^mu linear[mu] + higher.
struct BTerm {
  cplx kappa{1.0, 0.0};
  std::vector<ComplexMatrix> linear;
};

/// C_{mu a}(eps) = base + higher, weighted by eps^mu in the channel sum.
struct CTerm {
  int mu = 0;
  ComplexMatrix base;
};

/// Terms beyond the stored orders, indexed by B-term or C-term position.
using HigherFn = std::function<ComplexMatrix(const ParamVector& eps, std::size_t index)>;
using HigherDerivFn =
    std::function<ComplexMatrix(const ParamVector& eps, std::size_t index, int nu)>;

enum class Builder { Explicit, SqrtCompletion };

/// Kraus operators at one eps. b_dev holds B_alpha - kappa_alpha 1 so the
/// deviation of the output from the input can be formed without cancellation.
struct KrausEval {
  std::vector<cplx> kappa;
  std::vector<ComplexMatrix> b_dev;
  std::vector<ComplexMatrix> c;
};

class LowNoiseChannel {
 public:
  /// Single B(eps) = exp(-i sum eps G) sqrt(1 - sum eps sum_a M^dag M).
  static LowNoiseChannel sqrt_completion(int dim, int D, std::vector<CTerm> c_terms,
                                         std::vector<ComplexMatrix> generators = {},
                                         bool validate = true);

  /// Kraus data given term by term. Derivative closures are optional; when
  /// absent the higher terms are differentiated numerically.
  static LowNoiseChannel explicit_form(int dim, int D, std::vector<BTerm> b_terms,
                                       std::vector<CTerm> c_terms,
                                       HigherFn higher_b = {}, HigherFn higher_c = {},
                                       HigherDerivFn d_higher_b = {},
                                       HigherDerivFn d_higher_c = {},
                                       bool validate = true);

  int dim() const { return dim_; }
  int num_params() const { return D_; }
  Builder builder() const { return builder_; }
  const std::vector<BTerm>& b_terms() const { return b_terms_; }
  const std::vector<CTerm>& c_terms() const { return c_terms_; }
  const std::vector<ComplexMatrix>& generators() const { return generators_; }
  std::vector<int> k_mu() const;
  int k_total() const { return static_cast<int>(c_terms_.size()); }
  bool has_higher() const { return static_cast<bool>(higher_b_) || static_cast<bool>(higher_c_); }

  /// sum_a M_{mu a}^dag M_{mu a}.
  const ComplexMatrix& dissipator_weight(int mu) const { return s_mu_[mu]; }
  const ComplexMatrix& hamiltonian(int mu) const { return hamiltonians_[mu]; }

  KrausEval kraus(const ParamVector& eps) const;
  /// d/d eps^nu of B_alpha (in b_dev) and of C_{mu a} (in c).
  KrausEval kraus_derivative(const ParamVector& eps, int nu) const;

  /// Throws InconsistentKrausData / TPCPViolation when the stored data break
  /// the low-noise conditions.
  void validate() const;

  LowNoiseChannel ancilla_extended() const;

 private:
  LowNoiseChannel() = default;
  void finalize();

  int dim_ = 0;
  int D_ = 0;
  Builder builder_ = Builder::Explicit;
  std::vector<BTerm> b_terms_;
  std::vector<CTerm> c_terms_;
  std::vector<ComplexMatrix> generators_;
  std::vector<ComplexMatrix> s_mu_;
  std::vector<ComplexMatrix> hamiltonians_;
  double hermiticity_defect_ = 0.0;
  HigherFn higher_b_, higher_c_;
  HigherDerivFn d_higher_b_, d_higher_c_;
};

/// Gamma_eps[rho] - rho, formed term by term so O(eps) entries keep full
/// relative precision.
ComplexMatrix output_deviation(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                               const ParamVector& eps);

ComplexMatrix apply_channel(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                            const ParamVector& eps);

double tpcp_residual(const LowNoiseChannel& ch, const ParamVector& eps);

double identity_limit_residual(const LowNoiseChannel& ch);

ComplexMatrix derivative_at_zero(const LowNoiseChannel& ch, int mu,
                                 const ComplexMatrix& rho);

/// (sum_alpha kappa* N_{mu alpha} - 1/2 sum_a M^dag M) / i.
ComplexMatrix hamiltonian_part(const LowNoiseChannel& ch, int mu);

LowNoiseChannel ancilla_extend(const LowNoiseChannel& ch);

/// d Gamma_eps[rho] / d eps^nu from the Kraus derivatives.
ComplexMatrix channel_derivative(const LowNoiseChannel& ch, const ComplexMatrix& rho,
                                 const ParamVector& eps, int nu);

/// Second-order one-sided stencil at eps^mu = 0, central otherwise.
ComplexMatrix finite_difference_derivative(const LowNoiseChannel& ch,
                                           const ComplexMatrix& rho, int mu,
                                           const ParamVector& eps0, double h);

bool is_density_matrix(const ComplexMatrix& rho, double tol = 1e-10);
ComplexMatrix pure_state(const ComplexVector& phi);

}  // namespace lnest
