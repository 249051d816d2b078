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

#include "lnest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "lnest/rng.hpp"

namespace lnest {

namespace {

constexpr std::int64_t kBlockShots = 1 << 16;

ComplexMatrix diagonal_operator(const ComplexMatrix& basis, const RealVector& coeffs) {
  return basis * coeffs.cast<cplx>().asDiagonal() * basis.adjoint();
}

}  // namespace

AOperatorSet build_lowered_A(const OutputSpectrum& spec, const EigenShifts& shifts,
                             const RealMatrix& dshifts) {
  const Eigen::Index n = spec.probs.size();
  if (shifts.values.size() != n - 1 || dshifts.cols() != n - 1)
    throw Error(ErrorCode::DimensionMismatch, "expected N - 1 shifts");
  const Eigen::Index d = dshifts.rows();
  AOperatorSet a;
  a.reference_eps = spec.eps;
  a.basis = spec.basis;
  a.lowered_coeffs = RealMatrix::Zero(d, n);
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (shifts.order[k] != ShiftOrder::Order1) continue;
    a.included.push_back(static_cast<int>(k + 1));
    a.lowered_coeffs.col(k + 1) = dshifts.col(k) / shifts.values(k);
  }
  if (a.included.empty()) throw Error(ErrorCode::EmptySum, "every shift is excluded");
  for (Eigen::Index mu = 0; mu < d; ++mu)
    a.lowered.push_back(diagonal_operator(a.basis, a.lowered_coeffs.row(mu).transpose()));
  return a;
}

AOperatorSet raise_index(AOperatorSet aset, const FisherMatrix& jdiv, RaisePolicy policy) {
  const Eigen::Index d = aset.lowered_coeffs.rows();
  if (jdiv.entries.rows() != d)
    throw Error(ErrorCode::DimensionMismatch, "J^div and A differ in parameter count");
  RealMatrix inv;
  if (policy == RaisePolicy::Strict)
    inv = fisher_inverse(jdiv).inverse.value();
  else
    inv = symmetric_pseudo_inverse(jdiv.entries);
  aset.raised_coeffs = inv * aset.lowered_coeffs;
  aset.raised.clear();
  for (Eigen::Index mu = 0; mu < d; ++mu)
    aset.raised.push_back(diagonal_operator(aset.basis, aset.raised_coeffs.row(mu).transpose()));
  return aset;
}

double commutator_residual(const AOperatorSet& aset) {
  double worst = 0.0;
  for (const auto* ops : {&aset.lowered, &aset.raised})
    for (std::size_t i = 0; i < ops->size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const auto& x = (*ops)[i];
        const auto& y = (*ops)[j];
        worst = std::max(worst, (x * y - y * x).norm());
      }
  return worst;
}

EstimatorPOVM build_povm(const AOperatorSet& aset) {
  if (aset.raised_coeffs.size() == 0)
    throw Error(ErrorCode::InvalidArgument, "raise the index before building the POVM");
  const Eigen::Index n = aset.basis.cols();
  const Eigen::Index d = aset.raised_coeffs.rows();
  std::vector<bool> inc(n, false);
  for (int k : aset.included) inc[k] = true;

  EstimatorPOVM povm;
  povm.basis = aset.basis;
  const double scale = std::max(1e-300, aset.raised_coeffs.cwiseAbs().maxCoeff());
  auto add = [&](int k, const RealVector& x) {
    for (std::size_t g = 0; g < povm.estimates.size(); ++g)
      if ((povm.estimates[g] - x).norm() <= 1e-12 * scale) {
        povm.members[g].push_back(k);
        return;
      }
    povm.estimates.push_back(x);
    povm.members.push_back({k});
  };
  for (Eigen::Index k = 0; k < n; ++k)
    add(static_cast<int>(k), inc[k] ? RealVector(aset.raised_coeffs.col(k)) : RealVector::Zero(d));
  for (const auto& mem : povm.members) {
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (int k : mem) p += aset.basis.col(k) * aset.basis.col(k).adjoint();
    povm.projectors.push_back(p);
  }
  return povm;
}

double povm_completeness_residual(const EstimatorPOVM& povm) {
  const Eigen::Index n = povm.basis.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& p : povm.projectors) sum += p;
  return (sum - ComplexMatrix::Identity(n, n)).norm();
}

double povm_orthogonality_residual(const EstimatorPOVM& povm) {
  double worst = 0.0;
  for (std::size_t i = 0; i < povm.projectors.size(); ++i) {
    const auto& p = povm.projectors[i];
    worst = std::max(worst, (p * p - p).norm());
    worst = std::max(worst, hermiticity_residual(p));
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, (p * povm.projectors[j]).norm());
  }
  return worst;
}

RealVector outcome_probabilities(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                                 const ComplexVector& phi, const ParamVector& eps_true) {
  if (phi.size() != povm.basis.rows())
    throw Error(ErrorCode::DimensionMismatch, "input and POVM differ in dimension");
  const ComplexMatrix dr = output_deviation(ch, pure_state(phi), eps_true);
  RealVector q(povm.members.size());
  for (std::size_t g = 0; g < povm.members.size(); ++g) {
    double acc = 0.0;
    for (int k : povm.members[g]) {
      const auto col = povm.basis.col(k);
      acc += std::norm(phi.dot(col)) + col.dot(dr * col).real();
    }
    q(static_cast<Eigen::Index>(g)) = acc;
  }
  return q;
}

RealVector estimator_bias(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                          const ComplexVector& phi, const ParamVector& eps_true) {
  const RealVector q = outcome_probabilities(povm, ch, phi, eps_true);
  RealVector mean = RealVector::Zero(eps_true.size());
  for (std::size_t g = 0; g < povm.estimates.size(); ++g)
    mean += q(static_cast<Eigen::Index>(g)) * povm.estimates[g];
  return mean - eps_true;
}

RealVector unbiasedness_residual(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                                 const ComplexVector& phi, const ParamVector& eps_true) {
  return estimator_bias(povm, ch, phi, eps_true).cwiseAbs();
}

MSEMatrix analytic_mse(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                       const ComplexVector& phi, const ParamVector& eps_true) {
  const RealVector q = outcome_probabilities(povm, ch, phi, eps_true);
  const Eigen::Index d = eps_true.size();
  MSEMatrix v;
  v.entries = RealMatrix::Zero(d, d);
  v.mean = RealVector::Zero(d);
  for (std::size_t g = 0; g < povm.estimates.size(); ++g) {
    const double w = q(static_cast<Eigen::Index>(g));
    const RealVector dev = povm.estimates[g] - eps_true;
    v.entries += w * dev * dev.transpose();
    v.mean += w * povm.estimates[g];
  }
  v.entries = 0.5 * (v.entries + v.entries.transpose());
  return v;
}

RealMatrix anticommutator_mse(const AOperatorSet& aset, const OutputSpectrum& spec) {
  const Eigen::Index d = aset.raised_coeffs.rows();
  RealMatrix out = RealMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < spec.probs.size(); ++k) {
    const RealVector x = aset.raised_coeffs.col(k);
    out += spec.probs(k) * x * x.transpose();
  }
  return out;
}

CRGap cr_gap(const MSEMatrix& v, const FisherMatrix& jinv) {
  if (!jinv.inverse) throw Error(ErrorCode::InvalidArgument, "Fisher inverse not populated");
  if (v.entries.rows() != jinv.inverse->rows())
    throw Error(ErrorCode::DimensionMismatch, "MSE and Fisher inverse differ in size");
  CRGap g;
  g.gap = v.entries - *jinv.inverse;
  g.gap = 0.5 * (g.gap + g.gap.transpose());
  g.norm = g.gap.norm();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g.gap);
  g.min_eigenvalue = es.eigenvalues().minCoeff();
  return g;
}

MSEMatrix sample_from_probabilities(const RealVector& probs,
                                    const std::vector<RealVector>& estimates,
                                    const ParamVector& eps_true, std::int64_t shots,
                                    std::uint64_t seed, int workers) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  if (static_cast<std::size_t>(probs.size()) != estimates.size())
    throw Error(ErrorCode::DimensionMismatch, "one probability per outcome expected");
  const Eigen::Index m = probs.size();
  double total = 0.0;
  for (Eigen::Index g = 0; g < m; ++g) {
    if (probs(g) < -1e-8) throw Error(ErrorCode::BadProbabilities, "negative outcome probability");
    total += probs(g);
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw Error(ErrorCode::BadProbabilities, "probabilities sum to " + std::to_string(total));
  std::vector<double> cum(m);
  double acc = 0.0;
  for (Eigen::Index g = 0; g < m; ++g) {
    acc += std::max(0.0, probs(g)) / total;
    cum[g] = acc;
  }
  cum.back() = 1.0;

  const std::int64_t blocks = (shots + kBlockShots - 1) / kBlockShots;
  std::vector<std::vector<std::int64_t>> counts(blocks, std::vector<std::int64_t>(m, 0));
  auto run_block = [&](std::int64_t b) {
    CounterRng rng(seed, static_cast<std::uint64_t>(b));
    const std::int64_t len = std::min(kBlockShots, shots - b * kBlockShots);
    auto& c = counts[b];
    for (std::int64_t s = 0; s < len; ++s) {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      const auto g = std::min<std::ptrdiff_t>(it - cum.begin(), m - 1);
      ++c[g];
    }
  };
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(blocks)));
  if (nw == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += nw) run_block(b);
      });
    for (auto& t : pool) t.join();
  }
  std::vector<std::int64_t> tot(m, 0);
  for (const auto& c : counts)
    for (Eigen::Index g = 0; g < m; ++g) tot[g] += c[g];

  const Eigen::Index d = eps_true.size();
  const double sn = static_cast<double>(shots);
  MSEMatrix v;
  v.monte_carlo = true;
  v.sample_count = shots;
  v.entries = RealMatrix::Zero(d, d);
  v.standard_error = RealMatrix::Zero(d, d);
  v.mean = RealVector::Zero(d);
  for (Eigen::Index g = 0; g < m; ++g) {
    const double c = static_cast<double>(tot[g]);
    const RealVector dev = estimates[g] - eps_true;
    v.entries += c * dev * dev.transpose();
    v.mean += c * estimates[g];
  }
  v.entries /= sn;
  v.mean /= sn;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double ss = 0.0;
      for (Eigen::Index g = 0; g < m; ++g) {
        const RealVector dev = estimates[g] - eps_true;
        const double z = dev(i) * dev(j) - v.entries(i, j);
        ss += static_cast<double>(tot[g]) * z * z;
      }
      v.standard_error(i, j) = std::sqrt(ss / std::max(sn - 1.0, 1.0) / sn);
    }
  return v;
}

MSEMatrix sample_measurements(const EstimatorPOVM& povm, const LowNoiseChannel& ch,
                              const ComplexVector& phi, const ParamVector& eps_true,
                              std::int64_t shots, std::uint64_t seed, int workers) {
  return sample_from_probabilities(outcome_probabilities(povm, ch, phi, eps_true),
                                   povm.estimates, eps_true, shots, seed, workers);
}

}  // namespace lnest
