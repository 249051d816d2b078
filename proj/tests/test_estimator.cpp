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

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "lnest/estimator.hpp"
#include "lnest/pipeline.hpp"
#include "lnest/scenarios.hpp"

using namespace lnest;
using fx::params;

namespace {

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint() / v.squaredNorm(); }

PointAnalysis bell_point(const ParamVector& e) { return analyze_point(fx::bell_channel(), fx::bell_state(), e); }

bool same(const RealMatrix& a, const RealMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("Bell estimator operators and POVM") {
  const ParamVector e = params({1e-3, 2e-3});
  const auto pa = bell_point(e);
  REQUIRE(pa.aset.has_value());
  REQUIRE(pa.povm.has_value());
  const ComplexVector phi = fx::bell_state();
  const ComplexVector xflip = tensor_product(ComplexMatrix(pauli_x()), ComplexMatrix::Identity(2, 2)) * phi;
  const ComplexVector zflip = tensor_product(ComplexMatrix(pauli_z()), ComplexMatrix::Identity(2, 2)) * phi;
  // A^1 = eps^1 A_1 = bit-flip projector, A^2 = phase-flip projector
  CHECK(matrix_residual_norm(pa.aset->raised[0], projector(xflip)) <= 1e-9);
  CHECK(matrix_residual_norm(pa.aset->raised[1], projector(zflip)) <= 1e-9);
  CHECK(matrix_residual_norm(e(0) * pa.aset->lowered[0], pa.aset->raised[0]) <= 1e-9);
  CHECK(commutator_residual(*pa.aset) <= 1e-10);

  const auto& povm = *pa.povm;
  CHECK(povm_completeness_residual(povm) <= 1e-10);
  CHECK(povm_orthogonality_residual(povm) <= 1e-10);
  // outcomes: no error (estimate 0), bit flip (1, 0), phase flip (0, 1)
  REQUIRE(povm.estimates.size() == 3);
  int zero = 0, unit = 0;
  for (const auto& x : povm.estimates) {
    if (x.norm() <= 1e-9) ++zero;
    if (std::abs(x.norm() - 1.0) <= 1e-9 && x.minCoeff() >= -1e-9) ++unit;
  }
  CHECK(zero == 1);
  CHECK(unit == 2);
  const RealVector q = outcome_probabilities(povm, fx::bell_channel(), phi, e);
  CHECK(std::abs(q.sum() - 1.0) <= 1e-14);
  CHECK(estimator_bias(povm, fx::bell_channel(), phi, e).norm() <= 1e-15);
}

TEST_CASE("single parameter channel") {
  const auto ch = random_channel(3, 1, {2}, 9, true);
  const ComplexVector phi = random_pure_state(3, 9);
  const auto scales = geometric_grid();
  std::vector<double> bias;
  for (double s : scales) {
    const auto pa = analyze_point(ch, phi, params({s}));
    REQUIRE(pa.povm.has_value());
    CHECK(pa.Jdiv.entries.rows() == 1);
    CHECK(povm_completeness_residual(*pa.povm) <= 1e-10);
    bias.push_back(std::abs(pa.bias(0)));
  }
  CHECK(std::abs(power_order_fit(scales, bias).slope - 2.0) <= 0.15);
}

TEST_CASE("empty sum when no shift is first order") {
  OutputSpectrum spec;
  spec.probs = params({1.0, 0.0});
  spec.basis = ComplexMatrix::Identity(2, 2);
  spec.eps = params({1e-3});
  EigenShifts sh;
  sh.values = params({0.0});
  sh.order = {ShiftOrder::HigherOrZero};
  try {
    build_lowered_A(spec, sh, RealMatrix::Zero(1, 1));
    FAIL("expected EmptySum");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::EmptySum);
  }
}

TEST_CASE("POVM completeness and local unbiasedness on random channels") {
  const auto scales = geometric_grid();
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int n = 3 + static_cast<int>(seed % 2);
    const auto ch = random_channel(n, 2, {1, 1}, seed, seed % 2 == 0);
    const ComplexVector phi = random_pure_state(n, seed);
    std::vector<double> bias, nat;
    for (double s : scales) {
      const auto pa = analyze_point(ch, phi, s * params({0.4, 0.6}));
      REQUIRE(pa.povm.has_value());
      CHECK(povm_completeness_residual(*pa.povm) <= 1e-10);
      CHECK(povm_orthogonality_residual(*pa.povm) <= 1e-10);
      bias.push_back(pa.bias.norm());
      nat.push_back(s);
    }
    const auto a = assess_order(scales, bias, nat);
    CHECK((a.vanishing || std::abs(a.fit.slope - 2.0) <= 0.2));
  }
}

TEST_CASE("MSE: analytic and anticommutator forms, Bell attainment") {
  const auto scales = geometric_grid();
  std::vector<double> gap, nat;
  for (double s : scales) {
    const ParamVector e = s * params({1.0 / 3, 2.0 / 3});
    const auto pa = bell_point(e);
    REQUIRE(pa.V.has_value());
    const RealMatrix ac = anticommutator_mse(*pa.aset, pa.spec);
    // anticommutator form measures spread around 0, analytic MSE around eps
    CHECK((pa.V->entries - (ac - e * e.transpose())).norm() <= 1e-12 * ac.norm());
    gap.push_back(pa.gap->norm);
    nat.push_back(s);
  }
  // V = diag(eps) - eps eps^T and J^{-1} = diag(eps) + O(eps^2)
  const auto a = assess_order(scales, gap, nat);
  CHECK((a.vanishing || a.fit.slope >= 1.8));
}

TEST_CASE("random eigenbasis breaks unbiasedness") {
  const auto ch = fx::threelevel_channel();
  const ComplexVector phi = fx::threelevel_input();
  const auto scales = geometric_grid();
  std::vector<double> bias;
  for (double s : scales) {
    const ParamVector e = s * params({0.5, 0.5});
    const auto pa = analyze_point(ch, phi, e);
    AOperatorSet rotated = *pa.aset;
    rotated.basis = pa.spec.basis * fx::random_unitary(3, 1);
    const auto povm = build_povm(rotated);
    CHECK(povm_completeness_residual(povm) <= 1e-10);
    bias.push_back(estimator_bias(povm, ch, phi, e).norm());
  }
  CHECK(power_order_fit(scales, bias).slope <= 1.2);
}

TEST_CASE("cr_gap vanishes when V equals J^-1") {
  FisherMatrix j;
  j.entries = RealMatrix::Identity(2, 2) * 4.0;
  j = fisher_inverse(j);
  MSEMatrix v;
  v.entries = *j.inverse;
  const auto g = cr_gap(v, j);
  CHECK(g.norm == 0.0);
  CHECK(g.min_eigenvalue == 0.0);
  FisherMatrix none;
  none.entries = j.entries;
  CHECK_THROWS_AS(cr_gap(v, none), Error);
}

TEST_CASE("Monte Carlo sampling") {
  const RealVector probs = params({0.7, 0.2, 0.1});
  const std::vector<RealVector> est = {params({0.0, 0.0}), params({1.0, 0.0}), params({0.0, 1.0})};
  const ParamVector truth = params({0.2, 0.1});

  SUBCASE("one shot gives a rank-one outer product") {
    const auto v = sample_from_probabilities(probs, est, truth, 1, 5);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(v.entries);
    CHECK(std::abs(es.eigenvalues()(0)) <= 1e-15);
    CHECK(v.sample_count == 1);
  }
  SUBCASE("deterministic in the seed, independent of workers") {
    const auto a = sample_from_probabilities(probs, est, truth, 300000, 42, 1);
    const auto b = sample_from_probabilities(probs, est, truth, 300000, 42, 1);
    const auto c = sample_from_probabilities(probs, est, truth, 300000, 42, 4);
    const auto d = sample_from_probabilities(probs, est, truth, 300000, 43, 1);
    CHECK(same(a.entries, b.entries));
    CHECK(same(a.entries, c.entries));
    CHECK(same(a.standard_error, c.standard_error));
    CHECK_FALSE(same(a.entries, d.entries));
  }
  SUBCASE("agrees with the exact covariance within 4 standard errors") {
    const auto v = sample_from_probabilities(probs, est, truth, 1000000, 7, 2);
    RealMatrix exact = RealMatrix::Zero(2, 2);
    for (int g = 0; g < 3; ++g) exact += probs(g) * (est[g] - truth) * (est[g] - truth).transpose();
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) CHECK(std::abs(v.entries(i, k) - exact(i, k)) <= 4 * v.standard_error(i, k));
    CHECK((v.mean - truth).norm() <= 5e-3);
  }
  SUBCASE("bad inputs") {
    auto code = [&](const RealVector& p) {
      try {
        sample_from_probabilities(p, est, truth, 10, 1);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::InvalidArgument;
    };
    CHECK(code(params({0.7, 0.4, -0.1})) == ErrorCode::BadProbabilities);
    CHECK(code(params({0.7, 0.2, 0.2})) == ErrorCode::BadProbabilities);
    CHECK_THROWS_AS(sample_from_probabilities(probs, est, truth, 0, 1), Error);
  }
}

TEST_CASE("estimator is invariant under a common rescaling of the shifts") {
  const auto pa = analyze_point(fx::threelevel_channel(), fx::threelevel_input(), params({1e-3, 2e-3}));
  const double c = 3.7;
  AOperatorSet scaled = *pa.aset;
  scaled.lowered_coeffs /= c;
  FisherMatrix jd = pa.Jdiv;
  jd.entries /= c;
  const auto a = build_povm(raise_index(*pa.aset, pa.Jdiv));
  const auto b = build_povm(raise_index(scaled, jd));
  REQUIRE(a.projectors.size() == b.projectors.size());
  for (std::size_t g = 0; g < a.projectors.size(); ++g) {
    CHECK(matrix_residual_norm(a.projectors[g], b.projectors[g]) <= 1e-10);
    CHECK((a.estimates[g] - b.estimates[g]).norm() <= 1e-10 * std::max(1.0, a.estimates[g].norm()));
  }
}

TEST_CASE("raise requires an invertible J^div unless pseudo-inverse is asked for") {
  const auto ch = fx::pauli_channel();
  ComplexVector phi(2);
  phi << std::cos(0.4), std::polar(std::sin(0.4), 0.3);
  PointOptions strict;
  const auto pa = analyze_point(ch, phi, params({1e-3, 1e-3}), strict);
  CHECK_FALSE(pa.estimator_error.empty());
  PointOptions pinv;
  pinv.raise = RaisePolicy::PseudoInverse;
  const auto pb = analyze_point(ch, phi, params({1e-3, 1e-3}), pinv);
  CHECK(pb.estimator_error.empty());
  REQUIRE(pb.povm.has_value());
  CHECK(povm_completeness_residual(*pb.povm) <= 1e-10);
}
