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
#include "lnest/channel.hpp"
#include "lnest/config.hpp"
#include "lnest/rng.hpp"

using namespace lnest;

namespace {

ParamVector params(std::initializer_list<double> v) {
  ParamVector p(v.size());
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

LowNoiseChannel pauli_channel() {
  json cfg = {{"dim", 2},
              {"params", 2},
              {"builder", "explicit"},
              {"scalar_completion", true},
              {"c_terms", json::array({{{"mu", 0}, {"matrix", matrix_to_json(pauli_x())}},
                                       {{"mu", 1}, {"matrix", matrix_to_json(pauli_z())}}})}};
  return channel_from_config(cfg);
}

LowNoiseChannel threelevel_channel() {
  ComplexMatrix m1 = ComplexMatrix::Zero(3, 3), m2 = ComplexMatrix::Zero(3, 3);
  m1(1, 0) = 1.0;
  m2(1, 0) = m2(2, 0) = 1.0 / std::sqrt(2.0);
  return LowNoiseChannel::sqrt_completion(3, 2, {{0, m1}, {1, m2}});
}

ComplexMatrix bloch(double x, double y, double z) {
  return 0.5 * (ComplexMatrix::Identity(2, 2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
}

ComplexMatrix random_state(int n, std::uint64_t seed) {
  CounterRng rng(seed, 9);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = cplx(rng.normal(), rng.normal());
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// Direct Kraus sum for the two-parameter Pauli channel.
ComplexMatrix pauli_oracle(const ComplexMatrix& rho, double e1, double e2) {
  return (1.0 - e1 - e2) * rho + e1 * pauli_x() * rho * pauli_x() + e2 * pauli_z() * rho * pauli_z();
}

}  // namespace

TEST_CASE("identity at eps = 0") {
  for (const auto& ch : {pauli_channel(), threelevel_channel()}) {
    const ComplexMatrix rho = random_state(ch.dim(), 3);
    CHECK(matrix_residual_norm(apply_channel(ch, rho, ParamVector::Zero(2)), rho) <= 1e-14);
    CHECK(identity_limit_residual(ch) <= 1e-14);
  }
}

TEST_CASE("Pauli channel matches its Kraus sum and Bloch contraction") {
  const auto ch = pauli_channel();
  const ComplexMatrix out = apply_channel(ch, bloch(1, 0, 0), params({0.01, 0.02}));
  CHECK(matrix_residual_norm(out, bloch(0.96, 0, 0)) <= 1e-14);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix rho = random_state(2, seed);
    const double e1 = 1e-3 * (seed + 1), e2 = 2e-4 * (seed + 3);
    CHECK(matrix_residual_norm(apply_channel(ch, rho, params({e1, e2})), pauli_oracle(rho, e1, e2)) <= 1e-14);
    const ComplexMatrix dev = e1 * (pauli_x() * rho * pauli_x() - rho) + e2 * (pauli_z() * rho * pauli_z() - rho);
    CHECK(matrix_residual_norm(output_deviation(ch, rho, params({e1, e2})), dev) <= 1e-14 * (e1 + e2));
  }
}

TEST_CASE("ancilla extension acts as Gamma x id") {
  const auto ch = pauli_channel();
  const auto ext = ancilla_extend(ch);
  CHECK(ext.dim() == 4);
  CHECK(ext.num_params() == 2);
  const ParamVector e = params({1e-3, 2e-3});
  // Bell state in, spectrum = {1 - e1 - e2, e1, e2, 0}
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix out = apply_channel(ext, pure_state(phi), e);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(out);
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0 - 3e-3).epsilon(1e-14));
  CHECK(es.eigenvalues()(2) == doctest::Approx(2e-3).epsilon(1e-10));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1e-3).epsilon(1e-10));
  CHECK(std::abs(es.eigenvalues()(0)) <= 1e-15);
  // product inputs factorise
  const ComplexMatrix a = random_state(2, 1), b = random_state(2, 2);
  CHECK(matrix_residual_norm(apply_channel(ext, tensor_product(a, b), e),
                             tensor_product(apply_channel(ch, a, e), b)) <= 1e-14);
  CHECK(tpcp_residual(ext, e) <= 1e-12);
}

TEST_CASE("tpcp residual and broken kappa") {
  for (const auto& ch : {pauli_channel(), threelevel_channel()})
    for (double s : {0.0, 1e-5, 1e-3, 0.1}) CHECK(tpcp_residual(ch, params({s, 0.5 * s})) <= 1e-12);

  for (int n : {2, 3}) {
    BTerm b;
    b.kappa = 1.01;
    b.linear = {ComplexMatrix::Zero(n, n)};
    const auto bad = LowNoiseChannel::explicit_form(n, 1, {b}, {}, {}, {}, {}, {}, false);
    CHECK(tpcp_residual(bad, params({0.0})) == doctest::Approx(0.0201 * std::sqrt(double(n))).epsilon(1e-12));
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}

TEST_CASE("identity limit catches a non-identity B at eps = 0") {
  BTerm b;
  b.linear = {ComplexMatrix::Zero(2, 2)};
  HigherFn flip = [](const ParamVector&, std::size_t) {
    return ComplexMatrix(pauli_x() - ComplexMatrix::Identity(2, 2));
  };
  const auto ch = LowNoiseChannel::explicit_form(2, 1, {b}, {}, flip, {}, {}, {}, false);
  CHECK(identity_limit_residual(ch) >= 1.0);
  try {
    ch.validate();
    FAIL("expected InconsistentKrausData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentKrausData);
  }
}

TEST_CASE("derivative at zero") {
  SUBCASE("amplitude damping annihilates the ground state") {
    ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    const auto ch = LowNoiseChannel::sqrt_completion(2, 1, {{0, lower}});
    CHECK(derivative_at_zero(ch, 0, bloch(0, 0, 1)).norm() <= 1e-15);
    // excited state decays: d rho = |0><0| - |1><1|
    CHECK(matrix_residual_norm(derivative_at_zero(ch, 0, bloch(0, 0, -1)), pauli_z()) <= 1e-15);
  }
  SUBCASE("Pauli channel on |+>") {
    const auto ch = pauli_channel();
    const ComplexMatrix plus = bloch(1, 0, 0);
    CHECK(derivative_at_zero(ch, 0, plus).norm() <= 1e-15);
    CHECK(matrix_residual_norm(derivative_at_zero(ch, 1, plus), -pauli_x()) <= 1e-15);
    // |0>: bit flip gives diag(-1, 1)
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = -1.0;
    expected(1, 1) = 1.0;
    CHECK(matrix_residual_norm(derivative_at_zero(ch, 0, bloch(0, 0, 1)), expected) <= 1e-15);
  }
  SUBCASE("matches finite differences") {
    const auto ch = threelevel_channel();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ComplexMatrix rho = random_state(3, seed);
      for (int mu = 0; mu < 2; ++mu) {
        const ComplexMatrix fd = finite_difference_derivative(ch, rho, mu, ParamVector::Zero(2), 1e-5);
        CHECK(matrix_residual_norm(derivative_at_zero(ch, mu, rho), fd) <= 1e-8);
        CHECK(matrix_residual_norm(channel_derivative(ch, rho, ParamVector::Zero(2), mu), fd) <= 1e-8);
      }
    }
  }
}

TEST_CASE("channel_derivative away from zero agrees with finite differences") {
  const auto ch = threelevel_channel();
  const auto p = pauli_channel();
  const ParamVector e = params({2e-3, 1e-3});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexMatrix rho = random_state(3, 20 + seed);
    for (int nu = 0; nu < 2; ++nu) {
      const ComplexMatrix fd = finite_difference_derivative(ch, rho, nu, e, 1e-5);
      CHECK(matrix_residual_norm(channel_derivative(ch, rho, e, nu), fd) <= 1e-7);
    }
    // affine channel: derivative exact for any step
    const ComplexMatrix r2 = random_state(2, seed);
    CHECK(matrix_residual_norm(channel_derivative(p, r2, e, 0), pauli_x() * r2 * pauli_x() - r2) <= 1e-13);
    CHECK(matrix_residual_norm(finite_difference_derivative(p, r2, 1, e, 1e-3), pauli_z() * r2 * pauli_z() - r2) <=
          1e-11);
  }
}

TEST_CASE("hamiltonian part") {
  const ComplexMatrix s = 2.0 * ComplexMatrix::Identity(2, 2);  // sigma_x^dag sigma_x + sigma_z^dag sigma_z
  auto build = [&](const ComplexMatrix& n) {
    BTerm b;
    b.linear = {n};
    return LowNoiseChannel::explicit_form(2, 1, {b}, {{0, pauli_x()}, {0, pauli_z()}}, {}, {}, {}, {}, false);
  };
  CHECK(hamiltonian_part(build(0.5 * s), 0).norm() <= 1e-15);
  const ComplexMatrix g = 0.3 * pauli_y() + 0.1 * pauli_z();
  CHECK(matrix_residual_norm(hamiltonian_part(build(0.5 * s + cplx(0, 1) * g), 0), g) <= 1e-15);
  try {
    hamiltonian_part(build(0.5 * s + 0.1 * pauli_x()), 0);
    FAIL("expected InconsistentKrausData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentKrausData);
  }
}

TEST_CASE("sqrt completion with generators stays TPCP and has H = G") {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(2, 0) = 0.7;
  m(1, 2) = cplx(0.1, 0.4);
  ComplexMatrix g = ComplexMatrix::Zero(3, 3);
  g(0, 1) = cplx(0.2, -0.5);
  g(1, 0) = std::conj(g(0, 1));
  g(2, 2) = 0.3;
  const auto ch = LowNoiseChannel::sqrt_completion(3, 1, {{0, m}}, {g});
  for (double s : {1e-4, 1e-2, 0.3}) CHECK(tpcp_residual(ch, params({s})) <= 1e-12);
  CHECK(matrix_residual_norm(hamiltonian_part(ch, 0), g) <= 1e-12);
  const ComplexMatrix rho = random_state(3, 77);
  CHECK(matrix_residual_norm(channel_derivative(ch, rho, params({0.01}), 0),
                             finite_difference_derivative(ch, rho, 0, params({0.01}), 1e-5)) <= 1e-8);
}

TEST_CASE("finite difference refuses to leave the TPCP region") {
  const auto ch = pauli_channel();
  try {
    finite_difference_derivative(ch, bloch(0, 0, 1), 0, params({0.5, 0.499}), 0.01);
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}

TEST_CASE("argument checks") {
  const auto ch = pauli_channel();
  CHECK_THROWS_AS(apply_channel(ch, bloch(0, 0, 1), params({-1e-3, 0.0})), Error);
  CHECK_THROWS_AS(apply_channel(ch, bloch(0, 0, 1), params({1e-3})), Error);
  CHECK_THROWS_AS(apply_channel(ch, ComplexMatrix::Identity(3, 3), params({1e-3, 0.0})), Error);
  CHECK(is_density_matrix(bloch(0.2, 0.3, 0.1)));
  CHECK_FALSE(is_density_matrix(bloch(1.0, 1.0, 0.0)));
}
