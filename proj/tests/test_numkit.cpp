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

#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "lnest/numkit.hpp"
#include "lnest/rng.hpp"

using namespace lnest;

namespace {

ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = cplx(rng.normal(), rng.normal());
  return m;
}

ComplexMatrix random_hermitian(int n, std::uint64_t seed) {
  const ComplexMatrix a = random_matrix(n, n, seed);
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("eigendecompose: identity and sigma_z") {
  auto id = hermitian_eigendecompose(ComplexMatrix::Identity(2, 2));
  CHECK(id.values(0) == doctest::Approx(1.0));
  CHECK(id.values(1) == doctest::Approx(1.0));

  auto z = hermitian_eigendecompose(pauli_z());
  CHECK(z.values(0) == doctest::Approx(1.0));
  CHECK(z.values(1) == doctest::Approx(-1.0));
  CHECK(std::abs(z.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(z.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eigendecompose: random Hermitian reconstructs and is orthonormal") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ComplexMatrix m = random_hermitian(4, seed);
    const auto sp = hermitian_eigendecompose(m);
    const ComplexMatrix rebuilt = sp.vectors * sp.values.cast<cplx>().asDiagonal() * sp.vectors.adjoint();
    CHECK((rebuilt - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
    CHECK((sp.vectors.adjoint() * sp.vectors - ComplexMatrix::Identity(4, 4)).norm() <= 1e-10);
    for (int k = 0; k + 1 < 4; ++k) CHECK(sp.values(k) >= sp.values(k + 1));
  }
}

TEST_CASE("eigendecompose: diagonal input returns sorted diagonal") {
  RealVector d(5);
  d << 0.3, -2.0, 7.5, 0.0, 1e-9;
  const auto sp = hermitian_eigendecompose(d.cast<cplx>().asDiagonal().toDenseMatrix());
  RealVector sorted = d;
  std::sort(sorted.data(), sorted.data() + 5, std::greater<>());
  CHECK((sp.values - sorted).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("eigendecompose: rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 1, 2, 0, 1;
  try {
    hermitian_eigendecompose(m);
    FAIL("expected NonHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonHermitian);
  }
}

TEST_CASE("tensor_product: identity factor, basis action, mixed product, associativity") {
  const ComplexMatrix a = random_matrix(2, 3, 7);
  CHECK((tensor_product(a, ComplexMatrix::Identity(1, 1)) - a).norm() == 0.0);

  ComplexVector e1 = ComplexVector::Zero(2), e2 = ComplexVector::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  const ComplexVector lhs = tensor_product(pauli_x(), pauli_x()) * tensor_product(e1, e1);
  CHECK((lhs - tensor_product(e2, e2)).norm() == 0.0);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const ComplexMatrix A = random_matrix(2, 2, 100 + s), B = random_matrix(2, 2, 200 + s);
    const ComplexMatrix C = random_matrix(2, 2, 300 + s), D = random_matrix(2, 2, 400 + s);
    CHECK((tensor_product(A, B) * tensor_product(C, D) - tensor_product(ComplexMatrix(A * C), ComplexMatrix(B * D))).norm() <= 1e-12);
    CHECK((tensor_product(tensor_product(A, B), C) - tensor_product(A, tensor_product(B, C))).norm() <= 1e-12);
  }

  // entry ((i,k),(j,l)) = A(i,j) B(k,l)
  const ComplexMatrix A = random_matrix(2, 2, 11), B = random_matrix(3, 3, 12);
  const ComplexMatrix T = tensor_product(A, B);
  CHECK(T.rows() == 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) CHECK(T(i * 3 + k, j * 3 + l) == A(i, j) * B(k, l));
}

TEST_CASE("power_order_fit: exact power laws") {
  {
    const std::vector<double> s = {1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> q;
    for (double x : s) q.push_back(x * x);
    CHECK(std::abs(power_order_fit(s, q).slope - 2.0) <= 1e-9);
  }
  {
    const auto s = geometric_grid();
    std::vector<double> q;
    for (double x : s) q.push_back(3.0 * x);
    const auto f = power_order_fit(s, q);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  {
    const auto s = geometric_grid();
    std::vector<double> q;
    for (double x : s) q.push_back(x + 10.0 * x * x);
    const double k = power_order_fit(s, q).slope;
    CHECK(k >= 0.95);
    CHECK(k <= 1.05);
  }
}

TEST_CASE("power_order_fit: invariant under rescaling the values") {
  const auto s = geometric_grid();
  std::vector<double> q, q7;
  for (double x : s) {
    q.push_back(std::pow(x, 1.7) * (1.0 + x));
    q7.push_back(7.0 * q.back());
  }
  CHECK(std::abs(power_order_fit(s, q).slope - power_order_fit(s, q7).slope) <= 1e-9);
}

TEST_CASE("power_order_fit: degenerate samples") {
  CHECK_THROWS_AS(power_order_fit({1, 2, 3}, {1, 2, 3}), Error);
  try {
    power_order_fit({1, 2, 3, 4}, {1, 0, 3, 4});
    FAIL("expected DegenerateSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSamples);
  }
}

TEST_CASE("assess_order: zero floor") {
  const auto s = geometric_grid();
  std::vector<double> tiny(s.size(), 1e-20);
  const auto a = assess_order(s, tiny, s);
  CHECK(a.vanishing);
  CHECK_FALSE(a.fitted);
  std::vector<double> quad;
  for (double x : s) quad.push_back(x * x);
  const auto b = assess_order(s, quad, s);
  CHECK(b.fitted);
  CHECK(b.fit.slope == doctest::Approx(2.0));
}

TEST_CASE("matrix_residual_norm") {
  const ComplexMatrix a = random_matrix(3, 3, 5);
  CHECK(matrix_residual_norm(a, a) == 0.0);
  CHECK(matrix_residual_norm(ComplexMatrix(ComplexMatrix::Identity(2, 2)), ComplexMatrix(ComplexMatrix::Zero(2, 2))) ==
        doctest::Approx(std::sqrt(2.0)));
  const ComplexMatrix b = random_matrix(3, 3, 6);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const double re = a(i, k).real() - b(i, k).real(), im = a(i, k).imag() - b(i, k).imag();
      acc += re * re + im * im;
    }
  CHECK(std::abs(matrix_residual_norm(a, b) - std::sqrt(acc)) <= 1e-14 * std::sqrt(acc));
  CHECK_THROWS_AS(matrix_residual_norm(a, ComplexMatrix(ComplexMatrix::Zero(2, 2))), Error);
}

TEST_CASE("geometric_grid default") {
  const auto g = geometric_grid();
  REQUIRE(g.size() == 8);
  CHECK(g.front() == 1e-5);
  CHECK(g.back() == 1e-2);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1e3, 1.0 / 7.0)));
}

TEST_CASE("symmetric inverse and pseudo-inverse") {
  RealMatrix m(2, 2);
  m << 4, 1, 1, 3;
  const auto inv = symmetric_inverse(m, 1e-14);
  CHECK((m * inv.inverse - RealMatrix::Identity(2, 2)).norm() <= 1e-12);
  RealMatrix rank1(2, 2);
  rank1 << 1, 1, 1, 1;
  CHECK_THROWS_AS(symmetric_inverse(rank1, 1e-14), Error);
  const RealMatrix p = symmetric_pseudo_inverse(rank1);
  CHECK((rank1 * p * rank1 - rank1).norm() <= 1e-12);
}

TEST_CASE("counter rng is a pure function of (seed, stream, counter)") {
  CounterRng a(42, 3), b(42, 3), c(42, 3, 5);
  for (int i = 0; i < 5; ++i) a.next_u64();
  CHECK(a.next_u64() == c.next_u64());
  CHECK(b.next_u64() != CounterRng(42, 4).next_u64());
  double mean = 0.0;
  CounterRng u(1, 1);
  for (int i = 0; i < 100000; ++i) mean += u.uniform();
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
