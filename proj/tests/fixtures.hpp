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

// Small fixtures shared by the unit tests.

#pragma once

#include <cmath>
#include <initializer_list>

#include "lnest/config.hpp"
#include "lnest/rng.hpp"

namespace fx {

using namespace lnest;

inline ParamVector params(std::initializer_list<double> v) {
  ParamVector p(v.size());
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

// bit flip on eps^1, phase flip on eps^2
inline LowNoiseChannel pauli_channel() {
  json cfg = {{"dim", 2},
              {"params", 2},
              {"builder", "explicit"},
              {"scalar_completion", true},
              {"c_terms", json::array({{{"mu", 0}, {"matrix", matrix_to_json(pauli_x())}},
                                       {{"mu", 1}, {"matrix", matrix_to_json(pauli_z())}}})}};
  return channel_from_config(cfg);
}

inline LowNoiseChannel bell_channel() { return ancilla_extend(pauli_channel()); }

inline ComplexVector bell_state() {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return phi;
}

// |1> = (|00> - |11>)/sqrt2, |2> = |01>, |3> = |10>
inline ComplexMatrix bell_frame() {
  ComplexMatrix v = ComplexMatrix::Zero(4, 3);
  v(0, 0) = 1.0 / std::sqrt(2.0);
  v(3, 0) = -1.0 / std::sqrt(2.0);
  v(1, 1) = 1.0;
  v(2, 2) = 1.0;
  return v;
}

inline ComplexMatrix threelevel_m1() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(1, 0) = 1.0;
  return m;
}

inline ComplexMatrix threelevel_m2() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(1, 0) = m(2, 0) = 1.0 / std::sqrt(2.0);
  return m;
}

inline LowNoiseChannel threelevel_channel() {
  return LowNoiseChannel::sqrt_completion(3, 2, {{0, threelevel_m1()}, {1, threelevel_m2()}});
}

inline ComplexVector threelevel_input() { return ComplexVector::Constant(3, 1.0 / std::sqrt(3.0)); }

inline ComplexMatrix random_state(int n, std::uint64_t seed) {
  CounterRng rng(seed, 9);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = cplx(rng.normal(), rng.normal());
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

inline ComplexMatrix random_unitary(int n, std::uint64_t seed) {
  CounterRng rng(seed, 10);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = cplx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace fx
