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

#include "lnest/pipeline.hpp"

#include <cmath>

namespace lnest {

EigenShifts classify_point_shifts(const LowNoiseChannel& ch, const ComplexVector& phi,
                                  const ParamVector& eps, const RealVector& values,
                                  const std::vector<double>& probe) {
  std::vector<RealVector> curves;
  std::vector<double> scales;
  const double norm1 = eps.lpNorm<1>();
  for (double t : probe) {
    const ParamVector e = t * eps;
    curves.push_back(t == 1.0 ? values : RealVector(diagonalize_output(ch, phi, e).probs.tail(values.size())));
    scales.push_back(t * norm1);
  }
  EigenShifts out;
  out.values = values;
  if (norm1 == 0.0) {
    out.order.assign(values.size(), ShiftOrder::HigherOrZero);
    return out;
  }
  out.order = classify_shift_curves(curves, scales);
  return out;
}

PointAnalysis analyze_point(const LowNoiseChannel& ch, const ComplexVector& phi,
                            const ParamVector& eps, const PointOptions& opts) {
  const int d = ch.num_params();
  PointAnalysis pa;
  pa.eps = eps;
  pa.spec = diagonalize_output(ch, phi, eps);
  const ComplexMatrix rho = pure_state(phi);
  std::vector<ComplexMatrix> drho;
  for (int mu = 0; mu < d; ++mu) drho.push_back(channel_derivative(ch, rho, eps, mu));
  RealVector w = opts.weights.size() == d ? opts.weights : RealVector::Constant(d, 1.0 / d);
  pa.deriv = spectral_derivatives(pa.spec, drho, w);

  const Eigen::Index n = pa.spec.probs.size();
  pa.shifts = classify_point_shifts(ch, phi, eps, pa.spec.probs.tail(n - 1), opts.probe);
  pa.dshifts = pa.deriv.dprobs.rightCols(n - 1);

  pa.J = quantum_fisher(pa.spec, sld_operators(pa.spec, drho), drho);
  try {
    pa.J = fisher_inverse(pa.J);
  } catch (const Error& e) {
    pa.fisher_error = e.what();
  }
  pa.Jc = classical_fisher(pa.spec, pa.deriv.dprobs);
  pa.det = pa.Jc.entries.determinant() / std::pow(4.0, d);
  pa.det_normalized = normalized_det(pa.Jc.entries);
  try {
    pa.Jdiv = divergent_fisher(pa.shifts, pa.dshifts);
    pa.jdiv_ok = true;
  } catch (const Error& e) {
    pa.estimator_error = e.what();
    return pa;
  }
  if (!opts.build_estimator) return pa;
  try {
    pa.aset = raise_index(build_lowered_A(pa.spec, pa.shifts, pa.dshifts), pa.Jdiv, opts.raise);
    pa.povm = build_povm(*pa.aset);
    pa.V = analytic_mse(*pa.povm, ch, phi, eps);
    pa.bias = pa.V->mean - eps;
    if (pa.J.inverse) pa.gap = cr_gap(*pa.V, pa.J);
  } catch (const Error& e) {
    pa.estimator_error = e.what();
  }
  return pa;
}

}  // namespace lnest
