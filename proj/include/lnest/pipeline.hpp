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
#include <string>
#include <vector>

#include "lnest/estimator.hpp"

namespace lnest {

struct PointOptions {
  RealVector weights;  // cluster-resolution direction; uniform when empty
  RaisePolicy raise = RaisePolicy::Strict;
  bool build_estimator = true;
  /// Ray fractions used to classify the shifts at a single point.
  std::vector<double> probe = {0.125, 0.25, 0.5, 1.0};
};

/// Everything the sweep needs at one eps.
struct PointAnalysis {
  ParamVector eps;
  OutputSpectrum spec;
  SpectralDerivatives deriv;
  EigenShifts shifts;
  RealMatrix dshifts;  // D x (N-1)
  FisherMatrix J, Jc, Jdiv;
  bool jdiv_ok = false;
  double det = 0.0;
  double det_normalized = 0.0;
  std::optional<AOperatorSet> aset;
  std::optional<EstimatorPOVM> povm;
  std::optional<MSEMatrix> V;
  RealVector bias;
  std::optional<CRGap> gap;
  std::string fisher_error;
  std::string estimator_error;
};

EigenShifts classify_point_shifts(const LowNoiseChannel& ch, const ComplexVector& phi,
                                  const ParamVector& eps, const RealVector& values,
                                  const std::vector<double>& probe);

PointAnalysis analyze_point(const LowNoiseChannel& ch, const ComplexVector& phi,
                            const ParamVector& eps, const PointOptions& opts = {});

}  // namespace lnest
