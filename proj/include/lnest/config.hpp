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
#include <string>

#include "json.hpp"
#include "lnest/channel.hpp"

namespace lnest {

using json = nlohmann::json;

// Complex entries are [re, im] pairs; matrices are arrays of rows.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);
json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const json& j);
json real_vector_to_json(const RealVector& v);
RealVector real_vector_from_json(const json& j);

/// Builds the channel described by a config document (see
/// docs/config-schema.md). Throws ConfigInvalid on schema errors.
LowNoiseChannel channel_from_config(const json& cfg);

/// Config fragment for a channel without opaque higher-order closures.
json channel_to_config(const LowNoiseChannel& ch);

json load_config_file(const std::string& path);

/// FNV-1a 64-bit of the compact dump, printed as 16 hex digits.
std::string config_hash(const json& cfg);

}  // namespace lnest
