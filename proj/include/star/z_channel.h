// Copyright 2026 The starlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

namespace star {

/// rho -> (1-x) rho + i y (Z rho - rho Z) + x Z rho Z.
struct ZAxisChannel {
    double x = 0.0;
    double y = 0.0;

    /// Unitary cos(phi) + i sin(phi) Z.
    static ZAxisChannel rotation(double phi) {
        return {std::sin(phi) * std::sin(phi), std::sin(phi) * std::cos(phi)};
    }
    static ZAxisChannel dephasing(double p) {
        return {p, 0.0};
    }

    /// Composition to first order in the weights (the family is abelian at that order).
    ZAxisChannel then(const ZAxisChannel &o) const {
        return {x + o.x, y + o.y};
    }
};

struct ErrorRates {
    double average = 0.0;
    double diamond = 0.0;
};

inline ErrorRates error_rates(const ZAxisChannel &ch) {
    return {2.0 * ch.x / 3.0, std::hypot(ch.x, ch.y)};
}

}  // namespace star
