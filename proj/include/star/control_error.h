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
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "star/resource_state.h"
#include "star/rng.h"

namespace star {

/// Logical angle of k transversal rotations with individual physical angles.
inline double logical_angle_from(const std::vector<double> &angles) {
    double ps = 1.0, s2 = 1.0, c2 = 1.0;
    for (double a : angles) {
        ps *= std::sin(a);
        s2 *= std::sin(a) * std::sin(a);
        c2 *= std::cos(a) * std::cos(a);
    }
    return std::asin(ps / std::sqrt(s2 + c2));
}

/// Logical angle when block i over-rotates by phi_i.
inline double shifted_angle(double theta, const std::vector<double> &phi) {
    std::vector<double> a;
    for (double f : phi) {
        double v = theta + f;
        if (!(v > 0.0 && v < std::numbers::pi / 2)) {
            throw std::domain_error("theta + phi_i must lie in (0, pi/2)");
        }
        a.push_back(v);
    }
    return logical_angle_from(a);
}

/// Randomized transversal rotation: each block flips its rotation direction
/// with probability 1/2 (the over-rotation keeps its sign), and the known sign
/// of the resulting logical angle is undone. Averages sin(2 theta~) over all
/// 2^k patterns.
inline double randomized_average_angle(double theta, const std::vector<double> &phi) {
    size_t k = phi.size();
    if (k > 20) {
        throw std::invalid_argument("exact enumeration limited to k <= 20");
    }
    std::vector<double> flipped(k);
    double acc = 0.0;
    for (uint64_t pattern = 0; pattern < (uint64_t{1} << k); pattern++) {
        for (size_t i = 0; i < k; i++) {
            flipped[i] = (pattern >> i) & 1 ? -phi[i] : phi[i];
        }
        acc += std::sin(2.0 * shifted_angle(theta, flipped));
    }
    return 0.5 * std::asin(acc / static_cast<double>(uint64_t{1} << k));
}

/// Same average by sampling patterns, for k beyond exact enumeration.
inline double randomized_average_angle_sampled(double theta, const std::vector<double> &phi, uint64_t samples, Rng &rng) {
    std::vector<double> flipped(phi.size());
    double acc = 0.0;
    for (uint64_t s = 0; s < samples; s++) {
        for (size_t i = 0; i < phi.size(); i++) {
            flipped[i] = rng() & 1 ? -phi[i] : phi[i];
        }
        acc += std::sin(2.0 * shifted_angle(theta, flipped));
    }
    return 0.5 * std::asin(acc / static_cast<double>(samples));
}

struct OverRotationSpec {
    double phi_max = 1e-3;
    int samples = 100;
    uint64_t seed = 1;
};

struct CurvePoint {
    double theta_star = 0.0;
    double relative_error = 0.0;
    double sem = 0.0;
    /// Mean of sum phi_i^2 over the samples.
    double mean_sum_phi2 = 0.0;
};

/// Mean |theta~ - theta*| / theta* over phi_i ~ U[0, phi_max]. The same phi
/// draws are reused at every grid point.
inline std::vector<CurvePoint> relative_error_curves(
    const std::vector<double> &theta_star_grid, int k, const OverRotationSpec &spec, bool randomized) {
    if (k < 1 || spec.samples < 1) {
        throw std::invalid_argument("need k >= 1 and samples >= 1");
    }
    Rng rng = make_stream(spec.seed, static_cast<uint64_t>(k));
    std::uniform_real_distribution<double> u(0.0, spec.phi_max);
    std::vector<std::vector<double>> draws(spec.samples, std::vector<double>(k));
    for (auto &d : draws) {
        for (auto &f : d) {
            f = u(rng);
        }
    }
    std::vector<CurvePoint> out;
    for (double ts : theta_star_grid) {
        double th = physical_angle(ts, k);
        double sum = 0.0, sum2 = 0.0, sphi = 0.0;
        for (const auto &d : draws) {
            double got = randomized ? randomized_average_angle(th, d) : shifted_angle(th, d);
            double rel = std::abs(got - ts) / ts;
            sum += rel;
            sum2 += rel * rel;
            for (double f : d) {
                sphi += f * f;
            }
        }
        double n = spec.samples;
        double mean = sum / n;
        out.push_back({ts, mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n), sphi / n});
    }
    return out;
}

}  // namespace star
