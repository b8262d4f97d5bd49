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
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/roots.hpp>

namespace star {

/// Probability that the post-rotation syndrome is trivial: sin^2k + cos^2k.
inline double ideal_success(double theta, int k) {
    double s = std::sin(theta), c = std::cos(theta);
    return std::pow(s * s, k) + std::pow(c * c, k);
}

/// Logical angle produced by k transversal rotations by theta.
inline double logical_angle(double theta, int k) {
    double sk = std::pow(std::abs(std::sin(theta)), k);
    double v = std::asin(sk / std::sqrt(ideal_success(theta, k)));
    return theta < 0 ? -v : v;
}

/// Probability weight of one flipped block and its complement:
/// sin^2 cos^2 (sin^(2k-4) + cos^(2k-4)).
inline double error_probability(double theta, int k) {
    if (k < 2) {
        return 0.0;
    }
    double s2 = std::sin(theta) * std::sin(theta), c2 = std::cos(theta) * std::cos(theta);
    return s2 * c2 * (std::pow(s2, k - 2) + std::pow(c2, k - 2));
}

/// Logical angle left behind when a single block flip goes undetected.
inline double error_angle(double theta, int k) {
    double pe = error_probability(theta, k);
    if (pe <= 0.0) {
        return 0.0;
    }
    double v = std::asin(std::pow(std::abs(std::sin(theta)), k - 1) * std::cos(theta) / std::sqrt(pe));
    return theta < 0 ? v : -v;
}

/// Physical angle theta with logical_angle(theta, k) == theta_star.
inline double physical_angle(double theta_star, int k) {
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    double target = std::abs(theta_star);
    if (!(target > 0.0 && target <= std::numbers::pi / 8 + 1e-15)) {
        throw std::domain_error("|theta_star| must lie in (0, pi/8]");
    }
    if (k == 1) {
        return theta_star;
    }
    double log_target = std::log(std::sin(target));
    auto f = [&](double th) {
        return k * std::log(std::sin(th)) - 0.5 * std::log(ideal_success(th, k)) - log_target;
    };
    double lo = std::pow(std::sin(target), 1.0 / k) * 0.5;
    while (f(lo) > 0.0) {
        lo *= 0.5;
    }
    double hi = std::numbers::pi / 4;
    if (f(hi) < 0.0) {
        throw std::domain_error("no physical angle in (0, pi/4)");
    }
    boost::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 6), iters);
    double th = 0.5 * (a + b);
    if (iters >= 200) {
        throw std::runtime_error("physical_angle did not converge");
    }
    return theta_star < 0 ? -th : th;
}

struct Stratum {
    int n = 0;
    /// Amplitude i^n sin^n cos^(k-n) of one pattern with n flipped blocks.
    std::complex<double> amplitude;
    /// Probability of landing in this syndrome class (patterns of weight n and k-n).
    double weight = 0.0;
    /// Logical angle of the post-selected state in this class.
    double angle = 0.0;
};

struct BranchTable {
    int k = 0;
    double theta = 0.0;
    std::vector<Stratum> strata;
};

/// Strata n = 0..floor(k/2). Weight-n and weight-(k-n) patterns share a
/// syndrome, so each class carries both amplitudes.
inline BranchTable branch_table(double theta, int k) {
    if (k < 1) {
        throw std::invalid_argument("k must be positive");
    }
    BranchTable bt;
    bt.k = k;
    bt.theta = theta;
    double s = std::abs(std::sin(theta)), c = std::cos(theta);
    auto mag2 = [&](int n) {
        return std::pow(s * s, n) * std::pow(c * c, k - n);
    };
    for (int n = 0; 2 * n <= k; n++) {
        Stratum st;
        st.n = n;
        std::complex<double> in = std::pow(std::complex<double>(0, 1), n);
        st.amplitude = in * std::pow(s, n) * std::pow(c, k - n);
        double a = mag2(n), b = mag2(k - n);
        double binom = std::round(std::exp(std::lgamma(k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k - n + 1.0)));
        st.weight = binom * (a + b) * (2 * n == k ? 0.5 : 1.0);
        double ang = std::asin(std::sqrt(b / (a + b)));
        st.angle = (n % 2 == 0 ? ang : -ang) * (theta < 0 ? -1.0 : 1.0);
        bt.strata.push_back(st);
    }
    return bt;
}

/// Leading-order infidelity of the accepted state: (p_error P_ud / p_ideal) sin^2(theta_error - theta_star).
inline double infidelity_theory(double theta_star, int k, double p_ud) {
    double th = physical_angle(theta_star, k);
    double delta = error_angle(th, k) - theta_star;
    return error_probability(th, k) * p_ud / ideal_success(th, k) * std::sin(delta) * std::sin(delta);
}

/// Leading-order trace distance: (p_error P_ud / p_ideal) |sin(theta_error - theta_star)|.
inline double trace_distance_theory(double theta_star, int k, double p_ud) {
    double th = physical_angle(theta_star, k);
    double delta = error_angle(th, k) - theta_star;
    return error_probability(th, k) * p_ud / ideal_success(th, k) * std::abs(std::sin(delta));
}

}  // namespace star
