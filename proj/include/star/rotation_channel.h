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
#include <numbers>
#include <stdexcept>
#include <vector>

#include "star/resource_state.h"
#include "star/rng.h"
#include "star/z_channel.h"

namespace star {

/// Error model of one teleported rotation: with probability P_L the consumed
/// resource state carries the wrong angle, over-rotating by Delta.
/// All quantities are first order in p_ph.
struct RotationChannelModel {
    int k = 3;
    double p = 1e-4;
    /// P_ud = pud_coefficient * k * p. 2/15 for the virtual-Z rotation, 1/15 native.
    double pud_coefficient = 1.0 / 15.0;

    double pud() const {
        return pud_coefficient * k * p;
    }

    /// P_L(theta*) = p_error P_ud / p_ideal at the physical angle.
    double logical_error(double theta_star) const {
        if (theta_star == 0.0 || k < 2) {
            return 0.0;
        }
        double th = physical_angle(std::abs(theta_star), k);
        return error_probability(th, k) * pud() / ideal_success(th, k);
    }

    /// Delta(theta*) = theta_error - theta*, odd in theta*.
    double over_rotation(double theta_star) const {
        if (theta_star == 0.0 || k < 2) {
            return 0.0;
        }
        double a = std::abs(theta_star);
        double dl = error_angle(physical_angle(a, k), k) - a;
        return theta_star < 0 ? -dl : dl;
    }
};

/// Per-trial channel (x, y) = (P_L sin^2 Delta, P_L sin Delta cos Delta).
inline ZAxisChannel single_trial_channel(const RotationChannelModel &m, double theta_star) {
    double pl = m.logical_error(theta_star), dl = m.over_rotation(theta_star);
    return {pl * std::sin(dl) * std::sin(dl), pl * std::sin(dl) * std::cos(dl)};
}

/// (2/3) P_L Delta^2 and P_L |Delta| sqrt(1 + Delta^2).
inline ErrorRates single_trial_rates(const RotationChannelModel &m, double theta_star) {
    double pl = m.logical_error(theta_star), dl = m.over_rotation(theta_star);
    return {2.0 / 3.0 * pl * dl * dl, pl * std::abs(dl) * std::sqrt(1 + dl * dl)};
}

/// After probabilistic coherent cancellation: x = 2 P_L sin^2 Delta, y = 0.
inline ZAxisChannel canceled_channel(const RotationChannelModel &m, double theta_star) {
    double pl = m.logical_error(theta_star), dl = m.over_rotation(theta_star);
    return {2.0 * pl * std::sin(dl) * std::sin(dl), 0.0};
}

struct CancelRecipe {
    /// Apply the correction with this probability.
    double probability = 0.0;
    /// Rotation angle of the correction, -Delta.
    double correction_angle = 0.0;
    ZAxisChannel channel;
};

inline CancelRecipe coherent_cancel(const RotationChannelModel &m, double theta_star) {
    if (std::abs(theta_star) > std::numbers::pi / 8) {
        throw std::domain_error("|theta_star| must not exceed pi/8");
    }
    CancelRecipe r;
    r.probability = m.logical_error(theta_star);
    r.correction_angle = -m.over_rotation(theta_star);
    r.channel = r.probability > 0 ? canceled_channel(m, theta_star) : single_trial_channel(m, theta_star);
    return r;
}

/// Folds an angle into [-pi/8, pi/8] by a Clifford pi/4 rotation.
inline double wrap_angle(double a) {
    if (std::abs(a) > std::numbers::pi / 8) {
        return a > 0 ? a - std::numbers::pi / 4 : a + std::numbers::pi / 4;
    }
    return a;
}

/// Trial angles a_1..a_K of repeat-until-success: each failure applies -a_n,
/// so the next trial targets 2 a_n, wrapped.
inline std::vector<double> rus_angles(double theta_star, int K) {
    std::vector<double> out;
    double pending = theta_star;
    for (int n = 0; n < K; n++) {
        double a = wrap_angle(pending);
        out.push_back(a);
        pending = 2 * a;
    }
    return out;
}

struct RusOptions {
    bool canceled = false;
    bool switching = false;
    /// Rate of the constant-rate fallback protocol in units of p (1/15 improved, 2/15 original).
    double switch_rate = 1.0 / 15.0;
};

/// Channel used at one trial with target angle a.
inline ZAxisChannel trial_channel(const RotationChannelModel &m, double a, const RusOptions &opt) {
    ZAxisChannel ch = opt.canceled ? canceled_channel(m, a) : single_trial_channel(m, a);
    if (opt.switching) {
        ZAxisChannel alt = ZAxisChannel::dephasing(opt.switch_rate * m.p);
        if (error_rates(alt).diamond < error_rates(ch).diamond) {
            return alt;
        }
    }
    return ch;
}

/// Accumulated channel when the K-th trial succeeds.
inline ZAxisChannel rus_compose(const RotationChannelModel &m, double theta_star, int K, const RusOptions &opt) {
    if (K < 1) {
        throw std::invalid_argument("K must be at least 1");
    }
    auto a = rus_angles(theta_star, K);
    ZAxisChannel acc;
    for (int n = 0; n + 1 < K; n++) {
        acc = acc.then(trial_channel(m, -a[n], opt));
    }
    return acc.then(trial_channel(m, a[K - 1], opt));
}

struct RusAverage {
    double x = 0.0;
    double y = 0.0;
    double diamond = 0.0;
    /// diamond / (|theta*| p).
    double alpha = 0.0;
    int terms = 0;
};

/// Success-probability-weighted average sum_K 2^-K E^(K), summed per trial:
/// trial n fails with weight 2^-n and succeeds with weight 2^-n.
inline RusAverage rus_average(const RotationChannelModel &m, double theta_star, const RusOptions &opt, int max_terms = 200) {
    if (theta_star == 0.0) {
        return {};
    }
    // Bound on any single trial channel component.
    double bound = 2.0 * m.logical_error(std::numbers::pi / 8) + opt.switch_rate * m.p + 1e-300;
    RusAverage out;
    double pending = theta_star;
    double w = 1.0;
    for (int n = 1;; n++) {
        if (n > max_terms) {
            throw std::runtime_error("RUS series did not converge");
        }
        double a = wrap_angle(pending);
        w *= 0.5;
        ZAxisChannel s = trial_channel(m, a, opt), f = trial_channel(m, -a, opt);
        out.x += w * (s.x + f.x);
        out.y += w * (s.y + f.y);
        out.terms = n;
        pending = 2 * a;
        double tail = 4.0 * w * bound;
        if (tail < 1e-9 * std::hypot(out.x, out.y)) {
            break;
        }
    }
    out.diamond = std::hypot(out.x, out.y);
    out.alpha = m.p > 0 ? out.diamond / (std::abs(theta_star) * m.p) : 0.0;
    return out;
}

/// Inverse of the dephasing channel x = P as a signed mixture of {I, Z}.
struct QuasiProbabilityRep {
    double gamma = 1.0;
    double w_identity = 1.0;
    double w_z = 0.0;

    /// Draws a correction: returns true for Z; sign is the weight's sign times gamma.
    bool sample(Rng &rng, double &signed_gamma) const {
        bool z = uniform01(rng) * gamma < std::abs(w_z);
        signed_gamma = (z ? (w_z < 0 ? -1.0 : 1.0) : 1.0) * gamma;
        return z;
    }
};

inline QuasiProbabilityRep pec_decomposition(double p_l) {
    if (!(p_l >= 0.0 && p_l < 0.5)) {
        throw std::domain_error("PEC needs 0 <= P < 1/2");
    }
    QuasiProbabilityRep r;
    r.gamma = 1.0 / (1.0 - 2.0 * p_l);
    r.w_identity = r.gamma * (1.0 - p_l);
    r.w_z = -r.gamma * p_l;
    return r;
}

struct PecEstimate {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Mitigated <X> of |+> behind a dephasing channel of rate p_l, by sampling
/// the noise, the quasi-probability correction and the measurement outcome.
inline PecEstimate pec_toy_expectation_x(double p_l, uint64_t shots, uint64_t seed) {
    auto rep = pec_decomposition(p_l);
    Rng rng = make_stream(seed, 0);
    double sum = 0.0, sum2 = 0.0;
    for (uint64_t i = 0; i < shots; i++) {
        bool flip = uniform01(rng) < p_l;
        double g;
        flip ^= rep.sample(rng, g);
        double v = (flip ? -1.0 : 1.0) * g;
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / shots;
    return {mean, std::sqrt(std::max(0.0, sum2 / shots - mean * mean) / shots)};
}

struct MitigationCost {
    double theta_total = 0.0;
    double p_total = 0.0;
    double gamma2 = 1.0;
    /// e^(4 P_total).
    double gamma2_exponential = 1.0;
    double max_gate_error = 0.0;
};

/// gamma_total^2 = prod (1 - 2 P_i)^-2 with P_i = alpha |theta_i| p.
inline MitigationCost mitigation_cost(const std::vector<double> &angles, double alpha, double p) {
    if (!(alpha > 0)) {
        throw std::invalid_argument("alpha_RUS must be positive");
    }
    MitigationCost c;
    double log_g2 = 0.0;
    for (double th : angles) {
        double pl = alpha * std::abs(th) * p;
        if (pl >= 0.5) {
            throw std::domain_error("per-gate error reaches 1/2");
        }
        c.theta_total += std::abs(th);
        c.max_gate_error = std::max(c.max_gate_error, pl);
        log_g2 += -2.0 * std::log1p(-2.0 * pl);
    }
    c.p_total = alpha * c.theta_total * p;
    c.gamma2 = std::exp(log_g2);
    c.gamma2_exponential = std::exp(4.0 * c.p_total);
    return c;
}

/// Largest total rotation angle keeping P_total <= cap.
inline double angle_budget(double p, double alpha, double cap = 1.0) {
    if (!(p > 0)) {
        throw std::invalid_argument("p_ph must be positive");
    }
    return cap / (alpha * p);
}

}  // namespace star
