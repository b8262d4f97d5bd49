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
#include <limits>
#include <stdexcept>
#include <vector>

#include "star/hamiltonian.h"

namespace star {

struct QcelsParams {
    double delta = 0.06;
    int K = 5;
    int N_s = 100;
    double eps_qpe = 5e-3;
    double eps_trotter = 5e-3;
    double eps_target = 1e-2;

    void validate() const {
        if (!(delta > 0) || K < 2 || N_s < 1) {
            throw std::invalid_argument("QCELS needs delta > 0, K >= 2, N_s >= 1");
        }
        if (!(eps_qpe > 0 && eps_qpe < 1 && eps_trotter > 0)) {
            throw std::invalid_argument("QCELS precisions must be positive (eps_qpe < 1)");
        }
        if (eps_qpe + eps_trotter > eps_target * (1 + 1e-12)) {
            throw std::invalid_argument("eps_trotter + eps_qpe exceeds eps_target");
        }
    }
};

struct DeviceParams {
    double p = 1e-4;
    double cycle_us = 1.0;
    double alpha = 1.5;
    double safety = 100.0;
    /// Sampling overhead per circuit beyond which the run counts as mitigation-dominated.
    double gamma2_cap = std::exp(8.0);

    void validate() const {
        if (!(p > 0 && p < 1e-2)) {
            throw std::invalid_argument("p_ph must lie in (0, 1e-2)");
        }
        if (!(cycle_us > 0 && alpha > 0 && safety > 0 && gamma2_cap >= 1)) {
            throw std::invalid_argument("device parameters must be positive");
        }
    }
};

struct HamiltonianSummary {
    double L = 0;
    double lambda = 0;
    double c_av = 0;
    int n_sys = 0;

    static HamiltonianSummary of(const PauliHamiltonian &h, const ClockCostModel &clocks = {}) {
        return {static_cast<double>(h.num_terms()), h.one_norm(), avg_clock(h, clocks), static_cast<int>(h.num_qubits())};
    }
};

struct QcelsSchedule {
    int J = 0;
    std::vector<double> tau;
    /// delta / eps.
    double T_max = 0;
    /// K tau_J, up to a factor 2 above delta / eps.
    double T_max_levels = 0;
    double T_total = 0;
    /// 2 (K-1) N_s T_max and 4 (K-1) N_s T_max.
    double lower = 0, upper = 0;
};

/// Levels j = 1..J with tau_j = 2^(j-1) delta / K and J = ceil(log2(1/eps)) + 1.
inline QcelsSchedule qcels_schedule(double delta, int K, int N_s, double eps) {
    if (!(eps > 0 && eps < 1)) {
        throw std::invalid_argument("eps_qpe must lie in (0, 1)");
    }
    QcelsSchedule s;
    s.J = static_cast<int>(std::ceil(std::log2(1.0 / eps))) + 1;
    double tau0 = delta / K;
    for (int j = 1; j <= s.J; j++) {
        s.tau.push_back(std::ldexp(tau0, j - 1));
        s.T_total += static_cast<double>(K) * (K - 1) * N_s * s.tau.back();
    }
    s.T_max = delta / eps;
    s.T_max_levels = K * s.tau.back();
    s.lower = 2.0 * (K - 1) * N_s * s.T_max;
    s.upper = 4.0 * (K - 1) * N_s * s.T_max;
    return s;
}

struct TrotterCounts {
    double dt = 0;
    double N_total = 0;
    double N_max = 0;
};

/// dt = sqrt(eps_T / W); a controlled evolution needs half the steps, hence the 2 dt.
inline TrotterCounts trotter_steps(double W, double eps_trotter, const QcelsSchedule &s) {
    if (!(W > 0 && eps_trotter > 0)) {
        throw std::invalid_argument("W and eps_trotter must be positive");
    }
    TrotterCounts t;
    t.dt = std::sqrt(eps_trotter / W);
    t.N_total = s.T_total / (2 * t.dt);
    t.N_max = s.T_max / (2 * t.dt);
    return t;
}

/// Per code cycle: 0.1 (100 p)^((d+1)/2).
inline double logical_error_rate(double p, int d) {
    return 0.1 * std::pow(100.0 * p, (d + 1) / 2.0);
}

/// Smallest d >= 3 with 1/p_L >= safety * 4 d L C_av N_max N_patch.
inline int select_code_distance(const DeviceParams &dev, double L, double c_av, double n_max, double n_patch) {
    if (!(L > 0 && c_av > 0 && n_max > 0 && n_patch > 0)) {
        throw std::invalid_argument("code-distance inputs must be positive");
    }
    for (int d = 3; d <= 99; d++) {
        double lhs = -std::log(logical_error_rate(dev.p, d));
        double rhs = std::log(dev.safety * 4.0 * d * L * c_av * n_max * n_patch);
        if (lhs >= rhs) {
            return d;
        }
    }
    throw std::runtime_error("no code distance up to 99 satisfies the Clifford error budget");
}

struct PatchCount {
    long n_patch = 0;
    long physical_qubits = 0;
};

/// N_patch = round(3/2 (N_sys + 6)); 2 d^2 physical qubits per patch.
inline PatchCount patch_and_qubit_count(int n_sys, int d) {
    if (n_sys < 1 || d < 1) {
        throw std::invalid_argument("need N_sys >= 1 and d >= 1");
    }
    PatchCount c;
    c.n_patch = std::lround(1.5 * (n_sys + 6));
    c.physical_qubits = c.n_patch * 2L * d * d;
    return c;
}

struct LevelCost {
    int j = 0;
    double tau = 0;
    /// gamma^2 of the longest circuit on this level.
    double gamma2_max = 1;
    double time_us = 0;
};

struct ExecutionTime {
    double total_s = 0;
    double parallel_s = 0;
    std::vector<LevelCost> ledger;
    double gamma2_max = 1;
    bool mitigation_dominated = false;
};

/// sum over levels and points of 4 d L C_av gamma^2_(n tau_j) N_s n tau_j sqrt(W/eps_T)
/// code cycles, with gamma^2_tau = exp(2 alpha lambda tau p); fully parallel
/// time 4 d L C_av N_max cycles. mitigation=false sets gamma = 1.
inline ExecutionTime execution_time(
    const DeviceParams &dev, const QcelsParams &q, const HamiltonianSummary &h, double W, int d, bool mitigation = true) {
    auto sched = qcels_schedule(q.delta, q.K, q.N_s, q.eps_qpe);
    auto steps = trotter_steps(W, q.eps_trotter, sched);
    double per_step = 4.0 * d * h.L * h.c_av * dev.cycle_us;
    double root = std::sqrt(W / q.eps_trotter);
    ExecutionTime out;
    double total_us = 0;
    for (int j = 0; j < sched.J; j++) {
        LevelCost lc;
        lc.j = j + 1;
        lc.tau = sched.tau[j];
        for (int n = 0; n < q.K; n++) {
            double t = n * lc.tau;
            double g2 = mitigation ? std::exp(2.0 * dev.alpha * h.lambda * t * dev.p) : 1.0;
            lc.gamma2_max = std::max(lc.gamma2_max, g2);
            lc.time_us += per_step * g2 * q.N_s * t * root;
        }
        out.gamma2_max = std::max(out.gamma2_max, lc.gamma2_max);
        total_us += lc.time_us;
        out.ledger.push_back(lc);
    }
    out.total_s = total_us * 1e-6;
    out.parallel_s = per_step * steps.N_max * 1e-6;
    out.mitigation_dominated = out.gamma2_max > dev.gamma2_cap;
    return out;
}

struct ResourceEstimate {
    double eps_trotter = 0, eps_qpe = 0;
    int J = 0;
    double T_max = 0, T_max_levels = 0, T_total = 0;
    double N_max = 0, N_total = 0;
    int d = 0;
    long n_patch = 0;
    long physical_qubits = 0;
    int data_qubits = 0;
    ExecutionTime time;
};

/// Full estimate at the error split given in q.
inline ResourceEstimate estimate(const DeviceParams &dev, const QcelsParams &q, const HamiltonianSummary &h, double W) {
    dev.validate();
    q.validate();
    ResourceEstimate r;
    r.eps_trotter = q.eps_trotter;
    r.eps_qpe = q.eps_qpe;
    auto sched = qcels_schedule(q.delta, q.K, q.N_s, q.eps_qpe);
    auto steps = trotter_steps(W, q.eps_trotter, sched);
    r.J = sched.J;
    r.T_max = sched.T_max;
    r.T_max_levels = sched.T_max_levels;
    r.T_total = sched.T_total;
    r.N_max = steps.N_max;
    r.N_total = steps.N_total;
    long n_patch = patch_and_qubit_count(h.n_sys, 1).n_patch;
    r.d = select_code_distance(dev, h.L, h.c_av, steps.N_max, static_cast<double>(n_patch));
    auto pc = patch_and_qubit_count(h.n_sys, r.d);
    r.n_patch = pc.n_patch;
    r.physical_qubits = pc.physical_qubits;
    r.data_qubits = h.n_sys + 1;
    r.time = execution_time(dev, q, h, W, r.d);
    return r;
}

/// Split eps_target = eps_T + eps_QPE minimizing the total execution time:
/// log-spaced grid over eps_T / eps_target, then golden-section refinement.
inline QcelsParams optimize_error_split(double eps_target, const DeviceParams &dev, QcelsParams q, const HamiltonianSummary &h, double W) {
    if (!(eps_target > 0)) {
        throw std::invalid_argument("eps_target must be positive");
    }
    q.eps_target = eps_target;
    auto cost = [&](double f) {
        QcelsParams t = q;
        t.eps_trotter = f * eps_target;
        t.eps_qpe = eps_target - t.eps_trotter;
        try {
            return estimate(dev, t, h, W).time.total_s;
        } catch (const std::exception &) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const int grid = 200;
    double lo_f = 1e-3, hi_f = 1 - 1e-3;
    std::vector<double> fs(grid), cs(grid);
    int best = 0;
    for (int i = 0; i < grid; i++) {
        fs[i] = lo_f + (hi_f - lo_f) * i / (grid - 1);
        cs[i] = cost(fs[i]);
        if (cs[i] < cs[best]) {
            best = i;
        }
    }
    double a = fs[std::max(0, best - 1)], b = fs[std::min(grid - 1, best + 1)];
    double best_f = fs[best], best_c = cs[best];
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = cost(c), fe = cost(e);
    for (int it = 0; it < 80 && b - a > 1e-12; it++) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = cost(e);
        }
    }
    for (auto [f, v] : {std::pair{c, fc}, std::pair{e, fe}}) {
        if (v < best_c) {
            best_c = v;
            best_f = f;
        }
    }
    q.eps_trotter = best_f * eps_target;
    q.eps_qpe = eps_target - q.eps_trotter;
    return q;
}

struct TrotterNormCalibration {
    double W = 0;
    int d = 0;
};

/// W that makes the fully parallel time equal target_s, with d re-selected
/// self-consistently (fixed-point over d).
inline TrotterNormCalibration calibrate_trotter_norm(
    double target_s, const DeviceParams &dev, const QcelsParams &q, const HamiltonianSummary &h) {
    if (!(target_s > 0)) {
        throw std::invalid_argument("target time must be positive");
    }
    long n_patch = patch_and_qubit_count(h.n_sys, 1).n_patch;
    int d = 3;
    double W = 0;
    for (int it = 0; it < 50; it++) {
        double n_max = target_s * 1e6 / (4.0 * d * h.L * h.c_av * dev.cycle_us);
        double root = n_max * 2.0 * q.eps_qpe / q.delta;
        W = q.eps_trotter * root * root;
        int nd = select_code_distance(dev, h.L, h.c_av, n_max, static_cast<double>(n_patch));
        if (nd == d) {
            return {W, d};
        }
        d = nd;
    }
    throw std::runtime_error("W calibration did not reach a consistent code distance");
}

struct TrotterNormWindow {
    /// select_code_distance returns d for W in (lo, hi].
    double lo = 0, hi = 0;
    bool empty() const {
        return !(lo < hi);
    }
    double center() const {
        return std::sqrt(lo * hi);
    }
};

/// Range of W for which the code-distance rule picks exactly d at the split in q.
inline TrotterNormWindow trotter_norm_window(int d, const DeviceParams &dev, const QcelsParams &q, const HamiltonianSummary &h) {
    if (d < 3) {
        throw std::invalid_argument("d must be at least 3");
    }
    double n_patch = static_cast<double>(patch_and_qubit_count(h.n_sys, 1).n_patch);
    // N_max = c sqrt(W).
    double c = q.delta / (2 * q.eps_qpe) / std::sqrt(q.eps_trotter);
    auto w_at = [&](int dd) {
        double n_max = 1.0 / (logical_error_rate(dev.p, dd) * dev.safety * 4.0 * dd * h.L * h.c_av * n_patch);
        return (n_max / c) * (n_max / c);
    };
    return {d == 3 ? 0.0 : w_at(d - 1), w_at(d)};
}

}  // namespace star
