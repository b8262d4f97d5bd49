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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "star/circuit.h"
#include "star/frame.h"
#include "star/resource_state.h"
#include "star/surface_code.h"
#include "star/tableau.h"
#include "star/z_channel.h"

namespace star {

enum class PrepMode { PS, EC };

inline const char *mode_name(PrepMode m) {
    return m == PrepMode::PS ? "PS" : "EC";
}

struct ProtocolConfig {
    int m = 2;
    int k = 3;
    int d = 6;
    double theta_star = 1e-3;
    PrepMode mode = PrepMode::EC;
    NoiseModel noise;
    /// Rounds appended after the two checked ones; they never reject.
    int extra_rounds = 0;
    /// Drop strata n >= 2 from the infidelity estimate (they enter at O(p^2)).
    bool truncate_strata = true;

    RotationImpl implementation() const {
        return noise.native_2q_rotation ? RotationImpl::Native2q : RotationImpl::VirtualZ;
    }

    void validate() const {
        if (m < 1 || m > 3) {
            throw std::invalid_argument("m must be 1, 2 or 3");
        }
        if (k < 1 || m * k != d) {
            throw std::invalid_argument("need k >= 1 and m*k == d");
        }
        if (!(std::abs(theta_star) > 0.0 && std::abs(theta_star) <= std::numbers::pi / 8)) {
            throw std::invalid_argument("|theta_star| must lie in (0, pi/8]");
        }
        if (extra_rounds < 0) {
            throw std::invalid_argument("extra_rounds must be non-negative");
        }
        noise.validate();
    }
};

/// A configuration compiled into its circuit, detectors and rejection regime.
/// Immutable after construction; safe to share across threads.
class Protocol {
   public:
    explicit Protocol(const ProtocolConfig &cfg) : config(cfg) {
        cfg.validate();
        auto built = build_layout(cfg.d, LayoutStyle::Unrotated);
        layout = std::move(built.first);
        logical = std::move(built.second);
        theta = physical_angle(cfg.theta_star, cfg.k);
        branches = branch_table(theta, cfg.k);
        schedule = rotation_schedule(layout, logical, cfg.m, cfg.k, theta, cfg.implementation());
        prep = preparation_circuit(layout, schedule, cfg.extra_rounds);
        program = lower_circuit(prep.circuit, cfg.noise, prep.num_qubits);

        // The regime is a property of the circuit: derive it with every error class on.
        NoiseModel full;
        full.p = 1e-3;
        full.idle_p = cfg.noise.idle_p;
        full.native_2q_rotation = cfg.noise.native_2q_rotation;
        auto probe = lower_circuit(prep.circuit, full, prep.num_qubits);
        faults = analyze_single_faults(probe, prep, logical);
        regime = post_selection_regime(faults, prep, layout.stabilizers.size());

        rejecting.assign(prep.num_checked, 0);
        for (size_t i = 0; i < prep.num_checked; i++) {
            rejecting[i] = cfg.mode == PrepMode::PS || regime.contains(prep.detectors[i].stab);
        }
        x_l_full = PauliString(prep.num_qubits);
        for (uint32_t q : logical.x_support) {
            x_l_full.set(q, true, false);
        }
        for (const auto &s : branches.strata) {
            stratum_weights.push_back(s.weight);
        }
    }

    ProtocolConfig config;
    CodeLayout layout;
    LogicalOperatorSpec logical;
    double theta = 0.0;
    BranchTable branches;
    RotationSchedule schedule;
    PreparationCircuit prep;
    NoisyProgram program;
    FaultAnalysis faults;
    PostSelectionRegime regime;
    /// Per checked detector: whether firing rejects in the configured mode.
    std::vector<uint8_t> rejecting;
    PauliString x_l_full;
    std::vector<double> stratum_weights;

    int num_strata() const {
        return static_cast<int>(branches.strata.size());
    }
};

namespace detail {

/// n distinct blocks out of k, uniformly.
inline void choose_blocks(int k, int n, Rng &rng, std::vector<int> &scratch) {
    scratch.resize(k);
    for (int i = 0; i < k; i++) {
        scratch[i] = i;
    }
    for (int i = 0; i < n; i++) {
        int j = i + static_cast<int>(rng() % static_cast<uint64_t>(k - i));
        std::swap(scratch[i], scratch[j]);
    }
    scratch.resize(n);
}

}  // namespace detail

struct PrepResult {
    bool accepted = false;
    int stratum = 0;
    /// Expectation of X_L on the final state: +1, -1, or 0 when X-type errors
    /// make it indefinite.
    int x_l_expectation = 0;
};

/// One trial on the stabilizer tableau. The stratum is drawn from the full
/// branch distribution unless forced.
inline PrepResult run_protocol_trial(const Protocol &P, Rng &rng, int forced_stratum = -1) {
    PrepResult res;
    if (forced_stratum >= P.num_strata()) {
        throw std::invalid_argument("stratum out of range");
    }
    if (forced_stratum >= 0) {
        res.stratum = forced_stratum;
    } else {
        std::discrete_distribution<int> pick(P.stratum_weights.begin(), P.stratum_weights.end());
        res.stratum = pick(rng);
    }
    std::vector<int> blocks;
    detail::choose_blocks(P.config.k, res.stratum, rng, blocks);
    std::vector<bool> flipped(P.config.k, false);
    for (int b : blocks) {
        flipped[b] = true;
    }
    StabilizerTableau t(P.prep.num_qubits);
    auto record = execute_on_tableau(P.program, t, rng, [&](const LoweredOp &op, StabilizerTableau &tab) {
        if (flipped[op.aux]) {
            tab.z_gate(op.a);
            if (op.arity == 2) {
                tab.z_gate(op.b);
            }
        }
    });
    auto dets = detector_values(P.prep.detectors, record);
    res.accepted = true;
    for (size_t i = 0; i < P.prep.num_checked; i++) {
        if (dets[i] && P.rejecting[i]) {
            res.accepted = false;
            break;
        }
    }
    res.x_l_expectation = t.expectation(P.x_l_full);
    return res;
}

struct StratumCounts {
    int n = 0;
    uint64_t sampled = 0;
    uint64_t passed = 0;
    /// Shots with no checked detector fired whose frame flips X_L.
    uint64_t silent_logical_flips = 0;

    StratumCounts &operator+=(const StratumCounts &o) {
        sampled += o.sampled;
        passed += o.passed;
        silent_logical_flips += o.silent_logical_flips;
        return *this;
    }
};

/// Frame-simulator Monte Carlo. forced_stratum < 0 draws each shot's stratum
/// from the full branch distribution. Results depend only on (seed, shots).
inline std::vector<StratumCounts> run_protocol_frames(
    const Protocol &P, int forced_stratum, uint64_t shots, uint64_t seed, int threads = 1) {
    int ns = P.num_strata();
    if (forced_stratum >= ns) {
        throw std::invalid_argument("stratum out of range");
    }
    threads = std::max(1, threads);
    uint64_t batches = (shots + 63) / 64;
    uint64_t tag = static_cast<uint64_t>(forced_stratum + 2) << 48;
    std::vector<std::vector<StratumCounts>> partial(threads, std::vector<StratumCounts>(ns));

    auto worker = [&](int tid) {
        FrameBatch f(P.program);
        std::vector<uint64_t> words;
        std::vector<int> scratch;
        std::vector<int> lane_stratum(64);
        auto &out = partial[tid];
        std::discrete_distribution<int> pick(P.stratum_weights.begin(), P.stratum_weights.end());
        for (uint64_t b = tid; b < batches; b += threads) {
            Rng rng = make_stream(seed, tag + b);
            uint64_t lanes = std::min<uint64_t>(64, shots - 64 * b);
            uint64_t valid = lanes == 64 ? ~uint64_t{0} : (uint64_t{1} << lanes) - 1;
            RandomNoiseSource src(P.program, rng);
            src.block_masks.assign(P.config.k, 0);
            for (uint64_t lane = 0; lane < lanes; lane++) {
                int n = forced_stratum >= 0 ? forced_stratum : pick(rng);
                lane_stratum[lane] = n;
                if (n == 0) {
                    continue;
                }
                detail::choose_blocks(P.config.k, n, rng, scratch);
                for (int blk : scratch) {
                    src.block_masks[blk] |= uint64_t{1} << lane;
                }
            }
            f.clear();
            run_frames(P.program, f, src);
            detector_words(P.prep.detectors, f, words);
            uint64_t reject = 0, fired = 0;
            for (size_t i = 0; i < P.prep.num_checked; i++) {
                fired |= words[i];
                if (P.rejecting[i]) {
                    reject |= words[i];
                }
            }
            uint64_t flip = detail::parity_mask(f, P.logical.x_support, false);
            uint64_t pass = ~reject & valid;
            uint64_t silent = ~fired & flip & valid;
            if (forced_stratum >= 0) {
                auto &c = out[forced_stratum];
                c.sampled += lanes;
                c.passed += std::popcount(pass);
                c.silent_logical_flips += std::popcount(silent);
            } else {
                for (uint64_t lane = 0; lane < lanes; lane++) {
                    auto &c = out[lane_stratum[lane]];
                    c.sampled++;
                    c.passed += (pass >> lane) & 1;
                    c.silent_logical_flips += (silent >> lane) & 1;
                }
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) {
            pool.emplace_back(worker, t);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    std::vector<StratumCounts> total(ns);
    for (int n = 0; n < ns; n++) {
        total[n].n = n;
        for (const auto &p : partial) {
            total[n] += p[n];
        }
    }
    return total;
}

enum class SamplingPlan { Stratified, Plain };

struct PrepStats {
    SamplingPlan plan = SamplingPlan::Stratified;
    std::vector<StratumCounts> strata;
    /// False when no shot was accepted.
    bool defined = false;
    double p_suc = 0.0, p_suc_sigma = 0.0;
    double infidelity = 0.0, infidelity_sigma = 0.0;
    double trace_distance = 0.0, trace_distance_sigma = 0.0;
    /// Stratum-0 rejection probability and its hazard -ln(1 - Q).
    double rejection = 0.0, hazard = 0.0, hazard_sigma = 0.0;
    /// Undetectable-error rate k r_1 / r_0 (stratum-1 over stratum-0 pass rate).
    double p_ud = 0.0, p_ud_sigma = 0.0;
    double supply_rate = 0.0, supply_rate_sigma = 0.0;
};

/// Trials per clock times success probability.
inline double supply_rate(const ProtocolConfig &cfg, double p_suc) {
    return cfg.d / 4.0 * p_suc;
}

/// Noiseless leading-order supply rate (d/4) p_ideal.
inline double supply_rate(const ProtocolConfig &cfg) {
    return supply_rate(cfg, ideal_success(physical_angle(cfg.theta_star, cfg.k), cfg.k));
}

inline PrepStats combine_stats(const Protocol &P, SamplingPlan plan, std::vector<StratumCounts> strata) {
    PrepStats st;
    st.plan = plan;
    st.strata = std::move(strata);
    const auto &br = P.branches.strata;
    int ns = static_cast<int>(st.strata.size());
    auto rate = [&](int n) {
        const auto &c = st.strata[n];
        return c.sampled ? static_cast<double>(c.passed) / c.sampled : 0.0;
    };
    auto var = [&](int n) {
        const auto &c = st.strata[n];
        double r = rate(n);
        return c.sampled ? r * (1 - r) / c.sampled : 0.0;
    };
    const auto &c0 = st.strata[0];
    if (c0.sampled) {
        double r0 = rate(0);
        st.rejection = 1 - r0;
        if (r0 > 0) {
            st.hazard = -std::log(r0);
            st.hazard_sigma = std::sqrt(var(0)) / r0;
        }
    }
    int top = P.config.truncate_strata ? std::min(ns, 2) : ns;

    if (plan == SamplingPlan::Stratified) {
        double q0 = br[0].weight, r0 = rate(0);
        double ps = 0.0, ps_var = 0.0, num_f = 0.0, num_d = 0.0;
        for (int n = 0; n < top; n++) {
            ps += br[n].weight * rate(n);
            ps_var += br[n].weight * br[n].weight * var(n);
        }
        st.p_suc = ps;
        st.p_suc_sigma = std::sqrt(ps_var);
        st.defined = ps > 0.0;
        if (!st.defined) {
            return st;
        }
        // delta-method propagation of I = sum_n q_n r_n w_n / p_suc
        double vf = 0.0, vd = 0.0;
        for (int n = 1; n < top; n++) {
            double dlt = br[n].angle - br[0].angle;
            num_f += br[n].weight * rate(n) * std::sin(dlt) * std::sin(dlt);
            num_d += br[n].weight * rate(n) * std::abs(std::sin(dlt));
        }
        st.infidelity = num_f / ps;
        st.trace_distance = num_d / ps;
        for (int n = 0; n < top; n++) {
            double dlt = br[n].angle - br[0].angle;
            double wf = n ? std::sin(dlt) * std::sin(dlt) : 0.0;
            double wd = n ? std::abs(std::sin(dlt)) : 0.0;
            double gf = br[n].weight * (wf - st.infidelity) / ps;
            double gd = br[n].weight * (wd - st.trace_distance) / ps;
            vf += gf * gf * var(n);
            vd += gd * gd * var(n);
        }
        st.infidelity_sigma = std::sqrt(vf);
        st.trace_distance_sigma = std::sqrt(vd);
        if (ns > 1 && r0 > 0 && q0 > 0) {
            double r1 = rate(1);
            int k = P.config.k;
            st.p_ud = k * r1 / r0;
            st.p_ud_sigma = k * std::sqrt(var(1) / (r0 * r0) + r1 * r1 * var(0) / (r0 * r0 * r0 * r0));
        }
    } else {
        uint64_t total = 0, pass = 0;
        for (const auto &c : st.strata) {
            total += c.sampled;
            pass += c.passed;
        }
        st.p_suc = total ? static_cast<double>(pass) / total : 0.0;
        st.p_suc_sigma = total ? std::sqrt(st.p_suc * (1 - st.p_suc) / total) : 0.0;
        st.defined = pass > 0;
        if (!st.defined) {
            return st;
        }
        double vf = 0.0, vd = 0.0, nf = 0.0, nd = 0.0;
        for (int n = 1; n < top; n++) {
            double dlt = br[n].angle - br[0].angle;
            double sf = std::sin(dlt) * std::sin(dlt), sd = std::abs(std::sin(dlt));
            double cnt = static_cast<double>(st.strata[n].passed);
            nf += cnt * sf;
            nd += cnt * sd;
            vf += cnt * sf * sf;
            vd += cnt * sd * sd;
        }
        st.infidelity = nf / pass;
        st.trace_distance = nd / pass;
        st.infidelity_sigma = std::sqrt(vf) / pass;
        st.trace_distance_sigma = std::sqrt(vd) / pass;
        if (ns > 1 && rate(0) > 0) {
            st.p_ud = P.config.k * rate(1) / rate(0);
            double r0 = rate(0), r1 = rate(1);
            st.p_ud_sigma = P.config.k * std::sqrt(var(1) / (r0 * r0) + r1 * r1 * var(0) / (r0 * r0 * r0 * r0));
        }
    }
    st.supply_rate = supply_rate(P.config, st.p_suc);
    st.supply_rate_sigma = supply_rate(P.config, st.p_suc_sigma);
    return st;
}

/// Stratified: `shots` conditional trials for each of strata 0 and 1 (and higher
/// strata when not truncated). Plain: `shots` trials with strata drawn from the
/// branch distribution.
inline PrepStats estimate_stats(const Protocol &P, SamplingPlan plan, uint64_t shots, uint64_t seed, int threads = 1) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be at least 1");
    }
    std::vector<StratumCounts> counts;
    if (plan == SamplingPlan::Stratified) {
        int top = P.config.truncate_strata ? std::min(P.num_strata(), 2) : P.num_strata();
        counts.resize(P.num_strata());
        for (int n = 0; n < P.num_strata(); n++) {
            counts[n].n = n;
        }
        for (int n = 0; n < top; n++) {
            counts[n] = run_protocol_frames(P, n, shots, seed, threads)[n];
        }
    } else {
        counts = run_protocol_frames(P, -1, shots, seed, threads);
    }
    return combine_stats(P, plan, std::move(counts));
}

/// Pure Z-flip channel of the two-qubit-encoding preparation: (2/15) p, or
/// (1/15) p for the improved variant.
inline ZAxisChannel two_qubit_encoding_channel(double p, bool improved) {
    if (p < 0) {
        throw std::invalid_argument("p_ph must be non-negative");
    }
    return ZAxisChannel::dephasing((improved ? 1.0 : 2.0) / 15.0 * p);
}

}  // namespace star
