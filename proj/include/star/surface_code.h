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
#include <array>
#include <bit>
#include <cstdint>
#include <iterator>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "star/circuit.h"
#include "star/frame.h"
#include "star/pauli.h"

namespace star {

enum class LayoutStyle { Unrotated, Rotated };

/// Unit step of a CNOT layer, in grid coordinates.
enum class Direction { N, W, E, S, NW, NE, SW, SE };

struct Coord {
    int r = 0;
    int c = 0;
    bool operator<(const Coord &o) const {
        return r != o.r ? r < o.r : c < o.c;
    }
    bool operator==(const Coord &o) const = default;
};

inline Coord step(Coord p, Direction d) {
    switch (d) {
        case Direction::N:
            return {p.r - 1, p.c};
        case Direction::W:
            return {p.r, p.c - 1};
        case Direction::E:
            return {p.r, p.c + 1};
        case Direction::S:
            return {p.r + 1, p.c};
        case Direction::NW:
            return {p.r - 1, p.c - 1};
        case Direction::NE:
            return {p.r - 1, p.c};
        case Direction::SW:
            return {p.r, p.c - 1};
        case Direction::SE:
            return {p.r, p.c};
    }
    return p;
}

struct Plaquette {
    bool x_type = false;
    Coord anc;
    /// Data qubit per CNOT layer (-1 where the plaquette has no neighbour).
    std::array<int32_t, 4> layer_data{-1, -1, -1, -1};
    PauliString op;
};

/// Planar surface-code patch. Qubit indices: data first, then one ancilla per
/// plaquette in plaquette order. Z plaquettes precede X plaquettes.
struct CodeLayout {
    int d = 0;
    LayoutStyle style = LayoutStyle::Unrotated;
    std::array<Direction, 4> cnot_order{};
    std::vector<Coord> data;
    std::vector<Plaquette> stabilizers;
    std::map<Coord, uint32_t> data_index;
    std::map<Coord, uint32_t> ancilla_index;
    size_t num_z_stabilizers = 0;

    size_t num_data() const {
        return data.size();
    }
    size_t num_qubits() const {
        return data.size() + stabilizers.size();
    }
    uint32_t ancilla(size_t s) const {
        return static_cast<uint32_t>(data.size() + s);
    }
    /// Qubit index at a grid site (data or ancilla), or -1.
    int64_t qubit_at(Coord p) const {
        if (auto it = data_index.find(p); it != data_index.end()) {
            return it->second;
        }
        if (auto it = ancilla_index.find(p); it != ancilla_index.end()) {
            return data.size() + it->second;
        }
        return -1;
    }
};

struct LogicalOperatorSpec {
    std::vector<uint32_t> q_z;
    std::vector<uint32_t> x_support;
    PauliString z_l;
    PauliString x_l;
};

inline std::array<Direction, 4> default_cnot_order(LayoutStyle style) {
    if (style == LayoutStyle::Rotated) {
        return {Direction::NW, Direction::NE, Direction::SW, Direction::SE};
    }
    return {Direction::N, Direction::W, Direction::E, Direction::S};
}

namespace detail {

inline void finish_plaquettes(CodeLayout &L, std::vector<Plaquette> &zs, std::vector<Plaquette> &xs) {
    L.num_z_stabilizers = zs.size();
    L.stabilizers = std::move(zs);
    L.stabilizers.insert(L.stabilizers.end(), xs.begin(), xs.end());
    for (size_t s = 0; s < L.stabilizers.size(); s++) {
        auto &st = L.stabilizers[s];
        L.ancilla_index[st.anc] = static_cast<uint32_t>(s);
        st.op = PauliString(L.data.size());
        for (int32_t q : st.layer_data) {
            if (q >= 0) {
                st.op.set(q, st.x_type, !st.x_type);
            }
        }
    }
}

}  // namespace detail

/// Builds the layout and logical operators. Z_L is Z on the top data row (Q_z),
/// X_L is X on the left data column.
inline std::pair<CodeLayout, LogicalOperatorSpec> build_layout(
    int d, LayoutStyle style = LayoutStyle::Unrotated, std::array<Direction, 4> order = {}) {
    if (d < 2) {
        throw std::invalid_argument("code distance must be at least 2");
    }
    CodeLayout L;
    L.d = d;
    L.style = style;
    bool default_order = order == std::array<Direction, 4>{};
    L.cnot_order = default_order ? default_cnot_order(style) : order;
    std::vector<Plaquette> zs, xs;

    if (style == LayoutStyle::Unrotated) {
        for (auto dir : L.cnot_order) {
            if (dir != Direction::N && dir != Direction::W && dir != Direction::E && dir != Direction::S) {
                throw std::invalid_argument("unrotated layout needs an N/W/E/S CNOT order");
            }
        }
        int n = 2 * d - 1;
        for (int r = 0; r < n; r++) {
            for (int c = 0; c < n; c++) {
                if ((r + c) % 2 == 0) {
                    L.data_index[{r, c}] = static_cast<uint32_t>(L.data.size());
                    L.data.push_back({r, c});
                }
            }
        }
        for (int r = 0; r < n; r++) {
            for (int c = 0; c < n; c++) {
                if ((r + c) % 2 == 0) {
                    continue;
                }
                Plaquette p;
                p.x_type = r % 2 == 0;
                p.anc = {r, c};
                for (int l = 0; l < 4; l++) {
                    auto it = L.data_index.find(step(p.anc, L.cnot_order[l]));
                    if (it != L.data_index.end()) {
                        p.layer_data[l] = static_cast<int32_t>(it->second);
                    }
                }
                (p.x_type ? xs : zs).push_back(p);
            }
        }
    } else {
        for (auto dir : L.cnot_order) {
            if (dir != Direction::NW && dir != Direction::NE && dir != Direction::SW && dir != Direction::SE) {
                throw std::invalid_argument("rotated layout needs an NW/NE/SW/SE CNOT order");
            }
        }
        for (int r = 0; r < d; r++) {
            for (int c = 0; c < d; c++) {
                L.data_index[{r, c}] = static_cast<uint32_t>(L.data.size());
                L.data.push_back({r, c});
            }
        }
        // Plaquette (i, j) sits on the corner shared by data (i-1..i, j-1..j).
        for (int i = 0; i <= d; i++) {
            for (int j = 0; j <= d; j++) {
                bool x_type = (i + j) % 2 == 0;
                bool top_bottom = i == 0 || i == d;
                bool left_right = j == 0 || j == d;
                if (top_bottom && left_right) {
                    continue;
                }
                if ((top_bottom && !x_type) || (left_right && x_type)) {
                    continue;
                }
                Plaquette p;
                p.x_type = x_type;
                p.anc = {i, j};
                for (int l = 0; l < 4; l++) {
                    auto it = L.data_index.find(step(p.anc, L.cnot_order[l]));
                    if (it != L.data_index.end()) {
                        p.layer_data[l] = static_cast<int32_t>(it->second);
                    }
                }
                (p.x_type ? xs : zs).push_back(p);
            }
        }
    }
    detail::finish_plaquettes(L, zs, xs);

    LogicalOperatorSpec lo;
    lo.z_l = PauliString(L.num_data());
    lo.x_l = PauliString(L.num_data());
    int stride = style == LayoutStyle::Unrotated ? 2 : 1;
    for (int j = 0; j < d; j++) {
        uint32_t qz = L.data_index.at({0, stride * j});
        uint32_t qx = L.data_index.at({stride * j, 0});
        lo.q_z.push_back(qz);
        lo.x_support.push_back(qx);
        lo.z_l.set(qz, false, true);
        lo.x_l.set(qx, true, false);
    }
    return {std::move(L), std::move(lo)};
}

/// Rank over GF(2) of the stabilizer generators (symplectic rows).
inline size_t stabilizer_rank(const CodeLayout &L) {
    std::vector<std::vector<uint64_t>> rows;
    for (const auto &s : L.stabilizers) {
        auto row = s.op.x_words();
        row.insert(row.end(), s.op.z_words().begin(), s.op.z_words().end());
        rows.push_back(std::move(row));
    }
    size_t rank = 0;
    size_t bits = rows.empty() ? 0 : rows[0].size() * 64;
    for (size_t col = 0; col < bits && rank < rows.size(); col++) {
        size_t w = col / 64;
        uint64_t m = uint64_t{1} << (col % 64);
        size_t piv = rank;
        while (piv < rows.size() && !(rows[piv][w] & m)) {
            piv++;
        }
        if (piv == rows.size()) {
            continue;
        }
        std::swap(rows[piv], rows[rank]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != rank && (rows[i][w] & m)) {
                for (size_t k = 0; k < rows[i].size(); k++) {
                    rows[i][k] ^= rows[rank][k];
                }
            }
        }
        rank++;
    }
    return rank;
}

/// One syndrome-extraction round: all Z plaquettes, then all X plaquettes.
/// Measurements come out in plaquette order.
inline Circuit syndrome_circuit(const CodeLayout &L) {
    Circuit out;
    auto half = [&](bool x_type) {
        size_t begin = x_type ? L.num_z_stabilizers : 0;
        size_t end = x_type ? L.stabilizers.size() : L.num_z_stabilizers;
        for (size_t s = begin; s < end; s++) {
            out.push_back(CliffordOp::init_z(L.ancilla(s)));
        }
        out.push_back(CliffordOp::tick());
        if (x_type) {
            for (size_t s = begin; s < end; s++) {
                out.push_back(CliffordOp::h(L.ancilla(s)));
            }
            out.push_back(CliffordOp::tick());
        }
        for (int l = 0; l < 4; l++) {
            for (size_t s = begin; s < end; s++) {
                int32_t q = L.stabilizers[s].layer_data[l];
                if (q < 0) {
                    continue;
                }
                if (x_type) {
                    out.push_back(CliffordOp::cnot(L.ancilla(s), q));
                } else {
                    out.push_back(CliffordOp::cnot(q, L.ancilla(s)));
                }
            }
            out.push_back(CliffordOp::tick());
        }
        if (x_type) {
            for (size_t s = begin; s < end; s++) {
                out.push_back(CliffordOp::h(L.ancilla(s)));
            }
            out.push_back(CliffordOp::tick());
        }
        for (size_t s = begin; s < end; s++) {
            out.push_back(CliffordOp::measure_z(L.ancilla(s)));
        }
        out.push_back(CliffordOp::tick());
    };
    half(false);
    half(true);
    return out;
}

enum class RotationImpl { VirtualZ, Native2q };

struct RotationSchedule {
    int m = 0;
    int k = 0;
    double theta = 0.0;
    RotationImpl impl = RotationImpl::VirtualZ;
    Circuit ops;
    /// Data qubits of each weight-m block.
    std::vector<std::vector<uint32_t>> blocks;
};

/// Transversal product of k weight-m Z rotations over Q_z, routed through the
/// X ancillas that sit between consecutive Q_z members on the top row.
inline RotationSchedule rotation_schedule(
    const CodeLayout &L, const LogicalOperatorSpec &lo, int m, int k, double theta, RotationImpl impl) {
    if (m < 1 || m > 3) {
        throw std::invalid_argument("rotation weight m must be 1, 2 or 3");
    }
    if (m * k != L.d) {
        throw std::invalid_argument("m*k must equal the code distance");
    }
    if (L.style != LayoutStyle::Unrotated) {
        throw std::invalid_argument("rotation schedules are built on the unrotated layout");
    }
    RotationSchedule rs;
    rs.m = m;
    rs.k = k;
    rs.theta = theta;
    rs.impl = impl;
    auto top = [&](int c) -> uint32_t {
        return static_cast<uint32_t>(L.qubit_at({0, c}));
    };
    std::vector<std::vector<CliffordOp>> steps;
    auto add = [&](size_t idx, CliffordOp op) {
        if (steps.size() <= idx) {
            steps.resize(idx + 1);
        }
        steps[idx].push_back(std::move(op));
    };
    for (int i = 0; i < k; i++) {
        std::vector<uint32_t> block(lo.q_z.begin() + m * i, lo.q_z.begin() + m * (i + 1));
        rs.blocks.push_back(block);
        if (m == 1) {
            add(0, impl == RotationImpl::VirtualZ ? CliffordOp::ideal_rz(block[0], theta, i)
                                                   : CliffordOp::noisy_rz(block[0], theta, i));
        } else if (m == 2) {
            uint32_t a = top(4 * i), s = top(4 * i + 1), b = top(4 * i + 2);
            add(0, CliffordOp::swap(a, s));
            if (impl == RotationImpl::VirtualZ) {
                add(1, CliffordOp::cnot(s, b));
                add(2, CliffordOp::ideal_rz(b, theta, i));
                add(3, CliffordOp::cnot(s, b));
                add(4, CliffordOp::swap(a, s));
            } else {
                add(1, CliffordOp::noisy_rzz(s, b, theta, i));
                add(2, CliffordOp::swap(a, s));
            }
        } else {
            uint32_t a = top(6 * i), s1 = top(6 * i + 1), b = top(6 * i + 2);
            uint32_t s2 = top(6 * i + 3), c = top(6 * i + 4);
            add(0, CliffordOp::swap(a, s1));
            add(0, CliffordOp::swap(c, s2));
            add(1, CliffordOp::cnot(s1, b));
            if (impl == RotationImpl::VirtualZ) {
                add(2, CliffordOp::cnot(s2, b));
                add(3, CliffordOp::ideal_rz(b, theta, i));
                add(4, CliffordOp::cnot(s2, b));
                add(5, CliffordOp::cnot(s1, b));
                add(6, CliffordOp::swap(a, s1));
                add(6, CliffordOp::swap(c, s2));
            } else {
                add(2, CliffordOp::noisy_rzz(s2, b, theta, i));
                add(3, CliffordOp::cnot(s1, b));
                add(4, CliffordOp::swap(a, s1));
                add(4, CliffordOp::swap(c, s2));
            }
        }
    }
    for (auto &st : steps) {
        for (auto &op : st) {
            rs.ops.push_back(std::move(op));
        }
        rs.ops.push_back(CliffordOp::tick());
    }
    return rs;
}

/// Parity check between measurements m0 and m1 (m1 == kNone for a single one).
struct Detector {
    static constexpr uint32_t kNone = UINT32_MAX;
    uint32_t stab = 0;
    uint32_t round = 0;
    uint32_t m0 = 0;
    uint32_t m1 = kNone;
};

/// Data preparation in |+>, one syndrome round, the rotation, then two rounds
/// (plus optional extra rounds that never reject).
struct PreparationCircuit {
    Circuit circuit;
    size_t num_qubits = 0;
    size_t num_rounds = 0;
    size_t num_blocks = 0;
    std::vector<Detector> detectors;
    /// Detectors that count for rejection (rounds 0..2).
    size_t num_checked = 0;
};

inline PreparationCircuit preparation_circuit(const CodeLayout &L, const RotationSchedule &rs, int extra_rounds = 0) {
    if (extra_rounds < 0) {
        throw std::invalid_argument("extra_rounds must be non-negative");
    }
    PreparationCircuit pc;
    pc.num_qubits = L.num_qubits();
    pc.num_blocks = rs.blocks.size();
    pc.num_rounds = 3 + static_cast<size_t>(extra_rounds);
    for (uint32_t q = 0; q < L.num_data(); q++) {
        pc.circuit.push_back(CliffordOp::init_z(q));
    }
    pc.circuit.push_back(CliffordOp::tick());
    for (uint32_t q = 0; q < L.num_data(); q++) {
        pc.circuit.push_back(CliffordOp::h(q));
    }
    pc.circuit.push_back(CliffordOp::tick());
    Circuit round = syndrome_circuit(L);
    size_t ns = L.stabilizers.size();
    for (size_t r = 0; r < pc.num_rounds; r++) {
        pc.circuit.insert(pc.circuit.end(), round.begin(), round.end());
        if (r == 0) {
            pc.circuit.insert(pc.circuit.end(), rs.ops.begin(), rs.ops.end());
        }
        for (size_t s = 0; s < ns; s++) {
            uint32_t m = static_cast<uint32_t>(r * ns + s);
            if (r == 0) {
                if (L.stabilizers[s].x_type) {
                    pc.detectors.push_back({static_cast<uint32_t>(s), 0, m, Detector::kNone});
                }
            } else {
                pc.detectors.push_back({static_cast<uint32_t>(s), static_cast<uint32_t>(r), m, m - static_cast<uint32_t>(ns)});
            }
        }
        if (r == 2) {
            pc.num_checked = pc.detectors.size();
        }
    }
    return pc;
}

/// Detector flip masks of a frame batch.
inline void detector_words(const std::vector<Detector> &dets, const FrameBatch &f, std::vector<uint64_t> &out) {
    out.resize(dets.size());
    for (size_t i = 0; i < dets.size(); i++) {
        const auto &d = dets[i];
        out[i] = f.meas[d.m0] ^ (d.m1 == Detector::kNone ? 0 : f.meas[d.m1]);
    }
}

/// Detector outcomes of one tableau shot (true = fired).
inline std::vector<bool> detector_values(const std::vector<Detector> &dets, const std::vector<bool> &record) {
    std::vector<bool> out(dets.size());
    for (size_t i = 0; i < dets.size(); i++) {
        const auto &d = dets[i];
        out[i] = record[d.m0] ^ (d.m1 == Detector::kNone ? false : record[d.m1]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single-fault enumeration.

struct FaultRecord {
    uint32_t site = 0;
    uint8_t branch = 0;
    double probability = 0.0;
    /// Checked detectors fired by this fault alone (sorted).
    std::vector<uint32_t> detectors;
    /// Final frame anticommutes with Z_L (an X-type logical flip).
    bool flips_z_l = false;
    /// Final frame anticommutes with X_L.
    bool flips_x_l = false;
};

struct FaultAnalysis {
    std::vector<FaultRecord> faults;
    /// Checked detectors fired by the block flip Z^b alone.
    std::vector<std::vector<uint32_t>> block_detectors;
};

namespace detail {

/// Frame source that injects one enumerated fault per lane.
struct InjectedFaults {
    const std::vector<std::pair<uint32_t, uint8_t>> *lanes = nullptr;
    const NoisyProgram *prog = nullptr;
    std::vector<uint64_t> block_masks;

    SiteErrors noise(const LoweredOp &op) const {
        SiteErrors e;
        if (lanes->empty() || op.aux < lanes->front().first || op.aux > lanes->back().first) {
            return e;
        }
        for (size_t lane = 0; lane < lanes->size(); lane++) {
            const auto &[site, branch] = (*lanes)[lane];
            if (site != op.aux) {
                continue;
            }
            int c0, c1;
            noise_branch(op.cls, branch, c0, c1);
            uint64_t bit = uint64_t{1} << lane;
            PauliCode p0 = pauli_code(c0), p1 = pauli_code(c1);
            if (p0.x) e.ax |= bit;
            if (p0.z) e.az |= bit;
            if (p1.x) e.bx |= bit;
            if (p1.z) e.bz |= bit;
        }
        return e;
    }
    uint64_t marker(const LoweredOp &op) const {
        return op.aux < block_masks.size() ? block_masks[op.aux] : 0;
    }
};

inline void scatter_lanes(
    const std::vector<uint64_t> &words, size_t num_checked, size_t lanes, std::vector<std::vector<uint32_t>> &out) {
    out.assign(lanes, {});
    for (size_t i = 0; i < num_checked; i++) {
        uint64_t w = words[i];
        while (w) {
            int lane = std::countr_zero(w);
            w &= w - 1;
            if (static_cast<size_t>(lane) < lanes) {
                out[lane].push_back(static_cast<uint32_t>(i));
            }
        }
    }
}

inline uint64_t parity_mask(const FrameBatch &f, const std::vector<uint32_t> &support, bool use_x) {
    uint64_t m = 0;
    for (uint32_t q : support) {
        m ^= use_x ? f.x[q] : f.z[q];
    }
    return m;
}

}  // namespace detail

/// Propagates every single fault (site, Pauli branch) and every block flip
/// through the noiseless program, 64 per frame batch.
inline FaultAnalysis analyze_single_faults(
    const NoisyProgram &prog, const PreparationCircuit &pc, const LogicalOperatorSpec &lo) {
    FaultAnalysis fa;
    FrameBatch f(prog);
    std::vector<uint64_t> words;
    std::vector<std::vector<uint32_t>> per_lane;
    std::vector<std::pair<uint32_t, uint8_t>> lanes;
    detail::InjectedFaults src;
    src.prog = &prog;
    src.lanes = &lanes;

    for (size_t b0 = 0; b0 < pc.num_blocks; b0 += 64) {
        size_t nb = std::min<size_t>(64, pc.num_blocks - b0);
        src.block_masks.assign(pc.num_blocks, 0);
        for (size_t i = 0; i < nb; i++) {
            src.block_masks[b0 + i] = uint64_t{1} << i;
        }
        f.clear();
        run_frames(prog, f, src);
        detector_words(pc.detectors, f, words);
        detail::scatter_lanes(words, pc.num_checked, nb, per_lane);
        for (auto &v : per_lane) {
            fa.block_detectors.push_back(std::move(v));
        }
    }
    src.block_masks.clear();

    std::vector<std::pair<uint32_t, uint8_t>> all;
    for (uint32_t s = 0; s < prog.sites.size(); s++) {
        const LoweredOp &op = prog.ops[prog.sites[s]];
        for (int b = 0; b < noise_branches(op.cls); b++) {
            all.emplace_back(s, static_cast<uint8_t>(b));
        }
    }
    for (size_t start = 0; start < all.size(); start += 64) {
        size_t n = std::min<size_t>(64, all.size() - start);
        lanes.assign(all.begin() + start, all.begin() + start + n);
        f.clear();
        run_frames(prog, f, src);
        detector_words(pc.detectors, f, words);
        detail::scatter_lanes(words, pc.num_checked, n, per_lane);
        uint64_t zl = detail::parity_mask(f, lo.q_z, true);
        uint64_t xl = detail::parity_mask(f, lo.x_support, false);
        for (size_t lane = 0; lane < n; lane++) {
            FaultRecord rec;
            rec.site = lanes[lane].first;
            rec.branch = lanes[lane].second;
            const LoweredOp &op = prog.ops[prog.sites[rec.site]];
            rec.probability = prog.class_p[static_cast<int>(op.cls)] / noise_branches(op.cls);
            rec.detectors = std::move(per_lane[lane]);
            rec.flips_z_l = (zl >> lane) & 1;
            rec.flips_x_l = (xl >> lane) & 1;
            fa.faults.push_back(std::move(rec));
        }
    }
    return fa;
}

inline std::vector<uint32_t> symmetric_difference(const std::vector<uint32_t> &a, const std::vector<uint32_t> &b) {
    std::vector<uint32_t> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// First-order probability that a single fault exactly cancels the detector
/// pattern of block flip b (the undetectable-error rate of that block).
inline double undetectable_rate(const FaultAnalysis &fa, size_t block) {
    double total = 0.0;
    for (const auto &f : fa.faults) {
        if (f.detectors == fa.block_detectors[block]) {
            total += f.probability;
        }
    }
    return total;
}

struct PostSelectionRegime {
    /// Sorted stabilizer indices whose detectors trigger rejection.
    std::vector<uint32_t> stabilizers;
    std::vector<bool> member;
    /// Rounds the regime applies to: the initial round and the two after the rotation.
    int rounds = 3;

    bool contains(uint32_t s) const {
        return s < member.size() && member[s];
    }
};

/// Smallest fixpoint regime such that every single fault combined with any
/// single block flip either cancels exactly or hits the regime.
inline PostSelectionRegime post_selection_regime(const FaultAnalysis &fa, const PreparationCircuit &pc, size_t num_stabilizers) {
    PostSelectionRegime reg;
    reg.member.assign(num_stabilizers, false);
    auto hits = [&](const std::vector<uint32_t> &dets) {
        for (uint32_t d : dets) {
            if (reg.member[pc.detectors[d].stab]) {
                return true;
            }
        }
        return false;
    };
    auto add = [&](const std::vector<uint32_t> &dets) {
        for (uint32_t d : dets) {
            reg.member[pc.detectors[d].stab] = true;
        }
    };
    for (const auto &bd : fa.block_detectors) {
        add(bd);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &bd : fa.block_detectors) {
            for (const auto &f : fa.faults) {
                auto diff = symmetric_difference(f.detectors, bd);
                if (!diff.empty() && !hits(diff)) {
                    add(diff);
                    changed = true;
                }
            }
        }
    }
    for (uint32_t s = 0; s < num_stabilizers; s++) {
        if (reg.member[s]) {
            reg.stabilizers.push_back(s);
        }
    }
    return reg;
}

/// Regime for a weight-m rotation on the given layout.
inline PostSelectionRegime post_selection_regime(
    const CodeLayout &L, const LogicalOperatorSpec &lo, int m, RotationImpl impl = RotationImpl::VirtualZ) {
    auto rs = rotation_schedule(L, lo, m, L.d / m, 0.1, impl);
    auto pc = preparation_circuit(L, rs);
    NoiseModel nm;
    nm.p = 1e-3;
    auto prog = lower_circuit(pc.circuit, nm, pc.num_qubits);
    auto fa = analyze_single_faults(prog, pc, lo);
    return post_selection_regime(fa, pc, L.stabilizers.size());
}

}  // namespace star
