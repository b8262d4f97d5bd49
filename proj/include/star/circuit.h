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
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "star/noise.h"
#include "star/pauli.h"
#include "star/rng.h"
#include "star/tableau.h"

namespace star {

enum class OpKind : uint8_t {
    H,
    S,
    CNOT,
    SWAP,
    InitZ,
    InitX,
    MeasureZ,
    PauliError,
    // Rotation markers. Never applied to a tableau; prep-protocol turns them
    // into stratum flips.
    IdealRz,
    NoisyRz,
    NoisyRzz,
    // Layer separator, only used for idle noise.
    Tick,
};

inline const char *op_name(OpKind k) {
    static constexpr const char *kNames[] = {
        "H", "S", "CNOT", "SWAP", "InitZ", "InitX", "MeasureZ", "PauliError", "IdealRz", "NoisyRz", "NoisyRzz", "Tick"};
    return kNames[static_cast<int>(k)];
}

struct CliffordOp {
    OpKind kind = OpKind::Tick;
    uint32_t a = 0;
    uint32_t b = 0;
    double angle = 0.0;
    int block = -1;
    PauliString pauli;

    static CliffordOp make(OpKind kind, uint32_t a = 0, uint32_t b = 0, double angle = 0.0, int block = -1) {
        CliffordOp op;
        op.kind = kind;
        op.a = a;
        op.b = b;
        op.angle = angle;
        op.block = block;
        return op;
    }
    static CliffordOp h(uint32_t q) {
        return make(OpKind::H, q, q);
    }
    static CliffordOp s(uint32_t q) {
        return make(OpKind::S, q, q);
    }
    static CliffordOp cnot(uint32_t c, uint32_t t) {
        return make(OpKind::CNOT, c, t);
    }
    static CliffordOp swap(uint32_t a, uint32_t b) {
        return make(OpKind::SWAP, a, b);
    }
    static CliffordOp init_z(uint32_t q) {
        return make(OpKind::InitZ, q, q);
    }
    static CliffordOp init_x(uint32_t q) {
        return make(OpKind::InitX, q, q);
    }
    static CliffordOp measure_z(uint32_t q) {
        return make(OpKind::MeasureZ, q, q);
    }
    static CliffordOp pauli_error(PauliString p) {
        CliffordOp op = make(OpKind::PauliError);
        op.pauli = std::move(p);
        return op;
    }
    static CliffordOp ideal_rz(uint32_t q, double theta, int block) {
        return make(OpKind::IdealRz, q, q, theta, block);
    }
    static CliffordOp noisy_rz(uint32_t q, double theta, int block) {
        return make(OpKind::NoisyRz, q, q, theta, block);
    }
    static CliffordOp noisy_rzz(uint32_t a, uint32_t b, double theta, int block) {
        return make(OpKind::NoisyRzz, a, b, theta, block);
    }
    static CliffordOp tick() {
        return make(OpKind::Tick);
    }

    bool is_marker() const {
        return kind == OpKind::IdealRz || kind == OpKind::NoisyRz || kind == OpKind::NoisyRzz;
    }
    bool two_qubit() const {
        return kind == OpKind::CNOT || kind == OpKind::SWAP || kind == OpKind::NoisyRzz;
    }
};

using Circuit = std::vector<CliffordOp>;

inline size_t circuit_num_qubits(const Circuit &circuit) {
    size_t n = 0;
    for (const auto &op : circuit) {
        if (op.kind == OpKind::PauliError) {
            n = std::max(n, op.pauli.num_qubits());
        } else if (op.kind != OpKind::Tick) {
            n = std::max<size_t>(n, std::max(op.a, op.b) + 1);
        }
    }
    return n;
}

/// Applies one Clifford op to the tableau. Markers and measurements are rejected.
inline void apply_clifford(StabilizerTableau &t, const CliffordOp &op, Rng &rng) {
    switch (op.kind) {
        case OpKind::H:
            t.h(op.a);
            break;
        case OpKind::S:
            t.s(op.a);
            break;
        case OpKind::CNOT:
            t.cx(op.a, op.b);
            break;
        case OpKind::SWAP:
            t.swap(op.a, op.b);
            break;
        case OpKind::InitZ:
            t.reset_z(op.a, rng);
            break;
        case OpKind::InitX:
            t.reset_x(op.a, rng);
            break;
        case OpKind::PauliError:
            t.apply_pauli(op.pauli);
            break;
        case OpKind::Tick:
            break;
        case OpKind::MeasureZ:
            throw std::invalid_argument("apply_clifford: use measure_z for measurements");
        default:
            throw std::invalid_argument(std::string("apply_clifford: rotation marker ") + op_name(op.kind) + " cannot act on a tableau");
    }
}

// ---------------------------------------------------------------------------
// Lowering to a flat noisy program, shared by the tableau and frame engines.

enum class Instr : uint8_t { H, S, CX, SWAP, ResetZ, Measure, Pauli, Noise, Marker };

struct LoweredOp {
    Instr kind;
    NoiseClass cls = NoiseClass::Gate1;
    uint8_t arity = 1;
    uint32_t a = 0;
    uint32_t b = 0;
    /// Measurement index, Pauli table index, noise site id or block id.
    uint32_t aux = 0;
};

struct NoisyProgram {
    size_t num_qubits = 0;
    size_t num_measurements = 0;
    size_t num_blocks = 0;
    std::vector<LoweredOp> ops;
    std::vector<PauliString> paulis;
    /// Index into ops of every noise site.
    std::vector<uint32_t> sites;
    /// Probability of each noise class firing (indexed by NoiseClass).
    double class_p[6] = {};
};

/// Noise after gates, flip after initialization and before readout.
/// Sites of disabled classes are omitted; enabled sites are kept even when p = 0
/// so that fault enumeration sees the same locations at every p.
inline NoisyProgram lower_circuit(const Circuit &circuit, const NoiseModel &model, size_t num_qubits = 0) {
    model.validate();
    NoisyProgram prog;
    prog.num_qubits = std::max(num_qubits, circuit_num_qubits(circuit));
    for (int c = 0; c < 6; c++) {
        prog.class_p[c] = noise_probability(model, static_cast<NoiseClass>(c));
    }
    bool enabled[6] = {model.init_flip, model.init_flip, model.measure_flip, model.gate1_depolarizing,
                       model.gate2_depolarizing, model.idle_p > 0.0};
    std::vector<bool> touched(prog.num_qubits, false);
    int max_block = -1;

    auto emit = [&](Instr k, uint32_t a, uint32_t b = 0, uint32_t aux = 0, uint8_t arity = 1) {
        prog.ops.push_back({k, NoiseClass::Gate1, arity, a, b, aux});
    };
    auto noise = [&](NoiseClass cls, uint32_t a, uint32_t b = 0) {
        if (!enabled[static_cast<int>(cls)]) {
            return;
        }
        uint8_t arity = cls == NoiseClass::Gate2 ? 2 : 1;
        prog.sites.push_back(static_cast<uint32_t>(prog.ops.size()));
        prog.ops.push_back({Instr::Noise, cls, arity, a, b, static_cast<uint32_t>(prog.sites.size() - 1)});
    };

    for (const auto &op : circuit) {
        if (op.kind != OpKind::Tick && op.kind != OpKind::PauliError) {
            touched[op.a] = true;
            touched[op.b] = true;
        }
        switch (op.kind) {
            case OpKind::H:
                emit(Instr::H, op.a);
                noise(NoiseClass::Gate1, op.a);
                break;
            case OpKind::S:
                emit(Instr::S, op.a);
                noise(NoiseClass::Gate1, op.a);
                break;
            case OpKind::CNOT:
                emit(Instr::CX, op.a, op.b, 0, 2);
                noise(NoiseClass::Gate2, op.a, op.b);
                break;
            case OpKind::SWAP:
                emit(Instr::SWAP, op.a, op.b, 0, 2);
                noise(NoiseClass::Gate2, op.a, op.b);
                break;
            case OpKind::InitZ:
                emit(Instr::ResetZ, op.a);
                noise(NoiseClass::Init, op.a);
                break;
            case OpKind::InitX:
                emit(Instr::ResetZ, op.a);
                emit(Instr::H, op.a);
                noise(NoiseClass::InitX, op.a);
                break;
            case OpKind::MeasureZ:
                noise(NoiseClass::Measure, op.a);
                emit(Instr::Measure, op.a, 0, static_cast<uint32_t>(prog.num_measurements++));
                break;
            case OpKind::PauliError:
                if (op.pauli.num_qubits() > prog.num_qubits) {
                    throw std::invalid_argument("PauliError wider than circuit");
                }
                prog.paulis.push_back(op.pauli);
                emit(Instr::Pauli, 0, 0, static_cast<uint32_t>(prog.paulis.size() - 1));
                break;
            case OpKind::IdealRz:
            case OpKind::NoisyRz:
            case OpKind::NoisyRzz: {
                if (op.block < 0) {
                    throw std::invalid_argument("rotation marker without block index");
                }
                max_block = std::max(max_block, op.block);
                uint8_t arity = op.kind == OpKind::NoisyRzz ? 2 : 1;
                emit(Instr::Marker, op.a, op.b, static_cast<uint32_t>(op.block), arity);
                if (op.kind == OpKind::NoisyRz) {
                    noise(NoiseClass::Gate1, op.a);
                } else if (op.kind == OpKind::NoisyRzz) {
                    noise(NoiseClass::Gate2, op.a, op.b);
                }
                break;
            }
            case OpKind::Tick:
                if (enabled[static_cast<int>(NoiseClass::Idle)]) {
                    for (uint32_t q = 0; q < prog.num_qubits; q++) {
                        if (!touched[q]) {
                            noise(NoiseClass::Idle, q);
                        }
                    }
                }
                std::fill(touched.begin(), touched.end(), false);
                break;
        }
    }
    prog.num_blocks = static_cast<size_t>(max_block + 1);
    return prog;
}

/// Runs a lowered program on a tableau. Marker ops are passed to on_marker;
/// when on_marker is empty they are an error.
inline std::vector<bool> execute_on_tableau(
    const NoisyProgram &prog,
    StabilizerTableau &t,
    Rng &rng,
    const std::function<void(const LoweredOp &, StabilizerTableau &)> &on_marker = {}) {
    std::vector<bool> record(prog.num_measurements);
    for (const auto &op : prog.ops) {
        switch (op.kind) {
            case Instr::H:
                t.h(op.a);
                break;
            case Instr::S:
                t.s(op.a);
                break;
            case Instr::CX:
                t.cx(op.a, op.b);
                break;
            case Instr::SWAP:
                t.swap(op.a, op.b);
                break;
            case Instr::ResetZ:
                t.reset_z(op.a, rng);
                break;
            case Instr::Measure:
                record[op.aux] = t.measure_z(op.a, rng);
                break;
            case Instr::Pauli:
                t.apply_pauli(prog.paulis[op.aux]);
                break;
            case Instr::Noise: {
                double p = prog.class_p[static_cast<int>(op.cls)];
                if (p <= 0.0 || uniform01(rng) >= p) {
                    break;
                }
                int branch = std::uniform_int_distribution<int>(0, noise_branches(op.cls) - 1)(rng);
                int c0, c1;
                noise_branch(op.cls, branch, c0, c1);
                auto apply = [&](uint32_t q, int c) {
                    PauliCode pc = pauli_code(c);
                    if (pc.x) {
                        t.x_gate(q);
                    }
                    if (pc.z) {
                        t.z_gate(q);
                    }
                };
                apply(op.a, c0);
                if (op.arity == 2) {
                    apply(op.b, c1);
                }
                break;
            }
            case Instr::Marker:
                if (!on_marker) {
                    throw std::invalid_argument("rotation marker encountered in a Clifford-only run");
                }
                on_marker(op, t);
                break;
        }
    }
    return record;
}

struct NoisyRunResult {
    std::vector<bool> measurements;
    StabilizerTableau tableau;
};

/// Executes a marker-free circuit with circuit-level noise on a fresh |0..0> tableau.
inline NoisyRunResult run_noisy_circuit(const Circuit &circuit, const NoiseModel &model, Rng &rng, size_t num_qubits = 0) {
    for (const auto &op : circuit) {
        if (op.is_marker()) {
            throw std::invalid_argument(std::string("run_noisy_circuit: rotation marker ") + op_name(op.kind));
        }
    }
    NoisyProgram prog = lower_circuit(circuit, model, num_qubits);
    StabilizerTableau t(prog.num_qubits);
    auto record = execute_on_tableau(prog, t, rng);
    return {std::move(record), std::move(t)};
}

}  // namespace star
