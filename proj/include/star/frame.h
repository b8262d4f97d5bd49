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

#include <array>
#include <cstdint>
#include <vector>

#include "star/circuit.h"
#include "star/rng.h"

namespace star {

/// Pauli frames of 64 shots, one bit per shot, tracked relative to the
/// noiseless reference execution. PauliError ops act as deliberate frame flips,
/// so detectors report deviation from the circuit without them.
struct FrameBatch {
    std::vector<uint64_t> x;
    std::vector<uint64_t> z;
    /// Per measurement: shots whose outcome differs from the reference.
    std::vector<uint64_t> meas;

    explicit FrameBatch(const NoisyProgram &prog)
        : x(prog.num_qubits, 0), z(prog.num_qubits, 0), meas(prog.num_measurements, 0) {
    }

    void clear() {
        std::fill(x.begin(), x.end(), 0);
        std::fill(z.begin(), z.end(), 0);
        std::fill(meas.begin(), meas.end(), 0);
    }
};

/// Error masks produced by one noise site.
struct SiteErrors {
    uint64_t ax = 0, az = 0, bx = 0, bz = 0;
};

/// Propagates frames through the program. Source supplies
///   SiteErrors noise(const LoweredOp &)       per noise site,
///   uint64_t marker(const LoweredOp &)        shots receiving Z at a rotation marker.
template <typename Source>
void run_frames(const NoisyProgram &prog, FrameBatch &f, Source &src) {
    for (const auto &op : prog.ops) {
        switch (op.kind) {
            case Instr::H:
                std::swap(f.x[op.a], f.z[op.a]);
                break;
            case Instr::S:
                f.z[op.a] ^= f.x[op.a];
                break;
            case Instr::CX:
                f.x[op.b] ^= f.x[op.a];
                f.z[op.a] ^= f.z[op.b];
                break;
            case Instr::SWAP:
                std::swap(f.x[op.a], f.x[op.b]);
                std::swap(f.z[op.a], f.z[op.b]);
                break;
            case Instr::ResetZ:
                f.x[op.a] = 0;
                f.z[op.a] = 0;
                break;
            case Instr::Measure:
                f.meas[op.aux] = f.x[op.a];
                // The post-measurement state is a Z eigenstate, so a Z frame is a global phase.
                f.z[op.a] = 0;
                break;
            case Instr::Pauli: {
                const PauliString &p = prog.paulis[op.aux];
                for (size_t q = 0; q < p.num_qubits(); q++) {
                    if (p.x(q)) {
                        f.x[q] = ~f.x[q];
                    }
                    if (p.z(q)) {
                        f.z[q] = ~f.z[q];
                    }
                }
                break;
            }
            case Instr::Noise: {
                SiteErrors e = src.noise(op);
                f.x[op.a] ^= e.ax;
                f.z[op.a] ^= e.az;
                if (op.arity == 2) {
                    f.x[op.b] ^= e.bx;
                    f.z[op.b] ^= e.bz;
                }
                break;
            }
            case Instr::Marker: {
                uint64_t m = src.marker(op);
                f.z[op.a] ^= m;
                if (op.arity == 2) {
                    f.z[op.b] ^= m;
                }
                break;
            }
        }
    }
}

/// Independent stochastic noise at every site, drawn by geometric gap sampling.
class RandomNoiseSource {
   public:
    RandomNoiseSource(const NoisyProgram &prog, Rng &rng) : rng_(rng) {
        for (int c = 0; c < 6; c++) {
            gaps_[c] = BernoulliGaps(prog.class_p[c]);
        }
    }

    /// Shots receiving the Z^b flip for each block. Set before each batch.
    std::vector<uint64_t> block_masks;

    SiteErrors noise(const LoweredOp &op) {
        SiteErrors e;
        int c = static_cast<int>(op.cls);
        uint64_t hits = gaps_[c].next_mask(rng_);
        if (!hits) {
            return e;
        }
        int branches = noise_branches(op.cls);
        while (hits) {
            uint64_t bit = hits & (~hits + 1);
            hits ^= bit;
            int b = branches == 1 ? 0 : static_cast<int>(rng_() % static_cast<uint64_t>(branches));
            int c0, c1;
            noise_branch(op.cls, b, c0, c1);
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

   private:
    Rng &rng_;
    std::array<BernoulliGaps, 6> gaps_;
};

}  // namespace star
