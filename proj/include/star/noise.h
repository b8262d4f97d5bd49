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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "star/pauli.h"
#include "star/rng.h"

namespace star {

/// Circuit-level noise: bit flips after initialization and before readout,
/// depolarizing channels after every gate.
struct NoiseModel {
    double p = 0.0;
    bool init_flip = true;
    bool measure_flip = true;
    bool gate1_depolarizing = true;
    bool gate2_depolarizing = true;
    /// Single-qubit depolarizing rate on qubits untouched between two ticks.
    /// Zero (off) by default.
    double idle_p = 0.0;
    /// Whether R_zz is a noisy native gate (true) or CNOTs around an ideal virtual Rz.
    bool native_2q_rotation = false;

    void validate() const {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("p_ph must lie in [0, 1)");
        }
        if (!(idle_p >= 0.0 && idle_p < 1.0)) {
            throw std::invalid_argument("idle_p must lie in [0, 1)");
        }
    }

    double init_p() const {
        return init_flip ? p : 0.0;
    }
    double measure_p() const {
        return measure_flip ? p : 0.0;
    }
    double gate1_p() const {
        return gate1_depolarizing ? p : 0.0;
    }
    double gate2_p() const {
        return gate2_depolarizing ? p : 0.0;
    }
};

enum class NoiseClass : uint8_t { Init, InitX, Measure, Gate1, Gate2, Idle };

inline double noise_probability(const NoiseModel &model, NoiseClass cls) {
    switch (cls) {
        case NoiseClass::Init:
        case NoiseClass::InitX:
            return model.init_p();
        case NoiseClass::Measure:
            return model.measure_p();
        case NoiseClass::Gate1:
            return model.gate1_p();
        case NoiseClass::Gate2:
            return model.gate2_p();
        case NoiseClass::Idle:
            return model.idle_p;
    }
    return 0.0;
}

/// Number of distinct Pauli outcomes of a firing noise site.
inline int noise_branches(NoiseClass cls) {
    switch (cls) {
        case NoiseClass::Gate1:
        case NoiseClass::Idle:
            return 3;
        case NoiseClass::Gate2:
            return 15;
        default:
            return 1;
    }
}

/// Single-qubit Pauli code: 0=I, 1=X, 2=Y, 3=Z.
struct PauliCode {
    bool x;
    bool z;
};

inline PauliCode pauli_code(int c) {
    return {c == 1 || c == 2, c == 2 || c == 3};
}

/// Branch b of a noise class, as codes on its (one or two) qubits.
inline void noise_branch(NoiseClass cls, int b, int &first, int &second) {
    first = 0;
    second = 0;
    switch (cls) {
        case NoiseClass::Init:
        case NoiseClass::Measure:
            first = 1;
            break;
        case NoiseClass::InitX:
            first = 3;
            break;
        case NoiseClass::Gate1:
        case NoiseClass::Idle:
            first = b + 1;
            break;
        case NoiseClass::Gate2:
            first = (b + 1) >> 2;
            second = (b + 1) & 3;
            break;
    }
}

/// Draws the error of one noise site. Returns nothing when the site is quiet.
inline std::optional<PauliString> sample_noise(
    const NoiseModel &model, NoiseClass cls, std::span<const uint32_t> qubits, size_t num_qubits, Rng &rng) {
    size_t need = cls == NoiseClass::Gate2 ? 2 : 1;
    if (qubits.size() != need) {
        throw std::invalid_argument("noise class applied to wrong number of qubits");
    }
    double p = noise_probability(model, cls);
    if (p <= 0.0 || uniform01(rng) >= p) {
        return std::nullopt;
    }
    int b = std::uniform_int_distribution<int>(0, noise_branches(cls) - 1)(rng);
    int c0, c1;
    noise_branch(cls, b, c0, c1);
    PauliString err(num_qubits);
    auto a = pauli_code(c0);
    err.set(qubits[0], a.x, a.z);
    if (need == 2) {
        auto s = pauli_code(c1);
        err.set(qubits[1], s.x, s.z);
    }
    return err;
}

}  // namespace star
