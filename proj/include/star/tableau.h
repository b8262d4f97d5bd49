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
#include <stdexcept>
#include <string>
#include <vector>

#include "star/pauli.h"
#include "star/rng.h"

namespace star {

/// Aaronson-Gottesman stabilizer tableau. Rows 0..n-1 are destabilizers,
/// rows n..2n-1 stabilizers; each row is a Hermitian PauliString (phase 0 or 2).
class StabilizerTableau {
   public:
    /// |0...0>.
    explicit StabilizerTableau(size_t num_qubits) : n_(num_qubits) {
        rows_.reserve(2 * n_);
        for (size_t i = 0; i < 2 * n_; i++) {
            rows_.emplace_back(n_);
        }
        for (size_t q = 0; q < n_; q++) {
            rows_[q].set(q, true, false);
            rows_[n_ + q].set(q, false, true);
        }
    }

    size_t num_qubits() const {
        return n_;
    }

    const PauliString &destabilizer(size_t i) const {
        return rows_[i];
    }
    const PauliString &stabilizer(size_t i) const {
        return rows_[n_ + i];
    }

    /// Outcomes of every non-deterministic measurement, in order.
    const std::vector<bool> &random_outcomes() const {
        return random_log_;
    }

    void h(size_t q) {
        check(q);
        size_t w = q >> 6;
        uint64_t m = uint64_t{1} << (q & 63);
        for (auto &row : rows_) {
            uint64_t &x = row.x_words()[w];
            uint64_t &z = row.z_words()[w];
            bool xb = x & m, zb = z & m;
            if (xb && zb) {
                row.set_phase(row.phase() ^ 2);
            }
            if (xb != zb) {
                x ^= m;
                z ^= m;
            }
        }
    }

    void s(size_t q) {
        check(q);
        size_t w = q >> 6;
        uint64_t m = uint64_t{1} << (q & 63);
        for (auto &row : rows_) {
            uint64_t x = row.x_words()[w];
            uint64_t &z = row.z_words()[w];
            if ((x & m) && (z & m)) {
                row.set_phase(row.phase() ^ 2);
            }
            if (x & m) {
                z ^= m;
            }
        }
    }

    void cx(size_t c, size_t t) {
        check(c);
        check(t);
        if (c == t) {
            throw std::invalid_argument("CNOT control equals target");
        }
        for (auto &row : rows_) {
            bool xc = row.x(c), zc = row.z(c), xt = row.x(t), zt = row.z(t);
            if (xc && zt && (xt == zc)) {
                row.set_phase(row.phase() ^ 2);
            }
            if (xc) {
                row.flip_x(t);
            }
            if (zt) {
                row.flip_z(c);
            }
        }
    }

    void swap(size_t a, size_t b) {
        check(a);
        check(b);
        for (auto &row : rows_) {
            bool xa = row.x(a), za = row.z(a);
            row.set(a, row.x(b), row.z(b));
            row.set(b, xa, za);
        }
    }

    /// Applies the Pauli operator P to the state (signs of anticommuting rows flip).
    void apply_pauli(const PauliString &p) {
        if (p.num_qubits() != n_) {
            throw std::invalid_argument("Pauli error size does not match tableau");
        }
        for (size_t i = n_; i < 2 * n_; i++) {
            if (!rows_[i].commutes(p)) {
                rows_[i].set_phase(rows_[i].phase() ^ 2);
            }
        }
    }

    void x_gate(size_t q) {
        check(q);
        for (size_t i = n_; i < 2 * n_; i++) {
            if (rows_[i].z(q)) {
                rows_[i].set_phase(rows_[i].phase() ^ 2);
            }
        }
    }
    void z_gate(size_t q) {
        check(q);
        for (size_t i = n_; i < 2 * n_; i++) {
            if (rows_[i].x(q)) {
                rows_[i].set_phase(rows_[i].phase() ^ 2);
            }
        }
    }

    /// +1 or -1 when Z_q is (up to sign) in the stabilizer group, else 0.
    int peek_z(size_t q) const {
        check(q);
        for (size_t i = n_; i < 2 * n_; i++) {
            if (rows_[i].x(q)) {
                return 0;
            }
        }
        return deterministic_sign(q) ? -1 : +1;
    }

    /// Measures Z_q. Returns true for the -1 outcome.
    bool measure_z(size_t q, Rng &rng) {
        check(q);
        size_t p = 2 * n_;
        for (size_t i = n_; i < 2 * n_; i++) {
            if (rows_[i].x(q)) {
                p = i;
                break;
            }
        }
        if (p == 2 * n_) {
            return deterministic_sign(q);
        }
        for (size_t i = 0; i < 2 * n_; i++) {
            if (i != p && i != p - n_ && rows_[i].x(q)) {
                rows_[i].left_multiply(rows_[p]);
            }
        }
        rows_[p - n_] = rows_[p];
        bool outcome = rng() & 1;
        random_log_.push_back(outcome);
        auto &row = rows_[p];
        std::fill(row.x_words().begin(), row.x_words().end(), 0);
        std::fill(row.z_words().begin(), row.z_words().end(), 0);
        row.set(q, false, true);
        row.set_phase(outcome ? 2 : 0);
        return outcome;
    }

    void reset_z(size_t q, Rng &rng) {
        if (measure_z(q, rng)) {
            x_gate(q);
        }
    }
    void reset_x(size_t q, Rng &rng) {
        reset_z(q, rng);
        h(q);
    }

    /// Expectation of a Hermitian Pauli observable: +1, -1 or 0.
    int expectation(const PauliString &obs) const {
        if (obs.num_qubits() != n_) {
            throw std::invalid_argument("observable size does not match tableau");
        }
        PauliString acc(n_);
        for (size_t i = 0; i < n_; i++) {
            if (!rows_[n_ + i].commutes(obs)) {
                return 0;
            }
            if (!rows_[i].commutes(obs)) {
                acc *= rows_[n_ + i];
            }
        }
        if (!acc.same_support(obs)) {
            throw std::logic_error("observable not generated by stabilizers");
        }
        return acc.phase() == obs.phase() ? +1 : -1;
    }

    /// Checks the symplectic structure: stabilizers commute pairwise,
    /// destabilizer i anticommutes with stabilizer j iff i == j.
    bool check_invariants() const {
        for (size_t i = 0; i < n_; i++) {
            if (rows_[n_ + i].phase() & 1 || rows_[i].phase() & 1) {
                return false;
            }
            for (size_t j = 0; j < n_; j++) {
                if (j > i && !rows_[n_ + i].commutes(rows_[n_ + j])) {
                    return false;
                }
                if (rows_[i].commutes(rows_[n_ + j]) == (i == j)) {
                    return false;
                }
            }
        }
        return true;
    }

   private:
    void check(size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " out of range for " + std::to_string(n_) + " qubits");
        }
    }

    bool deterministic_sign(size_t q) const {
        PauliString acc(n_);
        for (size_t i = 0; i < n_; i++) {
            if (rows_[i].x(q)) {
                acc *= rows_[n_ + i];
            }
        }
        return acc.phase() == 2;
    }

    size_t n_;
    std::vector<PauliString> rows_;
    std::vector<bool> random_log_;
};

}  // namespace star
