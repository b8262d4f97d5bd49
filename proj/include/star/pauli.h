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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace star {

inline size_t num_words(size_t num_qubits) {
    return (num_qubits + 63) / 64;
}

/// Exponent of i picked up when multiplying single-qubit labels a*b,
/// summed over every qubit of the packed words (Y is the x=z=1 label).
inline int label_product_log_i(
    const uint64_t *x1, const uint64_t *z1, const uint64_t *x2, const uint64_t *z2, size_t words) {
    int total = 0;
    for (size_t w = 0; w < words; w++) {
        uint64_t a = x1[w], b = z1[w], c = x2[w], d = z2[w];
        uint64_t plus = (a & b & d & ~c) | (a & ~b & c & d) | (~a & b & c & ~d);
        uint64_t minus = (a & b & c & ~d) | (a & ~b & ~c & d) | (~a & b & c & d);
        total += std::popcount(plus) - std::popcount(minus);
    }
    return total;
}

/// Pauli operator i^phase * P_0 (x) P_1 (x) ... with bit-packed X/Z support.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t num_qubits)
        : n_(num_qubits), x_(num_words(num_qubits), 0), z_(num_words(num_qubits), 0) {
    }

    /// Parses "XZ_Y", "+XIZ", "-iYY". '_' and 'I' both denote identity.
    static PauliString from_label(std::string_view text) {
        uint8_t phase = 0;
        if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
            phase = text[0] == '-' ? 2 : 0;
            text.remove_prefix(1);
        }
        if (!text.empty() && text[0] == 'i') {
            phase = (phase + 1) & 3;
            text.remove_prefix(1);
        }
        PauliString p(text.size());
        for (size_t q = 0; q < text.size(); q++) {
            switch (text[q]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.set(q, true, false);
                    break;
                case 'Y':
                    p.set(q, true, true);
                    break;
                case 'Z':
                    p.set(q, false, true);
                    break;
                default:
                    throw std::invalid_argument("bad Pauli label character '" + std::string(1, text[q]) + "'");
            }
        }
        p.phase_ = phase;
        return p;
    }

    size_t num_qubits() const {
        return n_;
    }

    bool x(size_t q) const {
        return (x_[q >> 6] >> (q & 63)) & 1;
    }
    bool z(size_t q) const {
        return (z_[q >> 6] >> (q & 63)) & 1;
    }

    void set(size_t q, bool xbit, bool zbit) {
        check(q);
        uint64_t m = uint64_t{1} << (q & 63);
        x_[q >> 6] = xbit ? (x_[q >> 6] | m) : (x_[q >> 6] & ~m);
        z_[q >> 6] = zbit ? (z_[q >> 6] | m) : (z_[q >> 6] & ~m);
    }

    void flip_x(size_t q) {
        x_[q >> 6] ^= uint64_t{1} << (q & 63);
    }
    void flip_z(size_t q) {
        z_[q >> 6] ^= uint64_t{1} << (q & 63);
    }

    /// Exponent of i, in {0,1,2,3}.
    uint8_t phase() const {
        return phase_;
    }
    void set_phase(uint8_t log_i) {
        phase_ = log_i & 3;
    }
    bool is_negative() const {
        return phase_ == 2;
    }

    char label(size_t q) const {
        static constexpr char kLabels[4] = {'_', 'X', 'Z', 'Y'};
        return kLabels[x(q) | (z(q) << 1)];
    }

    size_t weight() const {
        size_t w = 0;
        for (size_t k = 0; k < x_.size(); k++) {
            w += std::popcount(x_[k] | z_[k]);
        }
        return w;
    }

    bool is_identity() const {
        return weight() == 0;
    }

    bool commutes(const PauliString &other) const {
        same_size(other);
        int parity = 0;
        for (size_t k = 0; k < x_.size(); k++) {
            parity ^= std::popcount((x_[k] & other.z_[k]) ^ (z_[k] & other.x_[k])) & 1;
        }
        return parity == 0;
    }

    /// this <- this * other, tracking the phase exactly.
    PauliString &operator*=(const PauliString &other) {
        same_size(other);
        int s = phase_ + other.phase_ +
                label_product_log_i(x_.data(), z_.data(), other.x_.data(), other.z_.data(), x_.size());
        phase_ = static_cast<uint8_t>(((s % 4) + 4) % 4);
        for (size_t k = 0; k < x_.size(); k++) {
            x_[k] ^= other.x_[k];
            z_[k] ^= other.z_[k];
        }
        return *this;
    }

    /// this <- left * this.
    void left_multiply(const PauliString &left) {
        same_size(left);
        int s = phase_ + left.phase_ +
                label_product_log_i(left.x_.data(), left.z_.data(), x_.data(), z_.data(), x_.size());
        phase_ = static_cast<uint8_t>(((s % 4) + 4) % 4);
        for (size_t k = 0; k < x_.size(); k++) {
            x_[k] ^= left.x_[k];
            z_[k] ^= left.z_[k];
        }
    }

    friend PauliString operator*(PauliString a, const PauliString &b) {
        a *= b;
        return a;
    }

    bool operator==(const PauliString &other) const = default;

    /// Equality ignoring the phase.
    bool same_support(const PauliString &other) const {
        return x_ == other.x_ && z_ == other.z_;
    }

    std::string str() const {
        static constexpr const char *kPhases[4] = {"+", "+i", "-", "-i"};
        std::string out = kPhases[phase_];
        for (size_t q = 0; q < n_; q++) {
            out.push_back(label(q));
        }
        return out;
    }

    std::vector<uint64_t> &x_words() {
        return x_;
    }
    std::vector<uint64_t> &z_words() {
        return z_;
    }
    const std::vector<uint64_t> &x_words() const {
        return x_;
    }
    const std::vector<uint64_t> &z_words() const {
        return z_;
    }

   private:
    void check(size_t q) const {
        if (q >= n_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " outside Pauli string of size " + std::to_string(n_));
        }
    }
    void same_size(const PauliString &other) const {
        if (other.n_ != n_) {
            throw std::invalid_argument("Pauli strings act on different qubit counts");
        }
    }

    size_t n_ = 0;
    std::vector<uint64_t> x_;
    std::vector<uint64_t> z_;
    uint8_t phase_ = 0;
};

}  // namespace star
