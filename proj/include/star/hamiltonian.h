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
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "star/pauli.h"
#include "star/rng.h"

namespace star {

struct PauliTerm {
    double coeff = 0.0;
    PauliString op;
};

/// Real linear combination of Hermitian Pauli strings with merged duplicates.
class PauliHamiltonian {
   public:
    PauliHamiltonian() = default;
    explicit PauliHamiltonian(size_t num_qubits) : n_(num_qubits) {
    }

    size_t num_qubits() const {
        return n_;
    }
    const std::vector<PauliTerm> &terms() const {
        return terms_;
    }
    size_t num_terms() const {
        return terms_.size();
    }

    /// Adds coeff * op; an existing identical operator absorbs the coefficient.
    /// Terms cancelling to zero are removed.
    void add_term(double coeff, PauliString op) {
        if (op.num_qubits() != n_) {
            throw std::invalid_argument("term size does not match Hamiltonian");
        }
        if (op.phase() & 1) {
            throw std::invalid_argument("non-Hermitian Pauli term");
        }
        if (op.phase() == 2) {
            coeff = -coeff;
            op.set_phase(0);
        }
        Key key{op.x_words(), op.z_words()};
        auto it = index_.find(key);
        if (it == index_.end()) {
            if (coeff == 0.0) {
                return;
            }
            index_.emplace(std::move(key), terms_.size());
            terms_.push_back({coeff, std::move(op)});
            return;
        }
        terms_[it->second].coeff += coeff;
        if (terms_[it->second].coeff == 0.0) {
            size_t idx = it->second;
            index_.erase(it);
            terms_.erase(terms_.begin() + idx);
            for (auto &kv : index_) {
                if (kv.second > idx) {
                    kv.second--;
                }
            }
        }
    }

    /// lambda = sum |a_i|.
    double one_norm() const {
        double s = 0.0;
        for (const auto &t : terms_) {
            s += std::abs(t.coeff);
        }
        return s;
    }

   private:
    using Key = std::pair<std::vector<uint64_t>, std::vector<uint64_t>>;
    size_t n_ = 0;
    std::vector<PauliTerm> terms_;
    std::map<Key, size_t> index_;
};

/// Jordan-Wigner image of (c_i^dag c_j + h.c.) for modes i != j:
/// (X Z..Z X + Y Z..Z Y) / 2 over the modes between them.
inline std::pair<PauliString, PauliString> jw_hopping(size_t num_modes, size_t i, size_t j) {
    if (i > j) {
        std::swap(i, j);
    }
    PauliString xx(num_modes), yy(num_modes);
    xx.set(i, true, false);
    xx.set(j, true, false);
    yy.set(i, true, true);
    yy.set(j, true, true);
    for (size_t q = i + 1; q < j; q++) {
        xx.set(q, false, true);
        yy.set(q, false, true);
    }
    return {xx, yy};
}

/// Site index of (x, y), row-major.
inline size_t hubbard_site(int x, int y, int lx) {
    return static_cast<size_t>(y) * lx + x;
}

/// Nearest-neighbour bonds (each listed once; a periodic dimension of length 2
/// lists its bond twice, as two distinct lattice bonds).
inline std::vector<std::pair<size_t, size_t>> hubbard_bonds(int lx, int ly, bool periodic) {
    std::vector<std::pair<size_t, size_t>> bonds;
    for (int y = 0; y < ly; y++) {
        for (int x = 0; x < lx; x++) {
            if (x + 1 < lx) {
                bonds.push_back({hubbard_site(x, y, lx), hubbard_site(x + 1, y, lx)});
            } else if (periodic) {
                bonds.push_back({hubbard_site(x, y, lx), hubbard_site(0, y, lx)});
            }
            if (y + 1 < ly) {
                bonds.push_back({hubbard_site(x, y, lx), hubbard_site(x, y + 1, lx)});
            } else if (periodic) {
                bonds.push_back({hubbard_site(x, y, lx), hubbard_site(x, 0, lx)});
            }
        }
    }
    return bonds;
}

/// 2D Hubbard model, spin-up modes 0..N-1 then spin-down N..2N-1:
/// -(t/2) sum (X Z..Z X + Y Z..Z Y) + (U/4) sum Z_up Z_down.
/// The on-site term is U (n_up - 1/2)(n_down - 1/2) with its constant dropped.
inline PauliHamiltonian hubbard_2d(int lx, int ly, double t, double u, bool periodic = true) {
    if (lx < 2 || ly < 2) {
        throw std::invalid_argument("Hubbard lattice needs Lx, Ly >= 2");
    }
    size_t ns = static_cast<size_t>(lx) * ly;
    size_t nq = 2 * ns;
    PauliHamiltonian h(nq);
    for (auto [a, b] : hubbard_bonds(lx, ly, periodic)) {
        for (size_t spin = 0; spin < 2; spin++) {
            auto [xx, yy] = jw_hopping(nq, a + spin * ns, b + spin * ns);
            h.add_term(-t / 2, xx);
            h.add_term(-t / 2, yy);
        }
    }
    for (size_t s = 0; s < ns; s++) {
        PauliString zz(nq);
        zz.set(s, false, true);
        zz.set(s + ns, false, true);
        h.add_term(u / 4, zz);
    }
    return h;
}

/// Periodic Heisenberg chain XX + YY + ZZ with random fields h_j Z_j, h_j ~ U[-h, h].
inline PauliHamiltonian heisenberg_disordered(int n, double h, Rng &rng) {
    if (n < 2) {
        throw std::invalid_argument("Heisenberg chain needs N >= 2");
    }
    PauliHamiltonian out(n);
    for (int j = 0; j < n; j++) {
        int k = (j + 1) % n;
        for (auto [xb, zb] : {std::pair{true, false}, std::pair{true, true}, std::pair{false, true}}) {
            PauliString p(n);
            p.set(j, xb, zb);
            p.set(k, xb, zb);
            out.add_term(1.0, p);
        }
    }
    std::uniform_real_distribution<double> field(-h, h);
    for (int j = 0; j < n; j++) {
        PauliString z(n);
        z.set(j, false, true);
        out.add_term(h > 0 ? field(rng) : 0.0, z);
    }
    return out;
}

/// E[lambda] = (3 + h/2) N.
inline double heisenberg_expected_one_norm(int n, double h) {
    return (3.0 + h / 2.0) * n;
}

/// Rotation angles theta_i = -a_i T / (2N) in execution order: per step a
/// forward and a reversed sweep (order2), or a single sweep with -a_i T / N.
inline std::vector<double> trotter_angles(const PauliHamiltonian &h, double total_time, int steps, bool order2 = true) {
    if (steps < 1) {
        throw std::invalid_argument("Trotter steps must be at least 1");
    }
    std::vector<double> out;
    const auto &terms = h.terms();
    out.reserve(static_cast<size_t>(steps) * terms.size() * (order2 ? 2 : 1));
    for (int s = 0; s < steps; s++) {
        if (order2) {
            for (const auto &t : terms) {
                out.push_back(-t.coeff * total_time / (2.0 * steps));
            }
            for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
                out.push_back(-it->coeff * total_time / (2.0 * steps));
            }
        } else {
            for (const auto &t : terms) {
                out.push_back(-t.coeff * total_time / steps);
            }
        }
    }
    return out;
}

/// Lattice-surgery clocks per rotation, by term type.
struct ClockCostModel {
    int z_only = 1;
    int with_x = 4;
    int with_y = 6;

    int clocks(const PauliString &p) const {
        if (p.is_identity()) {
            throw std::invalid_argument("identity term has no clock cost");
        }
        bool has_x = false, has_y = false;
        for (size_t q = 0; q < p.num_qubits(); q++) {
            has_y |= p.x(q) && p.z(q);
            has_x |= p.x(q) && !p.z(q);
        }
        return has_y ? with_y : has_x ? with_x : z_only;
    }
};

/// Mean clocks per term.
inline double avg_clock(const PauliHamiltonian &h, const ClockCostModel &model = {}) {
    if (h.num_terms() == 0) {
        throw std::invalid_argument("empty Hamiltonian");
    }
    double s = 0.0;
    for (const auto &t : h.terms()) {
        s += model.clocks(t.op);
    }
    return s / h.num_terms();
}

/// T <= 1 / (alpha lambda p); infinite when p = 0.
inline double max_evolution_time(double lambda, double p, double alpha) {
    if (!(lambda > 0)) {
        throw std::invalid_argument("one-norm must be positive");
    }
    if (p <= 0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / (alpha * lambda * p);
}

/// Largest lambda keeping alpha lambda (T_max / 2) p <= 1 with T_max = delta / eps.
/// The controlled evolution of a Hadamard test needs only half the runtime.
inline double qpe_one_norm_bound(double eps, double delta, double alpha, double p) {
    if (!(eps > 0 && delta > 0 && alpha > 0 && p > 0)) {
        throw std::invalid_argument("QPE bound inputs must be positive");
    }
    return 2.0 * eps / (alpha * delta * p);
}

}  // namespace star
