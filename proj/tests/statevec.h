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

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "star/pauli.h"

namespace star::testing {

using cplx = std::complex<double>;

/// Dense state vector; qubit q is bit q of the basis index.
class StateVector {
   public:
    explicit StateVector(size_t n) : n_(n), psi_(Eigen::VectorXcd::Zero(size_t{1} << n)) {
        psi_(0) = 1.0;
    }

    size_t num_qubits() const {
        return n_;
    }
    const Eigen::VectorXcd &amplitudes() const {
        return psi_;
    }
    Eigen::VectorXcd &amplitudes() {
        return psi_;
    }

    void apply1(size_t q, const Eigen::Matrix2cd &u) {
        size_t bit = size_t{1} << q;
        for (Eigen::Index i = 0; i < psi_.size(); i++) {
            if (i & bit) {
                continue;
            }
            cplx a = psi_(i), b = psi_(i | bit);
            psi_(i) = u(0, 0) * a + u(0, 1) * b;
            psi_(i | bit) = u(1, 0) * a + u(1, 1) * b;
        }
    }
    void h(size_t q) {
        Eigen::Matrix2cd u;
        u << 1, 1, 1, -1;
        apply1(q, u / std::sqrt(2.0));
    }
    void s(size_t q) {
        Eigen::Matrix2cd u;
        u << 1, 0, 0, cplx(0, 1);
        apply1(q, u);
    }
    void rz(size_t q, double theta) {
        // exp(i theta Z)
        Eigen::Matrix2cd u;
        u << std::exp(cplx(0, theta)), 0, 0, std::exp(cplx(0, -theta));
        apply1(q, u);
    }
    void cx(size_t c, size_t t) {
        size_t cb = size_t{1} << c, tb = size_t{1} << t;
        for (Eigen::Index i = 0; i < psi_.size(); i++) {
            if ((i & cb) && !(i & tb)) {
                std::swap(psi_(i), psi_(i | tb));
            }
        }
    }
    void swap(size_t a, size_t b) {
        cx(a, b);
        cx(b, a);
        cx(a, b);
    }

    /// P|psi> including the phase of P.
    Eigen::VectorXcd apply_pauli(const PauliString &p) const {
        Eigen::VectorXcd out(psi_.size());
        static const cplx kI[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
        for (Eigen::Index i = 0; i < psi_.size(); i++) {
            size_t j = i;
            int ph = p.phase();
            for (size_t q = 0; q < n_; q++) {
                bool x = p.x(q), z = p.z(q);
                bool bit = (i >> q) & 1;
                if (z && bit) {
                    ph += 2;
                }
                if (x && z) {
                    ph += 1;  // Y = iXZ
                }
                if (x) {
                    j ^= size_t{1} << q;
                }
            }
            out(j) = kI[ph & 3] * psi_(i);
        }
        return out;
    }
    double expectation(const PauliString &p) const {
        return psi_.dot(apply_pauli(p)).real();
    }

    double prob_one(size_t q) const {
        double s = 0;
        for (Eigen::Index i = 0; i < psi_.size(); i++) {
            if ((i >> q) & 1) {
                s += std::norm(psi_(i));
            }
        }
        return s;
    }
    void project(size_t q, bool one) {
        for (Eigen::Index i = 0; i < psi_.size(); i++) {
            if ((((i >> q) & 1) != 0) != one) {
                psi_(i) = 0;
            }
        }
        psi_.normalize();
    }

   private:
    size_t n_;
    Eigen::VectorXcd psi_;
};

}  // namespace star::testing
