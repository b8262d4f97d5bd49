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

#include "star/hamiltonian.h"

#include <algorithm>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "statevec.h"

using namespace star;
using star::testing::StateVector;

namespace {

/// Dense matrix of a Pauli Hamiltonian; basis bit q = Z-eigenvalue -1 of qubit q.
Eigen::MatrixXcd dense(const PauliHamiltonian &h) {
    size_t n = h.num_qubits();
    size_t dim = size_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t col = 0; col < dim; col++) {
        StateVector sv(n);
        sv.amplitudes().setZero();
        sv.amplitudes()(col) = 1.0;
        for (const auto &t : h.terms()) {
            m.col(col) += t.coeff * sv.apply_pauli(t.op);
        }
    }
    return m;
}

/// Second-quantized operators on occupation bitstrings, with the canonical sign
/// (-1)^(occupied modes below i).
struct Fock {
    size_t modes;
    size_t dim() const {
        return size_t{1} << modes;
    }
    Eigen::MatrixXd create(size_t i) const {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim(), dim());
        for (size_t s = 0; s < dim(); s++) {
            if ((s >> i) & 1) {
                continue;
            }
            int below = std::popcount(s & ((size_t{1} << i) - 1));
            c(s | (size_t{1} << i), s) = below % 2 ? -1.0 : 1.0;
        }
        return c;
    }
};

Eigen::VectorXd sector_spectrum(const Eigen::MatrixXcd &h, size_t modes, int particles) {
    std::vector<size_t> basis;
    for (size_t s = 0; s < (size_t{1} << modes); s++) {
        if (std::popcount(s) == particles) {
            basis.push_back(s);
        }
    }
    Eigen::MatrixXcd sub(basis.size(), basis.size());
    for (size_t a = 0; a < basis.size(); a++) {
        for (size_t b = 0; b < basis.size(); b++) {
            sub(a, b) = h(basis[a], basis[b]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    return es.eigenvalues();
}

}  // namespace

TEST(PauliHamiltonian, MergesAndCancels) {
    PauliHamiltonian h(2);
    h.add_term(1.0, PauliString::from_label("XZ"));
    h.add_term(0.5, PauliString::from_label("-XZ"));
    EXPECT_EQ(h.num_terms(), 1u);
    EXPECT_DOUBLE_EQ(h.terms()[0].coeff, 0.5);
    h.add_term(-0.5, PauliString::from_label("XZ"));
    EXPECT_EQ(h.num_terms(), 0u);
    EXPECT_THROW(h.add_term(1.0, PauliString::from_label("iX_")), std::invalid_argument);
    EXPECT_THROW(h.add_term(1.0, PauliString::from_label("X")), std::invalid_argument);
}

TEST(JordanWigner, HoppingMatchesFockOperators) {
    Fock f{5};
    for (size_t i = 0; i < 5; i++) {
        for (size_t j = 0; j < 5; j++) {
            if (i == j) {
                continue;
            }
            // Canonical anticommutation of the oracle itself.
            Eigen::MatrixXd ci = f.create(i).transpose(), cj_dag = f.create(j);
            EXPECT_LT((ci * cj_dag + cj_dag * ci).norm(), 1e-12);
            PauliHamiltonian h(5);
            auto [xx, yy] = jw_hopping(5, i, j);
            h.add_term(0.5, xx);
            h.add_term(0.5, yy);
            Eigen::MatrixXd want = f.create(i) * f.create(j).transpose();
            want += want.transpose().eval();
            EXPECT_LT((dense(h).real() - want).norm(), 1e-12) << i << " " << j;
            EXPECT_LT(dense(h).imag().norm(), 1e-12);
        }
    }
}

TEST(Hubbard, TwoByTwoSpectrumMatchesFermionicModel) {
    const int lx = 2, ly = 2;
    const double t = 1.0, u = 4.0;
    const size_t ns = 4, modes = 8;
    Fock f{modes};
    Eigen::MatrixXd hf = Eigen::MatrixXd::Zero(f.dim(), f.dim());
    // Periodic 2x2: every neighbour pair is joined by two lattice bonds.
    for (auto [a, b] : hubbard_bonds(lx, ly, true)) {
        for (size_t spin = 0; spin < 2; spin++) {
            Eigen::MatrixXd hop = f.create(a + spin * ns) * f.create(b + spin * ns).transpose();
            hf -= t * (hop + hop.transpose());
        }
    }
    for (size_t s = 0; s < ns; s++) {
        Eigen::MatrixXd nu = f.create(s) * f.create(s).transpose();
        Eigen::MatrixXd nd = f.create(s + ns) * f.create(s + ns).transpose();
        hf += u * nu * nd;
    }
    Eigen::MatrixXcd hp = dense(hubbard_2d(lx, ly, t, u, true));
    for (int ne = 0; ne <= 8; ne++) {
        Eigen::VectorXd want = sector_spectrum(hf.cast<std::complex<double>>(), modes, ne);
        // U n_up n_down = U (n_up - 1/2)(n_down - 1/2) + U N_e / 2 - U N_site / 4.
        want.array() -= u * (ne / 2.0 - ns / 4.0);
        Eigen::VectorXd got = sector_spectrum(hp, modes, ne);
        EXPECT_LT((want - got).cwiseAbs().maxCoeff(), 1e-10) << "N_e = " << ne;
    }
}

TEST(Hubbard, TermCountOneNormAndClocks) {
    for (int l : {3, 4, 6, 8, 10}) {
        auto h = hubbard_2d(l, l, 1.0, 4.0);
        double n = l * l;
        EXPECT_EQ(h.num_terms(), size_t(9 * n)) << l;
        EXPECT_NEAR(h.one_norm(), 5 * n, 1e-9) << l;
        EXPECT_NEAR(avg_clock(h), 41.0 / 9.0, 1e-12) << l;
        EXPECT_EQ(h.num_qubits(), size_t(2 * n));
    }
    EXPECT_NEAR(hubbard_2d(8, 8, 1.0, 4.0).one_norm(), 320.0, 1e-9);
    EXPECT_THROW(hubbard_2d(1, 4, 1.0, 4.0), std::invalid_argument);
}

TEST(Hubbard, OpenBoundaryHasFewerBonds) {
    EXPECT_EQ(hubbard_bonds(3, 3, false).size(), 12u);
    EXPECT_EQ(hubbard_bonds(3, 3, true).size(), 18u);
}

TEST(Heisenberg, StructureAndMeanOneNorm) {
    Rng rng = make_stream(5, 0);
    const int n = 100, samples = 400;
    double mean = 0;
    for (int s = 0; s < samples; s++) {
        auto h = heisenberg_disordered(n, 1.0, rng);
        EXPECT_EQ(h.num_terms(), size_t(4 * n));
        mean += h.one_norm();
    }
    mean /= samples;
    // Each |h_j| ~ U[0, 1] has variance 1/12.
    double sigma = std::sqrt(n / 12.0 / samples);
    EXPECT_NEAR(mean, heisenberg_expected_one_norm(n, 1.0), 5 * sigma);
    EXPECT_NEAR(heisenberg_expected_one_norm(100, 1.0), 350.0, 1e-12);
}

TEST(Heisenberg, MaxEvolutionTime) {
    EXPECT_NEAR(max_evolution_time(350.0, 1e-4, 1.5), 19.05, 0.01);
    EXPECT_TRUE(std::isinf(max_evolution_time(350.0, 0.0, 1.5)));
    EXPECT_THROW(max_evolution_time(0.0, 1e-4, 1.5), std::invalid_argument);
}

TEST(Trotter, AnglesSumToOneNormTimesTime) {
    auto h = hubbard_2d(3, 3, 1.0, 4.0);
    for (bool order2 : {true, false}) {
        auto a = trotter_angles(h, 2.5, 7, order2);
        EXPECT_EQ(a.size(), h.num_terms() * 7 * (order2 ? 2 : 1));
        double s = 0;
        for (double v : a) {
            s += std::abs(v);
        }
        EXPECT_NEAR(s, h.one_norm() * 2.5, 1e-9);
    }
    auto a = trotter_angles(h, 1.0, 1, true);
    EXPECT_DOUBLE_EQ(a.front(), a.back());
    EXPECT_DOUBLE_EQ(a.front(), -h.terms().front().coeff / 2);
    EXPECT_THROW(trotter_angles(h, 1.0, 0), std::invalid_argument);
}

TEST(Clocks, PerTermType) {
    ClockCostModel c;
    EXPECT_EQ(c.clocks(PauliString::from_label("ZZ_")), 1);
    EXPECT_EQ(c.clocks(PauliString::from_label("XZX")), 4);
    EXPECT_EQ(c.clocks(PauliString::from_label("YZY")), 6);
    EXPECT_EQ(c.clocks(PauliString::from_label("XY_")), 6);
    EXPECT_THROW(c.clocks(PauliString::from_label("___")), std::invalid_argument);
    EXPECT_THROW(avg_clock(PauliHamiltonian(3)), std::invalid_argument);
}

TEST(QpeBound, OneNormLimit) {
    EXPECT_NEAR(qpe_one_norm_bound(1e-3, 0.06, 1.5, 1e-4), 222.2, 0.1);
}
