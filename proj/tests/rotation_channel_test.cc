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

#include "star/rotation_channel.h"

#include <random>

#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>
#include <gtest/gtest.h>

using namespace star;
using cplx = std::complex<double>;

namespace {

/// (E - id) (x) id applied to |psi><psi| on qubit (x) ancilla.
Eigen::Matrix4cd channel_difference(const ZAxisChannel &ch, const Eigen::Vector4cd &psi) {
    Eigen::Matrix4cd rho = psi * psi.adjoint();
    Eigen::Matrix4cd z = Eigen::Matrix4cd::Zero();
    z.diagonal() << 1, 1, -1, -1;  // Z on the system (high bit)
    return -ch.x * rho + cplx(0, ch.y) * (z * rho - rho * z) + ch.x * z * rho * z;
}

double half_trace_norm(const Eigen::Matrix4cd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct Objective {
    ZAxisChannel ch;
};

double neg_norm(const gsl_vector *v, void *params) {
    const auto *o = static_cast<const Objective *>(params);
    Eigen::Vector4cd psi;
    for (int i = 0; i < 4; i++) {
        psi(i) = cplx(gsl_vector_get(v, 2 * i), gsl_vector_get(v, 2 * i + 1));
    }
    double n = psi.norm();
    if (n < 1e-12) {
        return 0.0;
    }
    return -half_trace_norm(channel_difference(o->ch, psi / n));
}

/// Diamond distance by Nelder-Mead over pure system-ancilla inputs, best of several starts.
double diamond_oracle(const ZAxisChannel &ch, std::mt19937_64 &rng) {
    Objective obj{ch};
    gsl_multimin_function f{&neg_norm, 8, &obj};
    std::normal_distribution<double> g;
    double best = 0.0;
    for (int start = 0; start < 8; start++) {
        gsl_vector *x = gsl_vector_alloc(8), *step = gsl_vector_alloc(8);
        for (int i = 0; i < 8; i++) {
            gsl_vector_set(x, i, g(rng));
        }
        gsl_vector_set_all(step, 0.3);
        auto *s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 8);
        gsl_multimin_fminimizer_set(s, &f, x, step);
        for (int it = 0; it < 20000; it++) {
            if (gsl_multimin_fminimizer_iterate(s)) {
                break;
            }
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12) == GSL_SUCCESS) {
                break;
            }
        }
        best = std::max(best, -s->fval);
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(x);
        gsl_vector_free(step);
    }
    return best;
}

/// 1 - average fidelity from the process fidelity of the Choi state.
double average_infidelity_oracle(const ZAxisChannel &ch) {
    Eigen::Vector4cd bell(1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0));
    Eigen::Matrix4cd out = channel_difference(ch, bell) + bell * bell.adjoint();
    double f_pro = bell.dot(out * bell).real();
    return 1.0 - (2 * f_pro + 1) / 3;
}

RotationChannelModel model(int k, double p = 1e-4) {
    RotationChannelModel m;
    m.k = k;
    m.p = p;
    m.pud_coefficient = 2.0 / 15.0;
    return m;
}

double fit_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); i++) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST(ErrorRates, MatchNumericalOracles) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (int i = 0; i < 20; i++) {
        // Physical channels need x(1-x) >= y^2.
        double x = u(rng);
        double ymax = std::sqrt(x * (1 - x));
        double y = std::uniform_real_distribution<double>(-ymax, ymax)(rng);
        ZAxisChannel ch{x, y};
        auto r = error_rates(ch);
        EXPECT_NEAR(r.diamond, diamond_oracle(ch, rng), 1e-6) << x << " " << y;
        EXPECT_NEAR(r.average, average_infidelity_oracle(ch), 1e-12);
    }
}

TEST(ErrorRates, RotationChannelIsUnitary) {
    for (double phi : {1e-3, 0.1, 0.7}) {
        auto ch = ZAxisChannel::rotation(phi);
        EXPECT_NEAR(error_rates(ch).diamond, std::sin(phi), 1e-15);
        EXPECT_NEAR(ch.x * (1 - ch.x), ch.y * ch.y, 1e-15);
    }
}

TEST(SingleTrial, ClosedFormRatesMatchChannel) {
    auto m = model(3);
    for (double ts : {1e-4, 1e-3, 1e-2, 0.2}) {
        auto ch = single_trial_channel(m, ts);
        auto r = single_trial_rates(m, ts);
        double dl = m.over_rotation(ts), pl = m.logical_error(ts);
        // sin^2 vs Delta^2: agree to O(Delta^4).
        EXPECT_NEAR(error_rates(ch).average, r.average, 0.5 * pl * std::pow(dl, 4));
        EXPECT_NEAR(error_rates(ch).diamond, pl * std::abs(std::sin(dl)), 1e-18);
        EXPECT_NEAR(r.diamond, pl * std::abs(dl) * std::sqrt(1 + dl * dl), 1e-18);
    }
    EXPECT_EQ(model(1).logical_error(0.1), 0.0);
}

TEST(SingleTrial, OddInTargetAngle) {
    auto m = model(4);
    for (double ts : {1e-3, 0.05}) {
        auto a = single_trial_channel(m, ts), b = single_trial_channel(m, -ts);
        EXPECT_DOUBLE_EQ(a.x, b.x);
        EXPECT_DOUBLE_EQ(a.y, -b.y);
    }
}

TEST(CoherentCancel, RemovesOffDiagonalPart) {
    auto m = model(3);
    double ts = 1e-3;
    auto rec = coherent_cancel(m, ts);
    EXPECT_DOUBLE_EQ(rec.probability, m.logical_error(ts));
    EXPECT_DOUBLE_EQ(rec.correction_angle, -m.over_rotation(ts));
    EXPECT_EQ(rec.channel.y, 0.0);
    // Mixture oracle: with probability P_L apply R(-Delta) after the channel.
    auto raw = single_trial_channel(m, ts);
    auto corr = ZAxisChannel::rotation(rec.correction_angle);
    double x = (1 - rec.probability) * raw.x + rec.probability * raw.then(corr).x;
    double y = (1 - rec.probability) * raw.y + rec.probability * raw.then(corr).y;
    EXPECT_NEAR(x, rec.channel.x, 1e-6 * rec.channel.x);
    EXPECT_LT(std::abs(y), 1e-3 * std::abs(raw.y));
    EXPECT_THROW(coherent_cancel(m, 1.0), std::domain_error);
}

TEST(CoherentCancel, ScalingExponent) {
    auto slope = [](int k, double lo, double hi) {
        auto m = model(k);
        std::vector<double> ts, xs;
        for (double t = lo; t <= hi * 1.0001; t *= std::pow(10.0, 0.25)) {
            ts.push_back(t);
            xs.push_back(canceled_channel(m, t).x);
        }
        return fit_slope(ts, xs);
    };
    for (int k : {2, 3}) {
        EXPECT_NEAR(slope(k, 1e-4, 1e-2), 2 * (1 - 1.0 / k), 0.02 * 2 * (1 - 1.0 / k)) << k;
    }
    // The exponent is asymptotic: Delta = -theta*^(1-2/k) - theta*, so the
    // relative correction theta*^(2/k) is largest at large k.
    for (int k : {2, 3, 4, 5}) {
        EXPECT_NEAR(slope(k, 1e-10, 1e-8), 2 * (1 - 1.0 / k), 0.02 * 2 * (1 - 1.0 / k)) << k;
    }
    EXPECT_GT(slope(4, 1e-4, 1e-2), 1.5);
}

TEST(Rus, WrapKeepsAnglesSmall) {
    for (double a : {0.1, 0.3, -0.3, 0.39, -0.7}) {
        double w = wrap_angle(a);
        EXPECT_LE(std::abs(w), std::numbers::pi / 8 + 1e-15);
        double diff = (a - w) / (std::numbers::pi / 4);
        EXPECT_NEAR(diff, std::round(diff), 1e-12);
    }
    auto seq = rus_angles(0.3, 6);
    EXPECT_NEAR(seq[1], wrap_angle(2 * seq[0]), 1e-15);
    for (double a : seq) {
        EXPECT_LE(std::abs(a), std::numbers::pi / 8 + 1e-15);
    }
}

TEST(Rus, AverageEqualsWeightedSumOverSuccessTrial) {
    auto m = model(3);
    for (bool canceled : {false, true}) {
        for (bool switching : {false, true}) {
            RusOptions opt{canceled, switching};
            for (double ts : {1e-3, 0.07}) {
                double x = 0, y = 0;
                for (int K = 1; K <= 60; K++) {
                    auto ch = rus_compose(m, ts, K, opt);
                    x += std::ldexp(ch.x, -K);
                    y += std::ldexp(ch.y, -K);
                }
                auto avg = rus_average(m, ts, opt);
                EXPECT_NEAR(avg.x, x, 1e-9 * x);
                EXPECT_NEAR(avg.y, y, 1e-9 * std::abs(x) + 1e-30);
            }
        }
    }
}

TEST(Rus, FirstTrialSuccessIsSingleTrial) {
    auto m = model(3);
    auto c = rus_compose(m, 1e-3, 1, RusOptions{});
    auto s = single_trial_channel(m, 1e-3);
    EXPECT_DOUBLE_EQ(c.x, s.x);
    EXPECT_DOUBLE_EQ(c.y, s.y);
    EXPECT_THROW(rus_compose(m, 1e-3, 0, RusOptions{}), std::invalid_argument);
}

TEST(Rus, CoherentPartAveragesOut) {
    // Failed and successful trials at +-a carry opposite y.
    auto m = model(3);
    auto avg = rus_average(m, 1e-3, RusOptions{});
    EXPECT_LT(std::abs(avg.y), 1e-12 * avg.x);
}

TEST(Rus, SwitchingNeverHurts) {
    for (int k : {2, 3, 4}) {
        auto m = model(k);
        for (double ts : {1e-4, 1e-3, 1e-2}) {
            RusOptions plain{true, false}, sw{true, true};
            EXPECT_LE(rus_average(m, ts, sw).diamond, rus_average(m, ts, plain).diamond * (1 + 1e-12));
        }
    }
}

TEST(Pec, DecompositionInvertsDephasing) {
    for (double p : {0.0, 1e-3, 0.1, 0.3}) {
        auto q = pec_decomposition(p);
        // Dephasing then {I: w_I, Z: w_z}: identity weight and Z weight.
        double id = (1 - p) * q.w_identity + p * q.w_z;
        double z = (1 - p) * q.w_z + p * q.w_identity;
        EXPECT_NEAR(id, 1.0, 1e-14);
        EXPECT_NEAR(z, 0.0, 1e-14);
        EXPECT_NEAR(q.gamma, std::abs(q.w_identity) + std::abs(q.w_z), 1e-14);
    }
    EXPECT_THROW(pec_decomposition(0.5), std::domain_error);
}

TEST(Pec, ToyEstimatorIsUnbiased) {
    auto est = pec_toy_expectation_x(0.05, 200000, 3);
    EXPECT_NEAR(est.mean, 1.0, 4 * est.sigma);
    // Unmitigated value would be 1 - 2p = 0.9, far outside the error bar.
    EXPECT_GT(std::abs(est.mean - 0.9), 10 * est.sigma);
}

TEST(MitigationCost, ExactProductApproachesExponential) {
    // P_total = 1 spread over many gates with per-gate error 1e-4.
    double alpha = 1.5, p = 1e-4;
    double per = 1e-4 / (alpha * p);
    std::vector<double> angles(10000, per);
    auto c = mitigation_cost(angles, alpha, p);
    EXPECT_NEAR(c.p_total, 1.0, 1e-9);
    EXPECT_NEAR(c.gamma2, std::exp(4.0), 0.001 * std::exp(4.0));
    EXPECT_NEAR(c.gamma2_exponential, std::exp(4.0), 1e-9);
    EXPECT_NEAR(c.max_gate_error, 1e-4, 1e-15);
    EXPECT_THROW(mitigation_cost({1e4}, alpha, p), std::domain_error);
}

TEST(AngleBudget, InverseOfAlphaP) {
    EXPECT_NEAR(angle_budget(1e-4, 1.5), 1.0 / 1.5e-4, 1e-9);
    EXPECT_THROW(angle_budget(0.0, 1.5), std::invalid_argument);
}
