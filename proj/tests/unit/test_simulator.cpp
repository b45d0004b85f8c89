#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kambeam/errors.hpp"
#include "kambeam/frequency.hpp"
#include "kambeam/sampling.hpp"
#include "kambeam/simulator.hpp"

using namespace kambeam;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.S = {{1, 0}, {3, 0}};
    cfg.xi = {1e-3, 2e-3};
    cfg.window_radius = 4.0;
    cfg.dt = 0.01;
    cfg.T = 10.0;
    return cfg;
}

std::vector<cplx> random_state(std::size_t n, std::uint64_t seed, double scale) {
    Rng rng(seed);
    std::vector<cplx> q(n);
    for (auto& z : q) z = {rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
    return q;
}

}  // namespace

TEST(Simulator, InitialState) {
    auto cfg = base_config();
    const auto st = init_state(cfg);
    EXPECT_EQ(st.modes.size(), st.q.size());
    const auto i1 = std::find(st.modes.begin(), st.modes.end(), Site{1, 0}) - st.modes.begin();
    const auto i2 = std::find(st.modes.begin(), st.modes.end(), Site{3, 0}) - st.modes.begin();
    EXPECT_NEAR(st.q[i1].real(), 0.03162, 1e-5);
    EXPECT_NEAR(st.q[i2].real(), 0.04472, 1e-5);
    EXPECT_EQ(st.q[i1].imag(), 0.0);

    cfg.phases = {std::numbers::pi / 2, 0.0};
    const auto rot = init_state(cfg);
    EXPECT_NEAR(rot.q[i1].real(), 0.0, 1e-17);
    EXPECT_NEAR(rot.q[i1].imag(), std::sqrt(1e-3), 1e-15);

    cfg.xi = {0.0, 0.0};
    cfg.phases.clear();
    for (const auto& z : init_state(cfg).q) EXPECT_EQ(z, cplx(0.0));
}

TEST(Simulator, ConfigValidation) {
    auto cfg = base_config();
    cfg.xi = {1e-3};
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = base_config();
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Simulator, ModeWindowIsSymmetric) {
    const auto w = mode_window(3.0);
    for (const auto& s : w) EXPECT_NE(std::find(w.begin(), w.end(), -s), w.end());
    EXPECT_EQ(w.size(), 8u);
}

TEST(Simulator, LinearRhsIsRotation) {
    Galerkin g(mode_window(4.0), 0.0);
    const auto q = random_state(g.size(), 3, 1.0);
    std::vector<cplx> dq(g.size());
    g.rhs(q, dq);
    for (std::size_t a = 0; a < g.size(); ++a) {
        const double lam = static_cast<double>(lambda(g.modes()[a]));
        EXPECT_NEAR(std::abs(dq[a] - cplx(0.0, lam) * q[a]), 0.0, 1e-14);
    }
}

TEST(Simulator, LinearFlowIsExactRotation) {
    auto cfg = base_config();
    cfg.nl_coupling = 0.0;
    cfg.sample_every = 100;
    const auto st = init_state(cfg);
    const auto tr = integrate(st, cfg);
    const auto& last = tr.q.back();
    const double t = tr.t.back();
    EXPECT_NEAR(t, cfg.T, 1e-9);
    for (std::size_t a = 0; a < st.modes.size(); ++a) {
        const double lam = static_cast<double>(lambda(st.modes[a]));
        const cplx expect = std::exp(cplx(0.0, lam * t)) * st.q[a];
        EXPECT_NEAR(std::abs(last[a] - expect), 0.0, 1e-12);
    }
}

TEST(Simulator, SingleModeHamiltonian) {
    Galerkin g(mode_window(1.0), 1.0);
    ASSERT_EQ(g.size(), 2u);
    std::vector<cplx> q(2, 0.0);
    EXPECT_EQ(g.hamiltonian(q), 0.0);
    EXPECT_EQ(g.momentum(q)[0], 0.0);
    q[g.modes()[0] == Site{1, 0} ? 0 : 1] = 1.0;
    EXPECT_NEAR(g.hamiltonian(q), 7.0, 1e-14);
}

// Lone mode q_n with q_{-n} = 0: the kick is i (4 / |n|) 3 |v|^2 v with v = q_n / |n|.
TEST(Simulator, SelfInteractionCoefficient) {
    Galerkin g(mode_window(3.0), 1.0);
    std::vector<cplx> q(g.size(), 0.0);
    std::size_t idx = 0;
    for (; idx < g.size(); ++idx) {
        if (g.modes()[idx] == Site{3, 0}) break;
    }
    const cplx amp(1e-3, 0.0);
    q[idx] = amp;
    std::vector<cplx> dq(g.size());
    g.kick_rhs(q, dq);
    const double lam = 9.0;
    // b + c + d = n has the 3 ordered tuples of (n, n, -n).
    const cplx v = amp / 3.0;
    const cplx expect = cplx(0.0, 4.0 / 3.0) * 3.0 * v * v * std::conj(v);
    EXPECT_NEAR(std::abs(dq[idx] - expect), 0.0, 1e-20);
    EXPECT_NEAR(std::abs(expect), 12.0 * std::pow(1e-3, 3) / (lam * lam), 1e-22);
}

TEST(Simulator, DirectAndFftConvolutionAgree) {
    Galerkin direct(mode_window(5.0), 1.0, ConvolutionMethod::Direct);
    Galerkin fft(mode_window(5.0), 1.0, ConvolutionMethod::FFT);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto q = random_state(direct.size(), seed, 0.1);
        std::vector<cplx> a(direct.size()), b(direct.size());
        direct.cubic(q, a);
        fft.cubic(q, b);
        double scale = 0.0;
        for (const auto& z : a) scale = std::max(scale, std::abs(z));
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-12 * scale);
    }
}

TEST(Simulator, RealityIsPreserved) {
    auto cfg = base_config();
    cfg.T = 5.0;
    cfg.sample_every = 50;
    const auto st = init_state(cfg);
    Galerkin g(st.modes, cfg.nl_coupling);
    EXPECT_EQ(g.reality_defect(st.q), 0.0);
    const auto tr = integrate(g, st, cfg);
    for (const auto& q : tr.q) EXPECT_LE(g.reality_defect(q), 1e-14);
}

TEST(Simulator, ConservesEnergyAndMomentum) {
    auto cfg = base_config();
    cfg.T = 50.0;
    cfg.dt = 0.005;
    cfg.sample_every = 100;
    const auto tr = integrate(init_state(cfg), cfg);
    EXPECT_LE(tr.max_relative_energy_drift(), 1e-6);
    EXPECT_LE(tr.max_momentum_drift(), 1e-12);
    EXPECT_THROW(tr.mode_index({101, 0}), SiteOutsideWindow);
}

TEST(Simulator, StepErrorIsSecondOrder) {
    auto cfg = base_config();
    cfg.xi = {0.05, 0.05};
    cfg.T = 1.0;
    auto final_state = [&](double dt) {
        auto c = cfg;
        c.dt = dt;
        c.sample_every = static_cast<int>(std::lround(c.T / dt));
        return integrate(init_state(c), c).q.back();
    };
    const auto ref = final_state(0.0005);
    auto err = [&](double dt) {
        const auto q = final_state(dt);
        double e = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) e = std::max(e, std::abs(q[i] - ref[i]));
        return e;
    };
    const double e1 = err(0.02), e2 = err(0.01);
    EXPECT_GT(std::log2(e1 / e2), 1.5);
}

TEST(Simulator, PredictedShift) {
    const std::vector<Site> S{{1, 0}, {3, 0}};
    const auto d = predicted_shift(S, std::vector<double>{1e-3, 1e-3});
    EXPECT_NEAR(d[0], 2e-3 + 4e-3 / 9.0, 1e-15);
    EXPECT_NEAR(d[0], 2.444e-3, 1e-6);
    const auto z = predicted_shift(S, std::vector<double>{0.0, 0.0});
    EXPECT_EQ(z[0], 0.0);
    EXPECT_EQ(z[1], 0.0);
}

TEST(Frequency, SyntheticTone) {
    const double dt = 0.01;
    std::vector<cplx> x;
    for (int i = 0; i * dt <= 100.0; ++i) x.push_back(std::exp(cplx(0.0, 2.5 * i * dt)));
    const auto est = dominant_frequency(x, dt);
    EXPECT_NEAR(est.frequency, 2.5, 1e-3);
    EXPECT_NEAR(est.amplitude, 1.0, 1e-2);

    std::vector<cplx> neg;
    for (int i = 0; i * dt <= 100.0; ++i) neg.push_back(std::exp(cplx(0.0, -1.75 * i * dt)));
    EXPECT_NEAR(dominant_frequency(neg, dt).frequency, -1.75, 1e-3);
}

TEST(Frequency, Errors) {
    EXPECT_THROW(dominant_frequency(std::vector<cplx>(100, 0.0), 0.1), NoPeak);
    EXPECT_THROW(dominant_frequency(std::vector<cplx>(8, 1.0), 0.1), PreconditionError);
}

TEST(Frequency, LinearRunRecoversLambda) {
    auto cfg = base_config();
    cfg.nl_coupling = 0.0;
    cfg.T = 100.0;
    cfg.sample_every = 5;
    const auto tr = integrate(init_state(cfg), cfg);
    const auto est = measure_frequency(tr, {1, 0});
    EXPECT_NEAR(est.frequency, 1.0, est.resolution);
    EXPECT_NEAR(measure_frequency(tr, {3, 0}).frequency, 9.0, est.resolution);
}
