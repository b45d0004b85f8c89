#include <gtest/gtest.h>

#include <cmath>

#include "kambeam/errors.hpp"
#include "kambeam/homological.hpp"

using namespace kambeam;

namespace {

// One normal mode and the frequencies picked to make the divisor of
// e^{i theta_1} z_{(-1,0)} equal <k, omega> + Omega = 0.5 + 1.5 = 2.
NormalPart scalar_part(double Omega) {
    NormalPart h;
    h.S = {{1, 0}, {3, 2}};
    h.omega = {0.5, 7.0};
    h.Omega[{-1, 0}] = Omega;
    return h;
}

NormalPart unresonant_part() {
    const std::vector<Site> S{{1, 0}, {3, 2}};
    const auto tables = classify_resonances<std::int64_t>(S, 10);
    const NormalForm nf(tables, {0.37, 0.61}, 1.0);
    const std::vector<Site> modes{{5, 4}, {-5, 4}, {7, 0}};
    return NormalPart::from(nf, modes);
}

}  // namespace

TEST(Homological, ScalarSolve) {
    const auto h = scalar_part(1.5);
    Series R(2);
    const auto key = make_key({1, 0}, {0, 0}, {{Site{-1, 0}, 1}}, {});
    R.add(key, cplx(0.0, 2.0));
    const auto res = solve_homological(h, R, 1e-3, 1.0, 3);
    ASSERT_EQ(res.F.size(), 1u);
    EXPECT_NEAR(std::abs(res.F.coeff(key) - cplx(1.0, 0.0)), 0.0, 1e-15);
    EXPECT_TRUE(res.hat.empty());
    EXPECT_LE(res.residual, 1e-15);
    EXPECT_EQ(res.block_sizes.at(1), 1u);
}

TEST(Homological, SmallDivisorThrows) {
    const auto h = scalar_part(-0.5 + 1e-9);
    Series R(2);
    R.add(make_key({1, 0}, {0, 0}, {{Site{-1, 0}, 1}}, {}), 1.0);
    try {
        solve_homological(h, R, 1e-3, 1.0, 3);
        FAIL() << "expected SmallDivisor";
    } catch (const SmallDivisor& e) {
        EXPECT_LT(e.det(), e.threshold());
    }
}

TEST(Homological, DiagonalActionTermsGoToHat) {
    const auto h = unresonant_part();
    Series R(2);
    const std::vector<int> zero{0, 0};
    for (const auto& [n, w] : h.Omega) {
        R.add(make_key(zero, zero, {{n, 1}}, {{n, 1}}), 0.01 * lambda(n));
    }
    R.add(make_key(zero, {1, 0}, {}, {}), 0.2);
    const auto res = solve_homological(h, R, 1e-3, 3.0, 3);
    EXPECT_TRUE(res.F.empty());
    EXPECT_EQ((res.hat - R).l1(), 0.0);
    const auto parts = split_hat(h, res.hat);
    EXPECT_EQ((parts.N - R).l1(), 0.0);
    EXPECT_TRUE(parts.A.empty() && parts.B.empty() && parts.Bbar.empty());
}

TEST(Homological, ZeroRightHandSide) {
    const auto h = unresonant_part();
    const auto res = solve_homological(h, Series(2), 1e-3, 3.0, 3);
    EXPECT_TRUE(res.F.empty());
    EXPECT_TRUE(res.hat.empty());
    EXPECT_TRUE(std::isinf(res.margin));
}

TEST(Homological, Preconditions) {
    const auto h = scalar_part(1.5);
    Series far(2);
    far.add(make_key({5, 0}, {0, 0}, {{Site{-5, 0}, 1}}, {}), 1.0);
    EXPECT_THROW(solve_homological(h, far, 1e-3, 1.0, 3), PreconditionError);
    Series cubic(2);
    cubic.add(make_key({0, 0}, {0, 0}, {{Site{-1, 0}, 2}}, {{Site{-1, 0}, 1}}), 1.0);
    EXPECT_THROW(solve_homological(h, cubic, 1e-3, 1.0, 3), PreconditionError);
    Series bad_momentum(2);
    bad_momentum.add(make_key({0, 1}, {0, 0}, {}, {}), 1.0);
    EXPECT_THROW(solve_homological(h, bad_momentum, 1e-3, 1.0, 3), PreconditionError);
    Series off_modes(2);
    off_modes.add(make_key({0, 1}, {0, 0}, {{Site{-3, -2}, 1}}, {}), 1.0);
    EXPECT_THROW(solve_homological(h, off_modes, 1e-3, 1.0, 3), PreconditionError);
}

// With no resonant pairs every system is scalar, so |F| <= max(1,|k|)^tau |R| / gamma holds
// coefficient-wise, and the equation defect vanishes.
TEST(Homological, DivisorBoundOnScalarSystems) {
    const auto h = unresonant_part();
    ASSERT_TRUE(h.type1.empty() && h.type2.empty());
    const double gamma = 1e-4, tau = 3.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PerturbationConfig cfg;
        cfg.K = 3;
        cfg.scale = 1.0;
        cfg.seed = seed;
        const auto R = quadratic_truncate(random_perturbation(h.S, h.modes(), cfg));
        const auto res = solve_homological(h, R, gamma, tau, 3);
        EXPECT_LE(res.residual, 1e-12 * R.l1());
        for (const auto& [key, f] : res.F.terms()) {
            const double kk = std::max(1, k_norm(key));
            EXPECT_LE(std::abs(f), std::pow(kk, tau) * std::abs(R.coeff(key)) / gamma * (1 + 1e-12));
        }
        for (const auto& [key, c] : res.hat.terms()) EXPECT_TRUE(h.is_hat_key(key));
        EXPECT_TRUE(momentum_closed(res.F, h.S));
        EXPECT_LE(reality_defect(res.F), 1e-12 * std::max(1.0, res.F.l1()));
        EXPECT_GE(res.margin, 1.0);
    }
}

// Independent check of the equation: {H0, F} + R - hat vanishes.
TEST(Homological, ResidualWithCoupledPairs) {
    const std::vector<Site> S{{1, 0}, {3, 0}};
    const auto tables = classify_resonances<std::int64_t>(S, 10);
    const NormalForm nf(tables, {0.37, 0.61}, 1.0);
    const std::vector<Site> modes{{3, 2}, {1, 2}, {5, 4}};
    const auto h = NormalPart::from(nf, modes);
    ASSERT_FALSE(h.type1.empty());
    PerturbationConfig cfg;
    cfg.K = 3;
    cfg.scale = 1.0;
    cfg.seed = 42;
    const auto R = quadratic_truncate(random_perturbation(h.S, h.modes(), cfg));
    const auto res = solve_homological(h, R, 1e-8, 3.0, 3);
    const auto defect = poisson_bracket(h.to_series(), res.F) + R - res.hat;
    EXPECT_LE(defect.l1(), 1e-10 * R.l1());
    EXPECT_GT(res.block_sizes.count(2) + res.block_sizes.count(4), 0u);
}

TEST(Homological, NormalPartClosesUnderPartners) {
    const std::vector<Site> S{{1, 0}, {3, 0}};
    const auto tables = classify_resonances<std::int64_t>(S, 10);
    const NormalForm nf(tables, {1.0, 1.0}, 1.0);
    const std::vector<Site> modes{{3, 2}};
    const auto h = NormalPart::from(nf, modes);
    EXPECT_EQ(h.Omega.count({1, 2}), 1u);
    EXPECT_THROW(NormalPart::from(nf, std::vector<Site>{{1, 0}}), SiteInS);
    // Hermitian couplings: real a on both orientations.
    for (const auto& p : h.type1) EXPECT_EQ(p.fwd, std::conj(p.bwd));
}

TEST(KamStep, ZeroPerturbationIsFixed) {
    const auto h = unresonant_part();
    KamParams params;
    const auto out = kam_step({h, Series(2)}, params);
    EXPECT_TRUE(out.F.empty());
    EXPECT_TRUE(out.next.P.empty());
    EXPECT_EQ(out.next.h0.omega, h.omega);
    EXPECT_EQ(out.next.h0.Omega, h.Omega);
}

TEST(KamStep, DiagonalPerturbationShiftsFrequencies) {
    const auto h = unresonant_part();
    Series P(2);
    const std::vector<int> zero{0, 0};
    std::map<Site, double> shift;
    double c = 1e-3;
    for (const auto& [n, w] : h.Omega) {
        shift[n] = c;
        P.add(make_key(zero, zero, {{n, 1}}, {{n, 1}}), c);
        c *= 2;
    }
    KamParams params;
    const auto out = kam_step({h, P}, params);
    for (const auto& [n, w] : h.Omega) EXPECT_NEAR(out.next.h0.Omega.at(n), w + shift[n], 1e-15);
    EXPECT_LE(quadratic_truncate(out.next.P).l1(), 1e-12);
}

TEST(KamStep, NewPerturbationIsSmaller) {
    const auto h = unresonant_part();
    PerturbationConfig cfg;
    cfg.scale = 1e-6;
    cfg.seed = 5;
    const auto P = random_perturbation(h.S, h.modes(), cfg);
    KamParams params;
    params.gamma = 1e-3;
    const auto out = kam_step({h, P}, params);
    EXPECT_GT(out.stats.eps, 0.0);
    EXPECT_LT(out.stats.eps_plus, out.stats.eps);
    EXPECT_LE(out.stats.homological_residual, 1e-12 * out.stats.eps);
    EXPECT_GT(out.stats.lie_terms, 0);
    EXPECT_TRUE(momentum_closed(out.next.P, h.S));
}
