#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "kambeam/errors.hpp"
#include "kambeam/homological.hpp"
#include "kambeam/lattice.hpp"

using namespace kambeam;

namespace {

const ResonanceEntry* find_pair(const std::vector<ResonanceEntry>& list, const Site& a, const Site& b) {
    for (const auto& e : list) {
        if ((e.n == a && e.m == b) || (e.n == b && e.m == a)) return &e;
    }
    return nullptr;
}

}  // namespace

TEST(Lattice, Membership) {
    EXPECT_TRUE(in_lattice(1, 0));
    EXPECT_FALSE(in_lattice(2, 1));
    EXPECT_TRUE(in_lattice(-3, 4));
    EXPECT_FALSE(in_lattice(1, 1));
    EXPECT_TRUE(in_lattice(mpz_class("123456789012345678901"), mpz_class("-98765432109876543210")));
    EXPECT_FALSE(in_lattice(mpz_class("123456789012345678900"), mpz_class("0")));
}

TEST(Lattice, Lambda) {
    EXPECT_EQ(lambda(Site{1, 0}), 1);
    EXPECT_EQ(lambda(Site{3, 2}), 13);
    EXPECT_EQ(lambda(Site{-1, -2}), 5);
    const BigSite big{mpz_class("100000000000000000000"), mpz_class(2)};
    EXPECT_EQ(lambda(big), mpz_class("10000000000000000000000000000000000000004"));
}

TEST(Lattice, NativeConversion) {
    const BigSite big{mpz_class("99999999999999999999"), mpz_class(0)};
    EXPECT_THROW(to_native(big), DomainError);
    const Site s{-7, 12};
    EXPECT_EQ(to_native(to_big(s)), s);
}

TEST(Lattice, RectangleTriple) {
    EXPECT_TRUE(rectangle_triple(Site{1, 0}, Site{1, 2}, Site{3, 2}));
    EXPECT_FALSE(rectangle_triple(Site{1, 0}, Site{3, 0}, Site{5, 0}));
    EXPECT_FALSE(rectangle_triple(Site{1, 0}, Site{3, 2}, Site{7, 4}));
    EXPECT_THROW(rectangle_triple(Site{1, 0}, Site{1, 0}, Site{3, 2}), DegenerateInput);
}

TEST(Lattice, RectangleTripleIsSymmetric) {
    const auto sites = window_sites(5);
    for (std::size_t a = 0; a < sites.size(); a += 3) {
        for (std::size_t b = a + 1; b < sites.size(); b += 5) {
            for (std::size_t c = b + 1; c < sites.size(); c += 7) {
                std::array<Site, 3> p{sites[a], sites[b], sites[c]};
                const bool ref = rectangle_triple(p[0], p[1], p[2]);
                std::sort(p.begin(), p.end());
                do {
                    ASSERT_EQ(rectangle_triple(p[0], p[1], p[2]), ref);
                } while (std::next_permutation(p.begin(), p.end()));
            }
        }
    }
}

TEST(Lattice, ClassifyExamples) {
    {
        const std::vector<Site> S{{1, 0}, {3, 0}};
        const auto t = classify_resonances<std::int64_t>(S, 10);
        const auto* e = find_pair(t.type1, {3, 2}, {1, 2});
        ASSERT_NE(e, nullptr);
        EXPECT_TRUE(satisfies_resonance(*e));
        EXPECT_TRUE(e->n < e->m);
    }
    {
        const std::vector<Site> S{{1, 0}, {3, 2}};
        const auto t = classify_resonances<std::int64_t>(S, 10);
        const auto* e = find_pair(t.type2, {1, 2}, {3, 0});
        ASSERT_NE(e, nullptr);
        EXPECT_TRUE(satisfies_resonance(*e));
    }
}

// Every listed entry satisfies its defining relations and stays off S.
TEST(Lattice, ClassifyEntriesSatisfyRelations) {
    const std::vector<std::vector<Site>> sets{{{1, 0}, {3, 0}}, {{1, 0}, {3, 2}}, {{1, 0}, {5, 4}, {-3, 2}}};
    for (const auto& S : sets) {
        const auto t = classify_resonances<std::int64_t>(S, 12);
        for (const auto* list : {&t.type1, &t.type2}) {
            for (const auto& e : *list) {
                EXPECT_TRUE(satisfies_resonance(e));
                EXPECT_TRUE(e.n < e.m);
                EXPECT_FALSE(t.contains(e.n));
                EXPECT_FALSE(t.contains(e.m));
                EXPECT_TRUE(in_lattice(e.n) && in_lattice(e.m));
            }
        }
        EXPECT_TRUE(std::is_sorted(t.type1.begin(), t.type1.end()));
        EXPECT_TRUE(std::is_sorted(t.type2.begin(), t.type2.end()));
    }
}

TEST(Lattice, ClassifyMatchesBruteForce) {
    const std::vector<Site> S{{1, 0}, {3, 2}};
    const auto t = classify_resonances<std::int64_t>(S, 8);
    const auto win = window_sites(8);
    std::size_t count1 = 0;
    for (const auto& n : win) {
        if (n == S[0] || n == S[1]) continue;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (i == j) continue;
                const Site m = n + S[i] - S[j];
                if (m == S[0] || m == S[1]) continue;
                if (lambda(n) - lambda(m) + lambda(S[i]) - lambda(S[j]) == 0) {
                    ++count1;
                    EXPECT_NE(find_pair(t.type1, n, m), nullptr);
                }
            }
        }
    }
    EXPECT_GT(count1, 0u);
}

TEST(Lattice, VerifyRectangleFailure) {
    const std::vector<Site> S{{1, 0}, {3, 0}, {1, 2}};
    const auto r = verify_admissible<std::int64_t>(S, 10);
    EXPECT_FALSE(r.pass);
    const bool has_rect = std::any_of(r.violations.begin(), r.violations.end(),
                                      [](const auto& v) { return v.kind == ViolationKind::RectangleTriple; });
    EXPECT_TRUE(has_rect);
}

TEST(Lattice, VerifyBadCardinality) {
    const std::vector<Site> one{{1, 0}};
    EXPECT_THROW(verify_admissible<std::int64_t>(one, 10), BadCardinality);
}

TEST(Lattice, ParityObstruction) {
    EXPECT_TRUE(parity_obstruction(8));
    const auto scan = parity_scan(6);
    EXPECT_TRUE(scan.empty);
    EXPECT_TRUE(scan.residuals_two_mod_four);
    EXPECT_GT(scan.quadruples, 0u);
}

TEST(Lattice, WindowSites) {
    const auto w = window_sites(3);
    for (const auto& s : w) {
        EXPECT_TRUE(in_lattice(s));
        EXPECT_LE(lambda(s), 9);
        EXPECT_NE(std::find(w.begin(), w.end(), -s), w.end());
    }
    EXPECT_TRUE(std::is_sorted(w.begin(), w.end()));
    // (+-1, 0), (+-1, +-2), (+-3, 0)
    EXPECT_EQ(w.size(), 8u);
}

TEST(Lattice, ZeroMomentum) {
    const std::vector<Site> S{{1, 0}, {3, 0}};
    EXPECT_TRUE(zero_momentum<std::int64_t>(MonomialKey{{0, 0}, {0, 0}, {{Site{5, 2}, 1}}, {{Site{5, 2}, 1}}}, S));
    // k = e_i - e_j, alpha = e_n, beta = e_m with n - m + i - j = 0.
    EXPECT_TRUE(zero_momentum<std::int64_t>(MonomialKey{{1, -1}, {0, 0}, {{Site{3, 2}, 1}}, {{Site{1, 2}, 1}}}, S));
    EXPECT_FALSE(zero_momentum<std::int64_t>(MonomialKey{{1, 0}, {0, 0}, {}, {}}, S));
    EXPECT_THROW(zero_momentum<std::int64_t>(MonomialKey{{1}, {0}, {}, {}}, S), PreconditionError);
}

// The coupling monomials of every classified pair conserve momentum.
TEST(Lattice, CouplingKeysHaveZeroMomentum) {
    const std::vector<Site> S{{1, 0}, {3, 2}};
    const auto t = classify_resonances<std::int64_t>(S, 10);
    for (const auto* list : {&t.type1, &t.type2}) {
        for (const auto& e : *list) {
            EXPECT_TRUE(zero_momentum<std::int64_t>(coupling_key(e, 2, true), S));
            EXPECT_TRUE(zero_momentum<std::int64_t>(coupling_key(e, 2, false), S));
        }
    }
}

TEST(Lattice, BigAndNativeClassifyAgree) {
    const std::vector<Site> S{{1, 0}, {3, 2}};
    const auto native = classify_resonances<std::int64_t>(S, 9);
    const auto bigS = to_big(S);
    const auto big = classify_resonances<mpz_class>(std::span<const BigSite>(bigS), 9);
    ASSERT_EQ(native.type1.size(), big.type1.size());
    ASSERT_EQ(native.type2.size(), big.type2.size());
    for (std::size_t a = 0; a < native.type1.size(); ++a) {
        EXPECT_EQ(to_big(native.type1[a].n), big.type1[a].n);
        EXPECT_EQ(to_big(native.type1[a].m), big.type1[a].m);
    }
}
