#include <gtest/gtest.h>

#include "kambeam/errors.hpp"
#include "kambeam/lattice.hpp"
#include "kambeam/sitegen.hpp"

using namespace kambeam;

namespace {

mpz_class pow_mpz(const mpz_class& base, unsigned long e) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

}  // namespace

TEST(Sitegen, TwoSitesFromFive) {
    const auto S = generate_sites({2, mpz_class(5)});
    ASSERT_EQ(S.size(), 2u);
    EXPECT_EQ(S[0].n1, 5);
    EXPECT_EQ(S[0].n2, mpz_class("596046447753906250"));
    EXPECT_EQ(S[0].n2, 2 * pow_mpz(5, 25));
    EXPECT_EQ(S[1].n1, 3125);
    EXPECT_EQ(S[1].n2, 2 * pow_mpz(5, 125));
    EXPECT_TRUE(parity_audit(S));
}

TEST(Sitegen, DefaultSeed) {
    EXPECT_EQ(default_seed(2), 5);
    EXPECT_EQ(default_seed(3), 11);
    const auto S = generate_sites({2, std::nullopt});
    EXPECT_EQ(S[0].n1, 5);
}

TEST(Sitegen, BadSeeds) {
    EXPECT_THROW(generate_sites({2, mpz_class(4)}), BadSeed);
    EXPECT_THROW(generate_sites({2, mpz_class(3)}), BadSeed);
    EXPECT_THROW(generate_sites({3, mpz_class(9)}), BadSeed);
    EXPECT_THROW(generate_sites({1, mpz_class(5)}), BadSeed);
}

TEST(Sitegen, ThreeSitesFromEleven) {
    const auto S = generate_sites({3, mpz_class(11)});
    ASSERT_EQ(S.size(), 3u);
    const mpz_class x1 = 11, x2 = 161051;
    const mpz_class y1 = 2 * pow_mpz(x1, 125), y2 = 2 * pow_mpz(x2, 125);
    EXPECT_EQ(S[1].n1, x2);
    EXPECT_EQ(S[1].n2, y2);
    const mpz_class prod = (x2 - x1) * (x2 - x1) + (y2 - y1) * (y2 - y1);
    const mpz_class x3 = pow_mpz(x2, 5) * (prod + 1);
    EXPECT_EQ(S[2].n1, x3);
    EXPECT_EQ(S[2].n2, 2 * pow_mpz(x3, 125));
    EXPECT_TRUE(parity_audit(S));
}

TEST(Sitegen, ParityAudit) {
    const std::vector<BigSite> bad{{mpz_class(2), mpz_class(2)}};
    EXPECT_FALSE(parity_audit(bad));
    EXPECT_TRUE(parity_audit(std::vector<BigSite>{}));
}

TEST(Sitegen, GeneratedSetIsAdmissibleInSmallWindow) {
    const auto S = generate_sites({2, mpz_class(7)});
    const auto r = verify_admissible<mpz_class>(std::span<const BigSite>(S), 20);
    EXPECT_TRUE(r.pass);
}
