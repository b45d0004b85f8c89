#include "kambeam/sitegen.hpp"

#include <string>

namespace kambeam {

mpz_class default_seed(int b) {
    mpz_class x = b * b + 1;
    if (mpz_even_p(x.get_mpz_t())) x += 1;
    return x;
}

namespace {

mpz_class pow_ui(const mpz_class& base, unsigned long e) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// y = 2 x^(5^b)
mpz_class second_coordinate(const mpz_class& x, int b) {
    unsigned long e = 1;
    for (int t = 0; t < b; ++t) e *= 5;
    return 2 * pow_ui(x, e);
}

}  // namespace

std::vector<BigSite> generate_sites(const GenConfig& cfg) {
    if (cfg.b < 2) throw BadSeed("b must be >= 2, got " + std::to_string(cfg.b));
    const mpz_class x1 = cfg.x1.value_or(default_seed(cfg.b));
    const mpz_class b2 = cfg.b * cfg.b;
    if (mpz_even_p(x1.get_mpz_t())) throw BadSeed("x1 must be odd, got " + x1.get_str());
    if (x1 <= b2) throw BadSeed("x1 must exceed b^2 = " + b2.get_str() + ", got " + x1.get_str());

    std::vector<mpz_class> xs{x1, pow_ui(x1, 5)};
    std::vector<mpz_class> ys{second_coordinate(xs[0], cfg.b), second_coordinate(xs[1], cfg.b)};
    for (int j = 2; j < cfg.b; ++j) {
        mpz_class prod = 1;
        for (int m = 1; m < j; ++m) {
            for (int l = 0; l < m; ++l) {
                const mpz_class dx = xs[m] - xs[l];
                const mpz_class dy = ys[m] - ys[l];
                prod *= dx * dx + dy * dy;
            }
        }
        xs.push_back(pow_ui(xs.back(), 5) * (prod + 1));
        ys.push_back(second_coordinate(xs.back(), cfg.b));
    }

    std::vector<BigSite> out;
    out.reserve(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) out.push_back({xs[j], ys[j]});
    return out;
}

bool parity_audit(std::span<const BigSite> sites) {
    for (const auto& s : sites) {
        if (!in_lattice(s)) return false;
    }
    return true;
}

}  // namespace kambeam
