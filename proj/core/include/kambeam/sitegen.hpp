#pragma once

// Inductive construction of admissible tangential sets with exact integers:
//   x_1 odd, x_1 > b^2;   x_2 = x_1^5;
//   x_{j+1} = x_j^5 * (prod_{1<=l<m<=j} ((x_m - x_l)^2 + (y_m - y_l)^2) + 1),  2 <= j <= b-1;
//   y_j = 2 x_j^(5^b).

#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "kambeam/lattice.hpp"

namespace kambeam {

struct GenConfig {
    int b = 2;
    std::optional<mpz_class> x1;  // defaults to the smallest odd integer > b^2
};

mpz_class default_seed(int b);

// Throws BadSeed if b < 2, x1 is even, or x1 <= b^2.
std::vector<BigSite> generate_sites(const GenConfig& cfg);

// Every first coordinate odd and every second coordinate even (vacuously true when empty).
bool parity_audit(std::span<const BigSite> sites);

}  // namespace kambeam
