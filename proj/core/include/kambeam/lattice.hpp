#pragma once

// Odd sublattice Z^2_odd = {(n1, n2) : n1 odd, n2 even}, resonance tables of a
// tangential set, window-bounded admissibility checks and the momentum predicate.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "kambeam/errors.hpp"

namespace kambeam {

template <class Int>
struct BasicSite {
    Int n1{};
    Int n2{};

    friend bool operator==(const BasicSite& a, const BasicSite& b) {
        return a.n1 == b.n1 && a.n2 == b.n2;
    }
    friend bool operator!=(const BasicSite& a, const BasicSite& b) { return !(a == b); }
    // Lexicographic order on (n1, n2).
    friend bool operator<(const BasicSite& a, const BasicSite& b) {
        if (a.n1 != b.n1) return a.n1 < b.n1;
        return a.n2 < b.n2;
    }
    friend BasicSite operator+(const BasicSite& a, const BasicSite& b) {
        return {Int(a.n1 + b.n1), Int(a.n2 + b.n2)};
    }
    friend BasicSite operator-(const BasicSite& a, const BasicSite& b) {
        return {Int(a.n1 - b.n1), Int(a.n2 - b.n2)};
    }
    BasicSite operator-() const { return {Int(-n1), Int(-n2)}; }
};

using Site = BasicSite<std::int64_t>;
using BigSite = BasicSite<mpz_class>;

// Parity membership of an integer pair.
bool in_lattice(std::int64_t n1, std::int64_t n2);
bool in_lattice(const mpz_class& n1, const mpz_class& n2);
template <class Int>
bool in_lattice(const BasicSite<Int>& s) { return in_lattice(s.n1, s.n2); }

// Squared modulus |n|^2, exact.
std::int64_t lambda(const Site& s);
mpz_class lambda(const BigSite& s);

template <class Int>
Int dot(const BasicSite<Int>& a, const BasicSite<Int>& b) {
    return Int(a.n1 * b.n1 + a.n2 * b.n2);
}

BigSite to_big(const Site& s);
// Throws DomainError if a coordinate does not fit in 64 bits.
Site to_native(const BigSite& s);
std::vector<Site> to_native(std::span<const BigSite> sites);
std::vector<BigSite> to_big(std::span<const Site> sites);

// True iff the three points have a right angle at one of them (collinear triples never do).
// Throws DegenerateInput if two of the points coincide.
template <class Int>
bool rectangle_triple(const BasicSite<Int>& a, const BasicSite<Int>& b, const BasicSite<Int>& c);

enum class ResonanceKind { Type1, Type2 };

const char* to_string(ResonanceKind kind);

// (n, m) resonant through tangential sites (i, j):
//   Type1: n - m + i - j = 0,  |n|^2 - |m|^2 + |i|^2 - |j|^2 = 0
//   Type2: n + m - i - j = 0,  |n|^2 + |m|^2 - |i|^2 - |j|^2 = 0
// Stored canonically with n < m lexicographically; i_index / j_index point into S.
template <class Int>
struct BasicResonanceEntry {
    BasicSite<Int> n, m, i, j;
    ResonanceKind kind = ResonanceKind::Type1;
    int i_index = 0;
    int j_index = 0;

    friend bool operator==(const BasicResonanceEntry& a, const BasicResonanceEntry& b) {
        return a.kind == b.kind && a.n == b.n && a.m == b.m && a.i == b.i && a.j == b.j;
    }
    friend bool operator<(const BasicResonanceEntry& a, const BasicResonanceEntry& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.n != b.n) return a.n < b.n;
        if (a.m != b.m) return a.m < b.m;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    }
};

using ResonanceEntry = BasicResonanceEntry<std::int64_t>;
using BigResonanceEntry = BasicResonanceEntry<mpz_class>;

template <class Int>
bool satisfies_resonance(const BasicResonanceEntry<Int>& e);

// One raw hit seen from a scanned site n (before canonicalization).
template <class Int>
struct ResonanceHit {
    BasicSite<Int> m;
    int i_index = 0;
    int j_index = 0;
};

template <class Int>
struct BasicTangentialSet {
    std::vector<BasicSite<Int>> sites;
    std::vector<BasicResonanceEntry<Int>> type1;
    std::vector<BasicResonanceEntry<Int>> type2;
    std::int64_t window = 0;

    std::size_t size() const { return sites.size(); }
    bool contains(const BasicSite<Int>& s) const;
};

using TangentialSet = BasicTangentialSet<std::int64_t>;
using BigTangentialSet = BasicTangentialSet<mpz_class>;

// All odd-lattice sites with |n| <= radius (Euclidean), in lexicographic order.
std::vector<Site> window_sites(std::int64_t radius);

// Scans every n outside S with |n| <= window against ordered pairs (i, j), i != j, of S.
template <class Int>
BasicTangentialSet<Int> classify_resonances(std::span<const BasicSite<Int>> S, std::int64_t window);

// Per-site raw hits, used for the uniqueness conditions.
template <class Int>
std::vector<ResonanceHit<Int>> type1_hits(std::span<const BasicSite<Int>> S, const Site& n);
template <class Int>
std::vector<ResonanceHit<Int>> type2_hits(std::span<const BasicSite<Int>> S, const Site& n);

enum class ViolationKind { RectangleTriple, Type1NotUnique, Type2NotUnique, BothTypes };

const char* to_string(ViolationKind kind);

template <class Int>
struct Violation {
    ViolationKind kind;
    std::vector<BasicSite<Int>> witness;
};

template <class Int>
struct AdmissibilityReport {
    bool pass = true;
    std::int64_t window = 0;
    std::vector<Violation<Int>> violations;
    std::size_t type1_count = 0;
    std::size_t type2_count = 0;
    std::size_t sites_scanned = 0;
};

// Rectangle condition over all triples, uniqueness of Type1/Type2 triples and
// disjointness of the two classes for every scanned n with |n| <= window.
// Throws BadCardinality if |S| < 2.
template <class Int>
AdmissibilityReport<Int> verify_admissible(std::span<const BasicSite<Int>> S, std::int64_t window);

struct ParityScan {
    bool empty = true;               // no quadruple with zero modulus residual
    bool residuals_two_mod_four = true;
    std::uint64_t quadruples = 0;
};

// Exhaustive scan of i + j + n - m = 0 with |coordinates| of i, j, n bounded by window.
ParityScan parity_scan(std::int64_t window);
bool parity_obstruction(std::int64_t window);

// Exponents of e^{i<k,theta>} I^l z^alpha zbar^beta. alpha / beta are sorted by site
// and hold strictly positive powers only.
struct MonomialKey {
    std::vector<int> k;
    std::vector<int> l;
    std::vector<std::pair<Site, int>> alpha;
    std::vector<std::pair<Site, int>> beta;

    friend bool operator==(const MonomialKey&, const MonomialKey&) = default;
    friend bool operator<(const MonomialKey& a, const MonomialKey& b) {
        if (a.k != b.k) return a.k < b.k;
        if (a.l != b.l) return a.l < b.l;
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        return a.beta < b.beta;
    }
};

struct Monomial {
    MonomialKey key;
    std::complex<double> coeff{0.0, 0.0};
};

// sum_j k_j i_j + sum_n (alpha_n - beta_n) n == 0
template <class Int>
bool zero_momentum(const MonomialKey& mono, std::span<const BasicSite<Int>> S);
template <class Int>
bool zero_momentum(const Monomial& mono, std::span<const BasicSite<Int>> S) {
    return zero_momentum<Int>(mono.key, S);
}

}  // namespace kambeam
