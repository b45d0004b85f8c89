#include "kambeam/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kambeam {

bool in_lattice(std::int64_t n1, std::int64_t n2) { return (n1 % 2 != 0) && (n2 % 2 == 0); }

bool in_lattice(const mpz_class& n1, const mpz_class& n2) {
    return mpz_odd_p(n1.get_mpz_t()) && mpz_even_p(n2.get_mpz_t());
}

std::int64_t lambda(const Site& s) { return s.n1 * s.n1 + s.n2 * s.n2; }

mpz_class lambda(const BigSite& s) { return s.n1 * s.n1 + s.n2 * s.n2; }

BigSite to_big(const Site& s) {
    return {mpz_class(static_cast<long>(s.n1)), mpz_class(static_cast<long>(s.n2))};
}

Site to_native(const BigSite& s) {
    if (!s.n1.fits_slong_p() || !s.n2.fits_slong_p()) {
        throw DomainError("site coordinate exceeds 64-bit range");
    }
    return {s.n1.get_si(), s.n2.get_si()};
}

std::vector<Site> to_native(std::span<const BigSite> sites) {
    std::vector<Site> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(to_native(s));
    return out;
}

std::vector<BigSite> to_big(std::span<const Site> sites) {
    std::vector<BigSite> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(to_big(s));
    return out;
}

const char* to_string(ResonanceKind kind) {
    return kind == ResonanceKind::Type1 ? "Type1" : "Type2";
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::RectangleTriple: return "rectangle_triple";
        case ViolationKind::Type1NotUnique: return "type1_not_unique";
        case ViolationKind::Type2NotUnique: return "type2_not_unique";
        case ViolationKind::BothTypes: return "type1_and_type2";
    }
    return "unknown";
}

namespace {

template <class Int>
BasicSite<Int> lift(const Site& s) {
    if constexpr (std::is_same_v<Int, std::int64_t>) {
        return s;
    } else {
        return to_big(s);
    }
}

template <class Int>
bool contains(std::span<const BasicSite<Int>> S, const BasicSite<Int>& s) {
    return std::find(S.begin(), S.end(), s) != S.end();
}

template <class Int>
bool right_angle_at(const BasicSite<Int>& v, const BasicSite<Int>& p, const BasicSite<Int>& q) {
    return dot(p - v, q - v) == 0;
}

}  // namespace

template <class Int>
bool rectangle_triple(const BasicSite<Int>& a, const BasicSite<Int>& b, const BasicSite<Int>& c) {
    if (a == b || b == c || a == c) {
        throw DegenerateInput("rectangle_triple needs three distinct points");
    }
    // A right angle between two nonzero parallel vectors is impossible, so
    // collinear triples fall out as non-rectangular here.
    return right_angle_at(a, b, c) || right_angle_at(b, a, c) || right_angle_at(c, a, b);
}

template <class Int>
bool satisfies_resonance(const BasicResonanceEntry<Int>& e) {
    const auto ln = lambda(e.n), lm = lambda(e.m), li = lambda(e.i), lj = lambda(e.j);
    if (e.kind == ResonanceKind::Type1) {
        return (e.n - e.m + e.i - e.j) == BasicSite<Int>{} && (ln - lm + li - lj) == 0;
    }
    return (e.n + e.m - e.i - e.j) == BasicSite<Int>{} && (ln + lm - li - lj) == 0;
}

template <class Int>
bool BasicTangentialSet<Int>::contains(const BasicSite<Int>& s) const {
    return std::find(sites.begin(), sites.end(), s) != sites.end();
}

std::vector<Site> window_sites(std::int64_t radius) {
    std::vector<Site> out;
    if (radius < 1) return out;
    const std::int64_t r2 = radius * radius;
    std::int64_t odd_max = radius % 2 == 0 ? radius - 1 : radius;
    for (std::int64_t n1 = -odd_max; n1 <= odd_max; n1 += 2) {
        std::int64_t even_max = radius % 2 == 0 ? radius : radius - 1;
        for (std::int64_t n2 = -even_max; n2 <= even_max; n2 += 2) {
            if (n1 * n1 + n2 * n2 <= r2) out.push_back({n1, n2});
        }
    }
    return out;
}

namespace {

// With m = n + i - j the Type1 modulus residual equals -2 <n - j, i - j>, and with
// m = i + j - n the Type2 residual equals 2 <n - i, n - j>. Both are linear in n, so the
// per-pair constants are computed once and each scanned n costs O(b^2) small-by-big products.
template <class Int>
class ResonanceScanner {
public:
    explicit ResonanceScanner(std::span<const BasicSite<Int>> S) : S_(S) {
        const std::size_t b = S.size();
        diff_.resize(b * b);
        diff_dot_j_.resize(b * b);
        sum_.resize(b * b);
        dot_ij_.resize(b * b);
        for (std::size_t a = 0; a < b; ++a) {
            for (std::size_t c = 0; c < b; ++c) {
                diff_[a * b + c] = S[a] - S[c];
                diff_dot_j_[a * b + c] = dot(S[c], diff_[a * b + c]);
                sum_[a * b + c] = S[a] + S[c];
                dot_ij_[a * b + c] = dot(S[a], S[c]);
            }
        }
    }

    std::vector<ResonanceHit<Int>> type1(const Site& n_native) const {
        std::vector<ResonanceHit<Int>> hits;
        const auto n = lift<Int>(n_native);
        if (contains(S_, n)) return hits;
        const std::size_t b = S_.size();
        for (std::size_t a = 0; a < b; ++a) {
            for (std::size_t c = 0; c < b; ++c) {
                if (a == c) continue;
                const auto& d = diff_[a * b + c];
                if (dot(n, d) != diff_dot_j_[a * b + c]) continue;
                auto m = n + d;
                if (!in_lattice(m) || contains(S_, m)) continue;
                hits.push_back({std::move(m), static_cast<int>(a), static_cast<int>(c)});
            }
        }
        return hits;
    }

    std::vector<ResonanceHit<Int>> type2(const Site& n_native) const {
        std::vector<ResonanceHit<Int>> hits;
        const auto n = lift<Int>(n_native);
        if (contains(S_, n)) return hits;
        const std::size_t b = S_.size();
        const Int ln = lambda(n);
        // Symmetric in (i, j): unordered pairs only.
        for (std::size_t a = 0; a < b; ++a) {
            for (std::size_t c = a + 1; c < b; ++c) {
                const auto& s = sum_[a * b + c];
                if (Int(ln - dot(n, s) + dot_ij_[a * b + c]) != 0) continue;
                auto m = s - n;
                if (!in_lattice(m) || contains(S_, m)) continue;
                hits.push_back({std::move(m), static_cast<int>(a), static_cast<int>(c)});
            }
        }
        return hits;
    }

private:
    std::span<const BasicSite<Int>> S_;
    std::vector<BasicSite<Int>> diff_, sum_;
    std::vector<Int> diff_dot_j_, dot_ij_;
};

}  // namespace

template <class Int>
std::vector<ResonanceHit<Int>> type1_hits(std::span<const BasicSite<Int>> S, const Site& n) {
    return ResonanceScanner<Int>(S).type1(n);
}

template <class Int>
std::vector<ResonanceHit<Int>> type2_hits(std::span<const BasicSite<Int>> S, const Site& n) {
    return ResonanceScanner<Int>(S).type2(n);
}

namespace {

template <class Int>
BasicResonanceEntry<Int> canonical_type1(const BasicSite<Int>& n, const ResonanceHit<Int>& h,
                                         std::span<const BasicSite<Int>> S) {
    BasicResonanceEntry<Int> e{n, h.m, S[h.i_index], S[h.j_index], ResonanceKind::Type1, h.i_index,
                               h.j_index};
    if (e.m < e.n) {
        std::swap(e.n, e.m);
        std::swap(e.i, e.j);
        std::swap(e.i_index, e.j_index);
    }
    return e;
}

template <class Int>
BasicResonanceEntry<Int> canonical_type2(const BasicSite<Int>& n, const ResonanceHit<Int>& h,
                                         std::span<const BasicSite<Int>> S) {
    BasicResonanceEntry<Int> e{n, h.m, S[h.i_index], S[h.j_index], ResonanceKind::Type2, h.i_index,
                               h.j_index};
    if (e.m < e.n) std::swap(e.n, e.m);
    return e;
}

template <class Int>
void sort_unique(std::vector<BasicResonanceEntry<Int>>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

template <class Int>
BasicTangentialSet<Int> classify_resonances(std::span<const BasicSite<Int>> S, std::int64_t window) {
    BasicTangentialSet<Int> out;
    out.sites.assign(S.begin(), S.end());
    out.window = window;
    for (const auto& s : S) {
        if (!in_lattice(s)) throw DomainError("tangential site outside Z^2_odd");
    }
    const ResonanceScanner<Int> scanner(S);
    for (const Site& n_native : window_sites(window)) {
        const auto n = lift<Int>(n_native);
        for (const auto& h : scanner.type1(n_native)) out.type1.push_back(canonical_type1(n, h, S));
        for (const auto& h : scanner.type2(n_native)) out.type2.push_back(canonical_type2(n, h, S));
    }
    sort_unique(out.type1);
    sort_unique(out.type2);
    return out;
}

template <class Int>
AdmissibilityReport<Int> verify_admissible(std::span<const BasicSite<Int>> S, std::int64_t window) {
    if (S.size() < 2) throw BadCardinality("admissible sets need b >= 2 sites");
    for (std::size_t a = 0; a < S.size(); ++a) {
        if (!in_lattice(S[a])) throw DomainError("tangential site outside Z^2_odd");
        for (std::size_t b = a + 1; b < S.size(); ++b) {
            if (S[a] == S[b]) throw DegenerateInput("tangential sites must be distinct");
        }
    }

    AdmissibilityReport<Int> report;
    report.window = window;
    const ResonanceScanner<Int> scanner(S);

    for (std::size_t a = 0; a < S.size(); ++a) {
        for (std::size_t b = a + 1; b < S.size(); ++b) {
            for (std::size_t c = b + 1; c < S.size(); ++c) {
                if (rectangle_triple(S[a], S[b], S[c])) {
                    report.violations.push_back({ViolationKind::RectangleTriple, {S[a], S[b], S[c]}});
                }
            }
        }
    }

    for (const Site& n_native : window_sites(window)) {
        const auto n = lift<Int>(n_native);
        if (contains(S, n)) continue;
        ++report.sites_scanned;
        const auto h1 = scanner.type1(n_native);
        const auto h2 = scanner.type2(n_native);
        report.type1_count += h1.empty() ? 0 : 1;
        report.type2_count += h2.empty() ? 0 : 1;
        auto witness = [&](const auto& hits) {
            std::vector<BasicSite<Int>> w{n};
            for (const auto& h : hits) w.push_back(h.m);
            return w;
        };
        if (h1.size() > 1) report.violations.push_back({ViolationKind::Type1NotUnique, witness(h1)});
        if (h2.size() > 1) report.violations.push_back({ViolationKind::Type2NotUnique, witness(h2)});
        if (!h1.empty() && !h2.empty()) {
            report.violations.push_back({ViolationKind::BothTypes, {n, h1.front().m, h2.front().m}});
        }
    }
    report.pass = report.violations.empty();
    return report;
}

ParityScan parity_scan(std::int64_t window) {
    ParityScan scan;
    std::vector<Site> pts;
    for (std::int64_t n1 = -window; n1 <= window; ++n1) {
        for (std::int64_t n2 = -window; n2 <= window; ++n2) {
            if (in_lattice(n1, n2)) pts.push_back({n1, n2});
        }
    }
    std::vector<std::int64_t> lam(pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a) lam[a] = lambda(pts[a]);

    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = 0; b < pts.size(); ++b) {
            const Site ij = pts[a] + pts[b];
            const std::int64_t lij = lam[a] + lam[b];
            for (std::size_t c = 0; c < pts.size(); ++c) {
                const Site m = ij + pts[c];
                const std::int64_t residual = lij + lam[c] - lambda(m);
                ++scan.quadruples;
                if (residual == 0) scan.empty = false;
                if (((residual % 4) + 4) % 4 != 2) scan.residuals_two_mod_four = false;
            }
        }
    }
    return scan;
}

bool parity_obstruction(std::int64_t window) { return parity_scan(window).empty; }

template <class Int>
bool zero_momentum(const MonomialKey& mono, std::span<const BasicSite<Int>> S) {
    if (mono.k.size() != S.size()) {
        throw PreconditionError("monomial k has length " + std::to_string(mono.k.size()) +
                                " but S has " + std::to_string(S.size()) + " sites");
    }
    Int p1 = 0, p2 = 0;
    for (std::size_t j = 0; j < S.size(); ++j) {
        const Int kj = static_cast<long>(mono.k[j]);
        p1 += kj * S[j].n1;
        p2 += kj * S[j].n2;
    }
    for (const auto& [n, a] : mono.alpha) {
        p1 += Int(static_cast<long>(a)) * Int(static_cast<long>(n.n1));
        p2 += Int(static_cast<long>(a)) * Int(static_cast<long>(n.n2));
    }
    for (const auto& [n, b] : mono.beta) {
        p1 -= Int(static_cast<long>(b)) * Int(static_cast<long>(n.n1));
        p2 -= Int(static_cast<long>(b)) * Int(static_cast<long>(n.n2));
    }
    return p1 == 0 && p2 == 0;
}

#define KAMBEAM_INSTANTIATE(Int)                                                                    \
    template bool rectangle_triple<Int>(const BasicSite<Int>&, const BasicSite<Int>&,               \
                                        const BasicSite<Int>&);                                     \
    template bool satisfies_resonance<Int>(const BasicResonanceEntry<Int>&);                        \
    template struct BasicTangentialSet<Int>;                                                        \
    template std::vector<ResonanceHit<Int>> type1_hits<Int>(std::span<const BasicSite<Int>>,        \
                                                            const Site&);                           \
    template std::vector<ResonanceHit<Int>> type2_hits<Int>(std::span<const BasicSite<Int>>,        \
                                                            const Site&);                           \
    template BasicTangentialSet<Int> classify_resonances<Int>(std::span<const BasicSite<Int>>,      \
                                                              std::int64_t);                        \
    template AdmissibilityReport<Int> verify_admissible<Int>(std::span<const BasicSite<Int>>,       \
                                                             std::int64_t);                         \
    template bool zero_momentum<Int>(const MonomialKey&, std::span<const BasicSite<Int>>);

KAMBEAM_INSTANTIATE(std::int64_t)
KAMBEAM_INSTANTIATE(mpz_class)

#undef KAMBEAM_INSTANTIATE

}  // namespace kambeam
