#include "kambeam/divisors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <sstream>

namespace kambeam {

int l1_norm(std::span<const int> k) {
    int s = 0;
    for (int v : k) s += std::abs(v);
    return s;
}

double check_first_melnikov(std::span<const int> k, std::span<const double> omega, double gamma, double tau) {
    if (k.size() != omega.size()) throw PreconditionError("k and omega differ in length");
    const int kn = l1_norm(k);
    if (kn == 0) throw ZeroK("first Melnikov condition needs k != 0");
    double dot = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) dot += k[j] * omega[j];
    return std::abs(dot) - gamma / std::pow(static_cast<double>(kn), tau);
}

double second_melnikov_det(const DivisorQuery& q, double kOmega) {
    const Eigen::MatrixXcd& A = q.blockA;
    if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > 2) throw PreconditionError("block A must be 1x1 or 2x2");
    if (!q.blockB) {
        Eigen::MatrixXcd M = A;
        M.diagonal().array() += kOmega;
        return std::abs(M.determinant());
    }
    const Eigen::MatrixXcd& B = *q.blockB;
    if (B.rows() != B.cols() || B.rows() < 1 || B.rows() > 2) throw PreconditionError("block B must be 1x1 or 2x2");
    const double sgn = q.sign == Sign::Plus ? 1.0 : -1.0;
    if (A.rows() == 2 && B.rows() == 2) {
        const Mat2<cplx> a{A(0, 0), A(0, 1), A(1, 0), A(1, 1)};
        const Mat2<cplx> b{B(0, 0), B(0, 1), B(1, 0), B(1, 1)};
        return std::abs(kron_shift_det(a, b, q.sign, cplx(kOmega, 0.0)));
    }
    // Mixed or scalar sizes: assemble the Kronecker sum directly.
    const Eigen::Index na = A.rows();
    const Eigen::Index nb = B.rows();
    const Eigen::MatrixXcd Ia = Eigen::MatrixXcd::Identity(na, na);
    const Eigen::MatrixXcd Ib = Eigen::MatrixXcd::Identity(nb, nb);
    Eigen::MatrixXcd M(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            M.block(i * nb, j * nb, nb, nb) = A(i, j) * Ib + sgn * Ia(i, j) * B;
        }
    }
    M.diagonal().array() += kOmega;
    return std::abs(M.determinant());
}

double check_second_melnikov(const DivisorQuery& q, double kOmega) {
    const int kn = std::max(1, l1_norm(q.k));
    return second_melnikov_det(q, kOmega) - q.gamma / std::pow(static_cast<double>(kn), q.tau);
}

std::string Schedule::to_csv() const {
    std::ostringstream os;
    os << "nu,r,s,eps,gamma,K\n";
    char buf[256];
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, r[i], s[i], eps[i], gamma[i], K[i]);
        os << buf;
    }
    return os.str();
}

Schedule make_schedule(double r, double s0, double eps0, double gamma0, double tau, double c, int nu_max) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("eps0 must lie in (0, 1)");
    if (!(gamma0 > 0.0 && gamma0 < 1.0 + 1e-15)) throw DomainError("gamma0 must lie in (0, 1]");
    if (!(c > 0.0)) throw DomainError("c must be positive");
    if (nu_max < 0) throw DomainError("nu_max must be non-negative");
    Schedule out;
    out.c = c;
    out.tau = tau;
    // partial(nu) = sum_{i=2}^{nu+2} 2^-i = 1/2 - 2^-(nu+2)
    auto partial = [](int nu) { return 0.5 - std::ldexp(1.0, -(nu + 2)); };
    const auto n = static_cast<std::size_t>(nu_max) + 1;
    out.r.resize(n);
    out.gamma.resize(n);
    out.eps.resize(n);
    out.eta.resize(n);
    out.s.resize(n);
    out.K.resize(n);
    for (std::size_t nu = 0; nu < n; ++nu) {
        out.r[nu] = r * (1.0 - partial(static_cast<int>(nu)));
        out.gamma[nu] = gamma0 * (1.0 - partial(static_cast<int>(nu)));
    }
    out.eps[0] = eps0;
    out.s[0] = s0;
    out.eta[0] = std::cbrt(eps0);
    for (std::size_t nu = 1; nu < n; ++nu) {
        out.eps[nu] = c * std::pow(gamma0, -16.0) * std::pow(out.r[nu - 1] - out.r[nu], -c) *
                      std::pow(out.eps[nu - 1], 4.0 / 3.0);
        out.eta[nu] = std::cbrt(out.eps[nu]);
        out.s[nu] = 0.25 * out.eta[nu - 1] * out.s[nu - 1];
    }
    out.K[0] = 1.0;
    for (std::size_t nu = 1; nu < n; ++nu) {
        const double gnext = gamma0 * (1.0 - partial(static_cast<int>(nu) + 1));
        out.K[nu] = c * std::pow((out.gamma[nu] - gnext) / out.eps[nu], 1.0 / (tau + 1.0));
    }
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (dn * sxy - sx * sy) / den;
}

namespace {

// Momentum carried by one factor of a divisor: a scalar site a carries a, the
// first row of a pair block carries n + i (Type1) or n - i (Type2).
struct Unit {
    Site q;
};

struct ScalarPair {
    std::size_t a, b;  // level indices
    int sign;
};

enum class MixedOrder { Plus, ScalarMinusBlock, BlockMinusScalar };

struct Mixed {
    std::size_t level;
    std::size_t block;
    MixedOrder order;
};

struct BlockPair {
    std::size_t a, b;
    Sign sign;
};

// Conditions for one k, fixed by momentum and independent of xi.
struct KConditions {
    std::vector<int> k;
    int norm = 0;
    std::vector<std::size_t> scalar;  // R_kn, level indices
    std::vector<std::size_t> block;   // R_kn, block indices
    std::vector<ScalarPair> scalar_pairs;
    std::vector<Mixed> mixed;
    std::vector<BlockPair> block_pairs;
};

}  // namespace

MeasureReport estimate_excluded_measure(const MeasureConfig& cfg) {
    cfg.box.validate();
    if (cfg.box.dim() != cfg.S.size()) throw PreconditionError("box dimension differs from |S|");
    if (cfg.samples < 1) throw PreconditionError("samples must be >= 1");
    if (!(cfg.eps > 0.0)) throw DomainError("eps must be positive");

    MeasureReport rep;
    rep.box = cfg.box;
    rep.samples = cfg.samples;
    rep.gamma = cfg.gamma;
    rep.tau = cfg.tau;
    rep.K = cfg.K;
    rep.window = cfg.window;
    rep.seed = cfg.seed;

    const std::size_t b = cfg.S.size();
    const TangentialSet tables = classify_resonances<std::int64_t>(cfg.S, cfg.window);
    std::vector<ResonanceEntry> entries = tables.type1;
    entries.insert(entries.end(), tables.type2.begin(), tables.type2.end());
    std::set<Site> resonant;
    for (const auto& e : entries) {
        resonant.insert(e.n);
        resonant.insert(e.m);
    }

    // Unresonant normal sites, grouped into lambda levels (Omega depends on lambda only).
    std::map<Site, std::size_t> site_level;
    std::map<std::int64_t, std::size_t> level_of_lambda;
    std::vector<double> level_lambda;
    for (const Site& n : window_sites(cfg.window)) {
        if (tables.contains(n) || resonant.count(n)) continue;
        const std::int64_t l = lambda(n);
        auto [it, fresh] = level_of_lambda.try_emplace(l, level_lambda.size());
        if (fresh) level_lambda.push_back(static_cast<double>(l));
        site_level[n] = it->second;
    }
    rep.resonant_pairs = entries.size();
    rep.scalar_levels = level_lambda.size();

    std::vector<Site> block_q(entries.size());
    std::multimap<Site, std::size_t> blocks_by_q;
    for (std::size_t p = 0; p < entries.size(); ++p) {
        const auto& e = entries[p];
        block_q[p] = e.kind == ResonanceKind::Type1 ? e.n + e.i : e.n - e.i;
        blocks_by_q.emplace(block_q[p], p);
    }
    auto level_at = [&](const Site& a) -> std::optional<std::size_t> {
        auto it = site_level.find(a);
        if (it == site_level.end()) return std::nullopt;
        return it->second;
    };

    std::vector<KConditions> conds;
    {
        std::vector<int> k(b, 0);
        auto rec = [&](auto&& self, std::size_t pos, int budget) -> void {
            if (pos == b) {
                if (l1_norm(k) > 0) conds.push_back({k, l1_norm(k), {}, {}, {}, {}, {}});
                return;
            }
            for (int v = -budget; v <= budget; ++v) {
                k[pos] = v;
                self(self, pos + 1, budget - std::abs(v));
            }
            k[pos] = 0;
        };
        rec(rec, 0, cfg.K);
    }
    for (auto& c : conds) {
        Site p{0, 0};
        for (std::size_t j = 0; j < b; ++j) p = p + Site{c.k[j] * cfg.S[j].n1, c.k[j] * cfg.S[j].n2};
        // R_kn: q = -p.
        if (auto l = level_at(-p)) c.scalar.push_back(*l);
        for (auto [it, end] = blocks_by_q.equal_range(-p); it != end; ++it) c.block.push_back(it->second);
        // R_knm, scalar x scalar: a + b = -p and a - b = -p, deduplicated by level.
        std::set<std::tuple<std::size_t, std::size_t, int>> pairs;
        for (const auto& [a, la] : site_level) {
            if (auto lb = level_at(-p - a)) pairs.emplace(std::min(la, *lb), std::max(la, *lb), 1);
            if (auto lb = level_at(a + p)) pairs.emplace(la, *lb, -1);
        }
        for (const auto& [x, y, s] : pairs) c.scalar_pairs.push_back({x, y, s});
        // scalar x block.
        std::set<std::tuple<std::size_t, std::size_t, int>> mixed;
        for (std::size_t q = 0; q < entries.size(); ++q) {
            if (auto l = level_at(-p - block_q[q])) mixed.emplace(*l, q, 0);
            if (auto l = level_at(block_q[q] - p)) mixed.emplace(*l, q, 1);  // a - q_B = -p
            if (auto l = level_at(p + block_q[q])) mixed.emplace(*l, q, 2);     // q_B - a = -p
        }
        for (const auto& [l, q, o] : mixed) {
            c.mixed.push_back({l, q, o == 0 ? MixedOrder::Plus : o == 1 ? MixedOrder::ScalarMinusBlock : MixedOrder::BlockMinusScalar});
        }
        // block x block.
        for (std::size_t qa = 0; qa < entries.size(); ++qa) {
            for (auto [it, end] = blocks_by_q.equal_range(-p - block_q[qa]); it != end; ++it) {
                if (it->second >= qa) c.block_pairs.push_back({qa, it->second, Sign::Plus});
            }
            for (auto [it, end] = blocks_by_q.equal_range(block_q[qa] + p); it != end; ++it) {
                c.block_pairs.push_back({qa, it->second, Sign::Minus});
            }
        }
    }

    std::vector<double> lambdaS(b);
    for (std::size_t j = 0; j < b; ++j) lambdaS[j] = static_cast<double>(lambda(cfg.S[j]));
    const double epow = std::pow(cfg.eps, -4.0);

    Rng rng(cfg.seed);
    const auto points = stratified_samples(cfg.box, cfg.samples, rng);
    std::vector<std::size_t> per_k_count(static_cast<std::size_t>(cfg.K) + 1, 0);
    std::vector<double> Om(level_lambda.size());
    std::vector<Mat2<cplx>> blocks(entries.size());

    for (const auto& xi : points) {
        const std::vector<double> omega = tangential_freqs(cfg.S, xi, cfg.eps);
        double C = 0.0;
        for (std::size_t j = 0; j < b; ++j) C += xi[j] / lambdaS[j];
        C *= 4.0;
        for (std::size_t i = 0; i < Om.size(); ++i) Om[i] = epow * level_lambda[i] + C / level_lambda[i];

        const NormalForm nf(tables, xi, cfg.eps);
        bool k0_flag = false;
        for (std::size_t p = 0; p < entries.size(); ++p) {
            const Eigen::MatrixXcd A = nf.block(entries[p].n);
            blocks[p] = {A(0, 0), A(0, 1), A(1, 0), A(1, 1)};
            // k = 0 block conditions: flagged only.
            if (std::abs(blocks[p].det()) < cfg.gamma) k0_flag = true;
        }
        if (k0_flag) ++rep.k0_block_flags;

        std::array<bool, 3> fam{false, false, false};
        std::vector<bool> at_k(static_cast<std::size_t>(cfg.K) + 1, false);
        for (const auto& c : conds) {
            const auto ku = static_cast<std::size_t>(c.norm);
            double x = 0.0;
            for (std::size_t j = 0; j < b; ++j) x += c.k[j] * omega[j];
            const double thr = cfg.gamma / std::pow(static_cast<double>(c.norm), cfg.tau);
            auto need = [&](int f) { return !fam[static_cast<std::size_t>(f)] || !at_k[ku]; };
            auto mark = [&](int f) {
                fam[static_cast<std::size_t>(f)] = true;
                at_k[ku] = true;
            };
            auto shifted_det = [&](const Mat2<cplx>& B, double s, double shift) {
                const Mat2<cplx> M{shift + s * B.a11, s * B.a12, s * B.a21, shift + s * B.a22};
                return std::abs(M.det());
            };

            if (need(0) && std::abs(x) < thr) mark(0);

            if (need(1)) {
                bool hit = false;
                for (std::size_t l : c.scalar) hit = hit || std::abs(x + Om[l]) < thr;
                for (std::size_t p : c.block) hit = hit || shifted_det(blocks[p], 1.0, x) < thr;
                if (hit) mark(1);
            }

            if (need(2)) {
                bool hit = false;
                for (std::size_t i = 0; !hit && i < c.scalar_pairs.size(); ++i) {
                    const auto& sp = c.scalar_pairs[i];
                    hit = std::abs(x + Om[sp.a] + sp.sign * Om[sp.b]) < thr;
                }
                for (std::size_t i = 0; !hit && i < c.mixed.size(); ++i) {
                    const auto& m = c.mixed[i];
                    const Mat2<cplx>& B = blocks[m.block];
                    switch (m.order) {
                        case MixedOrder::Plus: hit = shifted_det(B, 1.0, x + Om[m.level]) < thr; break;
                        case MixedOrder::ScalarMinusBlock: hit = shifted_det(B, -1.0, x + Om[m.level]) < thr; break;
                        case MixedOrder::BlockMinusScalar: hit = shifted_det(B, 1.0, x - Om[m.level]) < thr; break;
                    }
                }
                for (std::size_t i = 0; !hit && i < c.block_pairs.size(); ++i) {
                    const auto& bp = c.block_pairs[i];
                    hit = std::abs(kron_shift_det(blocks[bp.a], blocks[bp.b], bp.sign, cplx(x, 0.0))) < thr;
                }
                if (hit) mark(2);
            }
        }
        if (fam[0]) ++rep.per_family.R_k;
        if (fam[1]) ++rep.per_family.R_kn;
        if (fam[2]) ++rep.per_family.R_knm;
        if (fam[0] || fam[1] || fam[2]) ++rep.excluded;
        for (std::size_t kk = 1; kk < at_k.size(); ++kk) {
            if (at_k[kk]) ++per_k_count[kk];
        }
    }

    const double n = static_cast<double>(cfg.samples);
    rep.excluded_fraction = static_cast<double>(rep.excluded) / n;
    std::vector<double> xs, ys;
    for (std::size_t kk = 1; kk < per_k_count.size(); ++kk) {
        const double f = static_cast<double>(per_k_count[kk]) / n;
        rep.per_k[static_cast<int>(kk)] = f;
        if (f > 0.0) {
            xs.push_back(static_cast<double>(kk));
            ys.push_back(f);
        }
    }
    rep.per_k_slope = loglog_slope(xs, ys);
    return rep;
}

}  // namespace kambeam
