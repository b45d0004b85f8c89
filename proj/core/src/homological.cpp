#include "kambeam/homological.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "kambeam/sampling.hpp"

namespace kambeam {

namespace {

std::vector<int> unit(std::size_t b, int idx, int v = 1) {
    std::vector<int> k(b, 0);
    k[static_cast<std::size_t>(idx)] = v;
    return k;
}

bool k_is_zero(const MonomialKey& key) {
    return std::all_of(key.k.begin(), key.k.end(), [](int v) { return v == 0; });
}

// z_n zbar_n exactly.
bool is_action_like(const MonomialKey& key) {
    return key.alpha.size() == 1 && key.beta.size() == 1 && key.alpha[0].second == 1 &&
           key.beta[0].second == 1 && key.alpha[0].first == key.beta[0].first;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    std::size_t add() {
        parent.push_back(parent.size());
        return parent.size() - 1;
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MonomialKey coupling_key(const ResonanceEntry& e, std::size_t b, bool forward) {
    std::vector<int> k(b, 0);
    if (e.kind == ResonanceKind::Type1) {
        k[static_cast<std::size_t>(e.i_index)] += forward ? 1 : -1;
        k[static_cast<std::size_t>(e.j_index)] -= forward ? 1 : -1;
        if (forward) return make_key(k, std::vector<int>(b, 0), {{e.n, 1}}, {{e.m, 1}});
        return make_key(k, std::vector<int>(b, 0), {{e.m, 1}}, {{e.n, 1}});
    }
    k[static_cast<std::size_t>(e.i_index)] += forward ? -1 : 1;
    k[static_cast<std::size_t>(e.j_index)] += forward ? -1 : 1;
    if (forward) return make_key(k, std::vector<int>(b, 0), {{e.n, 1}, {e.m, 1}}, {});
    return make_key(k, std::vector<int>(b, 0), {}, {{e.n, 1}, {e.m, 1}});
}

NormalPart NormalPart::from(const NormalForm& nf, std::span<const Site> modes) {
    NormalPart out;
    out.S.assign(nf.sites().begin(), nf.sites().end());
    out.omega = nf.omega();
    std::set<Site> closed(modes.begin(), modes.end());
    std::vector<Site> todo(closed.begin(), closed.end());
    while (!todo.empty()) {
        const Site n = todo.back();
        todo.pop_back();
        if (std::find(out.S.begin(), out.S.end(), n) != out.S.end()) {
            throw SiteInS("normal mode list contains a tangential site");
        }
        if (const ResonanceEntry* e = nf.entry_for(n)) {
            const Site partner = e->n == n ? e->m : e->n;
            if (closed.insert(partner).second) todo.push_back(partner);
        }
    }
    for (const Site& n : closed) out.Omega[n] = nf.Omega(n);
    for (const auto& e : nf.tables().type1) {
        if (closed.count(e.n)) {
            const cplx a = nf.coupling(e);
            out.type1.push_back({e, a, std::conj(a)});
        }
    }
    for (const auto& e : nf.tables().type2) {
        if (closed.count(e.n)) {
            const cplx a = nf.coupling(e);
            out.type2.push_back({e, a, std::conj(a)});
        }
    }
    return out;
}

std::vector<Site> NormalPart::modes() const {
    std::vector<Site> out;
    out.reserve(Omega.size());
    for (const auto& kv : Omega) out.push_back(kv.first);
    return out;
}

Series NormalPart::to_series() const {
    const std::size_t nb = b();
    Series out(nb);
    const std::vector<int> zero(nb, 0);
    out.add(make_key(zero, zero, {}, {}), energy);
    for (std::size_t j = 0; j < nb; ++j) out.add(make_key(zero, unit(nb, static_cast<int>(j)), {}, {}), omega[j]);
    for (const auto& [n, w] : Omega) out.add(make_key(zero, zero, {{n, 1}}, {{n, 1}}), w);
    for (const auto* list : {&type1, &type2}) {
        for (const auto& p : *list) {
            out.add(coupling_key(p.entry, nb, true), p.fwd);
            out.add(coupling_key(p.entry, nb, false), p.bwd);
        }
    }
    return out;
}

bool NormalPart::is_hat_key(const MonomialKey& key) const {
    const bool k0 = k_is_zero(key);
    if (k0 && z_degree(key) == 0) return true;
    if (k0 && i_degree(key) == 0 && is_action_like(key)) return true;
    if (z_degree(key) != 2 || i_degree(key) != 0) return false;
    for (const auto* list : {&type1, &type2}) {
        for (const auto& p : *list) {
            if (key == coupling_key(p.entry, b(), true) || key == coupling_key(p.entry, b(), false)) return true;
        }
    }
    return false;
}

HomologicalResult solve_homological(const NormalPart& h0, const Series& R, double gamma, double tau, int K) {
    const std::size_t b = h0.b();
    for (const auto& [key, c] : R.terms()) {
        if (!in_restricted_class(key)) throw PreconditionError("R has a monomial outside the quadratic class");
        if (k_norm(key) > K) throw PreconditionError("R has |k| = " + std::to_string(k_norm(key)) + " > K");
        if (!zero_momentum<std::int64_t>(key, h0.S)) throw PreconditionError("R violates zero momentum");
        for (const auto* e : {&key.alpha, &key.beta}) {
            for (const auto& ex : *e) {
                if (!h0.Omega.count(ex.first)) throw PreconditionError("R is supported off the normal modes");
            }
        }
    }

    const Series H0 = h0.to_series();
    auto column = [&](const MonomialKey& key) {
        Series m(b);
        m.add(key, 1.0);
        return poisson_bracket(H0, m);
    };
    auto threshold = [&](int kn) { return gamma / std::pow(static_cast<double>(std::max(1, kn)), tau); };

    HomologicalResult out;
    out.F = Series(b);
    auto check = [&](double absdet, int kn, const std::string& where) {
        if (absdet == 0.0 && kn == 0) throw NonResonantLeftover(where + " is singular at k = 0");
        if (absdet == 0.0 || absdet < threshold(kn)) throw SmallDivisor(where, absdet, threshold(kn));
        if (gamma > 0.0) {
            out.margin = std::min(out.margin, absdet * std::pow(static_cast<double>(std::max(1, kn)), tau) / gamma);
        }
    };

    // Class 0: constants and I-linear terms, diagonal divisor -i<k, omega>.
    Series spill(b);
    for (const auto& [key, c] : R.terms()) {
        if (z_degree(key) != 0 || h0.is_hat_key(key)) continue;
        const Series col = column(key);
        const cplx d = col.coeff(key);
        check(std::abs(d), k_norm(key), "first Melnikov divisor");
        const cplx f = -c / d;
        out.F.add(key, f);
        ++out.block_sizes[1];
        for (const auto& [rk, rc] : col.terms()) {
            if (rk == key) continue;
            if (z_degree(rk) == 0) throw PreconditionError("class-0 column leaks into class 0");
            spill.add(rk, rc * f);
        }
    }

    // z-linear and z-quadratic classes: closure under the couplings, one dense system per component.
    Series rhs = R.filter([](const MonomialKey& k) { return z_degree(k) > 0; }) + spill;
    std::map<MonomialKey, std::size_t> index;
    std::vector<MonomialKey> keys;
    std::vector<Series> cols;
    UnionFind uf;
    auto intern = [&](const MonomialKey& key) {
        auto [it, inserted] = index.try_emplace(key, keys.size());
        if (inserted) {
            keys.push_back(key);
            uf.add();
        }
        return std::pair{it->second, inserted};
    };
    std::vector<std::size_t> queue;
    for (const auto& kv : rhs.terms()) {
        if (h0.is_hat_key(kv.first)) continue;
        auto [id, fresh] = intern(kv.first);
        if (fresh) queue.push_back(id);
    }
    cols.reserve(queue.size());
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::size_t u = queue[qi];
        Series col = column(keys[u]);
        for (const auto& kv : col.terms()) {
            if (h0.is_hat_key(kv.first)) continue;
            auto [id, fresh] = intern(kv.first);
            if (fresh) queue.push_back(id);
            uf.unite(u, id);
        }
        if (cols.size() <= u) cols.resize(u + 1);
        cols[u] = std::move(col);
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t u = 0; u < keys.size(); ++u) components[uf.find(u)].push_back(u);
    for (const auto& [root, members] : components) {
        const auto d = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXcd M(d, d);
        Eigen::VectorXcd r(d);
        int kn = std::numeric_limits<int>::max();
        for (Eigen::Index row = 0; row < d; ++row) {
            const MonomialKey& v = keys[members[static_cast<std::size_t>(row)]];
            r(row) = rhs.coeff(v);
            kn = std::min(kn, k_norm(v));
            for (Eigen::Index c = 0; c < d; ++c) M(row, c) = cols[members[static_cast<std::size_t>(c)]].coeff(v);
        }
        const Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
        check(std::abs(lu.determinant()), kn, std::to_string(d) + "x" + std::to_string(d) + " block");
        const Eigen::VectorXcd f = lu.solve(-r);
        for (Eigen::Index row = 0; row < d; ++row) out.F.add(keys[members[static_cast<std::size_t>(row)]], f(row));
        ++out.block_sizes[static_cast<int>(d)];
    }

    Series eq = poisson_bracket(H0, out.F) + R;
    out.hat = eq.filter([&](const MonomialKey& k) { return h0.is_hat_key(k); });
    out.residual = eq.filter([&](const MonomialKey& k) { return !h0.is_hat_key(k); }).l1();
    return out;
}

HatParts split_hat(const NormalPart& h0, const Series& hat) {
    const std::size_t b = h0.b();
    HatParts out{Series(b), Series(b), Series(b), Series(b)};
    for (const auto& [key, c] : hat.terms()) {
        if (k_is_zero(key)) {
            out.N.add(key, c);
        } else if (!key.alpha.empty() && !key.beta.empty()) {
            out.A.add(key, c);
        } else if (!key.alpha.empty()) {
            out.B.add(key, c);
        } else {
            out.Bbar.add(key, c);
        }
    }
    return out;
}

NormalPart apply_hat(const NormalPart& h0, const Series& hat) {
    NormalPart out = h0;
    const std::size_t b = h0.b();
    for (const auto& [key, c] : hat.terms()) {
        if (k_is_zero(key) && z_degree(key) == 0) {
            if (i_degree(key) == 0) {
                out.energy += c.real();
            } else {
                const auto j = static_cast<std::size_t>(
                    std::find(key.l.begin(), key.l.end(), 1) - key.l.begin());
                out.omega[j] += c.real();
            }
            continue;
        }
        if (k_is_zero(key) && is_action_like(key)) {
            out.Omega[key.alpha[0].first] += c.real();
            continue;
        }
        bool placed = false;
        for (auto* list : {&out.type1, &out.type2}) {
            for (auto& p : *list) {
                if (key == coupling_key(p.entry, b, true)) {
                    p.fwd += c;
                    placed = true;
                } else if (key == coupling_key(p.entry, b, false)) {
                    p.bwd += c;
                    placed = true;
                }
            }
        }
        if (!placed) throw PreconditionError("hat monomial has no normal-form slot");
    }
    return out;
}

KamResult kam_step(const KamState& state, const KamParams& params) {
    params.norm.validate();
    const std::size_t b = state.h0.b();
    KamResult out;
    if (state.P.empty()) {
        out.next = state;
        out.F = Series(b);
        out.hat = Series(b);
        out.stats.margin = std::numeric_limits<double>::infinity();
        return out;
    }

    const Series R = quadratic_truncate(state.P);
    HomologicalResult sol = solve_homological(state.h0, R, params.gamma, params.tau, params.K);

    // H o X^1_F = sum_k ad_F^k H / k!, ad_F G = {G, F}.
    const Series H = state.h0.to_series() + state.P;
    const double scale = H.l1();
    Series sum = H;
    Series term = H;
    int used = 0;
    bool converged = false;
    for (int n = 1; n <= params.lie_max_terms; ++n) {
        term = poisson_bracket(term, sol.F);
        term *= cplx(1.0 / n, 0.0);
        sum += term;
        used = n;
        if (term.l1() <= params.lie_tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) throw DivergentLieSeries("no decay after " + std::to_string(params.lie_max_terms) + " terms");

    out.next.h0 = apply_hat(state.h0, sol.hat);
    out.next.P = sum - out.next.h0.to_series();
    out.F = std::move(sol.F);
    out.hat = std::move(sol.hat);

    KamStats& st = out.stats;
    st.eps = vector_field_norm(state.P, params.norm);
    st.s_plus = 0.25 * params.norm.s * std::cbrt(st.eps);
    NormConfig plus = params.norm;
    plus.r = params.r_plus;
    plus.s = st.s_plus;
    st.eps_plus = vector_field_norm(out.next.P, plus);
    st.ratio = st.eps_plus / std::pow(st.eps, 4.0 / 3.0);
    st.margin = sol.margin;
    st.homological_residual = sol.residual;
    st.lie_terms = used;
    st.f_terms = out.F.size();
    st.p_plus_terms = out.next.P.size();
    return out;
}

Series random_perturbation(std::span<const Site> S, std::span<const Site> modes, const PerturbationConfig& cfg) {
    const std::size_t b = S.size();
    const std::set<Site> mode_set(modes.begin(), modes.end());
    const std::vector<Site> mlist(mode_set.begin(), mode_set.end());
    const std::vector<int> zero(b, 0);

    // All k with |k|_1 <= K, in lexicographic order.
    std::vector<std::vector<int>> ks;
    std::vector<int> k(b, 0);
    auto enumerate = [&](auto&& self, std::size_t pos, int budget) -> void {
        if (pos == b) {
            ks.push_back(k);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            k[pos] = v;
            self(self, pos + 1, budget - std::abs(v));
        }
        k[pos] = 0;
    };
    enumerate(enumerate, 0, cfg.K);

    std::set<MonomialKey> keys;
    auto has = [&](const Site& n) { return mode_set.count(n) > 0; };
    for (const auto& kv : ks) {
        Site p{0, 0};
        for (std::size_t j = 0; j < b; ++j) p = p + Site{kv[j] * S[j].n1, kv[j] * S[j].n2};
        int kn = 0;
        for (int v : kv) kn += std::abs(v);
        if (p == Site{0, 0}) {
            keys.insert(make_key(kv, zero, {}, {}));
            for (std::size_t j = 0; j < b; ++j) {
                keys.insert(make_key(kv, unit(b, static_cast<int>(j)), {}, {}));
                if (cfg.include_action_square) {
                    for (std::size_t t = j; t < b; ++t) {
                        auto l = unit(b, static_cast<int>(j));
                        ++l[t];
                        keys.insert(make_key(kv, l, {}, {}));
                    }
                }
            }
        }
        if (has(-p)) keys.insert(make_key(kv, zero, {{-p, 1}}, {}));
        if (has(p)) keys.insert(make_key(kv, zero, {}, {{p, 1}}));
        for (const Site& n : mlist) {
            if (const Site m = -p - n; has(m) && !(m < n)) keys.insert(make_key(kv, zero, {{n, 1}, {m, 1}}, {}));
            if (const Site m = n + p; has(m)) keys.insert(make_key(kv, zero, {{n, 1}}, {{m, 1}}));
            if (const Site m = p - n; has(m) && !(m < n)) keys.insert(make_key(kv, zero, {}, {{n, 1}, {m, 1}}));
        }
        if (cfg.include_cubic && kn <= cfg.cubic_k_max) {
            for (std::size_t a = 0; a < mlist.size(); ++a) {
                for (std::size_t c = a; c < mlist.size(); ++c) {
                    const Site& n = mlist[a];
                    const Site& m = mlist[c];
                    if (const Site l = n + m + p; has(l)) keys.insert(make_key(kv, zero, {{n, 1}, {m, 1}}, {{l, 1}}));
                    if (const Site l = n + m - p; has(l)) keys.insert(make_key(kv, zero, {{l, 1}}, {{n, 1}, {m, 1}}));
                }
            }
        }
    }

    Rng rng(cfg.seed);
    Series out(b);
    for (const MonomialKey& key : keys) {
        const MonomialKey ck = conjugate_key(key);
        if (ck < key) continue;
        if (ck == key) {
            out.add(key, cfg.scale * rng.uniform(-1.0, 1.0));
            continue;
        }
        const double re = rng.uniform(-1.0, 1.0);
        const double im = rng.uniform(-1.0, 1.0);
        const cplx c = cfg.scale * cplx(re, im);
        out.add(key, c);
        out.add(ck, std::conj(c));
    }
    return out;
}

}  // namespace kambeam
