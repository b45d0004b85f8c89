#include "kambeam/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace kambeam {

namespace {

// Sorted merge of two exponent lists, dropping zeros.
Exponents merge(const Exponents& a, const Exponents& b) {
    Exponents out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            out.push_back(*ia++);
        } else if (ia == a.end() || ib->first < ia->first) {
            out.push_back(*ib++);
        } else {
            out.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        }
    }
    return out;
}

void decrement(Exponents& e, const Site& n) {
    auto it = std::lower_bound(e.begin(), e.end(), n,
                               [](const std::pair<Site, int>& p, const Site& s) { return p.first < s; });
    if (--it->second == 0) e.erase(it);
}

double site_norm(const Site& n) { return std::sqrt(static_cast<double>(lambda(n))); }

}  // namespace

void NormConfig::validate() const {
    if (!(a > 0.0)) throw DomainError("norm exponent a must be positive");
    if (!(abar > a)) throw DomainError("abar must exceed a");
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    if (!(r > 0.0)) throw DomainError("r must be positive");
    if (!(s > 0.0)) throw DomainError("s must be positive");
}

MonomialKey make_key(std::vector<int> k, std::vector<int> l, Exponents alpha, Exponents beta) {
    auto normalize = [](Exponents& e) {
        std::sort(e.begin(), e.end());
        Exponents out;
        for (const auto& [site, p] : e) {
            if (p < 0) throw PreconditionError("negative z exponent");
            if (p == 0) continue;
            if (!out.empty() && out.back().first == site) {
                out.back().second += p;
            } else {
                out.emplace_back(site, p);
            }
        }
        e = std::move(out);
    };
    normalize(alpha);
    normalize(beta);
    return MonomialKey{std::move(k), std::move(l), std::move(alpha), std::move(beta)};
}

int k_norm(const MonomialKey& key) {
    int s = 0;
    for (int v : key.k) s += std::abs(v);
    return s;
}

int i_degree(const MonomialKey& key) {
    int s = 0;
    for (int v : key.l) s += v;
    return s;
}

int z_degree(const MonomialKey& key) {
    int s = 0;
    for (const auto& e : key.alpha) s += e.second;
    for (const auto& e : key.beta) s += e.second;
    return s;
}

int power_of(const Exponents& e, const Site& n) {
    for (const auto& [site, p] : e) {
        if (site == n) return p;
    }
    return 0;
}

bool in_restricted_class(const MonomialKey& key) {
    const int zd = z_degree(key);
    const int id = i_degree(key);
    if (zd == 0) return id <= 1;
    return id == 0 && zd <= 2;
}

void Series::add(const MonomialKey& key, cplx c) {
    if (c == cplx{}) return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cplx{}) terms_.erase(it);
    }
}

void Series::set(const MonomialKey& key, cplx c) {
    if (c == cplx{}) {
        terms_.erase(key);
    } else {
        terms_[key] = c;
    }
}

cplx Series::coeff(const MonomialKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? cplx{} : it->second;
}

Series& Series::operator+=(const Series& o) {
    if (b_ == 0) b_ = o.b_;
    for (const auto& [key, c] : o.terms_) add(key, c);
    return *this;
}

Series& Series::operator-=(const Series& o) {
    if (b_ == 0) b_ = o.b_;
    for (const auto& [key, c] : o.terms_) add(key, -c);
    return *this;
}

Series& Series::operator*=(cplx c) {
    if (c == cplx{}) {
        terms_.clear();
        return *this;
    }
    for (auto& kv : terms_) kv.second *= c;
    return *this;
}

double Series::l1() const {
    double s = 0.0;
    for (const auto& kv : terms_) s += std::abs(kv.second);
    return s;
}

double Series::max_abs() const {
    double m = 0.0;
    for (const auto& kv : terms_) m = std::max(m, std::abs(kv.second));
    return m;
}

void Series::prune(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

Series poisson_bracket(const Series& F, const Series& G) {
    const std::size_t b = std::max(F.b(), G.b());
    Series out(b);
    const cplx I(0.0, 1.0);
    for (const auto& [kf, cf] : F.terms()) {
        for (const auto& [kg, cg] : G.terms()) {
            const cplx c = cf * cg;
            // theta / I part: d_theta_j gives i k_j, d_I_j removes one I_j.
            for (std::size_t j = 0; j < b; ++j) {
                const int kfj = j < kf.k.size() ? kf.k[j] : 0;
                const int kgj = j < kg.k.size() ? kg.k[j] : 0;
                const int lfj = j < kf.l.size() ? kf.l[j] : 0;
                const int lgj = j < kg.l.size() ? kg.l[j] : 0;
                const int w = kfj * lgj - lfj * kgj;
                if (w == 0) continue;
                MonomialKey key;
                key.k.resize(b);
                key.l.resize(b);
                for (std::size_t t = 0; t < b; ++t) {
                    key.k[t] = (t < kf.k.size() ? kf.k[t] : 0) + (t < kg.k.size() ? kg.k[t] : 0);
                    key.l[t] = (t < kf.l.size() ? kf.l[t] : 0) + (t < kg.l.size() ? kg.l[t] : 0);
                }
                key.l[j] -= 1;
                key.alpha = merge(kf.alpha, kg.alpha);
                key.beta = merge(kf.beta, kg.beta);
                out.add(key, I * static_cast<double>(w) * c);
            }
            // z part: i (alpha_f(n) beta_g(n) - beta_f(n) alpha_g(n)) prod / (z_n zbar_n).
            auto z_terms = [&](const Exponents& a1, const Exponents& b2, double sign) {
                for (const auto& [n, p] : a1) {
                    const int q = power_of(b2, n);
                    if (q == 0) continue;
                    MonomialKey key;
                    key.k.resize(b);
                    key.l.resize(b);
                    for (std::size_t t = 0; t < b; ++t) {
                        key.k[t] = (t < kf.k.size() ? kf.k[t] : 0) + (t < kg.k.size() ? kg.k[t] : 0);
                        key.l[t] = (t < kf.l.size() ? kf.l[t] : 0) + (t < kg.l.size() ? kg.l[t] : 0);
                    }
                    key.alpha = merge(kf.alpha, kg.alpha);
                    key.beta = merge(kf.beta, kg.beta);
                    decrement(key.alpha, n);
                    decrement(key.beta, n);
                    out.add(key, sign * I * static_cast<double>(p * q) * c);
                }
            };
            z_terms(kf.alpha, kg.beta, 1.0);
            z_terms(kf.beta, kg.alpha, -1.0);
        }
    }
    return out;
}

MonomialKey conjugate_key(const MonomialKey& key) {
    MonomialKey out{key.k, key.l, key.beta, key.alpha};
    for (int& v : out.k) v = -v;
    return out;
}

Series conjugate(const Series& F) {
    Series out(F.b());
    for (const auto& [key, c] : F.terms()) out.add(conjugate_key(key), std::conj(c));
    return out;
}

double reality_defect(const Series& F) {
    double worst = 0.0;
    for (const auto& [key, c] : F.terms()) {
        worst = std::max(worst, std::abs(c - std::conj(F.coeff(conjugate_key(key)))));
    }
    return worst;
}

Series quadratic_truncate(const Series& P) {
    return P.filter([](const MonomialKey& key) { return in_restricted_class(key); });
}

bool momentum_closed(const Series& F, std::span<const Site> S) {
    for (const auto& kv : F.terms()) {
        if (!zero_momentum<std::int64_t>(kv.first, S)) return false;
    }
    return true;
}

double weighted_norm(const std::map<Site, cplx>& seq, const NormConfig& cfg) {
    double acc = 0.0;
    for (const auto& [n, z] : seq) {
        const double nn = site_norm(n);
        acc += std::abs(z) * std::pow(nn, cfg.a) * std::exp(cfg.rho * nn);
    }
    return acc;
}

double vector_field_norm(const Series& F, const NormConfig& cfg) {
    cfg.validate();
    const double s = cfg.s;
    double total = 0.0;
    for (const auto& [key, c] : F.terms()) {
        const double ac = std::abs(c);
        const int kn = k_norm(key);
        double mag = ac * std::exp(kn * cfg.r) * std::pow(s, 2 * i_degree(key));
        for (const auto* e : {&key.alpha, &key.beta}) {
            for (const auto& [n, p] : *e) {
                const double nn = site_norm(n);
                mag *= std::pow(s / (std::pow(nn, cfg.a) * std::exp(cfg.rho * nn)), p);
            }
        }
        for (int lj : key.l) total += lj * mag / (s * s);
        total += kn * mag / (s * s);
        for (const auto* e : {&key.alpha, &key.beta}) {
            for (const auto& [n, p] : *e) {
                const double nn = site_norm(n);
                const double zmax = s / (std::pow(nn, cfg.a) * std::exp(cfg.rho * nn));
                total += p * mag / zmax / s * std::pow(nn, cfg.abar) * std::exp(cfg.rho * nn);
            }
        }
    }
    return total;
}

nlohmann::json to_json(const Series& F) {
    auto exps = [](const Exponents& e) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [n, p] : e) arr.push_back({n.n1, n.n2, p});
        return arr;
    };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [key, c] : F.terms()) {
        out.push_back({{"k", key.k},
                       {"l", key.l},
                       {"alpha", exps(key.alpha)},
                       {"beta", exps(key.beta)},
                       {"re", c.real()},
                       {"im", c.imag()}});
    }
    return out;
}

Series series_from_json(const nlohmann::json& j, std::size_t b) {
    auto exps = [](const nlohmann::json& arr) {
        Exponents e;
        for (const auto& t : arr) e.emplace_back(Site{t.at(0).get<std::int64_t>(), t.at(1).get<std::int64_t>()},
                                                 t.at(2).get<int>());
        return e;
    };
    Series out(b);
    for (const auto& t : j) {
        out.add(make_key(t.at("k").get<std::vector<int>>(), t.at("l").get<std::vector<int>>(), exps(t.at("alpha")),
                         exps(t.at("beta"))),
                {t.at("re").get<double>(), t.at("im").get<double>()});
    }
    return out;
}

}  // namespace kambeam
