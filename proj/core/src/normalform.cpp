#include "kambeam/normalform.hpp"

#include <algorithm>
#include <cmath>

namespace kambeam {

namespace {

void check_sizes(std::span<const Site> S, std::span<const double> xi) {
    if (S.size() != xi.size()) {
        throw PreconditionError("xi has " + std::to_string(xi.size()) + " entries for " +
                                std::to_string(S.size()) + " tangential sites");
    }
}

bool is_tangential(const Site& n, std::span<const Site> S) {
    return std::find(S.begin(), S.end(), n) != S.end();
}

double lam(const Site& s) { return static_cast<double>(lambda(s)); }

}  // namespace

std::vector<double> tangential_shift(std::span<const Site> S, std::span<const double> xi) {
    check_sizes(S, xi);
    std::vector<double> out(S.size(), 0.0);
    for (std::size_t i = 0; i < S.size(); ++i) {
        const double li = lam(S[i]);
        double acc = 2.0 * xi[i] / (li * li);
        for (std::size_t j = 0; j < S.size(); ++j) {
            if (j != i) acc += 4.0 * xi[j] / (li * lam(S[j]));
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> tangential_freqs(std::span<const Site> S, std::span<const double> xi, double eps) {
    auto out = tangential_shift(S, xi);
    const double scale = std::pow(eps, -4.0);
    for (std::size_t i = 0; i < S.size(); ++i) out[i] += scale * lam(S[i]);
    return out;
}

double normal_shift(const Site& n, std::span<const Site> S, std::span<const double> xi) {
    check_sizes(S, xi);
    if (is_tangential(n, S)) throw SiteInS("normal frequency requested for a tangential site");
    const double ln = lam(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < S.size(); ++j) acc += xi[j] / lam(S[j]);
    return 4.0 * acc / ln;
}

double normal_freq(const Site& n, std::span<const Site> S, std::span<const double> xi, double eps) {
    return std::pow(eps, -4.0) * lam(n) + normal_shift(n, S, xi);
}

double coupling(const ResonanceEntry& e, std::span<const double> xi) {
    const double xi_i = xi[static_cast<std::size_t>(e.i_index)];
    const double xi_j = xi[static_cast<std::size_t>(e.j_index)];
    if (xi_i < 0.0 || xi_j < 0.0) throw DomainError("couplings need xi >= 0");
    return 4.0 * std::sqrt(xi_i * xi_j) / std::sqrt(lam(e.i) * lam(e.j) * lam(e.n) * lam(e.m));
}

Eigen::MatrixXd frequency_jacobian(std::span<const Site> S) {
    const auto b = static_cast<Eigen::Index>(S.size());
    Eigen::MatrixXd J(b, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        for (Eigen::Index j = 0; j < b; ++j) {
            const double li = lam(S[static_cast<std::size_t>(i)]);
            const double lj = lam(S[static_cast<std::size_t>(j)]);
            J(i, j) = i == j ? 2.0 / (li * li) : 4.0 / (li * lj);
        }
    }
    return J;
}

NormalForm::NormalForm(TangentialSet tables, std::vector<double> xi, double eps)
    : tables_(std::move(tables)), xi_(std::move(xi)), eps_(eps), eps_pow_(std::pow(eps, -4.0)) {
    if (!(eps_ > 0.0)) throw DomainError("eps must be positive");
    for (double x : xi_) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("xi must be finite and >= 0");
    }
    omega_shift_ = tangential_shift(tables_.sites, xi_);
    omega_ = tangential_freqs(tables_.sites, xi_, eps_);
    for (std::size_t t = 0; t < tables_.type1.size(); ++t) {
        type1_index_[tables_.type1[t].n] = t;
        type1_index_[tables_.type1[t].m] = t;
    }
    for (std::size_t t = 0; t < tables_.type2.size(); ++t) {
        type2_index_[tables_.type2[t].n] = t;
        type2_index_[tables_.type2[t].m] = t;
    }
}

double NormalForm::Omega(const Site& n) const { return normal_freq(n, tables_.sites, xi_, eps_); }

double NormalForm::Omega_shift(const Site& n) const { return normal_shift(n, tables_.sites, xi_); }

const ResonanceEntry* NormalForm::entry_for(const Site& n) const {
    if (auto it = type1_index_.find(n); it != type1_index_.end()) return &tables_.type1[it->second];
    if (auto it = type2_index_.find(n); it != type2_index_.end()) return &tables_.type2[it->second];
    return nullptr;
}

cplx NormalForm::coupling(const ResonanceEntry& e) const { return {kambeam::coupling(e, xi_), 0.0}; }

Eigen::MatrixXcd NormalForm::block(const Site& n) const {
    if (is_tangential(n, tables_.sites)) throw SiteInS("block requested for a tangential site");
    const ResonanceEntry* e = entry_for(n);
    if (e == nullptr) {
        Eigen::MatrixXcd A(1, 1);
        A(0, 0) = Omega(n);
        return A;
    }
    const bool first = e->n == n;
    const Site& self = first ? e->n : e->m;
    const Site& partner = first ? e->m : e->n;
    // Tangential index attached to each member of the pair: n goes with i, m with j.
    const std::size_t ti = static_cast<std::size_t>(first ? e->i_index : e->j_index);
    const std::size_t tj = static_cast<std::size_t>(first ? e->j_index : e->i_index);
    const cplx a = coupling(*e);
    Eigen::MatrixXcd A(2, 2);
    if (e->kind == ResonanceKind::Type1) {
        A << Omega(self) + omega_[ti], a, a, Omega(partner) + omega_[tj];
    } else {
        A << Omega(self) - omega_[ti], a, std::conj(a), Omega(partner) - omega_[tj];
    }
    return A;
}

const char* to_string(QuadKind kind) {
    switch (kind) {
        case QuadKind::S1: return "S1";
        case QuadKind::S2: return "S2";
        case QuadKind::S3: return "S3";
    }
    return "?";
}

BirkhoffCoeff birkhoff_coeff(const Site& i, const Site& j, const Site& n, const Site& m, QuadKind kind,
                             double eps) {
    const std::int64_t li = lambda(i), lj = lambda(j), ln = lambda(n), lm = lambda(m);
    Site lin{};
    std::int64_t d = 0;
    double scale = 1.0;
    switch (kind) {
        case QuadKind::S1:
            lin = i - j + n - m;
            d = li - lj + ln - lm;
            break;
        case QuadKind::S2:
            lin = i + j + n + m;
            d = li + lj + ln + lm;
            scale = 1.0 / 6.0;
            break;
        case QuadKind::S3:
            lin = i + j + n - m;
            d = li + lj + ln - lm;
            scale = 2.0 / 3.0;
            break;
    }
    if (lin != Site{}) throw WrongKind(std::string("quad violates the linear relation of ") + to_string(kind));
    BirkhoffCoeff out;
    out.divisor = d;
    if (d == 0) {
        out.resonant = true;
        return out;
    }
    out.value = cplx(0.0, scale * eps / static_cast<double>(d));
    return out;
}

std::vector<BoundTerm> perturbation_order(double xi_norm, double eps) {
    const double x = xi_norm;
    return {
        {"eps^2 |I|^2", eps * eps},
        {"eps^2 |I| ||z||^2", eps * eps},
        {"eps |xi|^1/2 ||z||^3", eps * std::sqrt(x)},
        {"eps^2 ||z||^4", eps * eps},
        {"eps^2 |xi|^3", eps * eps * x * x * x},
        {"eps^3 |xi|^5/2 ||z||", std::pow(eps, 3) * std::pow(x, 2.5)},
        {"eps^4 |xi|^2 ||z||^2", std::pow(eps, 4) * x * x},
        {"eps^5 |xi|^3/2 ||z||^3", std::pow(eps, 5) * std::pow(x, 1.5)},
    };
}

const BoundTerm& dominant_term(const std::vector<BoundTerm>& terms) {
    return *std::max_element(terms.begin(), terms.end(),
                             [](const BoundTerm& a, const BoundTerm& b) { return a.value < b.value; });
}

}  // namespace kambeam
