#pragma once

// Finite Fourier-Taylor series in (theta, I, z, zbar):
//   F = sum F_{k l alpha beta} e^{i<k,theta>} I^l z^alpha zbar^beta
// with the bracket {F,G} = F_theta.G_I - F_I.G_theta + i sum_n (F_{z_n} G_{zbar_n} - F_{zbar_n} G_{z_n}).

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "kambeam/lattice.hpp"

namespace kambeam {

using cplx = std::complex<double>;
using Exponents = std::vector<std::pair<Site, int>>;

struct NormConfig {
    double a = 1.0;
    double abar = 2.0;
    double rho = 0.1;
    double r = 1.0;
    double s = 1.0;

    // Throws DomainError unless a > 0, abar > a, rho > 0, r > 0, s > 0.
    void validate() const;
};

MonomialKey make_key(std::vector<int> k, std::vector<int> l, Exponents alpha, Exponents beta);

int k_norm(const MonomialKey& key);  // l1
int i_degree(const MonomialKey& key);
int z_degree(const MonomialKey& key);  // |alpha| + |beta|
int power_of(const Exponents& e, const Site& n);

// Members of the class kept by the quadratic truncation:
//   alpha = beta = 0 with |l| <= 1, or l = 0 with 1 <= |alpha| + |beta| <= 2.
bool in_restricted_class(const MonomialKey& key);

class Series {
public:
    Series() = default;
    explicit Series(std::size_t b) : b_(b) {}

    std::size_t b() const { return b_; }
    const std::map<MonomialKey, cplx>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    // Accumulates; entries that cancel to exactly zero are erased.
    void add(const MonomialKey& key, cplx c);
    void set(const MonomialKey& key, cplx c);
    cplx coeff(const MonomialKey& key) const;

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(cplx c);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(cplx c, Series a) { return a *= c; }

    double l1() const;
    double max_abs() const;
    void prune(double tol);

    template <class Pred>
    Series filter(Pred pred) const {
        Series out(b_);
        for (const auto& [key, c] : terms_) {
            if (pred(key)) out.terms_.emplace(key, c);
        }
        return out;
    }

private:
    std::size_t b_ = 0;
    std::map<MonomialKey, cplx> terms_;
};

Series poisson_bracket(const Series& F, const Series& G);

// Complex conjugate as a function on real phase space: k -> -k, alpha <-> beta, c -> conj(c).
MonomialKey conjugate_key(const MonomialKey& key);
Series conjugate(const Series& F);
// max |c_key - conj(c_conjkey)| over the support.
double reality_defect(const Series& F);

Series quadratic_truncate(const Series& P);

// Every monomial satisfies zero_momentum on S.
bool momentum_closed(const Series& F, std::span<const Site> S);

double weighted_norm(const std::map<Site, cplx>& seq, const NormConfig& cfg);

// Coefficient-sum upper bound of the weighted vector-field norm on
// D(r, s) = {|Im theta| < r, |I| < s^2, ||z||_{a,rho} < s}, using |z_n| <= s / (|n|^a e^{rho|n|}):
//   sum_j ||F_{I_j}|| + ||F_theta|| / s^2 + (1/s) sum_n (||F_{z_n}|| + ||F_{zbar_n}||) |n|^abar e^{rho|n|}.
double vector_field_norm(const Series& F, const NormConfig& cfg);

// Sorted coefficient list [{k, l, alpha, beta, re, im}].
nlohmann::json to_json(const Series& F);
Series series_from_json(const nlohmann::json& j, std::size_t b);

}  // namespace kambeam
