#pragma once

// Birkhoff normal-form data of the resonant beam equation on a tangential set S:
//   omega_i   = eps^-4 lambda_i + 2 xi_i / lambda_i^2 + 4 sum_{j != i} xi_j / (lambda_i lambda_j)
//   Omega_n   = eps^-4 lambda_n + 4 sum_j xi_j / (lambda_j lambda_n)
//   a_n       = 4 sqrt(xi_i xi_j) / sqrt(lambda_i lambda_j lambda_n lambda_m)
// plus the 1x1 / 2x2 blocks A_n used by the Melnikov conditions.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kambeam/lattice.hpp"

namespace kambeam {

using cplx = std::complex<double>;

struct ParamPoint {
    std::vector<double> xi;
    double eps = 1.0;
};

// Frequencies split into the eps^-4 lambda offset and the xi-dependent remainder.
// The remainder ("relative" frequency) is what survives in differences such as
// Omega_n - Omega_m when lambda_n = lambda_m, so evaluators expose it separately.
std::vector<double> tangential_shift(std::span<const Site> S, std::span<const double> xi);
std::vector<double> tangential_freqs(std::span<const Site> S, std::span<const double> xi, double eps);

// Throws SiteInS when n is tangential.
double normal_shift(const Site& n, std::span<const Site> S, std::span<const double> xi);
double normal_freq(const Site& n, std::span<const Site> S, std::span<const double> xi, double eps);

// Throws DomainError for negative xi.
double coupling(const ResonanceEntry& entry, std::span<const double> xi);

// d omega / d xi: 2/lambda_i^2 on the diagonal, 4/(lambda_i lambda_j) off it.
Eigen::MatrixXd frequency_jacobian(std::span<const Site> S);

class NormalForm {
public:
    // Tables must come from classify_resonances on the same sites.
    NormalForm(TangentialSet tables, std::vector<double> xi, double eps);

    const TangentialSet& tables() const { return tables_; }
    std::span<const Site> sites() const { return tables_.sites; }
    std::span<const double> xi() const { return xi_; }
    double eps() const { return eps_; }
    double eps_pow() const { return eps_pow_; }  // eps^-4

    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& omega_shift() const { return omega_shift_; }
    double Omega(const Site& n) const;
    double Omega_shift(const Site& n) const;

    // Resonance entry whose canonical n or m equals the site, if any.
    const ResonanceEntry* entry_for(const Site& n) const;
    cplx coupling(const ResonanceEntry& e) const;

    // [Omega_n] for unresonant n; the 2x2 block otherwise, rows ordered (n, partner).
    Eigen::MatrixXcd block(const Site& n) const;

private:
    TangentialSet tables_;
    std::vector<double> xi_;
    double eps_;
    double eps_pow_;
    std::vector<double> omega_;
    std::vector<double> omega_shift_;
    std::map<Site, std::size_t> type1_index_;
    std::map<Site, std::size_t> type2_index_;
};

enum class QuadKind { S1, S2, S3 };

const char* to_string(QuadKind kind);

struct BirkhoffCoeff {
    bool resonant = false;   // divisor vanishes: the quad stays in the normal form
    std::int64_t divisor = 0;
    cplx value{0.0, 0.0};
};

// Coefficient of the generating function on a quad (i, j, n, m):
//   S1: i - j + n - m = 0, i eps / d
//   S2: i + j + n + m = 0, i eps / (6 d)
//   S3: i + j + n - m = 0, 2 i eps / (3 d)
// Throws WrongKind if the linear relation of the kind fails.
BirkhoffCoeff birkhoff_coeff(const Site& i, const Site& j, const Site& n, const Site& m, QuadKind kind,
                             double eps);

struct BoundTerm {
    std::string name;
    double value = 0.0;
};

// The eight remainder magnitudes of the normal-form perturbation evaluated at
// |I| = ||z|| = 1, in their printed order.
std::vector<BoundTerm> perturbation_order(double xi_norm, double eps);
const BoundTerm& dominant_term(const std::vector<BoundTerm>& terms);

}  // namespace kambeam
