#pragma once

// One KAM step on the restricted class: solve
//   {N + A + B + Bbar, F} + R = Nhat + Ahat + Bhat + Bbarhat
// for F, then compose H with the time-1 flow of F.

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "kambeam/normalform.hpp"
#include "kambeam/series.hpp"

namespace kambeam {

// A resonant pair with one coefficient per orientation.
//   Type1: fwd on z_n zbar_m e^{i(theta_i - theta_j)}, bwd on z_m zbar_n e^{-i(theta_i - theta_j)}
//   Type2: fwd on z_n z_m e^{-i(theta_i + theta_j)},   bwd on zbar_n zbar_m e^{i(theta_i + theta_j)}
struct CoupledPair {
    ResonanceEntry entry;
    cplx fwd{0.0, 0.0};
    cplx bwd{0.0, 0.0};
};

MonomialKey coupling_key(const ResonanceEntry& e, std::size_t b, bool forward);

// N + A + B + Bbar over a finite set of normal modes.
struct NormalPart {
    std::vector<Site> S;
    double energy = 0.0;
    std::vector<double> omega;
    std::map<Site, double> Omega;
    std::vector<CoupledPair> type1;
    std::vector<CoupledPair> type2;

    // Modes are closed under resonance partners from the tables of nf.
    static NormalPart from(const NormalForm& nf, std::span<const Site> modes);

    std::size_t b() const { return S.size(); }
    std::vector<Site> modes() const;
    Series to_series() const;
    bool is_hat_key(const MonomialKey& key) const;
};

struct HomologicalResult {
    Series F;
    Series hat;
    // min over solved systems of |det| |k|^tau / gamma (infinite when nothing was solved or gamma = 0).
    double margin = std::numeric_limits<double>::infinity();
    double residual = 0.0;  // l1 of the equation defect off the hat monomials
    std::map<int, std::size_t> block_sizes;  // system size -> count
};

// Preconditions: R lies in the restricted class, |k| <= K, momentum-closed and
// supported on nf modes (PreconditionError otherwise).
// Throws SmallDivisor when |det| < gamma/|k|^tau and NonResonantLeftover when a
// k = 0 system off the hat monomials is exactly singular.
HomologicalResult solve_homological(const NormalPart& h0, const Series& R, double gamma, double tau, int K);

struct HatParts {
    Series N, A, B, Bbar;
};
HatParts split_hat(const NormalPart& h0, const Series& hat);

// N + hat, with the hat's k = 0 constant, I-linear and z_n zbar_n terms folded
// into energy, omega and Omega and its coupling terms into the pairs.
NormalPart apply_hat(const NormalPart& h0, const Series& hat);

struct KamParams {
    double gamma = 1e-2;
    double tau = 3.0;
    int K = 5;
    NormConfig norm;
    double r_plus = 0.5;
    double lie_tol = 1e-16;
    int lie_max_terms = 50;
};

struct KamState {
    NormalPart h0;
    Series P;
};

struct KamStats {
    double eps = 0.0;       // ||X_P|| on D(r, s)
    double eps_plus = 0.0;  // ||X_{P+}|| on D(r+, s+)
    double s_plus = 0.0;
    double ratio = 0.0;     // eps_plus / eps^(4/3)
    double margin = 0.0;
    double homological_residual = 0.0;
    int lie_terms = 0;
    std::size_t f_terms = 0;
    std::size_t p_plus_terms = 0;
};

struct KamResult {
    KamState next;
    Series F;
    Series hat;
    KamStats stats;
};

// Throws DivergentLieSeries when the Lie series does not reach lie_tol.
KamResult kam_step(const KamState& state, const KamParams& params);

struct PerturbationConfig {
    int K = 5;
    int cubic_k_max = 2;
    bool include_cubic = true;
    bool include_action_square = true;
    double scale = 1e-6;
    std::uint64_t seed = 1;
};

// Random real momentum-closed perturbation on the given modes: every admissible
// monomial of the restricted class with |k| <= K, cubic z terms with
// |k| <= cubic_k_max and I_j^2 terms, coefficients scale * U(-1, 1) in each part.
Series random_perturbation(std::span<const Site> S, std::span<const Site> modes, const PerturbationConfig& cfg);

}  // namespace kambeam
