#pragma once

// Melnikov small-divisor checks, the 2x2 Kronecker determinant identity,
// the KAM iteration schedule and Monte-Carlo estimation of excluded measure.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kambeam/normalform.hpp"
#include "kambeam/sampling.hpp"

namespace kambeam {

enum class Sign { Plus, Minus };

template <class T>
struct Mat2 {
    T a11{}, a12{}, a21{}, a22{};

    T det() const { return a11 * a22 - a12 * a21; }
    T trace() const { return a11 + a22; }
};

// det(A (x) I2 +- I2 (x) B) = (|A|-|B|)^2 + |A| tr(B)^2 + |B| tr(A)^2 +- (|A|+|B|) tr(A) tr(B)
template <class T>
T kron_det(const Mat2<T>& A, const Mat2<T>& B, Sign sign) {
    const T dA = A.det();
    const T dB = B.det();
    const T tA = A.trace();
    const T tB = B.trace();
    const T diff = dA - dB;
    T out = diff * diff + dA * tB * tB + dB * tA * tA;
    const T cross = (dA + dB) * tA * tB;
    if (sign == Sign::Plus) {
        out += cross;
    } else {
        out -= cross;
    }
    return out;
}

// det(shift I + A (x) I +- I (x) B) without forming the large entries: with
// c = shift + tr(A)/2 +- tr(B)/2 and a2, b2 the squared eigenvalues of the traceless parts,
//   det = (c^2 + a2 - b2)^2 - 4 c^2 a2.
// kron_det cancels catastrophically once the diagonals are much larger than the determinant.
template <class T>
T kron_shift_det(const Mat2<T>& A, const Mat2<T>& B, Sign sign, T shift) {
    const T half(0.5);
    const T c = sign == Sign::Plus ? shift + half * A.trace() + half * B.trace() : shift + half * A.trace() - half * B.trace();
    const T da = half * (A.a11 - A.a22);
    const T db = half * (B.a11 - B.a22);
    const T a2 = da * da + A.a12 * A.a21;
    const T b2 = db * db + B.a12 * B.a21;
    const T u = c * c + a2 - b2;
    return u * u - T(4) * c * c * a2;
}

int l1_norm(std::span<const int> k);

// |<k, omega>| - gamma/|k|^tau. Throws ZeroK for k = 0.
double check_first_melnikov(std::span<const int> k, std::span<const double> omega, double gamma, double tau);

struct DivisorQuery {
    std::vector<int> k;
    Eigen::MatrixXcd blockA;
    std::optional<Eigen::MatrixXcd> blockB;
    Sign sign = Sign::Plus;
    double gamma = 0.0;
    double tau = 1.0;
};

// |det(kOmega I + A (x) I +- I (x) B)| (or |det(kOmega I + A)| without B).
double second_melnikov_det(const DivisorQuery& q, double kOmega);
// second_melnikov_det - gamma/max(1,|k|)^tau.
double check_second_melnikov(const DivisorQuery& q, double kOmega);

struct Schedule {
    std::vector<double> r, s, eps, gamma, eta, K;
    double c = 1.0;
    double tau = 1.0;

    std::size_t size() const { return r.size(); }
    std::string to_csv() const;
};

// nu = 0 .. nu_max inclusive. r_nu = r (1 - sum_{i=2}^{nu+2} 2^-i), gamma_nu likewise,
// eps_nu = c gamma^-16 (r_{nu-1} - r_nu)^-c eps_{nu-1}^{4/3}, eta = eps^{1/3},
// s_nu = eta_{nu-1} s_{nu-1} / 4, K_0 = 1, K_nu = c (eps_nu^-1 (gamma_nu - gamma_{nu+1}))^{1/(tau+1)}.
Schedule make_schedule(double r, double s0, double eps0, double gamma0, double tau, double c, int nu_max);

struct MeasureConfig {
    std::vector<Site> S;
    Box box;
    double eps = 1.0;
    double gamma = 0.1;
    double tau = 4.0;
    int K = 10;
    std::int64_t window = 30;
    std::size_t samples = 2000;
    std::uint64_t seed = 1;
};

struct FamilyCounts {
    std::size_t R_k = 0;
    std::size_t R_kn = 0;
    std::size_t R_knm = 0;
};

struct MeasureReport {
    Box box;
    std::size_t samples = 0;
    std::size_t excluded = 0;
    double excluded_fraction = 0.0;
    FamilyCounts per_family;             // samples excluded by each family
    std::map<int, double> per_k;         // |k| -> fraction of samples excluded at that |k|
    double per_k_slope = 0.0;            // log-log slope of per_k against |k| (nonzero entries)
    std::size_t k0_block_flags = 0;      // k = 0 block conditions below gamma (reported, not excluded)
    std::size_t resonant_pairs = 0;
    std::size_t scalar_levels = 0;
    double gamma = 0.0;
    double tau = 0.0;
    int K = 0;
    std::int64_t window = 0;
    std::uint64_t seed = 0;
};

// Excluded fraction of the box under the three Melnikov families over 1 <= |k| <= K
// and all normal sites with |n| <= window. Candidates are located exactly: scalar
// blocks through sorted Omega values, 2x2 blocks through their (real) eigenvalues,
// then every candidate is confirmed with the determinant itself.
MeasureReport estimate_excluded_measure(const MeasureConfig& cfg);

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kambeam
