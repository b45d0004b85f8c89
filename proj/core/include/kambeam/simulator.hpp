#pragma once

// Galerkin truncation of the beam equation on the odd sublattice, written through
// v_n = (q_n + conj(q_{-n})) / |n|:
//   H     = sum lambda_n |q_n|^2 + eps sum_{a+b+c+d=0} v_a v_b v_c v_d
//   q_n'  = i (lambda_n q_n + (4 eps / |n|) sum_{b+c+d=n} v_b v_c v_d)
// Expanding the quartic sum over ordered tuples reproduces the 1, 4, 6 coefficients.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "kambeam/lattice.hpp"

namespace kambeam {

using cplx = std::complex<double>;

enum class ConvolutionMethod { Auto, Direct, FFT };

struct SimConfig {
    std::vector<Site> S;
    std::vector<double> xi;      // initial actions |q_{i_j}|^2
    std::vector<double> phases;  // theta_j(0); empty means zeros
    double window_radius = 5.0;
    double dt = 0.005;
    double T = 200.0;
    double nl_coupling = 1.0;
    int sample_every = 1;  // steps between stored samples
    ConvolutionMethod method = ConvolutionMethod::Auto;

    // Throws DomainError for inconsistent sizes or non-positive dt / T.
    void validate() const;
};

struct ModeState {
    std::vector<Site> modes;
    std::vector<cplx> q;
    double t = 0.0;
};

struct Trajectory {
    std::vector<Site> modes;
    std::vector<double> t;
    std::vector<std::vector<cplx>> q;  // q[sample][mode]
    std::vector<double> H;
    std::vector<std::array<double, 2>> momentum;

    std::size_t mode_index(const Site& n) const;  // throws SiteOutsideWindow
    std::vector<cplx> series(const Site& n) const;
    double max_relative_energy_drift() const;
    double max_momentum_drift() const;
};

class Galerkin {
public:
    Galerkin(std::vector<Site> modes, double nl_coupling, ConvolutionMethod method = ConvolutionMethod::Auto);
    ~Galerkin();
    Galerkin(const Galerkin&) = delete;
    Galerkin& operator=(const Galerkin&) = delete;

    const std::vector<Site>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    ConvolutionMethod method() const { return method_; }

    // c_n = sum_{b+c+d=n} v_b v_c v_d over the window.
    void cubic(std::span<const cplx> q, std::span<cplx> out) const;
    void cubic_direct(std::span<const cplx> q, std::span<cplx> out) const;
    void cubic_fft(std::span<const cplx> q, std::span<cplx> out) const;

    void rhs(std::span<const cplx> q, std::span<cplx> dq) const;
    // Nonlinear part of rhs only.
    void kick_rhs(std::span<const cplx> q, std::span<cplx> dq) const;
    double hamiltonian(std::span<const cplx> q) const;
    std::array<double, 2> momentum(std::span<const cplx> q) const;
    // max |v_{-n} - conj(v_n)|: zero when u is real.
    double reality_defect(std::span<const cplx> q) const;

    // One Strang step: half rotation, RK4 nonlinear kick, half rotation.
    void step(std::vector<cplx>& q, double dt) const;

private:
    void velocities(std::span<const cplx> q, std::vector<cplx>& v) const;

    std::vector<Site> modes_;
    double nl_;
    ConvolutionMethod method_;
    std::vector<double> lam_;
    std::vector<double> norm_;
    std::vector<std::size_t> neg_;
    std::map<Site, std::size_t> index_;
    // Dense lookup of mode indices over [-3R, 3R]^2 (-1 outside the window).
    std::int64_t box_ = 0;
    std::vector<std::int32_t> lookup_;
    struct FftPlan;
    std::unique_ptr<FftPlan> fft_;
};

// Odd-lattice sites with |n| <= radius; closed under negation.
std::vector<Site> mode_window(double radius);

ModeState init_state(const SimConfig& cfg);

// Throws BlowUp when some |q_n| exceeds 1e6.
Trajectory integrate(const ModeState& state, const SimConfig& cfg);
Trajectory integrate(const Galerkin& g, const ModeState& state, const SimConfig& cfg);

// First-order tangential frequency shift 2 xi_i / lambda_i^2 + 4 sum_{j != i} xi_j / (lambda_i lambda_j).
std::vector<double> predicted_shift(std::span<const Site> S, std::span<const double> xi);

// Averaged shift of the simulated system per unit of predicted_shift: the ordered-tuple
// quartic carries 6 |q_i|^4 / lambda_i^2 and 24 |q_i|^2 |q_j|^2 / (lambda_i lambda_j).
inline constexpr double kShiftNormalization = 6.0;

}  // namespace kambeam
