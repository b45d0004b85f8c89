#include "kambeam/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fftw3.h>

#include "kambeam/normalform.hpp"

namespace kambeam {

void SimConfig::validate() const {
    if (S.empty()) throw DomainError("simulation needs at least one tangential site");
    if (xi.size() != S.size()) throw DomainError("xi must have one entry per tangential site");
    if (!phases.empty() && phases.size() != S.size()) throw DomainError("phases must be empty or one per site");
    for (double x : xi) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("xi must be finite and >= 0");
    }
    if (!(window_radius >= 1.0)) throw DomainError("window radius must be >= 1");
    if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("dt and T must be positive");
    const double lmax = std::floor(window_radius * window_radius);
    if (dt > 0.5 / lmax) throw DomainError("dt exceeds the stability bound 0.5/lambda_max");
    if (sample_every < 1) throw DomainError("sample_every must be >= 1");
}

std::vector<Site> mode_window(double radius) {
    const auto r = static_cast<std::int64_t>(std::floor(radius));
    const double r2 = radius * radius;
    std::vector<Site> out;
    for (std::int64_t a = -r; a <= r; ++a) {
        for (std::int64_t c = -r; c <= r; ++c) {
            const Site s{a, c};
            if (in_lattice(s) && static_cast<double>(lambda(s)) <= r2 + 1e-9) out.push_back(s);
        }
    }
    return out;
}

struct Galerkin::FftPlan {
    int N = 0;
    fftw_complex* buf = nullptr;
    fftw_plan backward = nullptr;
    fftw_plan forward = nullptr;

    explicit FftPlan(int n) : N(n) {
        buf = fftw_alloc_complex(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
        backward = fftw_plan_dft_2d(N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        forward = fftw_plan_dft_2d(N, N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(backward);
        fftw_destroy_plan(forward);
        fftw_free(buf);
    }
    std::size_t slot(const Site& n) const {
        const auto w = static_cast<std::int64_t>(N);
        const std::int64_t a = ((n.n1 % w) + w) % w;
        const std::int64_t b = ((n.n2 % w) + w) % w;
        return static_cast<std::size_t>(a * w + b);
    }
};

Galerkin::Galerkin(std::vector<Site> modes, double nl_coupling, ConvolutionMethod method)
    : modes_(std::move(modes)), nl_(nl_coupling), method_(method) {
    if (modes_.empty()) throw DomainError("empty mode window");
    std::int64_t R = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const Site& n = modes_[i];
        if (!in_lattice(n)) throw DomainError("mode outside the odd sublattice");
        index_[n] = i;
        R = std::max({R, std::abs(n.n1), std::abs(n.n2)});
    }
    neg_.resize(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        auto it = index_.find(-modes_[i]);
        if (it == index_.end()) throw DomainError("mode window must be closed under negation");
        neg_[i] = it->second;
        lam_.push_back(static_cast<double>(lambda(modes_[i])));
        norm_.push_back(std::sqrt(lam_.back()));
    }
    box_ = 3 * R;
    const auto side = static_cast<std::size_t>(2 * box_ + 1);
    lookup_.assign(side * side, -1);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto a = static_cast<std::size_t>(modes_[i].n1 + box_);
        const auto b = static_cast<std::size_t>(modes_[i].n2 + box_);
        lookup_[a * side + b] = static_cast<std::int32_t>(i);
    }
    if (method_ == ConvolutionMethod::Auto) {
        method_ = modes_.size() <= 16 ? ConvolutionMethod::Direct : ConvolutionMethod::FFT;
    }
    // At least 4R + 1 points per axis keep b + c + d - n (|.| <= 4R) from aliasing onto the window; 4R + 2 keeps the size even.
    fft_ = std::make_unique<FftPlan>(static_cast<int>(4 * R + 2));
}

Galerkin::~Galerkin() = default;

void Galerkin::velocities(std::span<const cplx> q, std::vector<cplx>& v) const {
    v.resize(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) v[i] = (q[i] + std::conj(q[neg_[i]])) / norm_[i];
}

void Galerkin::cubic_direct(std::span<const cplx> q, std::span<cplx> out) const {
    std::vector<cplx> v;
    velocities(q, v);
    const auto side = static_cast<std::size_t>(2 * box_ + 1);
    const std::size_t M = modes_.size();
    for (std::size_t n = 0; n < M; ++n) {
        cplx acc{0.0, 0.0};
        for (std::size_t b = 0; b < M; ++b) {
            const cplx vb = v[b];
            for (std::size_t c = 0; c < M; ++c) {
                const std::int64_t d1 = modes_[n].n1 - modes_[b].n1 - modes_[c].n1;
                const std::int64_t d2 = modes_[n].n2 - modes_[b].n2 - modes_[c].n2;
                const auto id = lookup_[static_cast<std::size_t>(d1 + box_) * side + static_cast<std::size_t>(d2 + box_)];
                if (id >= 0) acc += vb * v[c] * v[static_cast<std::size_t>(id)];
            }
        }
        out[n] = acc;
    }
}

void Galerkin::cubic_fft(std::span<const cplx> q, std::span<cplx> out) const {
    std::vector<cplx> v;
    velocities(q, v);
    FftPlan& P = *fft_;
    const std::size_t total = static_cast<std::size_t>(P.N) * static_cast<std::size_t>(P.N);
    std::fill(P.buf[0], P.buf[0] + 2 * total, 0.0);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const std::size_t s = P.slot(modes_[i]);
        P.buf[s][0] = v[i].real();
        P.buf[s][1] = v[i].imag();
    }
    fftw_execute(P.backward);
    for (std::size_t s = 0; s < total; ++s) {
        const cplx w(P.buf[s][0], P.buf[s][1]);
        const cplx w3 = w * w * w;
        P.buf[s][0] = w3.real();
        P.buf[s][1] = w3.imag();
    }
    fftw_execute(P.forward);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const std::size_t s = P.slot(modes_[i]);
        out[i] = cplx(P.buf[s][0], P.buf[s][1]) * scale;
    }
}

void Galerkin::cubic(std::span<const cplx> q, std::span<cplx> out) const {
    if (method_ == ConvolutionMethod::FFT) {
        cubic_fft(q, out);
    } else {
        cubic_direct(q, out);
    }
}

void Galerkin::kick_rhs(std::span<const cplx> q, std::span<cplx> dq) const {
    cubic(q, dq);
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < modes_.size(); ++i) dq[i] = I * (4.0 * nl_ / norm_[i]) * dq[i];
}

void Galerkin::rhs(std::span<const cplx> q, std::span<cplx> dq) const {
    kick_rhs(q, dq);
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < modes_.size(); ++i) dq[i] += I * lam_[i] * q[i];
}

double Galerkin::hamiltonian(std::span<const cplx> q) const {
    double h2 = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) h2 += lam_[i] * std::norm(q[i]);
    if (nl_ == 0.0) return h2;
    std::vector<cplx> v;
    velocities(q, v);
    std::vector<cplx> c(modes_.size());
    cubic(q, c);
    // sum_{a+b+c+d=0} v_a v_b v_c v_d = sum_a v_a c_{-a}
    cplx h4{0.0, 0.0};
    for (std::size_t i = 0; i < modes_.size(); ++i) h4 += v[i] * c[neg_[i]];
    return h2 + nl_ * h4.real();
}

std::array<double, 2> Galerkin::momentum(std::span<const cplx> q) const {
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double w = std::norm(q[i]);
        p[0] += static_cast<double>(modes_[i].n1) * w;
        p[1] += static_cast<double>(modes_[i].n2) * w;
    }
    return p;
}

double Galerkin::reality_defect(std::span<const cplx> q) const {
    std::vector<cplx> v;
    velocities(q, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) worst = std::max(worst, std::abs(v[neg_[i]] - std::conj(v[i])));
    return worst;
}

void Galerkin::step(std::vector<cplx>& q, double dt) const {
    const std::size_t M = modes_.size();
    auto rotate = [&](double h) {
        for (std::size_t i = 0; i < M; ++i) q[i] *= std::polar(1.0, lam_[i] * h);
    };
    rotate(0.5 * dt);
    if (nl_ != 0.0) {
        std::vector<cplx> k1(M), k2(M), k3(M), k4(M), y(M);
        kick_rhs(q, k1);
        for (std::size_t i = 0; i < M; ++i) y[i] = q[i] + 0.5 * dt * k1[i];
        kick_rhs(y, k2);
        for (std::size_t i = 0; i < M; ++i) y[i] = q[i] + 0.5 * dt * k2[i];
        kick_rhs(y, k3);
        for (std::size_t i = 0; i < M; ++i) y[i] = q[i] + dt * k3[i];
        kick_rhs(y, k4);
        for (std::size_t i = 0; i < M; ++i) q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    rotate(0.5 * dt);
}

ModeState init_state(const SimConfig& cfg) {
    cfg.validate();
    ModeState st;
    st.modes = mode_window(cfg.window_radius);
    st.q.assign(st.modes.size(), cplx{0.0, 0.0});
    for (std::size_t j = 0; j < cfg.S.size(); ++j) {
        auto it = std::find(st.modes.begin(), st.modes.end(), cfg.S[j]);
        if (it == st.modes.end()) throw SiteOutsideWindow("tangential site lies outside the mode window");
        const double phase = cfg.phases.empty() ? 0.0 : cfg.phases[j];
        st.q[static_cast<std::size_t>(it - st.modes.begin())] = std::polar(std::sqrt(cfg.xi[j]), phase);
    }
    return st;
}

Trajectory integrate(const Galerkin& g, const ModeState& state, const SimConfig& cfg) {
    cfg.validate();
    if (state.modes != g.modes()) throw PreconditionError("state and Galerkin system use different windows");
    Trajectory tr;
    tr.modes = state.modes;
    std::vector<cplx> q = state.q;
    const auto steps = static_cast<std::int64_t>(std::llround(cfg.T / cfg.dt));
    auto record = [&](std::int64_t n) {
        tr.t.push_back(state.t + static_cast<double>(n) * cfg.dt);
        tr.q.push_back(q);
        tr.H.push_back(g.hamiltonian(q));
        tr.momentum.push_back(g.momentum(q));
    };
    record(0);
    for (std::int64_t n = 1; n <= steps; ++n) {
        g.step(q, cfg.dt);
        for (const cplx& z : q) {
            if (!(std::abs(z) <= 1e6)) throw BlowUp("|q_n| exceeded 1e6 at t = " + std::to_string(n * cfg.dt));
        }
        if (n % cfg.sample_every == 0) record(n);
    }
    return tr;
}

Trajectory integrate(const ModeState& state, const SimConfig& cfg) {
    const Galerkin g(state.modes, cfg.nl_coupling, cfg.method);
    return integrate(g, state, cfg);
}

std::size_t Trajectory::mode_index(const Site& n) const {
    auto it = std::find(modes.begin(), modes.end(), n);
    if (it == modes.end()) throw SiteOutsideWindow("mode not in trajectory window");
    return static_cast<std::size_t>(it - modes.begin());
}

std::vector<cplx> Trajectory::series(const Site& n) const {
    const std::size_t i = mode_index(n);
    std::vector<cplx> out;
    out.reserve(q.size());
    for (const auto& row : q) out.push_back(row[i]);
    return out;
}

double Trajectory::max_relative_energy_drift() const {
    if (H.empty()) return 0.0;
    double worst = 0.0;
    const double h0 = H.front();
    for (double h : H) worst = std::max(worst, std::abs(h - h0));
    return h0 == 0.0 ? worst : worst / std::abs(h0);
}

double Trajectory::max_momentum_drift() const {
    if (momentum.empty()) return 0.0;
    double worst = 0.0;
    for (const auto& p : momentum) {
        worst = std::max(worst, std::hypot(p[0] - momentum.front()[0], p[1] - momentum.front()[1]));
    }
    return worst;
}

std::vector<double> predicted_shift(std::span<const Site> S, std::span<const double> xi) {
    return tangential_shift(S, xi);
}

}  // namespace kambeam
