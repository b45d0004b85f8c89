#include "kambeam/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fftw3.h>

namespace kambeam {

namespace {

double windowed_magnitude(std::span<const std::complex<double>> y, double dt, double nu) {
    // Recurrence for e^{-i nu k dt}, renormalized now and then.
    const std::complex<double> rot = std::polar(1.0, -nu * dt);
    std::complex<double> ph(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) {
        acc += y[k] * ph;
        ph *= rot;
        if ((k & 1023) == 1023) ph /= std::abs(ph);
    }
    return std::abs(acc);
}

}  // namespace

FrequencyEstimate dominant_frequency(std::span<const std::complex<double>> x, double dt) {
    const std::size_t n = x.size();
    if (n < 16) throw PreconditionError("need at least 16 samples for a frequency estimate");
    if (!(dt > 0.0)) throw PreconditionError("sampling step must be positive");

    std::vector<std::complex<double>> y(n);
    double wsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1)));
        y[k] = w * x[k];
        wsum += w;
    }

    std::size_t M = 1;
    while (M < 4 * n) M <<= 1;
    fftw_complex* buf = fftw_alloc_complex(M);
    for (std::size_t k = 0; k < M; ++k) {
        buf[k][0] = k < n ? y[k].real() : 0.0;
        buf[k][1] = k < n ? y[k].imag() : 0.0;
    }
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(M), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    std::vector<double> mag(M);
    std::size_t peak = 0;
    for (std::size_t k = 0; k < M; ++k) {
        mag[k] = std::hypot(buf[k][0], buf[k][1]);
        if (mag[k] > mag[peak]) peak = k;
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    if (!(mag[peak] > 0.0)) throw NoPeak("flat spectrum");

    const double bin = 2.0 * std::numbers::pi / (static_cast<double>(M) * dt);
    auto freq_of = [&](double k) { return (k >= static_cast<double>(M) / 2 ? k - static_cast<double>(M) : k) * bin; };
    const double ym = mag[(peak + M - 1) % M];
    const double y0 = mag[peak];
    const double yp = mag[(peak + 1) % M];
    const double den = ym - 2.0 * y0 + yp;
    const double shift = den != 0.0 ? 0.5 * (ym - yp) / den : 0.0;
    double center = freq_of(static_cast<double>(peak)) + std::clamp(shift, -0.5, 0.5) * bin;

    // Golden section on [center - bin, center + bin].
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = center - bin;
    double b = center + bin;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = windowed_magnitude(y, dt, c);
    double fd = windowed_magnitude(y, dt, d);
    for (int it = 0; it < 80 && (b - a) > 1e-14 * std::max(1.0, std::abs(center)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = windowed_magnitude(y, dt, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = windowed_magnitude(y, dt, d);
        }
    }
    const double nu = 0.5 * (a + b);
    FrequencyEstimate out;
    out.frequency = nu;
    out.resolution = 2.0 * std::numbers::pi / (static_cast<double>(n - 1) * dt);
    out.amplitude = windowed_magnitude(y, dt, nu) / wsum;
    return out;
}

FrequencyEstimate measure_frequency(const Trajectory& tr, const Site& mode) {
    if (tr.t.size() < 2) throw PreconditionError("trajectory too short");
    const auto series = tr.series(mode);
    return dominant_frequency(series, tr.t[1] - tr.t[0]);
}

}  // namespace kambeam
