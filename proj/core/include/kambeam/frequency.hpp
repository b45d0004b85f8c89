#pragma once

// Dominant-frequency extraction from uniformly sampled complex signals.

#include <complex>
#include <span>

#include "kambeam/simulator.hpp"

namespace kambeam {

struct FrequencyEstimate {
    double frequency = 0.0;   // angular; sign follows e^{i nu t}
    double resolution = 0.0;  // 2 pi / T
    double amplitude = 0.0;   // |windowed DFT| / sum of window weights at the peak
};

// Hann window, zero-padded FFT peak, quadratic interpolation on |X|, then a
// golden-section maximisation of the windowed DFT magnitude around the peak.
// Throws NoPeak for a zero signal and PreconditionError for fewer than 16 samples.
FrequencyEstimate dominant_frequency(std::span<const std::complex<double>> x, double dt);

FrequencyEstimate measure_frequency(const Trajectory& tr, const Site& mode);

}  // namespace kambeam
