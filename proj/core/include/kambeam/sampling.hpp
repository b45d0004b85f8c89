#pragma once

// Portable deterministic random numbers. std::uniform_real_distribution is
// implementation-defined, so doubles are built from the raw 64-bit stream.

#include <cstdint>
#include <random>
#include <vector>

namespace kambeam {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // [0, n) by rejection, n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    double volume() const;
    // Throws DomainError on mismatched sizes or hi < lo.
    void validate() const;
};

// Latin-hypercube stratification with jitter: along every axis each of the
// n strata holds exactly one sample.
std::vector<std::vector<double>> stratified_samples(const Box& box, std::size_t n, Rng& rng);

}  // namespace kambeam
