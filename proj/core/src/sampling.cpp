#include "kambeam/sampling.hpp"

#include <numeric>
#include <utility>

#include "kambeam/errors.hpp"

namespace kambeam {

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

void Box::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw DomainError("box bounds must be non-empty and equal length");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] >= lo[i])) throw DomainError("box upper bound below lower bound");
    }
}

std::vector<std::vector<double>> stratified_samples(const Box& box, std::size_t n, Rng& rng) {
    box.validate();
    const std::size_t d = box.dim();
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    std::vector<std::size_t> perm(n);
    for (std::size_t axis = 0; axis < d; ++axis) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        // Fisher-Yates with the portable generator.
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        const double width = (box.hi[axis] - box.lo[axis]) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i][axis] = box.lo[axis] + width * (static_cast<double>(perm[i]) + rng.uniform());
        }
    }
    return out;
}

}  // namespace kambeam
