#ifndef DGT_SAMPLER_HPP
#define DGT_SAMPLER_HPP

#include "dgt/grid.hpp"

#include <cstdint>

namespace dgt {

// splitmix64: tiny fully-specified generator so sampled fields are
// bit-identical across platforms and standard libraries.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Band-limited strictly positive random fields: exp of a truncated cosine
// series, rescaled into [floor, floor + amplitude]. The cosine basis
// cos(pi m x / lx) cos(pi n y / ly) has zero normal derivative on the
// boundary, so discrete gradients track the analytic ones everywhere.
//
// Draw order per sample (all from SplitMix64(seed)): amplitude in
// [amp_lo, amp_hi], then per mode k: m_k, n_k integers in [0, M] rejecting
// (0,0), coefficient a_k in [-1, 1]. M = min(modes, nx/8, ny/8).
struct FieldSampler {
    std::uint64_t seed = 1;
    int modes = 4;
    double amp_lo = 0.5, amp_hi = 0.5;
    double floor = 0.5;
};

ScalarField sample_field(const FieldSampler& s, const GridSpec& g);

} // namespace dgt

#endif
