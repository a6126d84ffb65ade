#include "dgt/sampler.hpp"
#include "dgt/errors.hpp"

#include <cmath>
#include <limits>

namespace dgt {

ScalarField sample_field(const FieldSampler& s, const GridSpec& g) {
    if (!(s.floor > 0.0))
        throw std::invalid_argument("sample_field: positivity floor must be > 0");
    if (s.modes < 1)
        throw std::invalid_argument("sample_field: mode count must be >= 1");
    if (s.amp_lo < 0.0 || s.amp_hi < s.amp_lo)
        throw std::invalid_argument("sample_field: bad amplitude range");

    SplitMix64 rng(s.seed);
    const double amp = rng.uniform(s.amp_lo, s.amp_hi);
    const int cap = std::min(g.nx, g.ny) / 8;
    const int max_wave = std::max(1, std::min(s.modes, cap));

    struct Mode { int m, n; double a; };
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(s.modes));
    for (int k = 0; k < s.modes; ++k) {
        int m = 0, n = 0;
        do {
            m = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_wave) + 1));
            n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_wave) + 1));
        } while (m == 0 && n == 0);
        const double a = rng.uniform(-1.0, 1.0);
        modes.push_back({m, n, a});
    }

    ScalarField f(g);
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -std::numeric_limits<double>::infinity();
    const double pi = std::acos(-1.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            const double x = g.cell_x(i), y = g.cell_y(j);
            for (const auto& mo : modes)
                acc += mo.a * std::cos(pi * mo.m * x / g.lx) * std::cos(pi * mo.n * y / g.ly);
            const double v = std::exp(acc);
            f.at(i, j) = v;
            fmin = std::fmin(fmin, v);
            fmax = std::fmax(fmax, v);
        }

    const double span = fmax - fmin;
    for (double& v : f.values)
        v = (span > 0.0 && amp > 0.0) ? s.floor + amp * (v - fmin) / span : s.floor;
    f.declared_sign = Sign::positive;
    return f;
}

} // namespace dgt
