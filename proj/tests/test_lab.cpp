#include "dgt/lab.hpp"
#include "dgt/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dgt;
using dgt::testing::make_field;

TEST_CASE("sample_field: determinism, amplitude 0, positivity") {
    const GridSpec g(32, 32, 1.0, 1.0);
    FieldSampler s;
    s.seed = 77;
    s.modes = 3;
    const ScalarField a = sample_field(s, g);
    const ScalarField b = sample_field(s, g);
    for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == b.values[k]);
    CHECK(a.min() > 0.0);

    FieldSampler flat = s;
    flat.amp_lo = flat.amp_hi = 0.0;
    flat.floor = 0.7;
    const ScalarField c = sample_field(flat, g);
    CHECK(c.min() == 0.7);
    CHECK(c.max() == 0.7);

    CHECK_THROWS_AS(([&] {
                        FieldSampler bad = s;
                        bad.floor = 0.0;
                        return sample_field(bad, g);
                    }()),
                    std::invalid_argument);
}

TEST_CASE("sample_field: single mode reproduces the documented draw order") {
    const GridSpec g(64, 64, 1.0, 1.0);
    FieldSampler s;
    s.seed = 5;
    s.modes = 1;
    s.amp_lo = s.amp_hi = 1.0;
    s.floor = 0.25;
    const ScalarField f = sample_field(s, g);

    // independent scalar re-evaluation from the documented draw order
    SplitMix64 rng(5);
    (void)rng.uniform(1.0, 1.0); // amplitude
    const int max_wave = std::min(s.modes, 64 / 8);
    int m = 0, n = 0;
    do {
        m = static_cast<int>(rng.below(max_wave + 1));
        n = static_cast<int>(rng.below(max_wave + 1));
    } while (m == 0 && n == 0);
    const double a = rng.uniform(-1.0, 1.0);
    double lo = 1e300, hi = -1e300;
    std::vector<double> raw(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double w = std::exp(a * std::cos(M_PI * m * g.cell_x(i)) *
                                      std::cos(M_PI * n * g.cell_y(j)));
            raw[g.idx(i, j)] = w;
            lo = std::fmin(lo, w);
            hi = std::fmax(hi, w);
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(f.at(i, j) ==
                  doctest::Approx(0.25 + (raw[g.idx(i, j)] - lo) / (hi - lo)).epsilon(1e-14));
}

TEST_CASE("check_appendix_inequality: constant-field values") {
    const GridSpec g(16, 16, 1.0, 1.0);
    const ScalarField ones(g, 1.0);
    SUBCASE("phi = psi = 1 gives lhs 0, margin c") {
        for (double p : {1.0, 2.0, 3.0}) {
            const InequalitySample s = check_appendix_inequality(ones, ones, p, 0.5, 1.0);
            CHECK(s.lhs == 0.0);
            CHECK(s.eta_term == 0.0);
            CHECK(s.c_term1 == 0.0);
            CHECK(s.c_term2 == 0.0);
            CHECK(s.c_term3 == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(s.margin == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    SUBCASE("constant psi kills the lhs for any phi") {
        FieldSampler fs;
        fs.seed = 11;
        const ScalarField phi = sample_field(fs, g);
        const InequalitySample s = check_appendix_inequality(phi, ScalarField(g, 2.0), 2.0, 1.0, 1.0);
        CHECK(s.lhs == 0.0);
        CHECK(s.margin >= 0.0);
    }
    SUBCASE("rejections") {
        ScalarField zero(g, 0.0);
        CHECK_THROWS_AS(check_appendix_inequality(zero, ones, 1.0, 1.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(check_appendix_inequality(ones, ones, 0.5, 1.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(check_appendix_inequality(ones, ones, 1.0, 0.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("InequalitySample::min_c closed form") {
    InequalitySample s;
    s.lhs = 2.0;
    s.eta_term = 0.0;
    s.c_term1 = 4.0;
    s.c_term2 = 0.0;
    s.c_term3 = 0.0;
    CHECK(s.min_c() == doctest::Approx(0.5));
    s.eta_term = 3.0;
    CHECK(s.min_c() == 0.0);
    s.eta_term = 0.0;
    s.c_term1 = 0.0;
    CHECK_THROWS_AS(s.min_c(), NumericalError); // positive lhs, no c leverage
}

TEST_CASE("fit_constant: exact infimum over the calibration set") {
    std::vector<InequalitySample> samples(120);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        samples[k].seed = k;
        samples[k].lhs = 0.0; // all-constant samples
        samples[k].c_term3 = 1.0;
    }
    CHECK(fit_constant(samples) == 0.0);
    samples[37].lhs = 2.0;
    samples[37].c_term1 = 4.0;
    std::uint64_t arg = 0;
    CHECK(fit_constant(samples, &arg) == doctest::Approx(0.5));
    CHECK(arg == 37);
    samples.resize(50);
    CHECK_THROWS_AS(fit_constant(samples), std::invalid_argument);
}

TEST_CASE("appendix inequality margin is affine increasing in c") {
    const GridSpec g(32, 32, 1.0, 1.0);
    FieldSampler fs;
    fs.seed = 90;
    const ScalarField phi = sample_field(fs, g);
    fs.seed = 91;
    const ScalarField psi = sample_field(fs, g);
    const InequalitySample s1 = check_appendix_inequality(phi, psi, 2.0, 0.5, 1.0);
    const InequalitySample s2 = check_appendix_inequality(phi, psi, 2.0, 0.5, 2.0);
    const InequalitySample s3 = check_appendix_inequality(phi, psi, 2.0, 0.5, 3.0);
    CHECK(s1.c_coefficient() >= 0.0);
    CHECK(s2.margin - s1.margin == doctest::Approx(s1.c_coefficient()).epsilon(1e-9));
    CHECK(s3.margin - s2.margin == doctest::Approx(s2.margin - s1.margin).epsilon(1e-9));
}

TEST_CASE("lab split protocol: calibration constant validates cleanly at desk scale") {
    const GridSpec g(64, 64, 1.0, 1.0);
    FieldSampler base;
    base.modes = 4;
    base.floor = 0.5;
    base.amp_lo = 0.5;
    base.amp_hi = 2.0;
    const LabRun run = run_lab_split(base, g, 1.0, 0.125, 1, 150, 150, 2);
    CHECK(run.c_fit > 0.0);
    CHECK(run.calibration.size() == 150);
    CHECK(run.validation.size() == 150);
    CHECK(run.violations == 0);
    // margins at the fitted constant are nonnegative on calibration by construction
    for (const auto& s : run.calibration)
        CHECK(s.eta_term + run.c_fit * s.c_coefficient() - s.lhs >= -1e-12);
}

TEST_CASE("fit_constant is stable under grid doubling") {
    FieldSampler base;
    base.modes = 4;
    base.floor = 0.5;
    base.amp_lo = 0.5;
    base.amp_hi = 2.0;
    const GridSpec g1(64, 64, 1.0, 1.0), g2(128, 128, 1.0, 1.0);
    const LabRun r1 = run_lab_split(base, g1, 1.0, 0.125, 1, 120, 1, 2);
    const LabRun r2 = run_lab_split(base, g2, 1.0, 0.125, 1, 120, 1, 2);
    CHECK(std::fabs(r2.c_fit - r1.c_fit) <= 0.10 * r1.c_fit);
}

TEST_CASE("check_sobolev: constant field, scaling invariance, mode sample") {
    const GridSpec g(64, 64, 1.0, 1.0);
    SUBCASE("rho = 1: C_fit = 1 for the quadratic family") {
        const SobolevSample s = check_sobolev(ScalarField(g, 1.0), 1.0);
        CHECK(s.c_fit_62 == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("scaling rho -> lambda rho leaves C_fit of the quadratic family alone") {
        FieldSampler fs;
        fs.seed = 55;
        ScalarField rho = sample_field(fs, g);
        const double c1 = check_sobolev(rho, 2.0).c_fit_62;
        for (double& v : rho.values) v *= 37.5;
        const double c2 = check_sobolev(rho, 2.0).c_fit_62;
        CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));
    }
    SUBCASE("single mode: margins nonnegative with a finite fitted C") {
        const ScalarField rho = make_field(
            g, [](double x, double y) { return 1.5 + std::cos(M_PI * x) * std::cos(M_PI * y); });
        const SobolevSample s = check_sobolev(rho, 1.0);
        CHECK(std::isfinite(s.c_fit_62));
        CHECK(std::isfinite(s.c_fit_65));
        CHECK(s.c_fit_62 > 0.0);
        CHECK(s.c_fit_65 > 0.0);
    }
    SUBCASE("nonpositive rho rejected for the quasi-norm family") {
        ScalarField rho(g, 1.0);
        rho.at(0, 0) = 0.0;
        CHECK_THROWS_AS(check_sobolev(rho, 1.0), std::invalid_argument);
    }
}

TEST_CASE("check_psi_bound: scalar values and continuity") {
    const double e = std::exp(1.0);
    CHECK(check_psi_bound(0.0) == doctest::Approx(e * e - e).epsilon(1e-13)); // 4.6707742705
    CHECK_THROWS_AS(check_psi_bound(-1e-9), std::invalid_argument);
    CHECK(check_psi_bound(1e6) > check_psi_bound(10.0)); // grows
    CHECK(check_psi_bound(1e6) > 0.0);
    for (double xi = 0.0; xi <= 10.0; xi += 0.37)
        CHECK(std::fabs(check_psi_bound(xi) - check_psi_bound(xi + 1e-9)) <= 1e-6);
}

TEST_CASE("check_psi_bound: no violations over a wide sweep") {
    SplitMix64 rng(13);
    for (int k = 0; k < 100000; ++k) {
        const double xi = std::exp(rng.uniform(-20.0, 14.0)); // spans [2e-9, 1.2e6]
        CHECK(check_psi_bound(xi) >= 0.0);
    }
}

TEST_CASE("check_elementary: both classic inequalities hold over 1e5 pairs") {
    const ElementaryReport rep = check_elementary(100000, 77);
    CHECK(rep.samples == 100000);
    CHECK(rep.worst_half_square <= 0.0);
    CHECK(rep.worst_sum_square <= 1e-9); // equality at a = b up to roundoff
}
