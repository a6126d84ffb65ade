#include "dgt/model.hpp"
#include "dgt/errors.hpp"
#include "dgt/sampler.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace dgt;
using dgt::testing::make_field;

TEST_CASE("model params ranges") {
    CHECK_THROWS_AS(ModelParams(0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(2.0, 1.5), std::invalid_argument);
    CHECK_NOTHROW(ModelParams(1.0, 1.0));
}

TEST_CASE("validate_initial_data: classes, flags, hard rejections") {
    const GridSpec g(8, 8, 1.0, 1.0);

    SUBCASE("constant data accepted, class l<3") {
        const auto rep = validate_initial_data(ScalarField(g, 1.0), ScalarField(g, 1.0), 2.0);
        CHECK(rep.accepted);
        CHECK(rep.cls == AdmissibilityClass::l_below_3);
        CHECK(rep.flags.empty());
    }
    SUBCASE("zero cell at l=3 accepted with divergence flag") {
        ScalarField u0(g, 1.0);
        u0.at(2, 5) = 0.0;
        const auto rep = validate_initial_data(u0, ScalarField(g, 1.0), 3.0);
        CHECK(rep.accepted);
        CHECK(rep.cls == AdmissibilityClass::l_equal_3);
        REQUIRE(rep.flags.size() == 1);
        CHECK(rep.flags[0] == "ln u0 integral divergent at cell (2,5)");
        CHECK(*rep.ln_u0_integral == -std::numeric_limits<double>::infinity());
    }
    SUBCASE("l=3 with positive u0 reports the log integral") {
        const auto rep = validate_initial_data(ScalarField(g, std::exp(1.0)), ScalarField(g, 1.0), 3.0);
        CHECK(rep.accepted);
        CHECK(*rep.ln_u0_integral == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("l>3 reports the u0^(3-l) integral and flags zeros") {
        const auto rep = validate_initial_data(ScalarField(g, 2.0), ScalarField(g, 1.0), 4.0);
        CHECK(rep.accepted);
        CHECK(rep.cls == AdmissibilityClass::l_above_3);
        CHECK(*rep.u0_pow_integral == doctest::Approx(0.5).epsilon(1e-12));
        ScalarField u0(g, 2.0);
        u0.at(0, 0) = 0.0;
        const auto rep2 = validate_initial_data(u0, ScalarField(g, 1.0), 4.0);
        CHECK(rep2.accepted);
        CHECK(*rep2.u0_pow_integral == std::numeric_limits<double>::infinity());
        CHECK(!rep2.flags.empty());
    }
    SUBCASE("negative u0 cell rejected") {
        ScalarField u0(g, 1.0);
        u0.at(1, 1) = -1e-12;
        const auto rep = validate_initial_data(u0, ScalarField(g, 1.0), 2.0);
        CHECK(!rep.accepted);
    }
    SUBCASE("v0 with a zero cell rejected") {
        ScalarField v0(g, 1.0);
        v0.at(3, 3) = 0.0;
        const auto rep = validate_initial_data(ScalarField(g, 1.0), v0, 2.0);
        CHECK(!rep.accepted);
        CHECK_THROWS_AS(InitialData::validated(ScalarField(g, 1.0), v0, 2.0),
                        std::invalid_argument);
    }
}

TEST_CASE("flux_u: homogeneous states carry no flux") {
    const GridSpec g(8, 8, 1.0, 1.0);
    const ModelParams p(2.0, 0.01);
    CHECK(flux_u(ScalarField(g, 1.0), ScalarField(g, 1.0), p).max_abs() == 0.0);
    CHECK(flux_u(ScalarField(g, 2.0), ScalarField(g, 5.0), ModelParams(3.7, 0.5)).max_abs() == 0.0);
}

TEST_CASE("flux_u: hand-evaluated taxis face value for linear v") {
    const GridSpec g(8, 8, 1.0, 1.0);
    const ModelParams p(2.0, 0.01);
    const double slope = 0.75;
    const ScalarField u(g, 1.0);
    const ScalarField v = make_field(g, [&](double x, double) { return 1.0 + slope * x; });
    const FaceVectorField F = flux_u(u, v, p);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double v_face = 0.5 * (v.at(i - 1, j) + v.at(i, j));
            CHECK(F.x(i, j) == doctest::Approx(-1.0 * v_face * slope).epsilon(1e-12));
        }
}

TEST_CASE("flux_u rejects nonpositive u and negative v") {
    const GridSpec g(8, 8, 1.0, 1.0);
    const ModelParams p(2.0, 0.01);
    ScalarField u(g, 1.0), v(g, 1.0);
    u.at(0, 0) = 0.0;
    CHECK_THROWS_AS(flux_u(u, v, p), std::invalid_argument);
    u.at(0, 0) = 1.0;
    v.at(0, 0) = -0.1;
    CHECK_THROWS_AS(flux_u(u, v, p), std::invalid_argument);
}

TEST_CASE("flux degeneracy: v = 0 shuts the flux off entirely") {
    const GridSpec g(16, 16, 1.0, 1.0);
    FieldSampler s;
    s.seed = 31;
    const ScalarField u = sample_field(s, g);
    CHECK(flux_u(u, ScalarField(g, 0.0), ModelParams(2.0, 0.01)).max_abs() == 0.0);
    // monotone vanishing as v shrinks
    double prev = std::numeric_limits<double>::infinity();
    for (double scale : {1.0, 1e-3, 1e-6, 1e-9}) {
        s.seed = 32;
        ScalarField v = sample_field(s, g);
        for (double& val : v.values) val *= scale;
        const double m = flux_u(u, v, ModelParams(2.0, 0.01)).max_abs();
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("rhs_u: homogeneous reduction to the logistic ODE") {
    const GridSpec g(8, 8, 1.0, 1.0);
    const ModelParams p(2.5, 0.01);
    const ScalarField r = rhs_u(ScalarField(g, 0.7), ScalarField(g, 2.0), p);
    for (double v : r.values) CHECK(v == doctest::Approx(0.7 - 0.49).epsilon(1e-13));
    const ScalarField r1 = rhs_u(ScalarField(g, 1.0), ScalarField(g, 2.0), p);
    for (double v : r1.values) CHECK(std::fabs(v) < 1e-14);
}

TEST_CASE("rhs_u transport conservation: integral matches the logistic budget") {
    const GridSpec g(24, 24, 1.0, 1.0);
    FieldSampler su, sv;
    su.seed = 41;
    sv.seed = 42;
    for (double l : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const ScalarField u = sample_field(su, g);
        const ScalarField v = sample_field(sv, g);
        const ModelParams p(l, 0.01);
        const double lhs = integrate(rhs_u(u, v, p));
        ScalarField logistic = u;
        for (double& x : logistic.values) x = x - x * x;
        const double rhs = integrate(logistic);
        const double scale = flux_u(u, v, p).max_abs() * g.area() + std::fabs(rhs) + 1.0;
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("rhs_v: homogeneous values and the sine Laplacian oracle") {
    const GridSpec g(256, 4, 1.0, 1.0);
    SUBCASE("u = 0 limit, constant v") {
        const ScalarField r = rhs_v(ScalarField(g, 1e-300), ScalarField(g, 3.0));
        for (double v : r.values) CHECK(std::fabs(v) < 1e-290);
    }
    SUBCASE("u = 1, constant v = c gives -c") {
        const ScalarField r = rhs_v(ScalarField(g, 1.0), ScalarField(g, 2.5));
        for (double v : r.values) CHECK(v == doctest::Approx(-2.5).epsilon(1e-13));
    }
    SUBCASE("u -> 0, v = sin mode tracks the analytic Laplacian") {
        const ScalarField u(g, 1e-300);
        const ScalarField v =
            make_field(g, [](double x, double) { return 2.0 + std::sin(2.0 * M_PI * x); });
        const ScalarField r = rhs_v(u, v);
        for (int i = 8; i < g.nx - 8; ++i) {
            const double exact = -4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * g.cell_x(i));
            if (std::fabs(exact) > 4.0)
                CHECK(r.at(i, 2) == doctest::Approx(exact).epsilon(0.02));
        }
    }
}
