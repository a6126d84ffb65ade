#include "dgt/audit.hpp"
#include "dgt/errors.hpp"
#include "dgt/stepper.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

using namespace dgt;

namespace {

Trajectory homogeneous_run(double u0, double v0, double l, double eps, double T, int samples) {
    const GridSpec g(8, 8, 1.0, 1.0);
    const ModelParams p(l, eps);
    const auto init = InitialData::validated(ScalarField(g, u0), ScalarField(g, v0), l);
    return run(p, init, T, uniform_samples(T, samples), StepControl{});
}

AuditConsts consts_for(const Trajectory& t, double u0, double v0, double l, double eps) {
    AuditConsts c;
    c.m_star = u0 + 1.0; // unit square, constant data
    c.v0_linf = v0;
    c.v0_int = v0;
    c.omega_area = 1.0;
    c.T = t.times.back();
    c.hx = c.hy = 1.0 / 8.0;
    c.dt_avg = t.dt_avg;
    c.l = l;
    c.eps = eps;
    return c;
}

} // namespace

TEST_CASE("audit_static_bounds: homogeneous run satisfies every bound") {
    const Trajectory t = homogeneous_run(1.0 - 1e-2, 1.0, 2.0, 1e-2, 1.0, 20);
    const AuditConsts c = consts_for(t, 1.0 - 1e-2, 1.0, 2.0, 1e-2);
    const auto verdicts = audit_static_bounds(t.series, c);
    REQUIRE(verdicts.size() == 4);
    for (const auto& v : verdicts) {
        CAPTURE(v.id);
        CHECK(v.pass);
    }
    // u0 = 1 on the unit square: m* = 2 and the mass stays at 1
    CHECK(verdicts[1].constants.at("m_star") == doctest::Approx(1.99).epsilon(1e-12));
}

TEST_CASE("audit_static_bounds: single-sample series passes vacuously") {
    const Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.0, 1);
    const AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    const auto verdicts = audit_static_bounds(t.series, c);
    for (const auto& v : verdicts) CHECK(v.pass);
}

TEST_CASE("audit_static_bounds: missing constants and empty series rejected") {
    const Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.0, 1);
    AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    c.m_star = 0.0;
    CHECK_THROWS_AS(audit_static_bounds(t.series, c), std::invalid_argument);
    FunctionalSeries empty;
    CHECK_THROWS_AS(audit_static_bounds(empty, consts_for(t, 0.5, 1.0, 2.0, 1e-2)),
                    std::invalid_argument);
}

TEST_CASE("audit_static_bounds: a forged mass violation fails the verdict") {
    Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.5, 10);
    AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    t.series.rows[3][t.series.col("mass")] = 100.0;
    const auto verdicts = audit_static_bounds(t.series, c);
    CHECK(!verdicts[1].pass);
    // tolerance monotonicity: enlarging the slack never flips pass -> fail
    AuditConsts loose = c;
    loose.c_slack = 1e6;
    const auto verdicts2 = audit_static_bounds(t.series, loose);
    for (std::size_t k = 0; k < verdicts.size(); ++k)
        if (verdicts[k].pass) CHECK(verdicts2[k].pass);
}

TEST_CASE("check_Lp: A constant arithmetic (p=2, l=2, |v0|=1)") {
    const Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.1, 5);
    AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    const AuditVerdict v = check_Lp_differential_inequality(t.series, 2.0, c);
    CHECK(v.constants.at("A") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("check_Lp: homogeneous states give equality to roundoff") {
    for (double l : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const Trajectory t = homogeneous_run(0.5, 1.0, l, 1e-2, 1.0, 20);
        AuditConsts c = consts_for(t, 0.5, 1.0, l, 1e-2);
        const AuditVerdict v = check_Lp_differential_inequality(t.series, 2.0, c);
        CAPTURE(l);
        CHECK(std::fabs(v.margin) <= 1e-8 * v.constants.at("scale"));
        CHECK(v.pass);
    }
}

TEST_CASE("check_Lp: missing auxiliary columns rejected") {
    const Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.1, 5);
    const AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    CHECK_THROWS_AS(check_Lp_differential_inequality(t.series, 3.0, c), std::invalid_argument);
    CHECK_THROWS_AS(check_Lp_differential_inequality(t.series, 1.5, c), std::invalid_argument);
}

TEST_CASE("check_G: homogeneous scalar calculus per case") {
    SUBCASE("generic and l>3 cases reduce to exact equality at c_aux = 0") {
        for (double l : {1.0, 1.5, 4.0}) {
            const Trajectory t = homogeneous_run(0.5, 1.0, l, 1e-2, 1.0, 20);
            AuditConsts c = consts_for(t, 0.5, 1.0, l, 1e-2);
            const AuditVerdict v = check_G_dissipation(t.series, c, 1.0, 0.0);
            CAPTURE(l);
            CHECK(std::fabs(v.margin) <= 1e-8 * v.constants.at("scale"));
        }
    }
    SUBCASE("l = 2, 2<l<3, and l = 3 dissipate strictly (one-sided bounds)") {
        for (double l : {2.0, 2.5, 3.0}) {
            const Trajectory t = homogeneous_run(0.5, 1.0, l, 1e-2, 1.0, 20);
            AuditConsts c = consts_for(t, 0.5, 1.0, l, 1e-2);
            const AuditVerdict v = check_G_dissipation(t.series, c, 1.0, 0.0);
            CAPTURE(l);
            CHECK(v.margin <= 1e-8 * v.constants.at("scale"));
        }
    }
    SUBCASE("margin is affine in b and c_fit is reported") {
        const Trajectory t = homogeneous_run(0.7, 1.0, 2.0, 1e-2, 1.0, 20);
        AuditConsts c = consts_for(t, 0.7, 1.0, 2.0, 1e-2);
        const double m1 = check_G_dissipation(t.series, c, 1.0, 0.0).margin;
        const double m2 = check_G_dissipation(t.series, c, 2.0, 0.0).margin;
        const double m3 = check_G_dissipation(t.series, c, 3.0, 0.0).margin;
        CHECK(m3 - m2 == doctest::Approx(m2 - m1).epsilon(1e-6));
        const AuditVerdict v = check_G_dissipation(t.series, c, 1.0, 5.0);
        CHECK(v.constants.count("c_fit") == 1);
        // with c_aux at least the fitted value the check passes
        const AuditVerdict v2 =
            check_G_dissipation(t.series, c, 1.0, v.constants.at("c_fit") + 1e-9);
        CHECK(v2.margin <= v2.tolerance);
    }
}

TEST_CASE("audit_uniform_in_eps: constant data against the scalar ODE oracle") {
    std::vector<FunctionalSeries> multi;
    const std::vector<double> eps = {0.1, 0.01, 0.001};
    const double u0 = 0.5, v0 = 1.0, T = 1.0;
    for (double e : eps) multi.push_back(homogeneous_run(u0, v0, 2.0, e, T, 10).series);

    SUBCASE("spreads match the oracle prediction and pass a derived band") {
        const auto verdicts = audit_uniform_in_eps(multi, eps, 0.5);
        REQUIRE(verdicts.size() == 5);
        // oracle: for constant data every audited functional is a scalar
        // function of the shifted logistic pair (u(t), v(t))
        const auto sup_of = [&](double shift, const std::function<double(double, double)>& f) {
            double sup = -1e300;
            for (int k = 0; k <= 2000; ++k) {
                const double t = T * k / 2000.0;
                sup = std::fmax(sup, f(dgt::testing::logistic_u(u0 + shift, t),
                                       dgt::testing::homogeneous_v(u0 + shift, v0, t)));
            }
            return sup;
        };
        const auto oracle_spread = [&](const std::function<double(double, double)>& f) {
            double lo = 1e300, hi = -1e300;
            for (double e : eps) {
                const double s = sup_of(e, f);
                lo = std::fmin(lo, s);
                hi = std::fmax(hi, s);
            }
            return hi > 0.0 ? (hi - lo) / hi : 0.0;
        };
        const std::map<std::string, std::function<double(double, double)>> fns = {
            {"uniform_in_eps_grad4", [](double, double) { return 0.0; }},
            {"uniform_in_eps_l2u", [](double u, double) { return u * u; }},
            {"uniform_in_eps_l4u", [](double u, double) { return u * u * u * u; }},
            {"uniform_in_eps_ulog",
             [](double u, double) {
                 const double w = std::log(u + std::exp(1.0));
                 return u * u * w * w;
             }},
            {"uniform_in_eps_sup_inv_v", [](double, double v) { return 1.0 / v; }},
        };
        for (const auto& v : verdicts) {
            CAPTURE(v.id);
            CHECK(v.pass);
            const double predicted = oracle_spread(fns.at(v.id));
            CHECK(v.constants.at("spread") == doctest::Approx(predicted).epsilon(0.02));
        }
    }
    SUBCASE("small eps shifts pass the default 25% band") {
        std::vector<FunctionalSeries> tight;
        const std::vector<double> eps2 = {0.02, 0.01, 0.005};
        for (double e : eps2) tight.push_back(homogeneous_run(u0, v0, 2.0, e, T, 10).series);
        for (const auto& v : audit_uniform_in_eps(tight, eps2, 0.25)) {
            CAPTURE(v.id);
            CHECK(v.pass);
        }
    }
    SUBCASE("single-eps input rejected") {
        const std::vector<FunctionalSeries> one = {multi[0]};
        CHECK_THROWS_AS(audit_uniform_in_eps(one, {0.1}, 0.25), std::invalid_argument);
    }
    SUBCASE("mismatched sampling grids rejected") {
        std::vector<FunctionalSeries> bad = multi;
        bad[2] = homogeneous_run(0.5, 1.0, 2.0, 0.001, 1.0, 11).series;
        CHECK_THROWS_AS(audit_uniform_in_eps(bad, eps, 0.25), std::invalid_argument);
    }
}

TEST_CASE("consts file round trip") {
    AuditConsts c;
    c.m_star = 1.75;
    c.v0_linf = 0.9;
    c.v0_int = 0.8;
    c.omega_area = 2.0;
    c.T = 2.0;
    c.hx = 1.0 / 64;
    c.hy = 1.0 / 32;
    c.dt_avg = 3.25e-5;
    c.l = 2.5;
    c.eps = 1e-3;
    c.b = 1.5;
    c.c_aux = 4.0;
    const std::string path = std::filesystem::temp_directory_path() / "dgt_consts_test.txt";
    write_consts(path, c);
    const AuditConsts r = read_consts(path);
    CHECK(r.m_star == c.m_star);
    CHECK(r.hy == c.hy);
    CHECK(r.dt_avg == c.dt_avg);
    CHECK(r.c_aux == c.c_aux);
    std::filesystem::remove(path);
}

TEST_CASE("report rendering is stable and carries verdicts") {
    const Trajectory t = homogeneous_run(0.5, 1.0, 2.0, 1e-2, 0.5, 10);
    const AuditConsts c = consts_for(t, 0.5, 1.0, 2.0, 1e-2);
    const auto verdicts = audit_run(t.series, c);
    const std::string r1 = render_report(verdicts);
    const std::string r2 = render_report(audit_run(t.series, c));
    CHECK(r1 == r2);
    CHECK(r1.find("[bound] vmax_le_v0linf") != std::string::npos);
    CHECK(r1.find("[bound] lp_diff_ineq_p2") != std::string::npos);
    CHECK(r1.find("[bound] g_dissipation") != std::string::npos);
    CHECK(all_pass(verdicts));
}
