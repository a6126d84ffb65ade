#ifndef DGT_TEST_SUPPORT_HPP
#define DGT_TEST_SUPPORT_HPP

#include "dgt/grid.hpp"
#include "dgt/model.hpp"
#include "dgt/stepper.hpp"

#include <cmath>
#include <functional>

namespace dgt::testing {

inline ScalarField make_field(const GridSpec& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = f(g.cell_x(i), g.cell_y(j));
    return out;
}

// Closed forms for spatially homogeneous data: u' = u - u^2, v' = -u v.
inline double logistic_u(double u0, double t) {
    const double et = std::exp(t);
    return u0 * et / (1.0 - u0 + u0 * et);
}
inline double homogeneous_v(double u0, double v0, double t) {
    return v0 / (1.0 - u0 + u0 * std::exp(t));
}

// Smooth Neumann-compatible exact solution with compensating sources for
// both equations; all derivatives are closed-form.
struct ManufacturedSolution {
    double l = 2.0;
    double au = 0.25, av = 0.2;

    double u(double x, double y, double t) const {
        return 1.0 + au * std::exp(-t) * std::cos(M_PI * x) * std::cos(M_PI * y);
    }
    double v(double x, double y, double t) const {
        return 1.2 + av * std::exp(-t) * std::cos(2.0 * M_PI * x) * std::cos(M_PI * y);
    }

    // forcing f_u = u_t - [div(u^(l-1) v grad u) - div(u^l v grad v) + u - u^2]
    double fu(double x, double y, double t) const {
        const double cu = au * std::exp(-t), cv = av * std::exp(-t);
        const double sx = std::sin(M_PI * x), cx = std::cos(M_PI * x);
        const double sy = std::sin(M_PI * y), cy = std::cos(M_PI * y);
        const double s2x = std::sin(2.0 * M_PI * x), c2x = std::cos(2.0 * M_PI * x);

        const double U = 1.0 + cu * cx * cy;
        const double Ut = -cu * cx * cy;
        const double Ux = -M_PI * cu * sx * cy;
        const double Uy = -M_PI * cu * cx * sy;
        const double Uxx = -M_PI * M_PI * cu * cx * cy;
        const double Uyy = Uxx;

        const double V = 1.2 + cv * c2x * cy;
        const double Vx = -2.0 * M_PI * cv * s2x * cy;
        const double Vy = -M_PI * cv * c2x * sy;
        const double Vxx = -4.0 * M_PI * M_PI * cv * c2x * cy;
        const double Vyy = -M_PI * M_PI * cv * c2x * cy;

        const double Ulm1 = std::pow(U, l - 1.0);
        const double Ulm2 = std::pow(U, l - 2.0);
        const double Ul = std::pow(U, l);

        const double ax = (l - 1.0) * Ulm2 * Ux * V + Ulm1 * Vx;
        const double ay = (l - 1.0) * Ulm2 * Uy * V + Ulm1 * Vy;
        const double diff = ax * Ux + ay * Uy + Ulm1 * V * (Uxx + Uyy);

        const double bx = l * Ulm1 * Ux * V + Ul * Vx;
        const double by = l * Ulm1 * Uy * V + Ul * Vy;
        const double taxis = bx * Vx + by * Vy + Ul * V * (Vxx + Vyy);

        return Ut - (diff - taxis + U - U * U);
    }

    // forcing f_v = v_t - [lap v - u v]
    double fv(double x, double y, double t) const {
        const double cu = au * std::exp(-t), cv = av * std::exp(-t);
        const double cx = std::cos(M_PI * x), cy = std::cos(M_PI * y);
        const double c2x = std::cos(2.0 * M_PI * x);
        const double U = 1.0 + cu * cx * cy;
        const double V = 1.2 + cv * c2x * cy;
        const double Vt = -cv * c2x * cy;
        const double Vxx = -4.0 * M_PI * M_PI * cv * c2x * cy;
        const double Vyy = -M_PI * M_PI * cv * c2x * cy;
        return Vt - (Vxx + Vyy - U * V);
    }

    ScalarField u_field(const GridSpec& g, double t) const {
        return make_field(g, [&](double x, double y) { return u(x, y, t); });
    }
    ScalarField v_field(const GridSpec& g, double t) const {
        return make_field(g, [&](double x, double y) { return v(x, y, t); });
    }
    Forcing forcing(const GridSpec& g) const {
        Forcing f;
        f.fu = [this, g](double t) {
            return make_field(g, [&](double x, double y) { return fu(x, y, t); });
        };
        f.fv = [this, g](double t) {
            return make_field(g, [&](double x, double y) { return fv(x, y, t); });
        };
        return f;
    }
};

inline double l2_error(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double d = a.values[k] - b.values[k];
        s += d * d;
    }
    return std::sqrt(a.grid.cell_area() * s);
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        m = std::fmax(m, std::fabs(a.values[k] - b.values[k]));
    return m;
}

} // namespace dgt::testing

#endif
