#include "dgt/model.hpp"
#include "dgt/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dgt {

ModelParams::ModelParams(double l_, double eps_) : l(l_), eps(eps_) {
    if (!(l >= 1.0)) throw std::invalid_argument("ModelParams: l must be >= 1");
    if (!(eps > 0.0) || !(eps <= 1.0))
        throw std::invalid_argument("ModelParams: eps must lie in (0,1]");
}

AdmissibilityReport validate_initial_data(const ScalarField& u0, const ScalarField& v0, double l) {
    if (!(u0.grid == v0.grid))
        throw std::invalid_argument("validate_initial_data: u0 and v0 live on different grids");
    if (!(l >= 1.0)) throw std::invalid_argument("validate_initial_data: l must be >= 1");
    u0.validate("u0");
    v0.validate("v0");

    AdmissibilityReport rep;
    rep.cls = l < 3.0 ? AdmissibilityClass::l_below_3
            : l == 3.0 ? AdmissibilityClass::l_equal_3
                       : AdmissibilityClass::l_above_3;
    rep.min_u0 = u0.min();
    rep.min_v0 = v0.min();

    if (rep.min_u0 < 0.0) {
        rep.rejection = "u0 must be nonnegative";
        return rep;
    }
    if (!(rep.min_v0 > 0.0)) {
        rep.rejection = "v0 must be strictly positive";
        return rep;
    }

    const auto& g = u0.grid;
    if (rep.cls == AdmissibilityClass::l_equal_3) {
        double s = 0.0;
        bool divergent = false;
        for (int j = 0; j < g.ny && !divergent; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double u = u0.at(i, j);
                if (u == 0.0) {
                    std::ostringstream os;
                    os << "ln u0 integral divergent at cell (" << i << "," << j << ")";
                    rep.flags.push_back(os.str());
                    divergent = true;
                    break;
                }
                s += std::log(u);
            }
        rep.ln_u0_integral = divergent ? -std::numeric_limits<double>::infinity()
                                       : g.cell_area() * s;
    } else if (rep.cls == AdmissibilityClass::l_above_3) {
        double s = 0.0;
        bool divergent = false;
        for (int j = 0; j < g.ny && !divergent; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double u = u0.at(i, j);
                if (u == 0.0) {
                    std::ostringstream os;
                    os << "u0^(3-l) integral divergent at cell (" << i << "," << j << ")";
                    rep.flags.push_back(os.str());
                    divergent = true;
                    break;
                }
                s += std::pow(u, 3.0 - l);
            }
        rep.u0_pow_integral = divergent ? std::numeric_limits<double>::infinity()
                                        : g.cell_area() * s;
    }

    rep.accepted = true;
    return rep;
}

InitialData InitialData::validated(ScalarField u0, ScalarField v0, double l) {
    const AdmissibilityReport rep = validate_initial_data(u0, v0, l);
    if (!rep.accepted)
        throw std::invalid_argument("initial data rejected: " + rep.rejection);
    InitialData d;
    d.u0 = std::move(u0);
    d.v0 = std::move(v0);
    d.u0.declared_sign = Sign::nonnegative;
    d.v0.declared_sign = Sign::positive;
    d.cls = rep.cls;
    return d;
}

ScalarField field_pow(const ScalarField& u, double a) {
    ScalarField out = u;
    if (a == 0.0) {
        for (double& v : out.values) v = 1.0;
        return out;
    }
    if (a == 1.0) return out;
    for (double& v : out.values) v = std::exp(a * std::log(v));
    return out;
}

namespace {

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

// Donor-cell value of w with a minmod-limited half-slope correction
// (MUSCL): upwind-biased, second order on smooth data, and the face value
// stays within the local cell range so nonnegativity of w is preserved.
// near = neighbor across the face, far = donor's opposite neighbor
// (linear indices; far < 0 drops to the plain donor value).
double upwind_face_value(const std::vector<double>& w, long donor, long far, long near) {
    const double wd = w[static_cast<std::size_t>(donor)];
    if (far < 0) return wd;
    const double toward = w[static_cast<std::size_t>(near)] - wd;
    const double away = wd - w[static_cast<std::size_t>(far)];
    return wd + 0.5 * minmod(toward, away);
}

} // namespace

FaceVectorField flux_u(const ScalarField& u, const ScalarField& v, const ModelParams& p) {
    if (!(u.grid == v.grid)) throw std::invalid_argument("flux_u: grid mismatch");
    u.validate("u");
    v.validate("v");
    if (!(u.min() > 0.0)) throw std::invalid_argument("flux_u: u must be strictly positive");
    if (v.min() < 0.0) throw std::invalid_argument("flux_u: v must be nonnegative");

    const auto& g = u.grid;
    const FaceVectorField gu = face_gradient(u);
    const FaceVectorField gv = face_gradient(v);
    const ScalarField ulm1 = field_pow(u, p.l - 1.0); // u^(l-1)
    const ScalarField ul = field_pow(u, p.l);         // u^l
    const long nx = g.nx;

    FaceVectorField F(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const long L = static_cast<long>(g.idx(i - 1, j)), R = static_cast<long>(g.idx(i, j));
            const double a = 0.5 * (ulm1.values[L] * v.values[L] + ulm1.values[R] * v.values[R]);
            const double dv = gv.x(i, j);
            double up;
            if (dv > 0.0)
                up = upwind_face_value(ul.values, L, i >= 2 ? L - 1 : -1, R);
            else if (dv < 0.0)
                up = upwind_face_value(ul.values, R, i + 1 < nx ? R + 1 : -1, L);
            else
                up = 0.5 * (ul.values[L] + ul.values[R]);
            const double b = up * 0.5 * (v.values[L] + v.values[R]);
            F.x(i, j) = a * gu.x(i, j) - b * dv;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const long L = static_cast<long>(g.idx(i, j - 1)), R = static_cast<long>(g.idx(i, j));
            const double a = 0.5 * (ulm1.values[L] * v.values[L] + ulm1.values[R] * v.values[R]);
            const double dv = gv.y(i, j);
            double up;
            if (dv > 0.0)
                up = upwind_face_value(ul.values, L, j >= 2 ? L - nx : -1, R);
            else if (dv < 0.0)
                up = upwind_face_value(ul.values, R, j + 2 <= g.ny - 1 ? R + nx : -1, L);
            else
                up = 0.5 * (ul.values[L] + ul.values[R]);
            const double b = up * 0.5 * (v.values[L] + v.values[R]);
            F.y(i, j) = a * gu.y(i, j) - b * dv;
        }
    return F;
}

ScalarField rhs_u(const ScalarField& u, const ScalarField& v, const ModelParams& p) {
    ScalarField r = divergence(flux_u(u, v, p));
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        const double uk = u.values[k];
        r.values[k] += uk - uk * uk;
    }
    return r;
}

ScalarField rhs_v(const ScalarField& u, const ScalarField& v) {
    if (!(u.grid == v.grid)) throw std::invalid_argument("rhs_v: grid mismatch");
    ScalarField r = neumann_laplacian(v);
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] -= u.values[k] * v.values[k];
    return r;
}

} // namespace dgt
