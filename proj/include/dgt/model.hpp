#ifndef DGT_MODEL_HPP
#define DGT_MODEL_HPP

#include "dgt/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgt {

// Degeneracy exponent l >= 1 and regularization level eps in (0,1].
struct ModelParams {
    double l = 2.0;
    double eps = 1e-2;

    ModelParams() = default;
    ModelParams(double l_, double eps_);
};

enum class AdmissibilityClass { l_below_3, l_equal_3, l_above_3 };

struct AdmissibilityReport {
    bool accepted = false;
    AdmissibilityClass cls = AdmissibilityClass::l_below_3;
    double min_u0 = 0.0;
    double min_v0 = 0.0;
    std::optional<double> ln_u0_integral;    // l = 3 only; -inf when a cell is zero
    std::optional<double> u0_pow_integral;   // l > 3 only; +inf when a cell is zero
    std::vector<std::string> flags;
    std::string rejection;
};

// Checks u0 >= 0 (hard) and v0 > 0 (hard), and evaluates the class-specific
// integral conditions, flagging divergent cells rather than rejecting them:
// the eps shift heals zero cells of u0.
AdmissibilityReport validate_initial_data(const ScalarField& u0, const ScalarField& v0, double l);

struct InitialData {
    ScalarField u0; // nonnegative
    ScalarField v0; // strictly positive
    AdmissibilityClass cls = AdmissibilityClass::l_below_3;

    // Validates and throws on hard rejection.
    static InitialData validated(ScalarField u0, ScalarField v0, double l);
};

// The discrete analogue of the regularized pair (u_eps, v_eps) at time t.
struct SimState {
    ScalarField u; // strictly positive
    ScalarField v; // strictly positive
    double t = 0.0;
};

// Face flux of the u equation,
//   F = a_f (grad u)_f - b_f (grad v)_f,
// with a_f the arithmetic face mean of u^(l-1) v and b_f the donor-cell
// (upwind w.r.t. the sign of (grad v)_f) value of u^l times the face mean
// of v. Boundary faces are zero. Requires u > 0; v may touch zero, which
// shuts the flux off.
FaceVectorField flux_u(const ScalarField& u, const ScalarField& v, const ModelParams& p);

// divergence(flux_u) + u - u^2.
ScalarField rhs_u(const ScalarField& u, const ScalarField& v, const ModelParams& p);

// neumann_laplacian(v) - u v.
ScalarField rhs_v(const ScalarField& u, const ScalarField& v);

// u^a elementwise via exp(a ln u) for positive u (a may be fractional).
ScalarField field_pow(const ScalarField& u, double a);

} // namespace dgt

#endif
