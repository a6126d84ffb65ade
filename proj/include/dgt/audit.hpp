#ifndef DGT_AUDIT_HPP
#define DGT_AUDIT_HPP

#include "dgt/functionals.hpp"
#include "dgt/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace dgt {

// One audited bound: pass iff margin <= tolerance. A negative margin means
// the bound held with room to spare. constants records every number the
// verdict depended on so failures are attributable.
struct AuditVerdict {
    std::string id;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> constants;

    static AuditVerdict make(std::string id, double margin, double tolerance,
                             std::map<std::string, double> constants = {});
};

// Constants the audits need; persisted next to the series so offline audits
// reproduce online verdicts byte for byte.
struct AuditConsts {
    double m_star = 0.0;   // integral of (u0 + 1)
    double v0_linf = 0.0;  // max of v0
    double v0_int = 0.0;   // integral of v0
    double omega_area = 0.0;
    double T = 0.0;
    double hx = 0.0, hy = 0.0;
    double dt_avg = 0.0;
    double l = 1.0, eps = 1e-2;
    double b = 1.0;       // dissipation-audit knob
    double c_aux = 10.0;  // stands in for the non-constructive constant c
    double c_slack = 10.0;
    double rel_tol = 1e-6;
    double vmax_tol = 1e-9;
    double l2_rel_tol = 1e-3;
    double band = 0.25;   // eps-uniformity relative spread
    double slack_scale() const { return std::max(hx, hy) * std::max(hx, hy) + dt_avg; }
};

void write_consts(const std::string& path, const AuditConsts& c);
AuditConsts read_consts(const std::string& path);

// sup-norm maximum principle, mass bound, the two space-time budgets.
std::vector<AuditVerdict> audit_static_bounds(const FunctionalSeries& series,
                                              const AuditConsts& c);

// d/dt int u^p plus its gradient dissipation against
//   A sqrt(int u^(2(l+p-1)) v^2) [sqrt(int |grad v|^4/v^4) + sqrt(int |grad v|^4/v^3)]
//   + p int u^p - p int u^(p+1),
// A = max{ p(p-1)/(2(l+p-1)^2), (p(p-1)/2) |v0|_inf^(3/2) }. The derivative
// is the instantaneous chain-rule rate stored in the series, so spatially
// constant states reduce the check to exact scalar calculus.
AuditVerdict check_Lp_differential_inequality(const FunctionalSeries& series, double p_exp,
                                              const AuditConsts& c);

// The l-case dissipation inequality of the energy functional; the verdict
// also records the smallest c_aux that would make the check pass.
AuditVerdict check_G_dissipation(const FunctionalSeries& series, const AuditConsts& c,
                                 double b, double c_aux);

// Cross-eps finiteness and spread of sup_t values for the uniform-in-eps
// functionals. All series must share identical sample times.
std::vector<AuditVerdict> audit_uniform_in_eps(const std::vector<FunctionalSeries>& multi,
                                               const std::vector<double>& eps_values,
                                               double band);

// Full per-run audit set (static bounds + Lp checks for every p column +
// G dissipation) in report order.
std::vector<AuditVerdict> audit_run(const FunctionalSeries& series, const AuditConsts& c);

// Structured text report, one block per bound; byte-deterministic.
std::string render_report(const std::vector<AuditVerdict>& verdicts);
bool all_pass(const std::vector<AuditVerdict>& verdicts);

} // namespace dgt

#endif
