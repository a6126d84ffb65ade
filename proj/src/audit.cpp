#include "dgt/audit.hpp"
#include "dgt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dgt {

AuditVerdict AuditVerdict::make(std::string id, double margin, double tolerance,
                                std::map<std::string, double> constants) {
    AuditVerdict v;
    v.id = std::move(id);
    v.margin = margin;
    v.tolerance = tolerance;
    v.pass = margin <= tolerance;
    v.constants = std::move(constants);
    return v;
}

void write_consts(const std::string& path, const AuditConsts& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_consts: cannot open " + path);
    const auto put = [&](const char* k, double v) { os << k << " = " << format_double(v) << '\n'; };
    put("m_star", c.m_star);
    put("v0_linf", c.v0_linf);
    put("v0_int", c.v0_int);
    put("omega_area", c.omega_area);
    put("T", c.T);
    put("hx", c.hx);
    put("hy", c.hy);
    put("dt_avg", c.dt_avg);
    put("l", c.l);
    put("eps", c.eps);
    put("b", c.b);
    put("c_aux", c.c_aux);
    put("c_slack", c.c_slack);
    put("rel_tol", c.rel_tol);
    put("vmax_tol", c.vmax_tol);
    put("l2_rel_tol", c.l2_rel_tol);
    put("band", c.band);
}

AuditConsts read_consts(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("read_consts: cannot open " + path);
    AuditConsts c;
    std::map<std::string, double*> slots = {
        {"m_star", &c.m_star},   {"v0_linf", &c.v0_linf}, {"v0_int", &c.v0_int},
        {"omega_area", &c.omega_area},
        {"T", &c.T},             {"hx", &c.hx},           {"hy", &c.hy},
        {"dt_avg", &c.dt_avg},   {"l", &c.l},             {"eps", &c.eps},
        {"b", &c.b},             {"c_aux", &c.c_aux},     {"c_slack", &c.c_slack},
        {"rel_tol", &c.rel_tol}, {"vmax_tol", &c.vmax_tol},
        {"l2_rel_tol", &c.l2_rel_tol}, {"band", &c.band}};
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("consts: missing '='", line_no);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        const auto it = slots.find(key);
        if (it == slots.end()) throw ConfigError("consts: unknown key '" + key + "'", line_no);
        try {
            *it->second = std::stod(val);
        } catch (const std::exception&) {
            throw ConfigError("consts: bad number '" + val + "'", line_no);
        }
    }
    return c;
}

namespace {

double max_column(const FunctionalSeries& s, const std::string& id) {
    const std::size_t c = s.col(id);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& row : s.rows) m = std::fmax(m, row[c]);
    return m;
}

void require_nonempty(const FunctionalSeries& s, const char* who) {
    if (s.times.empty()) throw std::invalid_argument(std::string(who) + ": empty series");
}

} // namespace

std::vector<AuditVerdict> audit_static_bounds(const FunctionalSeries& series,
                                              const AuditConsts& c) {
    require_nonempty(series, "audit_static_bounds");
    if (!(c.m_star > 0.0) || !(c.v0_linf > 0.0) || !(c.v0_int > 0.0))
        throw std::invalid_argument("audit_static_bounds: missing constants (m_star, v0_linf, v0_int)");

    std::vector<AuditVerdict> out;
    const double h = std::max(c.hx, c.hy);

    {
        const double sup_v = max_column(series, "sup_v");
        out.push_back(AuditVerdict::make(
            "vmax_le_v0linf", sup_v - c.v0_linf, c.vmax_tol,
            {{"v0_linf", c.v0_linf}, {"sup_t_sup_v", sup_v}}));
    }
    {
        const double sup_mass = max_column(series, "mass");
        const double tol = c.rel_tol * c.m_star + c.c_slack * h * h;
        out.push_back(AuditVerdict::make(
            "mass_le_mstar", sup_mass - c.m_star, tol,
            {{"m_star", c.m_star}, {"sup_t_mass", sup_mass}, {"c_slack", c.c_slack}, {"h", h}}));
    }
    {
        const double budget = trapezoid(series, "l2u");
        const double bound = (c.T + 1.0) * c.m_star;
        out.push_back(AuditVerdict::make(
            "l2_budget_le_T1_mstar", budget - bound, c.l2_rel_tol * bound,
            {{"bound", bound}, {"budget", budget}, {"T", c.T}, {"m_star", c.m_star}}));
    }
    {
        const double budget = trapezoid(series, "uv_budget");
        out.push_back(AuditVerdict::make(
            "uv_budget_le_v0int", budget - c.v0_int, c.rel_tol * c.v0_int,
            {{"v0_int", c.v0_int}, {"budget", budget}}));
    }
    return out;
}

AuditVerdict check_Lp_differential_inequality(const FunctionalSeries& series, double p_exp,
                                              const AuditConsts& c) {
    require_nonempty(series, "check_Lp_differential_inequality");
    if (!(p_exp >= 2.0))
        throw std::invalid_argument("check_Lp_differential_inequality: p must be >= 2");
    char tag[32];
    std::snprintf(tag, sizeof tag, "%g", p_exp);
    const std::string t = tag;
    for (const char* col : {"lp_", "lp1_", "aux_lp_", "lp_dissip_", "dlp_dt_"})
        if (!series.has(col + t))
            throw std::invalid_argument(std::string("check_Lp_differential_inequality: series lacks "
                                                    "auxiliary column ") + col + t);

    const double l = c.l;
    const double denom = (l + p_exp - 1.0) * (l + p_exp - 1.0);
    const double A = std::max(0.5 * p_exp * (p_exp - 1.0) / denom,
                              0.5 * p_exp * (p_exp - 1.0) * std::pow(c.v0_linf, 1.5));
    const double dis_coef = p_exp * (p_exp - 1.0) / denom;

    double margin = -std::numeric_limits<double>::infinity();
    double scale = 0.0;
    const std::size_t n_rows = series.size();
    for (std::size_t n = 0; n < n_rows; ++n) {
        const double lhs = series.value(n, "dlp_dt_" + t) + dis_coef * series.value(n, "lp_dissip_" + t);
        const double aux = std::sqrt(std::fmax(series.value(n, "aux_lp_" + t), 0.0));
        const double rhs = A * aux * (std::sqrt(std::fmax(series.value(n, "grad4v"), 0.0)) +
                                      std::sqrt(std::fmax(series.value(n, "grad4"), 0.0))) +
                           p_exp * series.value(n, "lp_" + t) -
                           p_exp * series.value(n, "lp1_" + t);
        margin = std::fmax(margin, lhs - rhs);
        scale = std::fmax(scale, std::fabs(lhs) + std::fabs(rhs));
    }
    const double tol = c.c_slack * c.slack_scale() * scale;
    return AuditVerdict::make("lp_diff_ineq_p" + t, margin, tol,
                              {{"A", A}, {"p", p_exp}, {"l", l}, {"scale", scale},
                               {"c_slack", c.c_slack}, {"slack_hdt", c.slack_scale()}});
}

AuditVerdict check_G_dissipation(const FunctionalSeries& series, const AuditConsts& c,
                                 double b, double c_aux) {
    require_nonempty(series, "check_G_dissipation");
    if (!(b > 0.0)) throw std::invalid_argument("check_G_dissipation: b must be positive");
    if (!(c.omega_area > 0.0))
        throw std::invalid_argument("check_G_dissipation: omega_area constant missing");
    const GCase gc = g_case(c.l);
    const double l = c.l;

    double margin = -std::numeric_limits<double>::infinity();
    double c_fit = 0.0;
    double scale = 0.0;
    const double e1 = std::exp(1.0);
    const double omega_v0 = c.omega_area * c.v0_linf;
    for (std::size_t n = 0; n < series.size(); ++n) {
        double dG = series.value(n, "dgrad4_dt");
        switch (gc) {
            case GCase::generic:
                dG += 4.0 * b / ((l - 3.0) * (l - 2.0)) * series.value(n, "du3ml_dt");
                break;
            case GCase::middle:
                dG += -4.0 * b / ((3.0 - l) * (l - 2.0)) * series.value(n, "du3ml_dt");
                break;
            case GCase::l_two:
                dG += 4.0 * b * series.value(n, "dulnu_dt");
                break;
            case GCase::l_three:
                dG += -4.0 * b * series.value(n, "dlnu_dt");
                break;
        }
        double lhs = dG + b * series.value(n, "v_gradu2") + series.value(n, "u_grad4");
        double rhs0 = 4.0 * b * series.value(n, "u2v_gradv2"); // c_aux-free part
        switch (gc) {
            case GCase::generic:
                rhs0 += -4.0 * b / (l - 2.0) * series.value(n, "u3ml") +
                        4.0 * b / (l - 2.0) * series.value(n, "u4ml");
                break;
            case GCase::middle:
                // the derivation keeps u^(4-l) here (a negative u^(3-l) term
                // is dropped along the way), so the bound is one-sided
                rhs0 += 4.0 * b / (l - 2.0) * series.value(n, "u4ml");
                break;
            case GCase::l_two:
                lhs += 4.0 * b * series.value(n, "l2u");
                rhs0 += 4.0 * b * (e1 + 1.0) / e1 * series.value(n, "mass") +
                        4.0 * b * series.value(n, "ulnu");
                break;
            case GCase::l_three:
                rhs0 += 4.0 * b * series.value(n, "mass");
                break;
        }
        const double rhs = rhs0 + c_aux * omega_v0;
        margin = std::fmax(margin, lhs - rhs);
        c_fit = std::fmax(c_fit, (lhs - rhs0) / omega_v0);
        scale = std::fmax(scale, std::fabs(lhs) + std::fabs(rhs));
    }
    const double tol = c.c_slack * c.slack_scale() * scale;
    return AuditVerdict::make("g_dissipation", margin, tol,
                              {{"b", b}, {"c_aux", c_aux}, {"c_fit", c_fit}, {"l", l},
                               {"scale", scale}, {"c_slack", c.c_slack},
                               {"slack_hdt", c.slack_scale()}});
}

std::vector<AuditVerdict> audit_uniform_in_eps(const std::vector<FunctionalSeries>& multi,
                                               const std::vector<double>& eps_values,
                                               double band) {
    if (multi.size() < 3)
        throw std::invalid_argument("audit_uniform_in_eps: need at least 3 eps levels");
    if (multi.size() != eps_values.size())
        throw std::invalid_argument("audit_uniform_in_eps: eps list size mismatch");
    for (std::size_t k = 1; k < multi.size(); ++k)
        if (multi[k].times != multi[0].times)
            throw std::invalid_argument("audit_uniform_in_eps: mismatched sampling grids");

    struct Item { const char* id; bool invert; };
    // invert: audit sup_t 1/inf_v instead of the raw column
    const Item items[] = {{"grad4", false}, {"l2u", false}, {"l4u", false},
                          {"ulog", false},  {"inf_v", true}};
    std::vector<AuditVerdict> out;
    for (const auto& item : items) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        bool finite = true;
        std::map<std::string, double> consts;
        for (std::size_t k = 0; k < multi.size(); ++k) {
            double sup = -std::numeric_limits<double>::infinity();
            const std::size_t cidx = multi[k].col(item.id);
            for (const auto& row : multi[k].rows) {
                const double v = item.invert ? 1.0 / row[cidx] : row[cidx];
                sup = std::fmax(sup, v);
            }
            if (!std::isfinite(sup)) finite = false;
            lo = std::fmin(lo, sup);
            hi = std::fmax(hi, sup);
            consts["sup_eps" + std::to_string(k)] = sup;
            consts["eps" + std::to_string(k)] = eps_values[k];
        }
        const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
        consts["spread"] = spread;
        consts["band"] = band;
        const std::string id = std::string("uniform_in_eps_") + (item.invert ? "sup_inv_v" : item.id);
        const double margin = finite ? spread - band : std::numeric_limits<double>::infinity();
        out.push_back(AuditVerdict::make(id, margin, 0.0, std::move(consts)));
    }
    return out;
}

std::vector<AuditVerdict> audit_run(const FunctionalSeries& series, const AuditConsts& c) {
    std::vector<AuditVerdict> out = audit_static_bounds(series, c);
    for (const auto& id : series.ids)
        if (id.rfind("lp_", 0) == 0 && id.find("dissip") == std::string::npos) {
            const double p_exp = std::stod(id.substr(3));
            if (p_exp >= 2.0)
                out.push_back(check_Lp_differential_inequality(series, p_exp, c));
        }
    out.push_back(check_G_dissipation(series, c, c.b, c.c_aux));
    return out;
}

std::string render_report(const std::vector<AuditVerdict>& verdicts) {
    std::ostringstream os;
    for (const auto& v : verdicts) {
        os << "[bound] " << v.id << '\n';
        os << "  margin    = " << format_double(v.margin) << '\n';
        os << "  tolerance = " << format_double(v.tolerance) << '\n';
        for (const auto& [k, val] : v.constants)
            os << "  const " << k << " = " << format_double(val) << '\n';
        os << "  verdict   : " << (v.pass ? "PASS" : "FAIL") << '\n';
    }
    std::size_t passed = 0;
    for (const auto& v : verdicts) passed += v.pass ? 1 : 0;
    os << "summary: " << passed << "/" << verdicts.size() << " bounds passed\n";
    return os.str();
}

bool all_pass(const std::vector<AuditVerdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const AuditVerdict& v) { return v.pass; });
}

} // namespace dgt
