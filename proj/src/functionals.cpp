#include "dgt/functionals.hpp"
#include "dgt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dgt {

namespace {
const double kE = std::exp(1.0);

std::string p_tag(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}
} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool FunctionalSeries::has(const std::string& id) const {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::size_t FunctionalSeries::col(const std::string& id) const {
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end())
        throw std::invalid_argument("FunctionalSeries: missing column '" + id + "'");
    return static_cast<std::size_t>(it - ids.begin());
}

std::vector<double> FunctionalSeries::column(const std::string& id) const {
    const std::size_t c = col(id);
    std::vector<double> out(rows.size());
    for (std::size_t n = 0; n < rows.size(); ++n) out[n] = rows[n][c];
    return out;
}

std::vector<std::string> functional_ids(const EvalOptions& opt) {
    std::vector<std::string> ids = {
        "mass", "massv", "l2u", "l4u", "grad4", "grad4v", "dirichlet_entropy",
        "G", "ulog", "vt_l2", "inf_v", "sup_u", "sup_v", "sup_gradv",
        "uv_budget", "ulnu", "lnu", "u3ml", "u4ml",
        "v_gradu2", "u_grad4", "u2v_gradv2",
        "dgrad4_dt", "du3ml_dt", "dulnu_dt", "dlnu_dt"};
    for (double p : opt.p_list) {
        const std::string t = p_tag(p);
        ids.push_back("lp_" + t);
        ids.push_back("lp1_" + t);
        ids.push_back("up_grad2_" + t);
        ids.push_back("aux_lp_" + t);
        ids.push_back("lp_dissip_" + t);
        ids.push_back("dlp_dt_" + t);
    }
    return ids;
}

GCase g_case(double l) {
    if (l == 2.0) return GCase::l_two;
    if (l == 3.0) return GCase::l_three;
    if (std::fabs(l - 2.0) < 1e-9 || std::fabs(l - 3.0) < 1e-9)
        throw std::invalid_argument("energy functional: l within 1e-9 of a special case but not equal; "
                                    "case selection ambiguous");
    if (l < 2.0 || l > 3.0) return GCase::generic;
    return GCase::middle;
}

double eval_G(const SimState& s, const ModelParams& p, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("eval_G: b must be positive");
    if (!(s.u.min() > 0.0)) throw std::invalid_argument("eval_G: u must be positive");
    const GCase c = g_case(p.l);
    const auto& g = s.u.grid;
    const ScalarField gv = cell_gradient_sq(s.v);
    double grad4 = 0.0, moment = 0.0;
    for (std::size_t k = 0; k < s.u.values.size(); ++k) {
        const double u = s.u.values[k], v = s.v.values[k];
        grad4 += gv.values[k] * gv.values[k] / (v * v * v);
        switch (c) {
            case GCase::generic:
            case GCase::middle: moment += std::pow(u, 3.0 - p.l); break;
            case GCase::l_two: moment += u * std::log(u); break;
            case GCase::l_three: moment += std::log(u); break;
        }
    }
    grad4 *= g.cell_area();
    moment *= g.cell_area();
    switch (c) {
        case GCase::generic: return 4.0 * b / ((p.l - 3.0) * (p.l - 2.0)) * moment + grad4;
        case GCase::middle: return -4.0 * b / ((3.0 - p.l) * (p.l - 2.0)) * moment + grad4;
        case GCase::l_two: return 4.0 * b * moment + grad4;
        case GCase::l_three: return -4.0 * b * moment + grad4;
    }
    return 0.0; // unreachable
}

std::vector<double> eval_functionals(const SimState& s, const ModelParams& p,
                                     const EvalOptions& opt) {
    s.u.validate("u");
    s.v.validate("v");
    if (!(s.u.min() > 0.0) || !(s.v.min() > 0.0))
        throw std::invalid_argument("eval_functionals: state must be strictly positive");

    const auto& g = s.u.grid;
    const double cell = g.cell_area();
    const ScalarField ut = rhs_u(s.u, s.v, p);
    const ScalarField vt = rhs_v(s.u, s.v);
    const ScalarField gsv = cell_gradient_sq(s.v);
    const ScalarField gsu = cell_gradient_sq(s.u);
    const ScalarField gdot = cell_gradient_dot(s.v, vt); // grad v . grad v_t

    double mass = 0, massv = 0, l2u = 0, l4u = 0, grad4 = 0, grad4v = 0, entropy = 0;
    double ulog = 0, uv = 0, ulnu = 0, lnu = 0, u3ml = 0, u4ml = 0;
    double v_gradu2 = 0, u_grad4 = 0, u2v_gradv2 = 0;
    double dgrad4_dt = 0, du3ml_dt = 0, dulnu_dt = 0, dlnu_dt = 0;
    double inf_v = s.v.values[0], sup_u = s.u.values[0], sup_v = s.v.values[0], sup_gradv = 0;

    for (std::size_t k = 0; k < s.u.values.size(); ++k) {
        const double u = s.u.values[k], v = s.v.values[k];
        const double gvk = gsv.values[k], guk = gsu.values[k];
        const double utk = ut.values[k], vtk = vt.values[k];
        const double v3 = v * v * v;
        mass += u;
        massv += v;
        l2u += u * u;
        l4u += u * u * u * u;
        grad4 += gvk * gvk / v3;
        grad4v += gvk * gvk / (v3 * v);
        entropy += gvk / v;
        const double lue = std::log(u + kE);
        ulog += u * u * lue * lue;
        uv += u * v;
        ulnu += u * std::log(u);
        lnu += std::log(u);
        u3ml += std::pow(u, 3.0 - p.l);
        u4ml += std::pow(u, 4.0 - p.l);
        v_gradu2 += v * guk;
        u_grad4 += u * gvk * gvk / v3;
        u2v_gradv2 += u * u * v * gvk;
        dgrad4_dt += 4.0 * gvk * gdot.values[k] / v3 - 3.0 * gvk * gvk * vtk / (v3 * v);
        du3ml_dt += (3.0 - p.l) * std::pow(u, 2.0 - p.l) * utk;
        dulnu_dt += (1.0 + std::log(u)) * utk;
        dlnu_dt += utk / u;
        inf_v = std::fmin(inf_v, v);
        sup_u = std::fmax(sup_u, u);
        sup_v = std::fmax(sup_v, v);
        sup_gradv = std::fmax(sup_gradv, gvk);
    }
    sup_gradv = std::sqrt(sup_gradv);

    // G is affine in the raw sums, so one cell-area scaling below covers it.
    double G;
    switch (g_case(p.l)) {
        case GCase::generic: G = 4.0 * opt.b / ((p.l - 3.0) * (p.l - 2.0)) * u3ml + grad4; break;
        case GCase::middle: G = -4.0 * opt.b / ((3.0 - p.l) * (p.l - 2.0)) * u3ml + grad4; break;
        case GCase::l_two: G = 4.0 * opt.b * ulnu + grad4; break;
        default: G = -4.0 * opt.b * lnu + grad4; break;
    }

    std::vector<double> row;
    row.reserve(26 + 6 * opt.p_list.size());
    row.push_back(cell * mass);
    row.push_back(cell * massv);
    row.push_back(cell * l2u);
    row.push_back(cell * l4u);
    row.push_back(cell * grad4);
    row.push_back(cell * grad4v);
    row.push_back(cell * entropy);
    row.push_back(cell * G);
    row.push_back(cell * ulog);
    row.push_back(0.0); // vt_l2, filled retroactively by the run driver
    row.push_back(inf_v);
    row.push_back(sup_u);
    row.push_back(sup_v);
    row.push_back(sup_gradv);
    row.push_back(cell * uv);
    row.push_back(cell * ulnu);
    row.push_back(cell * lnu);
    row.push_back(cell * u3ml);
    row.push_back(cell * u4ml);
    row.push_back(cell * v_gradu2);
    row.push_back(cell * u_grad4);
    row.push_back(cell * u2v_gradv2);
    row.push_back(cell * dgrad4_dt);
    row.push_back(cell * du3ml_dt);
    row.push_back(cell * dulnu_dt);
    row.push_back(cell * dlnu_dt);

    for (double pe : opt.p_list) {
        double lp = 0, lp1 = 0, upg = 0, aux = 0, dlp = 0;
        for (std::size_t k = 0; k < s.u.values.size(); ++k) {
            const double u = s.u.values[k], v = s.v.values[k];
            lp += std::pow(u, pe);
            lp1 += std::pow(u, pe + 1.0);
            upg += std::pow(u, pe + p.l - 3.0) * gsu.values[k];
            aux += std::pow(u, 2.0 * (p.l + pe - 1.0)) * v * v;
            dlp += pe * std::pow(u, pe - 1.0) * ut.values[k];
        }
        ScalarField w(g);
        const double ex = 0.5 * (p.l + pe - 1.0);
        for (std::size_t k = 0; k < w.values.size(); ++k)
            w.values[k] = std::pow(s.u.values[k], ex) * std::sqrt(s.v.values[k]);
        const double dissip = integrate(cell_gradient_sq(w));
        row.push_back(cell * lp);
        row.push_back(cell * lp1);
        row.push_back(cell * upg);
        row.push_back(cell * aux);
        row.push_back(dissip);
        row.push_back(cell * dlp);
    }
    return row;
}

void append_row(FunctionalSeries& series, const SimState& s, const ModelParams& p,
                const EvalOptions& opt) {
    if (series.ids.empty()) series.ids = functional_ids(opt);
    series.times.push_back(s.t);
    series.rows.push_back(eval_functionals(s, p, opt));
}

void write_series_csv(const std::string& path, const FunctionalSeries& series) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_series_csv: cannot open " + path);
    os << "time";
    for (const auto& id : series.ids) os << ',' << id;
    os << '\n';
    for (std::size_t n = 0; n < series.times.size(); ++n) {
        os << format_double(series.times[n]);
        for (double v : series.rows[n]) os << ',' << format_double(v);
        os << '\n';
    }
    if (!os) throw IoError("write_series_csv: short write to " + path);
}

FunctionalSeries read_series_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_series_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("series CSV: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    FunctionalSeries s;
    {
        std::istringstream hs(line);
        std::string tok;
        bool first = true;
        while (std::getline(hs, tok, ',')) {
            if (first) {
                if (tok != "time")
                    throw ConfigError("series CSV: first column must be 'time', got '" + tok + "'");
                first = false;
            } else {
                s.ids.push_back(tok);
            }
        }
        if (first) throw ConfigError("series CSV: missing header row");
    }
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError("series CSV: bad number '" + tok + "'", line_no);
            }
        }
        if (vals.size() != s.ids.size() + 1)
            throw ConfigError("series CSV: row has " + std::to_string(vals.size()) +
                                  " fields, expected " + std::to_string(s.ids.size() + 1),
                              line_no);
        s.times.push_back(vals[0]);
        s.rows.emplace_back(vals.begin() + 1, vals.end());
    }
    return s;
}

double trapezoid(const FunctionalSeries& series, const std::string& id) {
    const std::size_t c = series.col(id);
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 < series.times.size(); ++n)
        acc += 0.5 * (series.rows[n][c] + series.rows[n + 1][c]) *
               (series.times[n + 1] - series.times[n]);
    return acc;
}

} // namespace dgt
