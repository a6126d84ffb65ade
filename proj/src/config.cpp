#include "dgt/config.hpp"
#include "dgt/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace dgt {

ScalarField InitSpec::realize(const GridSpec& g) const {
    switch (kind) {
        case Kind::constant: {
            ScalarField f(g, value);
            return f;
        }
        case Kind::gaussian_bump: {
            ScalarField f(g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double dx = g.cell_x(i) - cx, dy = g.cell_y(j) - cy;
                    f.at(i, j) = floor + amplitude * std::exp(-(dx * dx + dy * dy) /
                                                              (2.0 * sigma * sigma));
                }
            return f;
        }
        case Kind::random_fourier: {
            FieldSampler s;
            s.seed = seed;
            s.modes = modes;
            s.floor = min;
            s.amp_lo = s.amp_hi = max - min;
            return sample_field(s, g);
        }
        case Kind::file: {
            ScalarField f = read_snapshot(path);
            if (!(f.grid == g))
                throw ConfigError("initial data snapshot " + path + " does not match the run grid");
            return f;
        }
    }
    throw ConfigError("unreachable init kind");
}

namespace {

struct Parser {
    std::map<std::string, std::string> kv;
    std::map<std::string, int> line_of;
    std::map<std::string, bool> used;

    static void trim(std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }

    explicit Parser(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        int n = 0;
        while (std::getline(is, line)) {
            ++n;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'", n);
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            trim(key);
            trim(val);
            if (key.empty()) throw ConfigError("empty key", n);
            if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'", n);
            kv[key] = val;
            line_of[key] = n;
            used[key] = false;
        }
    }

    bool has(const std::string& k) {
        const auto it = kv.find(k);
        if (it == kv.end()) return false;
        used[k] = true;
        return true;
    }

    std::string str(const std::string& k, const std::string& dflt) {
        return has(k) ? kv[k] : dflt;
    }

    double num(const std::string& k, double dflt) {
        if (!has(k)) return dflt;
        const std::string& v = kv[k];
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("key '" + k + "': expected a number, got '" + v + "'", line_of[k]);
        }
    }

    long integer(const std::string& k, long dflt) {
        if (!has(k)) return dflt;
        const std::string& v = kv[k];
        try {
            std::size_t pos = 0;
            const long x = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("key '" + k + "': expected an integer, got '" + v + "'", line_of[k]);
        }
    }

    bool boolean(const std::string& k, bool dflt) {
        if (!has(k)) return dflt;
        const std::string& v = kv[k];
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError("key '" + k + "': expected true/false, got '" + v + "'", line_of[k]);
    }

    std::vector<double> num_list(const std::string& k, std::vector<double> dflt) {
        if (!has(k)) return dflt;
        std::vector<double> out;
        std::istringstream is(kv[k]);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            trim(tok);
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("key '" + k + "': bad list entry '" + tok + "'", line_of[k]);
            }
        }
        if (out.empty()) throw ConfigError("key '" + k + "': empty list", line_of[k]);
        return out;
    }

    void fail_range(const std::string& k, const std::string& why) {
        throw ConfigError("key '" + k + "': " + why, line_of.count(k) ? line_of[k] : 0);
    }

    void check_all_used() {
        for (const auto& [k, u] : used)
            if (!u) throw ConfigError("unknown key '" + k + "'", line_of[k]);
    }
};

InitSpec parse_init(Parser& p, const std::string& section) {
    InitSpec s;
    const std::string kind = p.str(section + ".kind", "constant");
    if (kind == "constant") {
        s.kind = InitSpec::Kind::constant;
        s.value = p.num(section + ".value", s.value);
        if (!(s.value >= 0.0)) p.fail_range(section + ".value", "must be >= 0");
    } else if (kind == "gaussian-bump") {
        s.kind = InitSpec::Kind::gaussian_bump;
        s.cx = p.num(section + ".cx", s.cx);
        s.cy = p.num(section + ".cy", s.cy);
        s.sigma = p.num(section + ".sigma", s.sigma);
        s.amplitude = p.num(section + ".amplitude", s.amplitude);
        s.floor = p.num(section + ".floor", s.floor);
        if (!(s.sigma > 0.0)) p.fail_range(section + ".sigma", "must be > 0");
        if (s.floor < 0.0) p.fail_range(section + ".floor", "must be >= 0");
    } else if (kind == "random-fourier") {
        s.kind = InitSpec::Kind::random_fourier;
        s.seed = static_cast<std::uint64_t>(p.integer(section + ".seed", 1));
        s.modes = static_cast<int>(p.integer(section + ".modes", s.modes));
        s.min = p.num(section + ".min", s.min);
        s.max = p.num(section + ".max", s.max);
        if (!(s.min > 0.0)) p.fail_range(section + ".min", "must be > 0");
        if (!(s.max >= s.min)) p.fail_range(section + ".max", "must be >= min");
        if (s.modes < 1) p.fail_range(section + ".modes", "must be >= 1");
    } else if (kind == "file") {
        s.kind = InitSpec::Kind::file;
        s.path = p.str(section + ".path", "");
        if (s.path.empty()) p.fail_range(section + ".path", "required for kind=file");
    } else {
        p.fail_range(section + ".kind", "unknown kind '" + kind + "'");
    }
    return s;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    Parser p(text);
    RunConfig c;

    c.nx = static_cast<int>(p.integer("grid.nx", c.nx));
    c.ny = static_cast<int>(p.integer("grid.ny", c.ny));
    c.lx = p.num("grid.lx", c.lx);
    c.ly = p.num("grid.ly", c.ly);
    if (c.nx < 4) p.fail_range("grid.nx", "must be >= 4");
    if (c.ny < 4) p.fail_range("grid.ny", "must be >= 4");
    if (!(c.lx > 0.0)) p.fail_range("grid.lx", "must be > 0");
    if (!(c.ly > 0.0)) p.fail_range("grid.ly", "must be > 0");

    c.l = p.num("model.l", c.l);
    if (!(c.l >= 1.0)) p.fail_range("model.l", "l must be >= 1");
    if (p.has("model.eps")) {
        c.eps = p.num("model.eps", 0.0);
        if (!(*c.eps > 0.0) || !(*c.eps <= 1.0)) p.fail_range("model.eps", "must lie in (0,1]");
    }
    if (p.has("model.eps_list")) {
        c.eps_list = p.num_list("model.eps_list", {});
        for (double e : c.eps_list)
            if (!(e > 0.0) || !(e <= 1.0)) p.fail_range("model.eps_list", "entries must lie in (0,1]");
    }

    c.u0 = parse_init(p, "init.u0");
    c.v0 = parse_init(p, "init.v0");
    if (c.v0.kind == InitSpec::Kind::constant && !(c.v0.value > 0.0))
        p.fail_range("init.v0.value", "v0 must be strictly positive");
    if (c.v0.kind == InitSpec::Kind::gaussian_bump && !(c.v0.floor > 0.0))
        p.fail_range("init.v0.floor", "v0 must be strictly positive");

    c.T = p.num("run.T", c.T);
    if (!(c.T >= 0.0)) p.fail_range("run.T", "must be >= 0");
    c.samples = static_cast<int>(p.integer("run.samples", c.samples));
    if (c.samples < 1) p.fail_range("run.samples", "must be >= 1");
    c.run_id = p.str("run.id", c.run_id);

    c.step.cfl_safety = p.num("step.cfl_safety", c.step.cfl_safety);
    c.step.dt_min = p.num("step.dt_min", c.step.dt_min);
    c.step.dt_max = p.num("step.dt_max", c.step.dt_max);
    c.step.blowup_threshold = p.num("step.blowup_threshold", c.step.blowup_threshold);
    try {
        c.step.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("step controls: ") + ex.what());
    }

    c.audit_enabled = p.boolean("audit.enabled", c.audit_enabled);
    c.audit_b = p.num("audit.b", c.audit_b);
    c.audit_c_aux = p.num("audit.c_aux", c.audit_c_aux);
    c.audit_c_slack = p.num("audit.c_slack", c.audit_c_slack);
    c.audit_rel_tol = p.num("audit.rel_tol", c.audit_rel_tol);
    c.audit_vmax_tol = p.num("audit.vmax_tol", c.audit_vmax_tol);
    c.audit_l2_rel_tol = p.num("audit.l2_rel_tol", c.audit_l2_rel_tol);
    c.audit_band = p.num("audit.band", c.audit_band);
    c.audit_p_list = p.num_list("audit.p_list", c.audit_p_list);
    if (!(c.audit_b > 0.0)) p.fail_range("audit.b", "must be > 0");
    for (double pe : c.audit_p_list)
        if (!(pe >= 2.0)) p.fail_range("audit.p_list", "entries must be >= 2");

    c.lab_p_list = p.num_list("lab.p_list", c.lab_p_list);
    c.lab_eta_list = p.num_list("lab.eta_list", c.lab_eta_list);
    for (double lp : c.lab_p_list)
        if (!(lp >= 1.0)) p.fail_range("lab.p_list", "p must be >= 1");
    for (double le : c.lab_eta_list)
        if (!(le > 0.0)) p.fail_range("lab.eta_list", "eta must be > 0");
    if (c.lab_p_list.size() != c.lab_eta_list.size())
        p.fail_range("lab.eta_list", "must pair one eta with each p");
    c.lab_grid_n = static_cast<int>(p.integer("lab.grid_n", c.lab_grid_n));
    c.lab_calib = static_cast<int>(p.integer("lab.calib", c.lab_calib));
    c.lab_valid = static_cast<int>(p.integer("lab.valid", c.lab_valid));
    c.lab_modes = static_cast<int>(p.integer("lab.modes", c.lab_modes));
    c.lab_floor = p.num("lab.floor", c.lab_floor);
    c.lab_amp_lo = p.num("lab.amp_lo", c.lab_amp_lo);
    c.lab_amp_hi = p.num("lab.amp_hi", c.lab_amp_hi);
    if (c.lab_grid_n < 8) p.fail_range("lab.grid_n", "must be >= 8");
    if (!(c.lab_floor > 0.0)) p.fail_range("lab.floor", "must be > 0");

    if (p.has("converge.grid_list")) {
        const auto gl = p.num_list("converge.grid_list", {});
        for (double gv : gl) {
            if (gv < 4.0 || gv != std::floor(gv))
                p.fail_range("converge.grid_list", "entries must be integers >= 4");
            c.conv_grid_list.push_back(static_cast<int>(gv));
        }
    }
    c.conv_tau_frac = p.num("converge.tau_frac", c.conv_tau_frac);
    c.conv_samples_base = static_cast<int>(p.integer("converge.samples_base", c.conv_samples_base));
    c.conv_bank = static_cast<int>(p.integer("converge.bank", c.conv_bank));
    if (c.conv_bank < 1) p.fail_range("converge.bank", "must be >= 1");

    c.out_dir = p.str("out.dir", c.out_dir);
    c.seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<long>(c.seed)));

    p.check_all_used();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open config file " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

} // namespace dgt
