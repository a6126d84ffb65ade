// Command-line surface: simulate / audit / lab / converge / snapshot-dump.
#include "dgt/audit.hpp"
#include "dgt/config.hpp"
#include "dgt/errors.hpp"
#include "dgt/functionals.hpp"
#include "dgt/lab.hpp"
#include "dgt/stepper.hpp"
#include "dgt/weak.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace dgt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAudit = 3;
constexpr int kExitIo = 4;

std::string resolve_out(const std::string& flag_out, const std::string& config_out) {
    if (const char* env = std::getenv("DGT_OUT"); env && *env) return env;
    if (!flag_out.empty()) return flag_out;
    return config_out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    os << text;
    if (!os) throw IoError("short write to " + path);
}

// Timestamps live only here so every other artifact stays byte-reproducible.
void write_meta(const std::string& path) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    write_text(path, std::string("finished_at = ") + buf + "\n");
}

AuditConsts make_consts(const RunConfig& c, const ScalarField& u0, const ScalarField& v0,
                        double eps, double dt_avg) {
    AuditConsts k;
    const GridSpec g = c.grid();
    k.m_star = integrate(u0) + g.area();
    k.v0_linf = v0.max();
    k.v0_int = integrate(v0);
    k.omega_area = g.area();
    k.T = c.T;
    k.hx = g.hx();
    k.hy = g.hy();
    k.dt_avg = dt_avg;
    k.l = c.l;
    k.eps = eps;
    k.b = c.audit_b;
    k.c_aux = c.audit_c_aux;
    k.c_slack = c.audit_c_slack;
    k.rel_tol = c.audit_rel_tol;
    k.vmax_tol = c.audit_vmax_tol;
    k.l2_rel_tol = c.audit_l2_rel_tol;
    k.band = c.audit_band;
    return k;
}

int cmd_simulate(const RunConfig& c, const std::string& out) {
    if (!c.eps) throw ConfigError("simulate requires model.eps");
    const GridSpec g = c.grid();
    const ScalarField u0 = c.u0.realize(g);
    const ScalarField v0 = c.v0.realize(g);
    const InitialData init = InitialData::validated(u0, v0, c.l);
    const ModelParams p(c.l, *c.eps);

    fs::create_directories(out);
    std::vector<Observer> observers;
    observers.push_back([&](const SimState& s, std::size_t n) {
        char name[32];
        std::snprintf(name, sizeof name, "u_%06zu.dgt", n);
        write_snapshot(out + "/" + name, s.u, s.t);
        std::snprintf(name, sizeof name, "v_%06zu.dgt", n);
        write_snapshot(out + "/" + name, s.v, s.t);
    });

    EvalOptions eval;
    eval.p_list = c.audit_p_list;
    eval.b = c.audit_b;
    const Trajectory traj =
        run(p, init, c.T, uniform_samples(c.T, c.samples), c.step, eval, observers);
    write_series_csv(out + "/series.csv", traj.series);
    const AuditConsts consts = make_consts(c, u0, v0, *c.eps, traj.dt_avg);
    write_consts(out + "/consts.txt", consts);
    write_meta(out + "/meta.txt");

    if (traj.blew_up) {
        std::cerr << "simulate: blow-up threshold tripped at t=" << format_double(traj.t_blowup)
                  << " (scheme failure for this system, not a true blow-up)\n";
        return kExitNumerical;
    }

    if (!c.audit_enabled) return kExitOk;
    const auto verdicts = audit_run(traj.series, consts);
    const std::string report = render_report(verdicts);
    write_text(out + "/audit_report.txt", report);
    std::cout << report;
    return all_pass(verdicts) ? kExitOk : kExitAudit;
}

int cmd_audit(const std::string& series_path, const std::string& consts_path,
              const std::string& out) {
    const FunctionalSeries series = read_series_csv(series_path);
    // schema check against the core column set
    std::vector<std::string> missing;
    for (const auto& id : functional_ids(EvalOptions{{}, 1.0}))
        if (!series.has(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::string diff = "series CSV schema drift; missing columns:";
        for (const auto& m : missing) diff += " " + m;
        throw ConfigError(diff);
    }
    const AuditConsts consts = read_consts(consts_path);
    const auto verdicts = audit_run(series, consts);
    const std::string report = render_report(verdicts);
    if (!out.empty()) {
        fs::create_directories(fs::path(out).parent_path().empty()
                                   ? fs::path(".")
                                   : fs::path(out).parent_path());
        write_text(out, report);
    }
    std::cout << report;
    return all_pass(verdicts) ? kExitOk : kExitAudit;
}

int cmd_lab(const RunConfig& c, const std::string& out, int jobs) {
    if (c.lab_calib + c.lab_valid < 2) throw ConfigError("lab: insufficient samples");
    fs::create_directories(out);
    const GridSpec g(c.lab_grid_n, c.lab_grid_n, c.lx, c.ly);
    FieldSampler base;
    base.modes = c.lab_modes;
    base.floor = c.lab_floor;
    base.amp_lo = c.lab_amp_lo;
    base.amp_hi = c.lab_amp_hi;

    std::ostringstream summary;
    bool ok = true;
    for (std::size_t k = 0; k < c.lab_p_list.size(); ++k) {
        const double p = c.lab_p_list[k], eta = c.lab_eta_list[k];
        const LabRun lr = run_lab_split(base, g, p, eta, c.seed, c.lab_calib, c.lab_valid, jobs);
        char name[64];
        std::snprintf(name, sizeof name, "lab_p%g_eta%g.csv", p, eta);
        write_lab_csv(out + "/" + name, lr);
        summary << "p=" << format_double(p) << " eta=" << format_double(eta)
                << " c_fit=" << format_double(lr.c_fit) << " (binding seed " << lr.c_fit_seed
                << ") validation violations: " << lr.violations << "/" << lr.validation.size()
                << '\n';
        if (lr.violations != 0) ok = false;
    }
    const ElementaryReport er = check_elementary();
    summary << "elementary inequalities over " << er.samples
            << " pairs: worst margins " << format_double(er.worst_half_square) << ", "
            << format_double(er.worst_sum_square) << '\n';
    if (er.worst_half_square > 0.0 || er.worst_sum_square > 0.0) ok = false;
    write_text(out + "/lab_summary.txt", summary.str());
    write_meta(out + "/meta.txt");
    std::cout << summary.str();
    return ok ? kExitOk : kExitAudit;
}

int cmd_converge(const RunConfig& c, const std::string& out, int jobs) {
    if (c.eps_list.size() < 3)
        throw ConfigError("converge requires model.eps_list with >= 3 decreasing entries");
    if (c.conv_grid_list.size() < 3)
        throw ConfigError("converge requires converge.grid_list with >= 3 refining entries");

    StudyConfig sc;
    sc.eps_list = c.eps_list;
    sc.grid_list = c.conv_grid_list;
    sc.lx = c.lx;
    sc.ly = c.ly;
    sc.l = c.l;
    sc.T = c.T;
    sc.tau_frac = c.conv_tau_frac;
    sc.samples_base = c.conv_samples_base;
    sc.bank_size = static_cast<std::size_t>(c.conv_bank);
    sc.bank_seed = c.seed;
    sc.band = c.audit_band;
    sc.ctrl = c.step;
    sc.jobs = jobs;

    const auto analytic = [](const InitSpec& s) -> std::function<double(double, double)> {
        switch (s.kind) {
            case InitSpec::Kind::constant:
                return [v = s.value](double, double) { return v; };
            case InitSpec::Kind::gaussian_bump:
                return [s](double x, double y) {
                    const double dx = x - s.cx, dy = y - s.cy;
                    return s.floor + s.amplitude * std::exp(-(dx * dx + dy * dy) /
                                                            (2.0 * s.sigma * s.sigma));
                };
            default:
                throw ConfigError("converge supports constant and gaussian-bump initial data");
        }
    };
    sc.u0 = analytic(c.u0);
    sc.v0 = analytic(c.v0);

    const ConvergenceReport rep = run_convergence_study(sc);

    fs::create_directories(out);
    write_convergence_csv(out, rep);
    for (const auto& m : rep.members) {
        if (!m.ok) continue;
        char sub[64];
        std::snprintf(sub, sizeof sub, "runs/%s/eps%zu_grid%zu", c.run_id.c_str(), m.eps_idx,
                      m.grid_idx);
        const std::string dir = out + "/" + sub;
        fs::create_directories(dir);
        write_series_csv(dir + "/series.csv", m.traj.series);
        write_snapshot(dir + "/u_final.dgt", m.traj.u_samples.back(), m.traj.times.back());
        write_snapshot(dir + "/v_final.dgt", m.traj.v_samples.back(), m.traj.times.back());
    }
    const std::string summary = render_convergence_summary(rep);
    write_text(out + "/converge_summary.txt", summary);
    write_meta(out + "/meta.txt");
    std::cout << summary;

    bool members_ok = true;
    for (const auto& m : rep.members) members_ok = members_ok && m.ok;
    if (!members_ok) return kExitNumerical;
    return (rep.cauchy_monotone && rep.residuals_halve) ? kExitOk : kExitAudit;
}

int cmd_snapshot_dump(const std::string& path, bool full) {
    double t = 0.0;
    const ScalarField f = read_snapshot(path, &t);
    std::cout << "DGT1 nx=" << f.grid.nx << " ny=" << f.grid.ny
              << " lx=" << format_double(f.grid.lx) << " ly=" << format_double(f.grid.ly)
              << " t=" << format_double(t) << '\n';
    std::cout << "min=" << format_double(f.min()) << " max=" << format_double(f.max())
              << " integral=" << format_double(integrate(f)) << '\n';
    if (full) {
        for (int j = 0; j < f.grid.ny; ++j) {
            for (int i = 0; i < f.grid.nx; ++i)
                std::cout << (i ? "," : "") << format_double(f.at(i, j));
            std::cout << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume simulator and estimate auditor for a doubly degenerate "
                 "nutrient-taxis system with logistic growth"};
    app.require_subcommand(1);

    std::string config_path, out_flag, series_path, consts_path, report_out, dump_path;
    int jobs = 1;
    long seed_flag = -1;
    bool dump_full = false;

    auto* sim = app.add_subcommand("simulate", "run one (l, eps) simulation with online audits");
    sim->add_option("--config", config_path, "config file")->required();
    sim->add_option("--out", out_flag, "output directory (env DGT_OUT overrides)");
    sim->add_option("--seed", seed_flag, "override config seed");

    auto* aud = app.add_subcommand("audit", "re-run audits offline on a persisted series");
    aud->add_option("--series", series_path, "series CSV path")->required();
    aud->add_option("--consts", consts_path, "constants file path")->required();
    aud->add_option("--report", report_out, "also write the report here");

    auto* lab = app.add_subcommand("lab", "randomized functional-inequality stress tests");
    lab->add_option("--config", config_path, "config file")->required();
    lab->add_option("--out", out_flag, "output directory (env DGT_OUT overrides)");
    lab->add_option("--jobs", jobs, "concurrent samples");
    lab->add_option("--seed", seed_flag, "override config seed");

    auto* conv = app.add_subcommand("converge", "eps/mesh refinement study with weak residuals");
    conv->add_option("--config", config_path, "config file")->required();
    conv->add_option("--out", out_flag, "output directory (env DGT_OUT overrides)");
    conv->add_option("--jobs", jobs, "concurrent member runs");
    conv->add_option("--seed", seed_flag, "override config seed");

    auto* dump = app.add_subcommand("snapshot-dump", "pretty-print a .dgt snapshot");
    dump->add_option("file", dump_path, "snapshot path")->required();
    dump->add_flag("--full", dump_full, "print every value");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump->parsed()) return cmd_snapshot_dump(dump_path, dump_full);
        if (aud->parsed()) return cmd_audit(series_path, consts_path, report_out);

        RunConfig cfg = load_config(config_path);
        if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
        const std::string out = resolve_out(out_flag, cfg.out_dir);
        if (sim->parsed()) return cmd_simulate(cfg, out);
        if (lab->parsed()) return cmd_lab(cfg, out, jobs);
        if (conv->parsed()) return cmd_converge(cfg, out, jobs);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kExitConfig;
    } catch (const IoError& ex) {
        std::cerr << "io error: " << ex.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& ex) {
        std::cerr << "numerical failure: " << ex.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
