#include "dgt/weak.hpp"
#include "dgt/errors.hpp"
#include "dgt/parallel.hpp"
#include "dgt/sampler.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace dgt {

double TestFunction::chi(double t) const {
    const double s = t / t_cut;
    if (s >= 1.0 || s < 0.0) return 0.0;
    const double q = s * s;
    if (q > 0.998) return 0.0; // exp(1 - 1/(1-q)) underflows anyway
    return std::exp(1.0 - 1.0 / (1.0 - q));
}

double TestFunction::chi_prime(double t) const {
    const double s = t / t_cut;
    if (s >= 1.0 || s < 0.0) return 0.0;
    const double q = s * s;
    if (q > 0.998) return 0.0;
    const double om = 1.0 - q;
    return chi(t) * (-2.0 * s / (om * om)) / t_cut;
}

ScalarField TestFunction::sample(const GridSpec& g) const {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f.at(i, j) = phi(g.cell_x(i), g.cell_y(j));
    return f;
}

TestFunction make_uniform_test(double t_cut) {
    TestFunction tf;
    tf.name = "uniform";
    tf.t_cut = t_cut;
    tf.phi = [](double, double) { return 1.0; };
    tf.grad_phi = [](double, double, double& gx, double& gy) { gx = 0.0; gy = 0.0; };
    return tf;
}

TestFunction make_bump_test(double cx, double cy, double r, double t_cut) {
    TestFunction tf;
    std::ostringstream name;
    name << "bump_" << cx << "_" << cy << "_" << r;
    tf.name = name.str();
    tf.t_cut = t_cut;
    tf.phi = [cx, cy, r](double x, double y) {
        const double q = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
        if (q >= 0.998) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - q));
    };
    tf.grad_phi = [cx, cy, r](double x, double y, double& gx, double& gy) {
        const double q = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
        if (q >= 0.998) {
            gx = gy = 0.0;
            return;
        }
        const double om = 1.0 - q;
        const double phi = std::exp(1.0 - 1.0 / om);
        const double dphi_dq = -phi / (om * om);
        gx = dphi_dq * 2.0 * (x - cx) / (r * r);
        gy = dphi_dq * 2.0 * (y - cy) / (r * r);
    };
    return tf;
}

std::vector<TestFunction> make_test_bank(std::size_t n, const GridSpec& g, double t_cut,
                                         std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_test_bank: need at least one member");
    std::vector<TestFunction> bank;
    bank.push_back(make_uniform_test(t_cut));
    SplitMix64 rng(seed);
    while (bank.size() < n) {
        const double r = rng.uniform(0.15, 0.3) * std::min(g.lx, g.ly);
        const double cx = rng.uniform(r, g.lx - r);
        const double cy = rng.uniform(r, g.ly - r);
        bank.push_back(make_bump_test(cx, cy, r, t_cut));
    }
    return bank;
}

namespace {

// grad phi evaluated analytically at interior face centers; boundary faces 0.
FaceVectorField analytic_face_gradient(const TestFunction& tf, const GridSpec& g) {
    FaceVectorField F(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double gx, gy;
            tf.grad_phi(i * g.hx(), g.cell_y(j), gx, gy);
            F.x(i, j) = gx;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gx, gy;
            tf.grad_phi(g.cell_x(i), j * g.hy(), gx, gy);
            F.y(i, j) = gy;
        }
    return F;
}

// hx hy sum over interior faces of (coefficient face mean) * A_f * B_f
double weighted_face_pair(const ScalarField& coef, const FaceVectorField& A,
                          const FaceVectorField& B) {
    const auto& g = coef.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double w = 0.5 * (coef.at(i - 1, j) + coef.at(i, j));
            s += w * A.x(i, j) * B.x(i, j);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double w = 0.5 * (coef.at(i, j - 1) + coef.at(i, j));
            s += w * A.y(i, j) * B.y(i, j);
        }
    return g.cell_area() * s;
}

void check_residual_pre(const Trajectory& traj, const TestFunction& tf) {
    if (traj.times.size() < 2)
        throw std::invalid_argument("residual: trajectory needs at least two samples");
    if (tf.t_cut > traj.times.back())
        throw std::invalid_argument("residual: test function support exceeds the trajectory range");
    std::size_t inside = 0;
    for (double t : traj.times)
        if (t < tf.t_cut) ++inside;
    if (inside < 50 && tf.t_cut > 0.0)
        throw std::invalid_argument("residual: need >= 50 samples inside the temporal support");
}

double trapz(const std::vector<double>& t, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n)
        s += 0.5 * (f[n] + f[n + 1]) * (t[n + 1] - t[n]);
    return s;
}

} // namespace

double residual_u(const Trajectory& traj, const ModelParams& p, const TestFunction& tf,
                  ResidualForm form) {
    check_residual_pre(traj, tf);
    const GridSpec& g = traj.grid;
    const ScalarField phi = tf.sample(g);
    const std::size_t N = traj.times.size();

    if (form == ResidualForm::definition) {
        const FaceVectorField gphi = analytic_face_gradient(tf, g);
        std::vector<double> a(N), r(N);
        for (std::size_t n = 0; n < N; ++n) {
            const double t = traj.times[n];
            const ScalarField& u = traj.u_samples[n];
            const ScalarField& v = traj.v_samples[n];
            a[n] = dot_cells(u, phi) * tf.chi_prime(t);

            const ScalarField ul = field_pow(u, p.l);
            const FaceVectorField gul = face_gradient(ul);
            const FaceVectorField gv = face_gradient(v);
            ScalarField ulv = ul;
            for (std::size_t k = 0; k < ulv.values.size(); ++k) ulv.values[k] *= v.values[k];
            double rn = -(1.0 / p.l) * weighted_face_pair(v, gul, gphi);
            rn += weighted_face_pair(ulv, gv, gphi);
            double logistic = 0.0;
            for (std::size_t k = 0; k < u.values.size(); ++k)
                logistic += (u.values[k] - u.values[k] * u.values[k]) * phi.values[k];
            rn += g.cell_area() * logistic;
            r[n] = rn * tf.chi(t);
        }
        const double lhs = -trapz(traj.times, a) - dot_cells(traj.u_samples[0], phi) * tf.chi(0.0);
        const double rhs = trapz(traj.times, r);
        return std::fabs(lhs - rhs);
    }

    // scheme-exact discrete form
    const FaceVectorField gphi = face_gradient(phi);
    double lhs = -dot_cells(traj.u_samples[0], phi) * tf.chi(0.0);
    double rhs = 0.0;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double dt = traj.times[n + 1] - traj.times[n];
        const double chin = tf.chi(traj.times[n]);
        if (n >= 1)
            lhs -= dot_cells(traj.u_samples[n], phi) * (chin - tf.chi(traj.times[n - 1]));
        const FaceVectorField F = flux_u(traj.u_samples[n], traj.v_samples[n], p);
        double rn = -dot_faces(F, gphi);
        double logistic = 0.0;
        for (std::size_t k = 0; k < traj.u_samples[n].values.size(); ++k) {
            const double u = traj.u_samples[n].values[k];
            logistic += (u - u * u) * phi.values[k];
        }
        rn += g.cell_area() * logistic;
        rhs += dt * rn * chin;
    }
    // the final sample lies outside supp chi for a valid witness
    lhs -= dot_cells(traj.u_samples[N - 1], phi) *
           (tf.chi(traj.times[N - 1]) - tf.chi(traj.times[N - 2]));
    return std::fabs(lhs - rhs);
}

double residual_v(const Trajectory& traj, const ModelParams& p, const TestFunction& tf,
                  ResidualForm form) {
    (void)p;
    check_residual_pre(traj, tf);
    const GridSpec& g = traj.grid;
    const ScalarField phi = tf.sample(g);
    const std::size_t N = traj.times.size();

    if (form == ResidualForm::definition) {
        const FaceVectorField gphi = analytic_face_gradient(tf, g);
        ScalarField ones(g, 1.0);
        std::vector<double> a(N), r(N);
        for (std::size_t n = 0; n < N; ++n) {
            const double t = traj.times[n];
            const ScalarField& u = traj.u_samples[n];
            const ScalarField& v = traj.v_samples[n];
            a[n] = dot_cells(v, phi) * tf.chi_prime(t);
            double rn = weighted_face_pair(ones, face_gradient(v), gphi);
            double consume = 0.0;
            for (std::size_t k = 0; k < u.values.size(); ++k)
                consume += u.values[k] * v.values[k] * phi.values[k];
            rn += g.cell_area() * consume;
            r[n] = rn * tf.chi(t);
        }
        const double lhs = trapz(traj.times, a) + dot_cells(traj.v_samples[0], phi) * tf.chi(0.0);
        const double rhs = trapz(traj.times, r);
        return std::fabs(lhs - rhs);
    }

    const FaceVectorField gphi = face_gradient(phi);
    double lhs = dot_cells(traj.v_samples[0], phi) * tf.chi(0.0);
    double rhs = 0.0;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double dt = traj.times[n + 1] - traj.times[n];
        const double chin = tf.chi(traj.times[n]);
        if (n >= 1)
            lhs += dot_cells(traj.v_samples[n], phi) * (chin - tf.chi(traj.times[n - 1]));
        double rn = dot_faces(face_gradient(traj.v_samples[n]), gphi);
        double consume = 0.0;
        for (std::size_t k = 0; k < traj.u_samples[n].values.size(); ++k)
            consume += traj.u_samples[n].values[k] * traj.v_samples[n].values[k] * phi.values[k];
        rn += g.cell_area() * consume;
        rhs += dt * rn * chin;
    }
    lhs += dot_cells(traj.v_samples[N - 1], phi) *
           (tf.chi(traj.times[N - 1]) - tf.chi(traj.times[N - 2]));
    return std::fabs(lhs - rhs);
}

const StudyMember& ConvergenceReport::member(std::size_t eps_idx, std::size_t grid_idx) const {
    return members.at(eps_idx * grid_list.size() + grid_idx);
}

ConvergenceReport run_convergence_study(const StudyConfig& cfg) {
    if (cfg.eps_list.size() < 3)
        throw std::invalid_argument("convergence study: need >= 3 eps values");
    for (std::size_t k = 1; k < cfg.eps_list.size(); ++k)
        if (!(cfg.eps_list[k] < cfg.eps_list[k - 1]))
            throw std::invalid_argument("convergence study: eps list must decrease");
    if (cfg.grid_list.size() < 3)
        throw std::invalid_argument("convergence study: need >= 3 grids");
    for (std::size_t k = 1; k < cfg.grid_list.size(); ++k)
        if (!(cfg.grid_list[k] > cfg.grid_list[k - 1]))
            throw std::invalid_argument("convergence study: grid list must refine");
    if (!cfg.u0 || !cfg.v0)
        throw std::invalid_argument("convergence study: analytic initial data required");

    ConvergenceReport rep;
    rep.eps_list = cfg.eps_list;
    rep.grid_list = cfg.grid_list;
    rep.tau = cfg.tau_frac * cfg.T;
    const std::size_t ne = cfg.eps_list.size(), ng = cfg.grid_list.size();
    rep.members.resize(ne * ng);

    parallel_for(ne * ng, cfg.jobs, [&](std::size_t idx) {
        StudyMember& m = rep.members[idx];
        m.eps_idx = idx / ng;
        m.grid_idx = idx % ng;
        try {
            const int n = cfg.grid_list[m.grid_idx];
            const GridSpec g(n, n, cfg.lx, cfg.ly);
            ScalarField u0(g), v0(g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    u0.at(i, j) = cfg.u0(g.cell_x(i), g.cell_y(j));
                    v0.at(i, j) = cfg.v0(g.cell_x(i), g.cell_y(j));
                }
            const ModelParams p(cfg.l, cfg.eps_list[m.eps_idx]);
            const InitialData init = InitialData::validated(std::move(u0), std::move(v0), cfg.l);
            const int samples = cfg.samples_base << m.grid_idx;
            m.traj = run(p, init, cfg.T, uniform_samples(cfg.T, samples), cfg.ctrl);
            if (m.traj.blew_up) {
                m.error = "blow-up threshold tripped at t=" + format_double(m.traj.t_blowup);
            } else {
                m.ok = true;
            }
        } catch (const std::exception& ex) {
            m.error = ex.what();
        }
    });

    // Cauchy differences at the finest grid, t >= tau
    const std::size_t finest = ng - 1;
    for (std::size_t e = 0; e + 1 < ne; ++e) {
        const StudyMember& A = rep.member(e, finest);
        const StudyMember& B = rep.member(e + 1, finest);
        if (!A.ok || !B.ok) {
            rep.cauchy.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double diff = 0.0;
        for (std::size_t n = 0; n < A.traj.times.size(); ++n) {
            if (A.traj.times[n] < rep.tau) continue;
            for (std::size_t k = 0; k < A.traj.u_samples[n].values.size(); ++k)
                diff = std::fmax(diff, std::fabs(A.traj.u_samples[n].values[k] -
                                                 B.traj.u_samples[n].values[k]));
        }
        rep.cauchy.push_back(diff);
    }
    rep.cauchy_monotone = true;
    for (std::size_t k = 0; k + 1 < rep.cauchy.size(); ++k)
        if (!(rep.cauchy[k + 1] < rep.cauchy[k])) rep.cauchy_monotone = false;

    // weak residuals per refinement level: grid k paired with eps k
    const std::size_t levels = std::min(ne, ng);
    const double t_cut = 0.8 * cfg.T;
    for (std::size_t k = 0; k < levels; ++k) {
        const StudyMember& m = rep.member(k, k);
        if (!m.ok) {
            rep.residual_u_levels.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.residual_v_levels.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const GridSpec g(cfg.grid_list[k], cfg.grid_list[k], cfg.lx, cfg.ly);
        const auto bank = make_test_bank(cfg.bank_size, g, t_cut, cfg.bank_seed);
        const ModelParams p(cfg.l, cfg.eps_list[k]);
        double ru = 0.0, rv = 0.0;
        for (const auto& tf : bank) {
            ru = std::fmax(ru, residual_u(m.traj, p, tf));
            rv = std::fmax(rv, residual_v(m.traj, p, tf));
        }
        rep.residual_u_levels.push_back(ru);
        rep.residual_v_levels.push_back(rv);
    }
    rep.residuals_halve = rep.residual_u_levels.size() >= 2;
    for (std::size_t k = 0; k + 1 < rep.residual_u_levels.size(); ++k) {
        if (!(rep.residual_u_levels[k + 1] <= 0.5 * rep.residual_u_levels[k]))
            rep.residuals_halve = false;
        if (!(rep.residual_v_levels[k + 1] <= 0.5 * rep.residual_v_levels[k]))
            rep.residuals_halve = false;
    }

    // eps-uniformity audit at the finest grid
    std::vector<FunctionalSeries> multi;
    std::vector<double> eps_ok;
    for (std::size_t e = 0; e < ne; ++e)
        if (rep.member(e, finest).ok) {
            multi.push_back(rep.member(e, finest).traj.series);
            eps_ok.push_back(cfg.eps_list[e]);
        }
    if (multi.size() >= 3)
        rep.uniform = audit_uniform_in_eps(multi, eps_ok, cfg.band);

    return rep;
}

void write_convergence_csv(const std::string& dir, const ConvergenceReport& rep) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream os(dir + "/cauchy.csv", std::ios::binary);
        if (!os) throw IoError("write_convergence_csv: cannot open cauchy.csv");
        os << "eps_hi,eps_lo,sup_diff\n";
        for (std::size_t k = 0; k < rep.cauchy.size(); ++k)
            os << format_double(rep.eps_list[k]) << ',' << format_double(rep.eps_list[k + 1])
               << ',' << format_double(rep.cauchy[k]) << '\n';
    }
    {
        std::ofstream os(dir + "/residuals.csv", std::ios::binary);
        if (!os) throw IoError("write_convergence_csv: cannot open residuals.csv");
        os << "level,grid,eps,residual_u,residual_v\n";
        for (std::size_t k = 0; k < rep.residual_u_levels.size(); ++k)
            os << k << ',' << rep.grid_list[k] << ',' << format_double(rep.eps_list[k]) << ','
               << format_double(rep.residual_u_levels[k]) << ','
               << format_double(rep.residual_v_levels[k]) << '\n';
    }
    {
        std::ofstream os(dir + "/uniform.csv", std::ios::binary);
        if (!os) throw IoError("write_convergence_csv: cannot open uniform.csv");
        os << "bound,margin,tolerance,pass\n";
        for (const auto& v : rep.uniform)
            os << v.id << ',' << format_double(v.margin) << ',' << format_double(v.tolerance)
               << ',' << (v.pass ? "1" : "0") << '\n';
    }
}

std::string render_convergence_summary(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "convergence study: " << rep.eps_list.size() << " eps levels x "
       << rep.grid_list.size() << " grids\n";
    for (const auto& m : rep.members)
        if (!m.ok)
            os << "  member eps[" << m.eps_idx << "] grid[" << m.grid_idx
               << "] FAILED: " << m.error << '\n';
    os << "cauchy sup-differences (t >= " << format_double(rep.tau) << "):";
    for (double d : rep.cauchy) os << ' ' << format_double(d);
    os << "\n  monotone decrease: " << (rep.cauchy_monotone ? "yes" : "no") << '\n';
    os << "residual_u per level:";
    for (double d : rep.residual_u_levels) os << ' ' << format_double(d);
    os << "\nresidual_v per level:";
    for (double d : rep.residual_v_levels) os << ' ' << format_double(d);
    os << "\n  halve per level: " << (rep.residuals_halve ? "yes" : "no") << '\n';
    for (const auto& v : rep.uniform)
        os << "uniform-in-eps " << v.id << ": spread margin " << format_double(v.margin)
           << (v.pass ? " PASS" : " FAIL") << '\n';
    return os.str();
}

} // namespace dgt
