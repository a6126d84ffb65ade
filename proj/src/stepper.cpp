#include "dgt/stepper.hpp"
#include "dgt/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dgt {

void StepControl::validate() const {
    if (!(cfl_safety > 0.0) || !(cfl_safety <= 1.0))
        throw std::invalid_argument("StepControl: cfl_safety must lie in (0,1]");
    if (!(dt_min > 0.0) || !(dt_min <= dt_max))
        throw std::invalid_argument("StepControl: need 0 < dt_min <= dt_max");
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("StepControl: blowup_threshold must be positive");
}

double stable_dt(const SimState& s, const ModelParams& p, const StepControl& c) {
    c.validate();
    s.u.validate("u");
    s.v.validate("v");
    if (!(s.u.min() > 0.0) || !(s.v.min() > 0.0))
        throw std::invalid_argument("stable_dt: state must be strictly positive");

    const auto& g = s.u.grid;
    const double hx = g.hx(), hy = g.hy();

    // diffusion: explicit 5-point with coefficient u^(l-1) v
    double max_a = 0.0;
    const ScalarField ulm1 = field_pow(s.u, p.l - 1.0);
    for (std::size_t k = 0; k < s.u.values.size(); ++k)
        max_a = std::fmax(max_a, ulm1.values[k] * s.v.values[k]);
    const double inv_h2 = 1.0 / (hx * hx) + 1.0 / (hy * hy);
    const double dt_diff = max_a > 0.0 ? 1.0 / (2.0 * max_a * inv_h2)
                                       : std::numeric_limits<double>::infinity();

    // taxis: donor-cell advection with per-face speed u^l v |grad v|
    const FaceVectorField gv = face_gradient(s.v);
    const ScalarField ul = field_pow(s.u, p.l);
    double sx = 0.0, sy = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const std::size_t L = g.idx(i - 1, j), R = g.idx(i, j);
            const double speed = std::fmax(ul.values[L], ul.values[R]) *
                                 0.5 * (s.v.values[L] + s.v.values[R]) * std::fabs(gv.x(i, j));
            sx = std::fmax(sx, speed);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t L = g.idx(i, j - 1), R = g.idx(i, j);
            const double speed = std::fmax(ul.values[L], ul.values[R]) *
                                 0.5 * (s.v.values[L] + s.v.values[R]) * std::fabs(gv.y(i, j));
            sy = std::fmax(sy, speed);
        }
    const double adv = sx / hx + sy / hy;
    const double dt_taxis = adv > 0.0 ? 1.0 / (2.0 * adv)
                                      : std::numeric_limits<double>::infinity();

    const double dt_react = 1.0 / (2.0 * std::fmax(1.0, s.u.max()));

    double dt = c.cfl_safety * std::fmin(dt_diff, std::fmin(dt_taxis, dt_react));
    return std::fmin(std::fmax(dt, c.dt_min), c.dt_max);
}

namespace {

// Matrix-free conjugate gradients for (I - dt Lap + dt diag(a)) x = b.
// SPD with entrywise-nonnegative inverse (M-matrix), so the solution
// inherits 0 < x <= max b / (1 + dt min a) bounds up to the residual.
ScalarField solve_implicit_v(const ScalarField& a, const ScalarField& b, double dt,
                             double rel_tol) {
    const auto& g = a.grid;
    const auto apply = [&](const ScalarField& x) {
        ScalarField y = neumann_laplacian(x);
        for (std::size_t k = 0; k < y.values.size(); ++k)
            y.values[k] = x.values[k] - dt * y.values[k] + dt * a.values[k] * x.values[k];
        return y;
    };
    const auto dot = [](const ScalarField& f, const ScalarField& h) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * h.values[k];
        return s;
    };

    ScalarField x = b; // warm start at the previous state
    ScalarField r = apply(x);
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] = b.values[k] - r.values[k];
    ScalarField p = r;
    double rs = dot(r, r);
    const double stop = rel_tol * rel_tol * dot(b, b);
    const long max_iter = 10 * static_cast<long>(std::sqrt(static_cast<double>(g.size()))) + 10;
    long it = 0;
    while (rs > stop) {
        if (++it > max_iter)
            throw SolverStagnation("implicit v solve: solver stagnation after " +
                                   std::to_string(max_iter) + " iterations");
        const ScalarField Ap = apply(p);
        const double alpha = rs / dot(p, Ap);
        for (std::size_t k = 0; k < x.values.size(); ++k) {
            x.values[k] += alpha * p.values[k];
            r.values[k] -= alpha * Ap.values[k];
        }
        const double rs_new = dot(r, r);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t k = 0; k < p.values.size(); ++k)
            p.values[k] = r.values[k] + beta * p.values[k];
    }
    return x;
}

} // namespace

SimState step(const SimState& s, double dt, const ModelParams& p, const StepControl& c,
              const Forcing* forcing) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");

    ScalarField du = rhs_u(s.u, s.v, p);
    if (forcing && forcing->fu) {
        const ScalarField f = forcing->fu(s.t);
        for (std::size_t k = 0; k < du.values.size(); ++k) du.values[k] += f.values[k];
    }

    SimState out;
    out.t = s.t + dt;
    out.u = s.u;
    for (std::size_t k = 0; k < out.u.values.size(); ++k)
        out.u.values[k] += dt * du.values[k];
    for (int j = 0; j < s.u.grid.ny; ++j)
        for (int i = 0; i < s.u.grid.nx; ++i)
            if (!(out.u.at(i, j) > 0.0)) {
                std::ostringstream os;
                os << "positivity violation (reduce dt) at cell (" << i << "," << j
                   << "), t=" << s.t;
                throw PositivityError(os.str());
            }
    out.u.declared_sign = Sign::positive;

    ScalarField b = s.v;
    if (forcing && forcing->fv) {
        const ScalarField f = forcing->fv(out.t);
        for (std::size_t k = 0; k < b.values.size(); ++k) b.values[k] += dt * f.values[k];
    }
    out.v = solve_implicit_v(s.u, b, dt, c.cg_rel_tol);
    if (!(out.v.min() > 0.0))
        throw NumericalError("implicit v solve returned a nonpositive value");
    out.v.declared_sign = Sign::positive;
    return out;
}

std::vector<double> uniform_samples(double T, int n) {
    if (n < 1) throw std::invalid_argument("uniform_samples: need n >= 1");
    if (T == 0.0) return {0.0};
    std::vector<double> ts(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) ts[static_cast<std::size_t>(k)] = T * k / n;
    ts.back() = T;
    return ts;
}

Trajectory run(const ModelParams& p, const InitialData& init, double T,
               const std::vector<double>& sample_times, const StepControl& ctrl,
               const EvalOptions& eval, const std::vector<Observer>& observers,
               const Forcing* forcing) {
    ctrl.validate();
    if (!(T >= 0.0)) throw std::invalid_argument("run: T must be >= 0");
    if (sample_times.empty() || sample_times.front() != 0.0)
        throw std::invalid_argument("run: sample times must start at 0");
    for (std::size_t k = 1; k < sample_times.size(); ++k)
        if (!(sample_times[k] > sample_times[k - 1]))
            throw std::invalid_argument("run: sample times must be strictly increasing");
    if (sample_times.back() > T)
        throw std::invalid_argument("run: sample times must not exceed T");

    SimState s;
    s.u = init.u0;
    for (double& v : s.u.values) v += p.eps; // regularized data u0 + eps
    s.u.declared_sign = Sign::positive;
    s.v = init.v0;
    s.v.declared_sign = Sign::positive;
    s.t = 0.0;

    Trajectory traj;
    traj.grid = s.u.grid;
    const std::size_t vt_col = [&] {
        FunctionalSeries probe;
        probe.ids = functional_ids(eval);
        return probe.col("vt_l2");
    }();

    const auto record = [&](const SimState& st) {
        const std::size_t n = traj.times.size();
        traj.times.push_back(st.t);
        traj.u_samples.push_back(st.u);
        traj.v_samples.push_back(st.v);
        append_row(traj.series, st, p, eval);
        if (n > 0) {
            // vt_l2 appended retroactively from consecutive sample pairs
            const double dts = traj.times[n] - traj.times[n - 1];
            const auto& va = traj.v_samples[n - 1].values;
            const auto& vb = traj.v_samples[n].values;
            double acc = 0.0;
            for (std::size_t k = 0; k < va.size(); ++k) {
                const double d = (vb[k] - va[k]) / dts;
                acc += d * d;
            }
            traj.series.rows[n][vt_col] = traj.grid.cell_area() * acc;
        }
        for (const auto& ob : observers) ob(st, n);
    };

    record(s);
    double dt_sum = 0.0;
    for (std::size_t target_idx = 1; target_idx < sample_times.size(); ++target_idx) {
        const double target = sample_times[target_idx];
        while (s.t < target) {
            double dt = stable_dt(s, p, ctrl);
            bool hits_target = false;
            if (s.t + dt >= target - 1e-14 * target) {
                dt = target - s.t;
                hits_target = true;
            }
            s = step(s, dt, p, ctrl, forcing);
            if (hits_target) s.t = target;
            ++traj.steps;
            dt_sum += dt;
            if (s.u.max() > ctrl.blowup_threshold) {
                traj.blew_up = true;
                traj.t_blowup = s.t;
                traj.dt_avg = traj.steps > 0 ? dt_sum / traj.steps : 0.0;
                return traj;
            }
        }
        record(s);
    }
    traj.dt_avg = traj.steps > 0 ? dt_sum / traj.steps : 0.0;
    return traj;
}

} // namespace dgt
