#ifndef DGT_STEPPER_HPP
#define DGT_STEPPER_HPP

#include "dgt/functionals.hpp"
#include "dgt/grid.hpp"
#include "dgt/model.hpp"

#include <functional>
#include <vector>

namespace dgt {

struct StepControl {
    double cfl_safety = 0.4;      // in (0,1]
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double blowup_threshold = 1e8; // on max u
    double cg_rel_tol = 1e-10;

    void validate() const;
};

// Stability-controlled step size: cfl_safety times the smallest of the
// diffusion bound 1/(2 max(u^(l-1) v) (1/hx^2 + 1/hy^2)), the taxis bound
// 1/(2 (sx/hx + sy/hy)) with s* the largest donor-cell taxis speed
// u^l v |grad v| per direction, and the reaction bound 1/(2 max(1, max u));
// the result is clamped to [dt_min, dt_max].
double stable_dt(const SimState& s, const ModelParams& p, const StepControl& c);

// Test-only manufactured-solution hook: extra sources added to both
// equations. fu is applied explicitly at the current time, fv enters the
// implicit v solve at the end-of-step time.
struct Forcing {
    std::function<ScalarField(double t)> fu;
    std::function<ScalarField(double t)> fv;
};

// One IMEX step: explicit Euler for u (positivity audited, never clipped),
// then the M-matrix backward Euler solve
//   (I - dt Lap + dt diag(u_old)) v_new = v_old (+ dt fv),
// by conjugate gradients to relative residual cg_rel_tol, capped at
// 10 sqrt(nx ny) iterations.
SimState step(const SimState& s, double dt, const ModelParams& p,
              const StepControl& c = {}, const Forcing* forcing = nullptr);

struct Trajectory {
    GridSpec grid;
    std::vector<double> times;
    std::vector<ScalarField> u_samples;
    std::vector<ScalarField> v_samples;
    FunctionalSeries series;
    long long steps = 0;
    double dt_avg = 0.0;
    bool blew_up = false;
    double t_blowup = 0.0;
};

using Observer = std::function<void(const SimState&, std::size_t sample_index)>;

// Evenly spaced sample times {0, T/n, ..., T}.
std::vector<double> uniform_samples(double T, int n);

// Integrates the regularized problem (u0 + eps, v0) to T with adaptive dt,
// recording state snapshots and functional values at the given sample times
// (strictly increasing, starting at 0, ending at T). Observers fire at each
// sample. A blow-up-threshold trip halts the run and records the estimated
// blow-up time; for this system that indicates a scheme failure, not a true
// blow-up.
Trajectory run(const ModelParams& p, const InitialData& init, double T,
               const std::vector<double>& sample_times, const StepControl& ctrl,
               const EvalOptions& eval = {}, const std::vector<Observer>& observers = {},
               const Forcing* forcing = nullptr);

} // namespace dgt

#endif
