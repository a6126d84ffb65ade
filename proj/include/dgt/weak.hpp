#ifndef DGT_WEAK_HPP
#define DGT_WEAK_HPP

#include "dgt/audit.hpp"
#include "dgt/stepper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dgt {

// Smooth space-time test function: a spatial profile with analytic gradient
// times a smooth temporal cutoff chi with chi(t) = 0 for t >= t_cut.
struct TestFunction {
    std::string name;
    std::function<double(double, double)> phi;
    std::function<void(double, double, double&, double&)> grad_phi;
    double t_cut = 1.0;

    double chi(double t) const;
    double chi_prime(double t) const;

    ScalarField sample(const GridSpec& g) const;
};

// phi identically 1 (temporal-only pairing).
TestFunction make_uniform_test(double t_cut);
// Classic mollifier bump of radius r at (cx, cy).
TestFunction make_bump_test(double cx, double cy, double r, double t_cut);
// Deterministic bank: the uniform member plus n-1 seeded bumps.
std::vector<TestFunction> make_test_bank(std::size_t n, const GridSpec& g, double t_cut,
                                         std::uint64_t seed);

// How the time derivative and spatial pairings are discretized.
//   definition: the weak identities with trapezoid-in-time, analytic grad phi
//     at faces, and the flux split -(1/l) v grad(u^l) + u^l v grad v.
//   discrete: the scheme-exact form (backward-difference chi, left-endpoint
//     rectangle in time, face_gradient of the sampled profile, the stepper's
//     own face flux), identically zero on explicit-Euler trajectories.
enum class ResidualForm { definition, discrete };

double residual_u(const Trajectory& traj, const ModelParams& p, const TestFunction& tf,
                  ResidualForm form = ResidualForm::definition);
double residual_v(const Trajectory& traj, const ModelParams& p, const TestFunction& tf,
                  ResidualForm form = ResidualForm::definition);

struct StudyMember {
    std::size_t eps_idx = 0, grid_idx = 0;
    bool ok = false;
    std::string error;
    Trajectory traj;
};

struct ConvergenceReport {
    std::vector<double> eps_list;
    std::vector<int> grid_list;
    std::vector<StudyMember> members; // eps-major order
    // sup-norm differences of u at the finest grid between consecutive eps,
    // restricted to sample times >= tau
    std::vector<double> cauchy;
    double tau = 0.0;
    // per refinement level (grid k paired with eps k): worst residual over
    // the test bank
    std::vector<double> residual_u_levels;
    std::vector<double> residual_v_levels;
    std::vector<AuditVerdict> uniform; // eps-uniformity at the finest grid
    bool cauchy_monotone = false;
    bool residuals_halve = false;

    const StudyMember& member(std::size_t eps_idx, std::size_t grid_idx) const;
};

struct StudyConfig {
    std::vector<double> eps_list;  // decreasing, >= 3 entries
    std::vector<int> grid_list;    // refining, >= 3 entries (nx = ny)
    double lx = 1.0, ly = 1.0;
    double l = 2.0;
    double T = 0.5;
    double tau_frac = 0.1;         // tau = tau_frac * T
    int samples_base = 100;        // doubled per refinement level
    std::size_t bank_size = 5;
    std::uint64_t bank_seed = 2024;
    double band = 0.25;
    StepControl ctrl;
    // analytic initial data so every grid realizes the same fields
    std::function<double(double, double)> u0;
    std::function<double(double, double)> v0;
    int jobs = 1;
};

ConvergenceReport run_convergence_study(const StudyConfig& cfg);

void write_convergence_csv(const std::string& dir, const ConvergenceReport& rep);
std::string render_convergence_summary(const ConvergenceReport& rep);

} // namespace dgt

#endif
