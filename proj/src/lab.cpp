#include "dgt/lab.hpp"
#include "dgt/errors.hpp"
#include "dgt/functionals.hpp"
#include "dgt/parallel.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace dgt {

double InequalitySample::min_c() const {
    const double need = lhs - eta_term;
    const double coef = c_coefficient();
    if (need <= 0.0) return 0.0;
    if (coef <= 0.0)
        throw NumericalError("inequality unsatisfiable in c (quadrature bug?)");
    return need / coef;
}

InequalitySample check_appendix_inequality(const ScalarField& phi, const ScalarField& psi,
                                           double p, double eta, double c) {
    if (!(phi.grid == psi.grid))
        throw std::invalid_argument("check_appendix_inequality: grid mismatch");
    if (!(phi.min() > 0.0) || !(psi.min() > 0.0))
        throw std::invalid_argument("check_appendix_inequality: fields must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("check_appendix_inequality: p must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("check_appendix_inequality: eta must be > 0");

    const auto& g = phi.grid;
    const double cell = g.cell_area();
    const ScalarField gphi = cell_gradient_sq(phi);
    const ScalarField gpsi = cell_gradient_sq(psi);

    double lhs = 0.0, eta_int = 0.0, phi_p1 = 0.0, phi_int = 0.0, phi_psi = 0.0, grad4psi = 0.0;
    double psi_sup = 0.0;
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        const double f = phi.values[k], s = psi.values[k];
        lhs += std::pow(f, p + 1.0) * s * gpsi.values[k];
        eta_int += std::pow(f, p - 1.0) * s * gphi.values[k];
        phi_p1 += std::pow(f, p + 1.0);
        phi_int += f;
        phi_psi += f * s;
        grad4psi += gpsi.values[k] * gpsi.values[k] / (s * s * s);
        psi_sup = std::fmax(psi_sup, s);
    }
    lhs *= cell;
    eta_int *= cell;
    phi_p1 *= cell;
    phi_int *= cell;
    phi_psi *= cell;
    grad4psi *= cell;

    InequalitySample out;
    out.p = p;
    out.eta = eta;
    out.c = c;
    out.lhs = lhs;
    out.eta_term = eta * eta_int;
    const double s2 = psi_sup * psi_sup;
    const double s4 = s2 * s2;
    out.c_term1 = (s2 + s4 / eta) * phi_p1 * grad4psi;
    out.c_term2 = s2 * std::pow(phi_int, 2.0 * p + 1.0) * grad4psi;
    out.c_term3 = s2 * phi_psi;
    out.margin = out.rhs() - out.lhs;
    return out;
}

double fit_constant(const std::vector<InequalitySample>& samples, std::uint64_t* argmax_seed) {
    if (samples.size() < 100)
        throw std::invalid_argument("fit_constant: need at least 100 samples");
    double c = 0.0;
    std::uint64_t arg = samples.front().seed;
    for (const auto& s : samples) {
        const double m = s.min_c();
        if (m > c) {
            c = m;
            arg = s.seed;
        }
    }
    if (argmax_seed) *argmax_seed = arg;
    return c;
}

SobolevSample check_sobolev(const ScalarField& rho, double p) {
    rho.validate("rho");
    const auto& g = rho.grid;
    const double cell = g.cell_area();
    const ScalarField gs = cell_gradient_sq(rho);

    SobolevSample out;
    double l2 = 0.0, gl1 = 0.0, l1 = 0.0, quasi = 0.0;
    const bool need_quasi = true;
    for (std::size_t k = 0; k < rho.values.size(); ++k) {
        const double r = rho.values[k];
        l2 += r * r;
        gl1 += std::sqrt(gs.values[k]);
        l1 += std::fabs(r);
        if (need_quasi) {
            if (r <= 0.0)
                throw std::invalid_argument(
                    "check_sobolev: the L^(1/(p+1)) quasi-norm needs a positive field");
            quasi += std::pow(r, 1.0 / (p + 1.0));
        }
    }
    out.l2sq = cell * l2;
    out.grad_l1 = cell * gl1;
    out.l1 = cell * l1;
    out.quasi = std::pow(cell * quasi, p + 1.0);

    const double den62 = out.grad_l1 * out.grad_l1 + out.l1 * out.l1;
    out.c_fit_62 = den62 > 0.0 ? out.l2sq / den62 : 0.0;
    const double den65 = out.grad_l1 + out.quasi;
    out.c_fit_65 = den65 > 0.0 ? std::sqrt(out.l2sq) / den65 : 0.0;
    return out;
}

double psi_of(double xi) {
    const double e = std::exp(1.0);
    const double w = xi + e;
    const double lw = std::log(w);
    return w * lw * lw - 2.0 * w * lw + 2.0 * w;
}

double psi_prime_of(double xi) {
    const double lw = std::log(xi + std::exp(1.0));
    return lw * lw;
}

double check_psi_bound(double xi) {
    if (xi < 0.0) throw std::invalid_argument("check_psi_bound: xi must be >= 0");
    const double e = std::exp(1.0);
    const double w = xi + e;
    const double lw = std::log(w);
    const double lhs = psi_of(xi) - xi * psi_prime_of(xi); // = e lw^2 - 2 w lw + 2 w
    const double bound = e * w * lw;
    return bound - lhs;
}

ElementaryReport check_elementary(long long n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ElementaryReport rep;
    rep.samples = n;
    rep.worst_half_square = -std::numeric_limits<double>::infinity();
    rep.worst_sum_square = -std::numeric_limits<double>::infinity();
    for (long long k = 0; k < n; ++k) {
        const double a = rng.uniform(-1e3, 1e3);
        const double b = rng.uniform(-1e3, 1e3);
        rep.worst_half_square =
            std::fmax(rep.worst_half_square, 0.5 * a * a - b * b - (a - b) * (a - b));
        rep.worst_sum_square =
            std::fmax(rep.worst_sum_square, (a + b) * (a + b) - 2.0 * (a * a + b * b));
    }
    return rep;
}

namespace {

InequalitySample lab_sample(const FieldSampler& base, const GridSpec& grid, double p, double eta,
                            double c, std::uint64_t seed) {
    FieldSampler s_phi = base;
    s_phi.seed = seed * 2 + 1;
    FieldSampler s_psi = base;
    s_psi.seed = seed * 2 + 2;
    const ScalarField phi = sample_field(s_phi, grid);
    const ScalarField psi = sample_field(s_psi, grid);
    InequalitySample out = check_appendix_inequality(phi, psi, p, eta, c);
    out.seed = seed;
    return out;
}

} // namespace

LabRun run_lab_split(const FieldSampler& base, const GridSpec& grid, double p, double eta,
                     std::uint64_t seed0, int n_calib, int n_valid, int jobs) {
    if (n_calib < 100) throw std::invalid_argument("run_lab_split: need >= 100 calibration samples");
    if (n_valid < 1) throw std::invalid_argument("run_lab_split: need validation samples");

    LabRun run;
    run.p = p;
    run.eta = eta;
    run.calibration.resize(static_cast<std::size_t>(n_calib));
    parallel_for(run.calibration.size(), jobs, [&](std::size_t k) {
        run.calibration[k] = lab_sample(base, grid, p, eta, 1.0, seed0 + k);
    });
    run.c_fit = fit_constant(run.calibration, &run.c_fit_seed);

    run.validation.resize(static_cast<std::size_t>(n_valid));
    parallel_for(run.validation.size(), jobs, [&](std::size_t k) {
        InequalitySample s = lab_sample(base, grid, p, eta, run.c_fit,
                                        seed0 + static_cast<std::uint64_t>(n_calib) + k);
        s.margin = s.eta_term + run.c_fit * s.c_coefficient() - s.lhs;
        s.c = run.c_fit;
        run.validation[k] = s;
    });
    for (const auto& s : run.validation)
        if (s.margin < 0.0) ++run.violations;
    return run;
}

void write_lab_csv(const std::string& path, const LabRun& run) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_lab_csv: cannot open " + path);
    os << "split,seed,p,eta,c,lhs,eta_term,c_term1,c_term2,c_term3,margin\n";
    const auto emit = [&](const char* split, const InequalitySample& s) {
        os << split << ',' << s.seed << ',' << format_double(s.p) << ',' << format_double(s.eta)
           << ',' << format_double(s.c) << ',' << format_double(s.lhs) << ','
           << format_double(s.eta_term) << ',' << format_double(s.c_term1) << ','
           << format_double(s.c_term2) << ',' << format_double(s.c_term3) << ','
           << format_double(s.margin) << '\n';
    };
    for (const auto& s : run.calibration) emit("calibration", s);
    for (const auto& s : run.validation) emit("validation", s);
    if (!os) throw IoError("write_lab_csv: short write to " + path);
}

} // namespace dgt
