#ifndef DGT_LAB_HPP
#define DGT_LAB_HPP

#include "dgt/grid.hpp"
#include "dgt/sampler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dgt {

// One evaluation of the appendix inequality
//   int phi^(p+1) psi |grad psi|^2
//     <= eta int phi^(p-1) psi |grad phi|^2
//      + c (|psi|^2 + |psi|^4/eta) int phi^(p+1) int |grad psi|^4/psi^3
//      + c |psi|^2 (int phi)^(2p+1)   int |grad psi|^4/psi^3
//      + c |psi|^2 int phi psi
// (sup norms of psi). The c-free coefficient sum is kept so the minimal c is
// a per-sample closed form.
struct InequalitySample {
    std::uint64_t seed = 0;
    double p = 1.0, eta = 1.0, c = 1.0;
    double lhs = 0.0;
    double eta_term = 0.0;
    double c_term1 = 0.0, c_term2 = 0.0, c_term3 = 0.0; // at c = 1
    double margin = 0.0;   // rhs - lhs at the given c
    double rhs() const { return eta_term + c * (c_term1 + c_term2 + c_term3); }
    double c_coefficient() const { return c_term1 + c_term2 + c_term3; }
    // Smallest c making the margin nonnegative; throws when no c can.
    double min_c() const;
};

InequalitySample check_appendix_inequality(const ScalarField& phi, const ScalarField& psi,
                                           double p, double eta, double c);

// Exact infimum of c over the calibration set (max of per-sample minima);
// requires >= 100 samples. argmax_seed reports the binding sample.
double fit_constant(const std::vector<InequalitySample>& samples, std::uint64_t* argmax_seed = nullptr);

// The planar Sobolev-type bounds
//   (6.2-form) int rho^2        <= C (|grad rho|_L1^2 + |rho|_L1^2)
//   (6.5-form) |rho|_L2         <= C (|grad rho|_L1 + |rho|_L^(1/(p+1)))
// with the quasi-norm evaluated as (int rho^(1/(p+1)))^(p+1). Returns the
// fitted C of each family.
struct SobolevSample {
    double l2sq = 0.0, grad_l1 = 0.0, l1 = 0.0, quasi = 0.0;
    double c_fit_62 = 0.0, c_fit_65 = 0.0;
};
SobolevSample check_sobolev(const ScalarField& rho, double p);

// margin = e (xi+e) ln(xi+e) - [e ln^2(xi+e) - 2(xi+e) ln(xi+e) + 2(xi+e)],
// nonnegative for xi >= 0.
double check_psi_bound(double xi);
double psi_of(double xi);        // (xi+e) ln^2(xi+e) - 2(xi+e) ln(xi+e) + 2(xi+e)
double psi_prime_of(double xi);  // ln^2(xi+e)

// Property-sweeps (a-b)^2 >= a^2/2 - b^2 and (a+b)^2 <= 2(a^2+b^2) over
// n random pairs; returns the largest violation (<= 0 means all held).
struct ElementaryReport {
    long long samples = 0;
    double worst_half_square = 0.0; // max of a^2/2 - b^2 - (a-b)^2
    double worst_sum_square = 0.0;  // max of (a+b)^2 - 2(a^2+b^2)
};
ElementaryReport check_elementary(long long n = 100000, std::uint64_t seed = 7);

// Calibration/validation split driven by seed ranges: calibration seeds
// [seed0, seed0+n_calib), validation the next n_valid.
struct LabRun {
    double p = 1.0, eta = 1.0;
    double c_fit = 0.0;
    std::uint64_t c_fit_seed = 0;
    std::vector<InequalitySample> calibration;
    std::vector<InequalitySample> validation; // margins evaluated at c_fit
    int violations = 0;
};

LabRun run_lab_split(const FieldSampler& base, const GridSpec& grid, double p, double eta,
                     std::uint64_t seed0, int n_calib, int n_valid, int jobs = 1);

void write_lab_csv(const std::string& path, const LabRun& run);

} // namespace dgt

#endif
