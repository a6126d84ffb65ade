#ifndef DGT_FUNCTIONALS_HPP
#define DGT_FUNCTIONALS_HPP

#include "dgt/grid.hpp"
#include "dgt/model.hpp"

#include <string>
#include <vector>

namespace dgt {

// Time-stamped values of every audited functional. Columns are fixed by
// EvalOptions; rows align with times. Serialized as CSV with a header row
// of ids and one row per sample time.
struct FunctionalSeries {
    std::vector<std::string> ids;
    std::vector<double> times;
    std::vector<std::vector<double>> rows;

    bool has(const std::string& id) const;
    std::size_t col(const std::string& id) const; // throws on unknown id
    double value(std::size_t row, const std::string& id) const { return rows[row][col(id)]; }
    std::vector<double> column(const std::string& id) const;
    std::size_t size() const { return times.size(); }
};

struct EvalOptions {
    std::vector<double> p_list = {2.0}; // exponents for the L^p family
    double b = 1.0;                     // energy-functional knob
};

// Column ids, in serialization order.
std::vector<std::string> functional_ids(const EvalOptions& opt);

// Scalar moments and gradient functionals of one state, cell quadrature with
// cell_gradient_sq for gradient integrands. The d*_dt columns are
// instantaneous rates obtained by the chain rule from the discrete right-hand
// sides, so on spatially constant states the differential-inequality audits
// reduce to exact scalar calculus. vt_l2 is filled retroactively by the run
// driver from consecutive samples and is zero here.
std::vector<double> eval_functionals(const SimState& s, const ModelParams& p,
                                     const EvalOptions& opt);

// The l-case energy functional:
//   l<2 or l>3 :  4b/((l-3)(l-2)) int u^(3-l) + int |grad v|^4 / v^3
//   2<l<3     : -4b/((3-l)(l-2)) int u^(3-l) + int |grad v|^4 / v^3
//   l=2       :  4b int u ln u              + int |grad v|^4 / v^3
//   l=3       : -4b int ln u                + int |grad v|^4 / v^3
// l within 1e-9 of 2 or 3 but not equal is rejected as ambiguous.
double eval_G(const SimState& s, const ModelParams& p, double b);

// Case selector shared by eval_G and the dissipation audit.
enum class GCase { generic, middle, l_two, l_three };
GCase g_case(double l);

// Append one evaluated row (vt_l2 left at zero).
void append_row(FunctionalSeries& series, const SimState& s, const ModelParams& p,
                const EvalOptions& opt);

void write_series_csv(const std::string& path, const FunctionalSeries& series);
FunctionalSeries read_series_csv(const std::string& path);

// Trapezoidal time integral of one column over the full sampled range.
double trapezoid(const FunctionalSeries& series, const std::string& id);

std::string format_double(double v); // %.17g, shared by all text emitters

} // namespace dgt

#endif
