#include "dgt/grid.hpp"
#include "dgt/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

namespace dgt {

GridSpec::GridSpec(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 4 || ny < 4)
        throw std::invalid_argument("GridSpec: nx and ny must be >= 4");
    if (!(lx > 0.0) || !(ly > 0.0))
        throw std::invalid_argument("GridSpec: lx and ly must be positive");
}

double ScalarField::min() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::fmin(m, v);
    return m;
}

double ScalarField::max() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::fmax(m, v);
    return m;
}

void ScalarField::validate(const char* what) const {
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double v = at(i, j);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << what << ": non-finite value at cell (i=" << i << ", j=" << j << ")";
                throw std::invalid_argument(os.str());
            }
        }
    if (declared_sign == Sign::positive && !(min() > 0.0))
        throw std::invalid_argument(std::string(what) + ": declared positive but min <= 0");
    if (declared_sign == Sign::nonnegative && !(min() >= 0.0))
        throw std::invalid_argument(std::string(what) + ": declared nonnegative but min < 0");
}

double FaceVectorField::max_abs() const {
    double m = 0.0;
    for (double v : xf) m = std::fmax(m, std::fabs(v));
    for (double v : yf) m = std::fmax(m, std::fabs(v));
    return m;
}

bool FaceVectorField::boundary_faces_zero() const {
    const int nx = grid.nx, ny = grid.ny;
    for (int j = 0; j < ny; ++j)
        if (x(0, j) != 0.0 || x(nx, j) != 0.0) return false;
    for (int i = 0; i < nx; ++i)
        if (y(i, 0) != 0.0 || y(i, ny) != 0.0) return false;
    return true;
}

double integrate(const ScalarField& f) {
    const auto& g = f.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = f.at(i, j);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "integrate: non-finite value at cell (i=" << i << ", j=" << j << ")";
                throw std::invalid_argument(os.str());
            }
            s += v;
        }
    return g.cell_area() * s;
}

FaceVectorField face_gradient(const ScalarField& f) {
    f.validate("face_gradient");
    const auto& g = f.grid;
    FaceVectorField F(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            F.x(i, j) = (f.at(i, j) - f.at(i - 1, j)) * ihx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            F.y(i, j) = (f.at(i, j) - f.at(i, j - 1)) * ihy;
    return F;
}

ScalarField divergence(const FaceVectorField& F) {
    if (!F.boundary_faces_zero())
        throw std::invalid_argument("divergence: nonzero boundary face violates the no-flux contract");
    const auto& g = F.grid;
    ScalarField d(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d.at(i, j) = (F.x(i + 1, j) - F.x(i, j)) * ihx + (F.y(i, j + 1) - F.y(i, j)) * ihy;
    return d;
}

ScalarField neumann_laplacian(const ScalarField& f) {
    return divergence(face_gradient(f));
}

ScalarField cell_gradient_dot(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("cell_gradient_dot: grid mismatch");
    const FaceVectorField A = face_gradient(a);
    const FaceVectorField B = face_gradient(b);
    const auto& g = a.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double gx = 0.5 * (A.x(i, j) * B.x(i, j) + A.x(i + 1, j) * B.x(i + 1, j));
            const double gy = 0.5 * (A.y(i, j) * B.y(i, j) + A.y(i, j + 1) * B.y(i, j + 1));
            out.at(i, j) = gx + gy;
        }
    return out;
}

ScalarField cell_gradient_sq(const ScalarField& f) {
    return cell_gradient_dot(f, f);
}

double dot_cells(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("dot_cells: grid mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return a.grid.cell_area() * s;
}

double dot_faces(const FaceVectorField& A, const FaceVectorField& B) {
    if (!(A.grid == B.grid))
        throw std::invalid_argument("dot_faces: grid mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < A.xf.size(); ++k) s += A.xf[k] * B.xf[k];
    for (std::size_t k = 0; k < A.yf.size(); ++k) s += A.yf[k] * B.yf[k];
    return A.grid.cell_area() * s;
}

void write_snapshot(const std::string& path, const ScalarField& f, double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_snapshot: cannot open " + path);
    char head[160];
    const int n = std::snprintf(head, sizeof head, "DGT1 %d %d %.17g %.17g %.17g\n",
                                f.grid.nx, f.grid.ny, f.grid.lx, f.grid.ly, t);
    os.write(head, n);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw IoError("write_snapshot: short write to " + path);
}

ScalarField read_snapshot(const std::string& path, double* t_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_snapshot: cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw IoError("read_snapshot: missing header in " + path);
    std::istringstream hs(header);
    std::string magic;
    int nx = 0, ny = 0;
    double lx = 0, ly = 0, t = 0;
    hs >> magic >> nx >> ny >> lx >> ly >> t;
    if (!hs || magic != "DGT1")
        throw IoError("read_snapshot: bad header in " + path);
    ScalarField f(GridSpec(nx, ny, lx, ly));
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double)))
        throw IoError("read_snapshot: truncated payload in " + path);
    if (t_out) *t_out = t;
    return f;
}

} // namespace dgt
