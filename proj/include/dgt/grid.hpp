#ifndef DGT_GRID_HPP
#define DGT_GRID_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace dgt {

// Uniform cell-centered rectangular grid. Cell (i,j) has its center at
// ((i+1/2)hx, (j+1/2)hy); storage is row-major with j outer, i inner.
struct GridSpec {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;

    GridSpec() = default;
    GridSpec(int nx_, int ny_, double lx_, double ly_);

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double area() const { return lx * ly; }
    double cell_area() const { return hx() * hy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double cell_x(int i) const { return (i + 0.5) * hx(); }
    double cell_y(int j) const { return (j + 0.5) * hy(); }

    bool operator==(const GridSpec&) const = default;
};

enum class Sign { unknown, nonnegative, positive };

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    Sign declared_sign = Sign::unknown;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }

    double min() const;
    double max() const;
    // Throws if any value is non-finite, or if the declared sign is violated.
    void validate(const char* what = "field") const;
};

// Face-centered vector field: x components on (nx+1) x ny vertical faces,
// y components on nx x (ny+1) horizontal faces. Under the no-flux convention
// every boundary face entry is exactly zero.
struct FaceVectorField {
    GridSpec grid;
    std::vector<double> xf; // (nx+1)*ny, index j*(nx+1)+i, i in [0,nx]
    std::vector<double> yf; // nx*(ny+1), index j*nx+i,     j in [0,ny]

    FaceVectorField() = default;
    explicit FaceVectorField(const GridSpec& g)
        : grid(g),
          xf(static_cast<std::size_t>(g.nx + 1) * g.ny, 0.0),
          yf(static_cast<std::size_t>(g.nx) * (g.ny + 1), 0.0) {}

    double& x(int i, int j) { return xf[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double x(int i, int j) const { return xf[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double& y(int i, int j) { return yf[static_cast<std::size_t>(j) * grid.nx + i]; }
    double y(int i, int j) const { return yf[static_cast<std::size_t>(j) * grid.nx + i]; }

    double max_abs() const;
    bool boundary_faces_zero() const;
};

// Midpoint quadrature: hx*hy * sum of cell values. Exact on fields affine in
// x and y. Rejects non-finite input, naming the offending cell.
double integrate(const ScalarField& f);

// Two-point face gradients with homogeneous Neumann boundary (reflection
// ghost cells): boundary faces carry exactly zero.
FaceVectorField face_gradient(const ScalarField& f);

// Cell divergence of a no-flux face field; integrate(divergence(F)) telescopes
// to zero. Rejects nonzero boundary faces.
ScalarField divergence(const FaceVectorField& F);

// divergence(face_gradient(f)): the 5-point Neumann Laplacian.
ScalarField neumann_laplacian(const ScalarField& f);

// Pointwise |grad f|^2 at cells: per direction the average of the two squared
// adjacent face gradients (boundary faces contribute zero), then summed.
// Nonnegative, vanishes identically on constants.
ScalarField cell_gradient_sq(const ScalarField& f);

// Same face-averaging convention applied to the product of two gradients;
// cell_gradient_dot(f, f) coincides with cell_gradient_sq(f).
ScalarField cell_gradient_dot(const ScalarField& a, const ScalarField& b);

// Discrete inner products.
double dot_cells(const ScalarField& a, const ScalarField& b);   // hx*hy*sum a_c b_c
double dot_faces(const FaceVectorField& A, const FaceVectorField& B); // hx*hy*sum over faces

// Snapshot format: text header "DGT1 nx ny lx ly t\n" followed by nx*ny
// IEEE-754 64-bit little-endian values, row-major (j outer, i inner).
// Round trip is bit-exact.
void write_snapshot(const std::string& path, const ScalarField& f, double t);
ScalarField read_snapshot(const std::string& path, double* t_out = nullptr);

} // namespace dgt

#endif
