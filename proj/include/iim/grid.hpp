#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <iosfwd>
#include <string>

#include "iim/common.hpp"

namespace iim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Array2D = Eigen::ArrayXXd;

enum class Centering { node, cell };

const char* to_string(Centering c);
Centering centering_from_string(const std::string& s);

// Uniform 2D Cartesian grid with square cells.  Node (i,j) sits at
// origin + (i,j)*h; cell (i,j) is centered half a spacing further.
// Periodic axes identify index n with index 0.
struct Grid {
    Vec2 origin{0.0, 0.0};
    Vec2 extent{1.0, 1.0};
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    bool periodic_x = true;
    bool periodic_y = true;

    Grid() = default;
    Grid(Vec2 origin_, Vec2 extent_, int nx_, int ny_, bool periodic_x_ = true,
         bool periodic_y_ = true);

    static Grid unit_square(int n) { return Grid({0, 0}, {1, 1}, n, n); }

    Vec2 node(int i, int j) const { return origin + h * Vec2(i, j); }
    Vec2 cell_center(int i, int j) const {
        return origin + h * Vec2(i + 0.5, j + 0.5);
    }
    Vec2 uface(int i, int j) const { return origin + h * Vec2(i, j + 0.5); }
    Vec2 vface(int i, int j) const { return origin + h * Vec2(i + 0.5, j); }

    // Canonical storage index for a (possibly out-of-range) index.  Periodic
    // axes wrap; non-periodic axes clamp (constant extrapolation for stencil
    // reads near the boundary).
    int node_i(int i) const {
        return periodic_x ? wrap_index(i, nx) : std::clamp(i, 0, nx);
    }
    int node_j(int j) const {
        return periodic_y ? wrap_index(j, ny) : std::clamp(j, 0, ny);
    }
    int cell_i(int i) const {
        return periodic_x ? wrap_index(i, nx) : std::clamp(i, 0, nx - 1);
    }
    int cell_j(int j) const {
        return periodic_y ? wrap_index(j, ny) : std::clamp(j, 0, ny - 1);
    }

    // Map a point into the fundamental domain on periodic axes.
    Vec2 wrap_point(const Vec2& x) const;

    bool operator==(const Grid& o) const;
};

// Scalar samples on nodes ((nx+1) x (ny+1)) or cells (nx x ny).  On periodic
// axes the trailing node row/column duplicates index 0; reads go through the
// canonical index so the duplicate never disagrees.
struct ScalarField {
    Grid grid;
    Centering centering = Centering::node;
    Array2D values;

    ScalarField() = default;
    ScalarField(const Grid& g, Centering c, double fill = 0.0);

    int size_x() const { return static_cast<int>(values.rows()); }
    int size_y() const { return static_cast<int>(values.cols()); }

    double& at(int i, int j) { return values(i, j); }
    double at(int i, int j) const { return values(i, j); }

    // Stencil read with periodic wrapping; non-periodic out-of-range access
    // is a caller bug and asserts in debug builds.
    double read(int i, int j) const {
        if (centering == Centering::node) {
            return values(grid.node_i(i), grid.node_j(j));
        }
        return values(grid.cell_i(i), grid.cell_j(j));
    }

    Vec2 position(int i, int j) const {
        return centering == Centering::node ? grid.node(i, j)
                                            : grid.cell_center(i, j);
    }

    bool all_finite() const { return values.allFinite(); }

    // Copies canonical data into the duplicated trailing row/column.
    void sync_periodic_edges();
};

// MAC-staggered velocity: u on x-faces ((nx+1) x ny), v on y-faces
// (nx x (ny+1)).  Same duplication convention as ScalarField.
struct VectorFieldMAC {
    Grid grid;
    Array2D u; // x-component on x-faces
    Array2D v; // y-component on y-faces

    VectorFieldMAC() = default;
    explicit VectorFieldMAC(const Grid& g, double fill = 0.0);

    double read_u(int i, int j) const {
        return u(grid.node_i(i), grid.cell_j(j));
    }
    double read_v(int i, int j) const {
        return v(grid.cell_i(i), grid.node_j(j));
    }

    double max_abs() const;
    bool all_finite() const { return u.allFinite() && v.allFinite(); }
    void sync_periodic_edges();
};

// ---- stencil operators (second order, pure) --------------------------------

// Central-difference gradient at the field's own centering.
// One-sided second-order closures on non-periodic boundaries.
std::array<ScalarField, 2> gradient_central(const ScalarField& f);

// 5-point Laplacian at the field's own centering.
ScalarField laplacian(const ScalarField& f);

// Conservative face-difference divergence, cell-centered.
ScalarField divergence_mac(const VectorFieldMAC& w);

// Face-centered gradient of a cell field; the discrete adjoint of
// divergence_mac on periodic grids.
VectorFieldMAC gradient_faces(const ScalarField& cell_field);

// ---- interpolation ----------------------------------------------------------

double interp_bilinear(const ScalarField& f, const Vec2& x);
Vec2 interp_bilinear(const VectorFieldMAC& w, const Vec2& x);

// Catmull-Rom bicubic interpolation; C^1 across cell boundaries, which keeps
// twice-differenced consumers of interpolated data convergent.
double interp_bicubic(const ScalarField& f, const Vec2& x);

// ---- snapshot format --------------------------------------------------------
// Header: FIELD <name> <centering> <nx> <ny> <h> <t>
// followed by row-major ASCII (one y-row per line) or, when binary=true, a
// line "BINARY" and a little-endian double block.

void write_field(std::ostream& os, const ScalarField& f,
                 const std::string& name, double t, bool binary = false);
void write_field(const std::string& path, const ScalarField& f,
                 const std::string& name, double t, bool binary = false);

struct NamedField {
    std::string name;
    double t = 0.0;
    ScalarField field;
};

NamedField read_field(std::istream& is);
NamedField read_field(const std::string& path);

} // namespace iim
