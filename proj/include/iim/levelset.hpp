#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "iim/grid.hpp"

namespace iim {

// ---- analytic interface shapes ----------------------------------------------

struct Circle {
    Vec2 center;
    double radius;
};

struct Ellipse {
    Vec2 center;
    double a; // semi-axis along x
    double b; // semi-axis along y
};

// Closed curve given by ordered sample points (no repetition of the first).
struct ParametricCurve {
    std::vector<Vec2> points;
};

using InterfaceShape = std::variant<Circle, Ellipse, ParametricCurve>;

// Dense polyline sampling of a shape, counterclockwise.
std::vector<Vec2> sample_shape(const InterfaceShape& shape, int n);

// Signed distance to the shape boundary, positive inside, by brute-force
// nearest point over a dense sampling (exact for circles).
double shape_signed_distance(const InterfaceShape& shape, const Vec2& x,
                             int oversample = 4096);

bool shape_contains(const InterfaceShape& shape, const Vec2& x);

// ---- level set ---------------------------------------------------------------

// Level-set state: phi > 0 inside the interface, approximately a signed
// distance on the narrow band.  band_mask marks nodes with |phi| <=
// band_halfwidth; maintained_mask adds the stencil margin that transport and
// reinitialization keep up to date.
struct LevelSet {
    ScalarField phi;            // node-centered
    double band_halfwidth = 0.0;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> band_mask;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> maintained_mask;

    const Grid& grid() const { return phi.grid; }
    void retag_band();

    static constexpr double kDefaultBandCells = 8.0;
    static constexpr double kMarginCells = 6.0;
};

// Signed distance by exact near-interface seeding plus fast sweeping.
LevelSet init_signed_distance(const InterfaceShape& shape, const Grid& grid,
                              double band_halfwidth = -1.0);

// One HJ-WENO5 / TVD-RK3 transport step on the maintained band.
LevelSet advect_phi(const LevelSet& ls, const VectorFieldMAC& w, double dt);

// Same transport applied to any node scalar living on the band of ls.
ScalarField advect_band_scalar(const ScalarField& q, const LevelSet& ls,
                               const VectorFieldMAC& w, double dt);

// Subcell-anchored reinitialization toward |grad phi| = 1 on the band.
LevelSet reinitialize(const LevelSet& ls, int n_pseudo_steps = 40);

// Ordered closed polyline of the zero set (marching squares, bilinear edge
// crossings).  Oriented so the phi > 0 region lies on the left.
std::vector<Vec2> extract_interface(const LevelSet& ls);

// Same polyline with each crossing refined along its grid edge against the
// bicubic interpolant (kills the grid-coherent O(h^2) crossing bias that
// accumulates over repeated reinitializations).
std::vector<Vec2> extract_interface_refined(const LevelSet& ls);

double polyline_length(const std::vector<Vec2>& poly);
double polyline_area(const std::vector<Vec2>& poly); // shoelace, signed

// Subdivides each segment `factor` times using blended through-vertex
// quadratics (chordal bias drops by factor^2).
std::vector<Vec2> refine_polyline_quadratic(const std::vector<Vec2>& poly,
                                            int factor);
double hausdorff_distance(const std::vector<Vec2>& a,
                          const std::vector<Vec2>& b);
void write_polyline_csv(const std::string& path,
                        const std::vector<Vec2>& poly);

} // namespace iim
