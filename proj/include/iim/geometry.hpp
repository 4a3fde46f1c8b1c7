#pragma once

#include <vector>

#include "iim/levelset.hpp"

namespace iim {

// Node-sampled vector and 2x2 tensor fields built from ScalarField components
// so bilinear interpolation and the stencil operators can be reused.
struct VectorNodeField {
    ScalarField x, y;

    VectorNodeField() = default;
    explicit VectorNodeField(const Grid& g)
        : x(g, Centering::node), y(g, Centering::node) {}

    Vec2 at(int i, int j) const { return {x.at(i, j), y.at(i, j)}; }
    void set(int i, int j, const Vec2& v) {
        x.at(i, j) = v.x();
        y.at(i, j) = v.y();
    }
};

struct TensorNodeField {
    // c[i][j] stores (grad)_ij = d_i comp_j and friends.
    std::array<std::array<ScalarField, 2>, 2> c;

    TensorNodeField() = default;
    explicit TensorNodeField(const Grid& g) {
        for (auto& row : c)
            for (auto& f : row) f = ScalarField(g, Centering::node);
    }

    Mat2 at(int i, int j) const {
        Mat2 m;
        m(0, 0) = c[0][0].at(i, j);
        m(0, 1) = c[0][1].at(i, j);
        m(1, 0) = c[1][0].at(i, j);
        m(1, 1) = c[1][1].at(i, j);
        return m;
    }
    void set(int i, int j, const Mat2& m) {
        c[0][0].at(i, j) = m(0, 0);
        c[0][1].at(i, j) = m(0, 1);
        c[1][0].at(i, j) = m(1, 0);
        c[1][1].at(i, j) = m(1, 1);
    }
};

Vec2 interp_bilinear(const VectorNodeField& f, const Vec2& x);
Mat2 interp_bilinear(const TensorNodeField& f, const Vec2& x);

// Unit normal n = grad(phi)/|grad(phi)|; |n| = 1 wherever |grad(phi)| is
// bounded away from zero (checked on the band).
struct NormalField {
    VectorNodeField n;
    Vec2 at(int i, int j) const { return n.at(i, j); }
};

using CurvatureField = ScalarField;

NormalField normal(const LevelSet& ls);

// kappa = -div(n), positive for convex interfaces (circle: +1/R).
// Values are clamped to |kappa| <= 2/h with a warning.
CurvatureField curvature(const LevelSet& ls);

// (I - nn).grad(q), orthogonal to n by construction.
VectorNodeField tangential_gradient(const LevelSet& ls, const ScalarField& q);

// ((I - nn).grad) . ((I - nn).grad q)
ScalarField tangential_laplacian(const LevelSet& ls, const ScalarField& q);

// (grad n)_ij = d_i n_j by central differences.
TensorNodeField grad_normal(const LevelSet& ls);

// Residual of (v.G) x w + v x (w.G) + G.(v x w) for trace-free G.
double check_cross_identity(const Eigen::Matrix3d& G, const Eigen::Vector3d& v,
                            const Eigen::Vector3d& w);

// Max over interface points of |t.(grad n - grad n^T).n|, the planar
// reduction of the normal-gradient symmetry statement.
double check_normal_symmetry(const LevelSet& ls,
                             const std::vector<Vec2>& interface_points);

// |LHS - RHS| of the surface-divergence identity
//   integral_G (I-nn).grad . v dsigma = integral_G (v.n)(div n) dsigma
// evaluated by polyline quadrature.
double surface_divergence_identity_gap(const LevelSet& ls,
                                       const VectorNodeField& v);

} // namespace iim
