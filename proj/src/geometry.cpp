#include "iim/geometry.hpp"

#include <cmath>
#include <sstream>

namespace iim {

Vec2 interp_bilinear(const VectorNodeField& f, const Vec2& x) {
    return {interp_bilinear(f.x, x), interp_bilinear(f.y, x)};
}

Mat2 interp_bilinear(const TensorNodeField& f, const Vec2& x) {
    Mat2 m;
    m(0, 0) = interp_bilinear(f.c[0][0], x);
    m(0, 1) = interp_bilinear(f.c[0][1], x);
    m(1, 0) = interp_bilinear(f.c[1][0], x);
    m(1, 1) = interp_bilinear(f.c[1][1], x);
    return m;
}

NormalField normal(const LevelSet& ls) {
    const Grid& g = ls.grid();
    const auto grad = gradient_central(ls.phi);
    NormalField out;
    out.n = VectorNodeField(g);
    std::ostringstream offenders;
    int bad = 0;
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 gv(grad[0].at(i, j), grad[1].at(i, j));
            const double m = gv.norm();
            if (ls.band_mask(i, j) && m < 0.5) {
                if (bad < 8) offenders << " (" << i << "," << j << ")";
                ++bad;
            }
            out.n.set(i, j, m > 1e-30 ? Vec2(gv / m) : Vec2(0, 0));
        }
    }
    if (bad > 0) {
        throw DomainError("normal: |grad phi| < 0.5 at " + std::to_string(bad) +
                          " band nodes:" + offenders.str());
    }
    return out;
}

CurvatureField curvature(const LevelSet& ls) {
    const Grid& g = ls.grid();
    const NormalField nf = normal(ls);
    const auto dnx = gradient_central(nf.n.x);
    const auto dny = gradient_central(nf.n.y);
    CurvatureField kappa(g, Centering::node);
    const double cap = 2.0 / g.h;
    int clamped = 0;
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            double k = -(dnx[0].at(i, j) + dny[1].at(i, j));
            if (ls.band_mask(i, j) && std::abs(k) > cap) {
                k = std::copysign(cap, k);
                ++clamped;
            }
            kappa.at(i, j) = k;
        }
    }
    if (clamped > 0) {
        warn("curvature clamped to 2/h at " + std::to_string(clamped) +
             " band nodes (under-resolved feature)");
    }
    return kappa;
}

VectorNodeField tangential_gradient(const LevelSet& ls, const ScalarField& q) {
    const Grid& g = ls.grid();
    const NormalField nf = normal(ls);
    const auto grad = gradient_central(q);
    VectorNodeField out(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 n = nf.at(i, j);
            const Vec2 gq(grad[0].at(i, j), grad[1].at(i, j));
            out.set(i, j, gq - n.dot(gq) * n);
        }
    }
    return out;
}

ScalarField tangential_laplacian(const LevelSet& ls, const ScalarField& q) {
    const Grid& g = ls.grid();
    if (ls.band_halfwidth < 8.0 * g.h - 1e-12) {
        throw ResolutionError("tangential_laplacian: band narrower than 8h, nested stencils do not fit");
    }
    const NormalField nf = normal(ls);
    const VectorNodeField tg = tangential_gradient(ls, q);
    const auto dgx = gradient_central(tg.x);
    const auto dgy = gradient_central(tg.y);
    ScalarField out(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 n = nf.at(i, j);
            Mat2 grad_tg;
            grad_tg(0, 0) = dgx[0].at(i, j);
            grad_tg(0, 1) = dgy[0].at(i, j);
            grad_tg(1, 0) = dgx[1].at(i, j);
            grad_tg(1, 1) = dgy[1].at(i, j);
            // ((I-nn).grad).G = sum_ij (delta_ij - n_i n_j) d_i G_j
            const Mat2 proj = Mat2::Identity() - n * n.transpose();
            out.at(i, j) = (proj.array() * grad_tg.array()).sum();
        }
    }
    return out;
}

TensorNodeField grad_normal(const LevelSet& ls) {
    const Grid& g = ls.grid();
    const NormalField nf = normal(ls);
    const auto dnx = gradient_central(nf.n.x);
    const auto dny = gradient_central(nf.n.y);
    TensorNodeField out(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            Mat2 m;
            m(0, 0) = dnx[0].at(i, j); // d_x n_x
            m(0, 1) = dny[0].at(i, j); // d_x n_y
            m(1, 0) = dnx[1].at(i, j); // d_y n_x
            m(1, 1) = dny[1].at(i, j); // d_y n_y
            out.set(i, j, m);
        }
    }
    return out;
}

double check_cross_identity(const Eigen::Matrix3d& G, const Eigen::Vector3d& v,
                            const Eigen::Vector3d& w) {
    const double scale = std::max(1.0, G.norm());
    if (std::abs(G.trace()) > 1e-13 * scale) {
        throw DomainError("check_cross_identity: matrix is not trace-free");
    }
    // (v.G)_j = v_i G_ij, G.(a)_i = G_ij a_j
    const Eigen::Vector3d vG = G.transpose() * v;
    const Eigen::Vector3d wG = G.transpose() * w;
    const Eigen::Vector3d lhs = vG.cross(w) + v.cross(wG);
    const Eigen::Vector3d rhs = -(G * v.cross(w));
    return (lhs - rhs).norm();
}

double check_normal_symmetry(const LevelSet& ls,
                             const std::vector<Vec2>& interface_points) {
    const TensorNodeField gn = grad_normal(ls);
    const NormalField nf = normal(ls);
    double worst = 0.0;
    for (const Vec2& p : interface_points) {
        const Mat2 m = interp_bilinear(gn, p);
        Vec2 n = interp_bilinear(nf.n, p);
        n.normalize();
        const Vec2 t(-n.y(), n.x());
        const Mat2 antisym = m - m.transpose();
        worst = std::max(worst, std::abs(t.dot(antisym * n)));
    }
    return worst;
}

double surface_divergence_identity_gap(const LevelSet& ls,
                                       const VectorNodeField& v) {
    const auto poly = extract_interface(ls);
    const NormalField nf = normal(ls);
    const CurvatureField kappa = curvature(ls);
    const auto dvx = gradient_central(v.x);
    const auto dvy = gradient_central(v.y);

    TensorNodeField grad_v(ls.grid());
    for (int j = 0; j <= ls.grid().ny; ++j) {
        for (int i = 0; i <= ls.grid().nx; ++i) {
            Mat2 m;
            m(0, 0) = dvx[0].at(i, j);
            m(0, 1) = dvy[0].at(i, j);
            m(1, 0) = dvx[1].at(i, j);
            m(1, 1) = dvy[1].at(i, j);
            grad_v.set(i, j, m);
        }
    }

    double lhs = 0.0, rhs = 0.0;
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) {
        const Vec2& a = poly[k];
        const Vec2& b = poly[(k + 1) % n];
        const double ds = (b - a).norm();
        const Vec2 mid = 0.5 * (a + b);
        Vec2 nm = interp_bilinear(nf.n, mid);
        nm.normalize();
        const Mat2 gv = interp_bilinear(grad_v, mid);
        const Mat2 proj = Mat2::Identity() - nm * nm.transpose();
        const double surf_div = (proj.array() * gv.array()).sum();
        const Vec2 vm = interp_bilinear(v, mid);
        const double div_n = -interp_bilinear(kappa, mid);
        lhs += surf_div * ds;
        rhs += vm.dot(nm) * div_n * ds;
    }
    return std::abs(lhs - rhs);
}

} // namespace iim
