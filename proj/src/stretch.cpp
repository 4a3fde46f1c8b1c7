#include "iim/stretch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iim {

ScalarField stretch_reaction(const LevelSet& ls, const VectorFieldMAC& w) {
    const Grid& g = ls.grid();
    const NormalField nf = normal(ls);

    // Velocity gradient from face values averaged to nodes, then central
    // differences.
    VectorNodeField wn(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            wn.x.at(i, j) = 0.5 * (w.read_u(i, j - 1) + w.read_u(i, j));
            wn.y.at(i, j) = 0.5 * (w.read_v(i - 1, j) + w.read_v(i, j));
        }
    }
    const auto dwx = gradient_central(wn.x);
    const auto dwy = gradient_central(wn.y);

    ScalarField r(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            Mat2 grad_w;
            grad_w(0, 0) = dwx[0].at(i, j); // d_x w_x
            grad_w(0, 1) = dwy[0].at(i, j); // d_x w_y
            grad_w(1, 0) = dwx[1].at(i, j); // d_y w_x
            grad_w(1, 1) = dwy[1].at(i, j); // d_y w_y
            const Vec2 n = nf.at(i, j);
            const Mat2 proj = Mat2::Identity() - n * n.transpose();
            r.at(i, j) = (proj.array() * grad_w.array()).sum();
        }
    }
    return r;
}

StretchField evolve_stretch(const StretchField& chi, const LevelSet& ls,
                            const VectorFieldMAC& w, double dt) {
    constexpr double kChiMin = 1e-8;
    const Grid& g = ls.grid();

    StretchField out;
    out.chi = advect_band_scalar(chi.chi, ls, w, 0.5 * dt);

    // Reaction coefficient at the half-step geometry keeps the Strang split
    // second order while the normals rotate with the interface.
    const LevelSet ls_mid = advect_phi(ls, w, 0.5 * dt);
    const ScalarField r = stretch_reaction(ls_mid, w);
    int clamped = 0;
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            if (!ls.maintained_mask(i, j)) continue;
            double c = out.chi.at(i, j) * std::exp(r.at(i, j) * dt);
            if (c < kChiMin) {
                c = kChiMin;
                ++clamped;
            }
            out.chi.at(i, j) = c;
        }
    }
    if (clamped > 0) {
        warn("evolve_stretch: chi clamped at " + std::to_string(clamped) + " nodes");
    }
    out.chi.sync_periodic_edges();

    out.chi = advect_band_scalar(out.chi, ls, w, 0.5 * dt);
    return out;
}

namespace {

Vec2 nearest_on_polyline(const std::vector<Vec2>& poly, const Vec2& x) {
    double best = std::numeric_limits<double>::max();
    Vec2 out = x;
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) {
        const Vec2& a = poly[k];
        const Vec2& b = poly[(k + 1) % n];
        const Vec2 d = b - a;
        const double len2 = d.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        const Vec2 q = a + t * d;
        const double dist = (x - q).squaredNorm();
        if (dist < best) {
            best = dist;
            out = q;
        }
    }
    return out;
}

// Newton projection along grad(phi); falls back to the nearest point on the
// zero-set polyline when the ray is degenerate (medial-axis ties).
Vec2 foot_point_impl(const LevelSet& ls, const Vec2& x, int n_refine,
                     const std::vector<Vec2>** poly_cache) {
    const Grid& g = ls.grid();
    Vec2 p = x;
    double residual = interp_bicubic(ls.phi, p);
    bool degenerate = false;
    for (int it = 0; it < n_refine; ++it) {
        if (std::abs(residual) < 1e-13) break;
        const double e = 0.5 * g.h;
        const Vec2 grad(
            (interp_bicubic(ls.phi, g.wrap_point(p + Vec2(e, 0))) -
             interp_bicubic(ls.phi, g.wrap_point(p - Vec2(e, 0)))) / (2 * e),
            (interp_bicubic(ls.phi, g.wrap_point(p + Vec2(0, e))) -
             interp_bicubic(ls.phi, g.wrap_point(p - Vec2(0, e)))) / (2 * e));
        const double m2 = grad.squaredNorm();
        if (m2 < 0.25) {
            degenerate = true;
            break;
        }
        p = g.wrap_point(p - residual / m2 * grad);
        residual = interp_bicubic(ls.phi, p);
    }
    if (degenerate || std::abs(residual) > 1e-10 * std::max(1.0, ls.band_halfwidth)) {
        static thread_local std::vector<Vec2> local_poly;
        if (poly_cache) {
            if (*poly_cache == nullptr) {
                local_poly = extract_interface(ls);
                *poly_cache = &local_poly;
            }
            return nearest_on_polyline(**poly_cache, x);
        }
        return nearest_on_polyline(extract_interface(ls), x);
    }
    return p;
}

} // namespace

Vec2 interface_foot_point(const LevelSet& ls, const Vec2& x, int n_refine) {
    return foot_point_impl(ls, x, n_refine, nullptr);
}

// Nested band stencils (tangential Laplacian, jump derivatives) reach two
// cells past the band; extend that far and no farther, staying clear of the
// taper-distorted tube edge.
static double extension_halfwidth(const LevelSet& ls) {
    return ls.band_halfwidth + 3.0 * ls.grid().h;
}

namespace {

ScalarField extend_impl(const LevelSet& ls, const ScalarField& q, int n_refine,
                        double inner_skip) {
    const Grid& g = ls.grid();
    const double reach = extension_halfwidth(ls);
    const std::vector<Vec2>* poly_cache = nullptr;
    ScalarField out = q;
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double a = std::abs(ls.phi.at(i, j));
            if (a > reach || a < inner_skip) continue;
            const Vec2 fp = foot_point_impl(ls, g.node(i, j), n_refine, &poly_cache);
            out.at(i, j) = interp_bicubic(q, fp);
        }
    }
    out.sync_periodic_edges();
    return out;
}

} // namespace

ScalarField extend_scalar(const LevelSet& ls, const ScalarField& q,
                          int n_refine) {
    return extend_impl(ls, q, n_refine, -1.0);
}

ScalarField refresh_band_scalar(const LevelSet& ls, const ScalarField& q,
                                int n_refine) {
    return extend_impl(ls, q, n_refine, ls.band_halfwidth - 2.0 * ls.grid().h);
}

VectorFieldMAC extend_velocity(const LevelSet& ls, const VectorFieldMAC& u) {
    const Grid& g = ls.grid();

    VectorNodeField un(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            un.x.at(i, j) = 0.5 * (u.read_u(i, j - 1) + u.read_u(i, j));
            un.y.at(i, j) = 0.5 * (u.read_v(i - 1, j) + u.read_v(i, j));
        }
    }
    const ScalarField ex = extend_scalar(ls, un.x);
    const ScalarField ey = extend_scalar(ls, un.y);

    VectorFieldMAC out = u;
    auto phi_at = [&](const Vec2& p) { return interp_bilinear(ls.phi, p); };
    const double tube = extension_halfwidth(ls);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 p = g.uface(i, j);
            if (std::abs(phi_at(p)) > tube) continue;
            out.u(i, j) = 0.5 * (ex.read(i, j) + ex.read(i, j + 1));
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.vface(i, j);
            if (std::abs(phi_at(p)) > tube) continue;
            out.v(i, j) = 0.5 * (ey.read(i, j) + ey.read(i + 1, j));
        }
    }
    out.sync_periodic_edges();
    return out;
}

} // namespace iim
