#include "iim/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

namespace iim {

// ---- shapes -----------------------------------------------------------------

std::vector<Vec2> sample_shape(const InterfaceShape& shape, int n) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    if (const auto* c = std::get_if<Circle>(&shape)) {
        if (c->radius <= 0) throw ConfigError("circle radius must be positive");
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * k / n;
            pts.push_back(c->center + c->radius * Vec2(std::cos(th), std::sin(th)));
        }
    } else if (const auto* e = std::get_if<Ellipse>(&shape)) {
        if (e->a <= 0 || e->b <= 0) {
            throw ConfigError("ellipse semi-axes must be positive");
        }
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * k / n;
            pts.push_back(e->center + Vec2(e->a * std::cos(th), e->b * std::sin(th)));
        }
    } else {
        const auto& curve = std::get<ParametricCurve>(shape);
        if (curve.points.size() < 8) {
            throw ConfigError("parametric curve needs at least 8 points");
        }
        // Resample by arclength-linear interpolation along the closed polyline.
        const auto& p = curve.points;
        const int m = static_cast<int>(p.size());
        std::vector<double> s(m + 1, 0.0);
        for (int k = 0; k < m; ++k) {
            s[k + 1] = s[k] + (p[(k + 1) % m] - p[k]).norm();
        }
        const double total = s[m];
        int seg = 0;
        for (int k = 0; k < n; ++k) {
            const double target = total * k / n;
            while (seg + 1 <= m && s[seg + 1] < target) ++seg;
            const double f = (target - s[seg]) / (s[seg + 1] - s[seg]);
            pts.push_back((1 - f) * p[seg % m] + f * p[(seg + 1) % m]);
        }
    }
    return pts;
}

namespace {

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0) return (x - a).norm();
    const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
    return (x - (a + t * d)).norm();
}

double polyline_distance(const std::vector<Vec2>& poly, const Vec2& x,
                         bool closed = true) {
    double best = std::numeric_limits<double>::max();
    const int n = static_cast<int>(poly.size());
    const int nseg = closed ? n : n - 1;
    for (int k = 0; k < nseg; ++k) {
        best = std::min(best, point_segment_distance(x, poly[k], poly[(k + 1) % n]));
    }
    return best;
}

bool polygon_contains(const std::vector<Vec2>& poly, const Vec2& x) {
    // Ray-crossing parity.
    bool inside = false;
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) {
        const Vec2& a = poly[k];
        const Vec2& b = poly[(k + 1) % n];
        if ((a.y() > x.y()) != (b.y() > x.y())) {
            const double xc = a.x() + (x.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (x.x() < xc) inside = !inside;
        }
    }
    return inside;
}

} // namespace

bool shape_contains(const InterfaceShape& shape, const Vec2& x) {
    if (const auto* c = std::get_if<Circle>(&shape)) {
        return (x - c->center).norm() < c->radius;
    }
    if (const auto* e = std::get_if<Ellipse>(&shape)) {
        return sqr((x.x() - e->center.x()) / e->a) +
                   sqr((x.y() - e->center.y()) / e->b) <
               1.0;
    }
    return polygon_contains(std::get<ParametricCurve>(shape).points, x);
}

namespace {

// Nearest-point distance to an ellipse by coarse parameter scan plus ternary
// refinement of |x - gamma(t)|^2.  Derivative-free: Newton divides by zero at
// the evolute cusps, where nodes of common grid sizes land exactly.
double ellipse_distance(const Ellipse& e, const Vec2& x) {
    const Vec2 d = x - e.center;
    auto dist2 = [&](double t) {
        return (d - Vec2(e.a * std::cos(t), e.b * std::sin(t))).squaredNorm();
    };
    double best_t = 0.0;
    double best = std::numeric_limits<double>::max();
    const int m = 720;
    for (int k = 0; k < m; ++k) {
        const double t = 2.0 * M_PI * k / m;
        const double r2 = dist2(t);
        if (r2 < best) {
            best = r2;
            best_t = t;
        }
    }
    double lo = best_t - 2.0 * M_PI / m;
    double hi = best_t + 2.0 * M_PI / m;
    for (int it = 0; it < 90; ++it) {
        const double t1 = lo + (hi - lo) / 3.0;
        const double t2 = hi - (hi - lo) / 3.0;
        if (dist2(t1) < dist2(t2)) {
            hi = t2;
        } else {
            lo = t1;
        }
    }
    return std::sqrt(dist2(0.5 * (lo + hi)));
}

} // namespace

double shape_signed_distance(const InterfaceShape& shape, const Vec2& x,
                             int oversample) {
    if (const auto* c = std::get_if<Circle>(&shape)) {
        return c->radius - (x - c->center).norm();
    }
    if (const auto* e = std::get_if<Ellipse>(&shape)) {
        const double d = ellipse_distance(*e, x);
        return shape_contains(shape, x) ? d : -d;
    }
    const auto poly = sample_shape(shape, oversample);
    const double d = polyline_distance(poly, x);
    return shape_contains(shape, x) ? d : -d;
}

// ---- level set bookkeeping ---------------------------------------------------

void LevelSet::retag_band() {
    const Grid& g = grid();
    band_mask.resize(g.nx + 1, g.ny + 1);
    maintained_mask.resize(g.nx + 1, g.ny + 1);
    const double wide = band_halfwidth + LevelSet::kMarginCells * g.h;
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double a = std::abs(phi.at(i, j));
            band_mask(i, j) = a <= band_halfwidth;
            maintained_mask(i, j) = a <= wide;
        }
    }
}

namespace {

// Godunov fast-sweeping update on unsigned distance.
void fast_sweep(Array2D& d, const Grid& g,
                const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& frozen) {
    const double h = g.h;
    const double big = std::numeric_limits<double>::max();
    auto neighbor_min = [&](int i, int j, int axis) {
        double m = big;
        for (int s = -1; s <= 1; s += 2) {
            int ii = i + (axis == 0 ? s : 0);
            int jj = j + (axis == 1 ? s : 0);
            if (g.periodic_x) ii = wrap_index(ii, g.nx);
            if (g.periodic_y) jj = wrap_index(jj, g.ny);
            if (ii < 0 || ii > g.nx || jj < 0 || jj > g.ny) continue;
            m = std::min(m, d(std::min(ii, g.nx), std::min(jj, g.ny)));
        }
        return m;
    };
    auto update = [&](int i, int j) {
        if (frozen(i, j)) return;
        const double a = neighbor_min(i, j, 0);
        const double b = neighbor_min(i, j, 1);
        if (a >= big && b >= big) return;
        double cand;
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (hi - lo >= h || hi >= big) {
            cand = lo + h;
        } else {
            cand = 0.5 * (a + b + std::sqrt(2.0 * h * h - sqr(a - b)));
        }
        d(i, j) = std::min(d(i, j), cand);
    };
    for (int round = 0; round < 8; ++round) {
        const Array2D before = d;
        for (int sweep = 0; sweep < 4; ++sweep) {
            const bool xup = sweep & 1, yup = sweep & 2;
            for (int jj = 0; jj <= g.ny; ++jj) {
                const int j = yup ? g.ny - jj : jj;
                for (int ii = 0; ii <= g.nx; ++ii) {
                    const int i = xup ? g.nx - ii : ii;
                    update(i, j);
                }
            }
        }
        if ((d - before).abs().maxCoeff() < 1e-14) break;
    }
}

} // namespace

LevelSet init_signed_distance(const InterfaceShape& shape, const Grid& grid,
                              double band_halfwidth) {
    LevelSet ls;
    ls.phi = ScalarField(grid, Centering::node);
    ls.band_halfwidth = band_halfwidth > 0.0
                            ? band_halfwidth
                            : LevelSet::kDefaultBandCells * grid.h;

    const auto dense = sample_shape(shape, 8192);
    for (const Vec2& p : dense) {
        const Vec2 lo = grid.origin, hi = grid.origin + grid.extent;
        const double clearance = 5.0 * grid.h;
        if (p.x() < lo.x() + clearance || p.x() > hi.x() - clearance ||
            p.y() < lo.y() + clearance || p.y() > hi.y() - clearance) {
            throw ConfigError("interface shape must keep >= 5h clearance from the domain boundary");
        }
    }

    const double big = std::numeric_limits<double>::max();
    Array2D dist = Array2D::Constant(grid.nx + 1, grid.ny + 1, big);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> frozen(grid.nx + 1,
                                                              grid.ny + 1);
    frozen.setConstant(false);

    // Exact seeding across the maintained band (the contract region); fast
    // sweeping is first order and only fills the far field.
    const double seed_reach =
        ls.band_halfwidth + (LevelSet::kMarginCells + 2.0) * grid.h;
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            const Vec2 x = grid.node(i, j);
            const double sd = shape_signed_distance(shape, x);
            if (std::abs(sd) <= seed_reach) {
                dist(i, j) = std::abs(sd);
                frozen(i, j) = true;
            }
        }
    }
    if (std::holds_alternative<ParametricCurve>(shape)) {
        // Sampled curves: exact seeding near the interface, fast sweeping for
        // the far field.
        fast_sweep(dist, grid, frozen);
    } else {
        // Analytic shapes evaluate the refined nearest-point distance
        // everywhere; sweeping would only degrade the far field.
        for (int j = 0; j <= grid.ny; ++j) {
            for (int i = 0; i <= grid.nx; ++i) {
                if (!frozen(i, j)) {
                    dist(i, j) = std::abs(shape_signed_distance(shape, grid.node(i, j)));
                }
            }
        }
    }

    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            const double s = shape_contains(shape, grid.node(i, j)) ? 1.0 : -1.0;
            ls.phi.at(i, j) = s * dist(i, j);
        }
    }
    ls.phi.sync_periodic_edges();
    ls.retag_band();
    return ls;
}

// ---- WENO5 Hamilton-Jacobi transport ------------------------------------------

namespace {

// Jiang-Peng WENO5 combination of five consecutive one-sided differences.
double weno5(double v1, double v2, double v3, double v4, double v5) {
    const double eps = 1e-6 * std::max({v1 * v1, v2 * v2, v3 * v3, v4 * v4,
                                        v5 * v5}) +
                       1e-99;
    const double s1 = 13.0 / 12.0 * sqr(v1 - 2 * v2 + v3) +
                      0.25 * sqr(v1 - 4 * v2 + 3 * v3);
    const double s2 = 13.0 / 12.0 * sqr(v2 - 2 * v3 + v4) + 0.25 * sqr(v2 - v4);
    const double s3 = 13.0 / 12.0 * sqr(v3 - 2 * v4 + v5) +
                      0.25 * sqr(3 * v3 - 4 * v4 + v5);
    const double a1 = 0.1 / sqr(s1 + eps);
    const double a2 = 0.6 / sqr(s2 + eps);
    const double a3 = 0.3 / sqr(s3 + eps);
    const double wsum = a1 + a2 + a3;
    return (a1 * (v1 / 3 - 7 * v2 / 6 + 11 * v3 / 6) +
            a2 * (-v2 / 6 + 5 * v3 / 6 + v4 / 3) +
            a3 * (v3 / 3 + 5 * v4 / 6 - v5 / 6)) /
           wsum;
}

struct NodeVelocity {
    Array2D un, vn;
};

NodeVelocity velocity_at_nodes(const VectorFieldMAC& w) {
    const Grid& g = w.grid;
    NodeVelocity nv;
    nv.un.resize(g.nx + 1, g.ny + 1);
    nv.vn.resize(g.nx + 1, g.ny + 1);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            nv.un(i, j) = 0.5 * (w.read_u(i, j - 1) + w.read_u(i, j));
            nv.vn(i, j) = 0.5 * (w.read_v(i - 1, j) + w.read_v(i, j));
        }
    }
    return nv;
}

// Upwind WENO5 directional derivatives of a node field.
struct UpwindGrad {
    double dx, dy;
};

UpwindGrad weno_gradient(const ScalarField& f, int i, int j, double un,
                         double vn) {
    const double h = f.grid.h;
    auto dmx = [&](int k) { return (f.read(k, j) - f.read(k - 1, j)) / h; };
    auto dmy = [&](int k) { return (f.read(i, k) - f.read(i, k - 1)) / h; };
    UpwindGrad gr{};
    if (un >= 0.0) {
        gr.dx = weno5(dmx(i - 2), dmx(i - 1), dmx(i), dmx(i + 1), dmx(i + 2));
    } else {
        gr.dx = weno5(dmx(i + 3), dmx(i + 2), dmx(i + 1), dmx(i), dmx(i - 1));
    }
    if (vn >= 0.0) {
        gr.dy = weno5(dmy(j - 2), dmy(j - 1), dmy(j), dmy(j + 1), dmy(j + 2));
    } else {
        gr.dy = weno5(dmy(j + 3), dmy(j + 2), dmy(j + 1), dmy(j), dmy(j - 1));
    }
    return gr;
}

} // namespace

// One step of q_t + w.grad(q) = 0 on the maintained band of ls, TVD-RK3 in
// time.  The transport speed tapers to zero toward the tube edge (local level
// set); the tapered field still agrees with w wherever |phi| <= band.
ScalarField advect_band_scalar(const ScalarField& q, const LevelSet& ls,
                               const VectorFieldMAC& w, double dt) {
    const Grid& g = ls.grid();
    const double wmax = w.max_abs();
    if (dt * wmax / g.h > 0.5 + 1e-12) {
        throw StepError("band transport: CFL dt*max|w|/h exceeds 0.5");
    }
    const NodeVelocity nv = velocity_at_nodes(w);
    const auto& mask = ls.maintained_mask;

    // Cubic taper c(|phi|): 1 through band + 2h, 0 at the tube edge.
    const double beta = ls.band_halfwidth + 2.0 * g.h;
    const double gamma = ls.band_halfwidth + LevelSet::kMarginCells * g.h;
    auto cutoff = [&](double phi_val) {
        const double a = std::abs(phi_val);
        if (a <= beta) return 1.0;
        if (a >= gamma) return 0.0;
        return sqr(a - gamma) * (2.0 * a + gamma - 3.0 * beta) /
               ((gamma - beta) * (gamma - beta) * (gamma - beta));
    };

    auto rhs = [&](const ScalarField& f, ScalarField& out) {
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i <= g.nx; ++i) {
                if (!mask(i, j)) {
                    out.at(i, j) = 0.0;
                    continue;
                }
                const double c = cutoff(ls.phi.at(i, j));
                const double un = c * nv.un(i, j);
                const double vn = c * nv.vn(i, j);
                const UpwindGrad gr = weno_gradient(f, i, j, un, vn);
                out.at(i, j) = -(un * gr.dx + vn * gr.dy);
            }
        }
    };

    // TVD-RK3 in increment form (bitwise identity when w = 0).
    ScalarField k(g, Centering::node);
    ScalarField f1 = q, f2 = q;

    rhs(q, k);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            if (mask(i, j)) f1.at(i, j) = q.at(i, j) + dt * k.at(i, j);
    f1.sync_periodic_edges();

    rhs(f1, k);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            if (mask(i, j))
                f2.at(i, j) = q.at(i, j) +
                              0.25 * ((f1.at(i, j) - q.at(i, j)) + dt * k.at(i, j));
    f2.sync_periodic_edges();

    ScalarField out = q;
    rhs(f2, k);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            if (mask(i, j))
                out.at(i, j) = q.at(i, j) +
                               2.0 / 3.0 * ((f2.at(i, j) - q.at(i, j)) + dt * k.at(i, j));
    out.sync_periodic_edges();
    return out;
}

LevelSet advect_phi(const LevelSet& ls, const VectorFieldMAC& w, double dt) {
    LevelSet out = ls;
    out.phi = advect_band_scalar(ls.phi, ls, w, dt);
    out.retag_band();
    return out;
}

// ---- reinitialization ----------------------------------------------------------

namespace {

// Distance from a point to the polyline with early rejection beyond `cap`.
// `slack` must bound stride * max segment length so the coarse vertex scan
// cannot reject a point the full scan would accept.
double capped_polyline_distance(const std::vector<Vec2>& poly, const Vec2& x,
                                double cap, double slack, int stride) {
    const int n = static_cast<int>(poly.size());
    double coarse = std::numeric_limits<double>::max();
    for (int k = 0; k < n; k += stride) {
        coarse = std::min(coarse, (x - poly[k]).norm());
    }
    if (coarse - slack > cap) return coarse - slack;
    return polyline_distance(poly, x);
}

} // namespace

// Rebuilds the signed-distance tube around the current zero set.  Interface-
// adjacent nodes are anchored to the distance-to-polyline (subcell fix);
// everything else in the tube relaxes under the Godunov upwind discretization
// of phi_tau + sgn(phi0)(|grad phi| - 1) = 0 with a smoothed sign.  Nodes that
// had fallen out of the maintained tube are re-seeded from the polyline
// distance so the tube follows the interface across reinitializations.
LevelSet reinitialize(const LevelSet& ls, int n_pseudo_steps) {
    const Grid& g = ls.grid();
    const double h = g.h;
    LevelSet out = ls;

    // Anchor distances are measured against a quadratically refined curve;
    // raw chord segments bias the anchored zero set inward by the sagitta
    // every reinitialization, which slowly deflates closed interfaces.
    const auto poly = refine_polyline_quadratic(extract_interface_refined(ls), 4);
    const double tube_radius = ls.band_halfwidth + (LevelSet::kMarginCells + 2.0) * g.h;

    struct TubeNode {
        int i, j;
    };
    std::vector<TubeNode> tube;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> in_tube(g.nx + 1, g.ny + 1);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> frozen(g.nx + 1, g.ny + 1);
    in_tube.setConstant(false);
    frozen.setConstant(false);

    LevelSet tagged = ls;
    tagged.retag_band();
    auto sgn0 = [&](int i, int j) { return ls.phi.read(i, j) >= 0.0 ? 1.0 : -1.0; };

    const int n_poly = static_cast<int>(poly.size());
    const int stride = std::max(1, n_poly / 64);
    double max_seg = 0.0;
    for (int k = 0; k < n_poly; ++k) {
        max_seg = std::max(max_seg, (poly[(k + 1) % n_poly] - poly[k]).norm());
    }
    const double slack = stride * max_seg;

    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double d = capped_polyline_distance(poly, g.node(i, j),
                                                      tube_radius, slack, stride);
            const double s = sgn0(i, j);
            if (d > tube_radius) {
                // Out-of-tube values must not understate the distance, or the
                // band masks would claim nodes that were never refreshed.
                if (std::abs(out.phi.at(i, j)) < tube_radius) {
                    out.phi.at(i, j) = s * (tube_radius + g.h);
                }
                continue;
            }
            in_tube(i, j) = true;
            tube.push_back({i, j});
            const bool adjacent = s != sgn0(i + 1, j) || s != sgn0(i - 1, j) ||
                                  s != sgn0(i, j + 1) || s != sgn0(i, j - 1);
            if (adjacent) {
                // Subcell anchor at the interpolated crossing distance.
                out.phi.at(i, j) = s * d;
                frozen(i, j) = true;
            } else if (!tagged.maintained_mask(i, j)) {
                // Stale node newly swept into the tube.
                out.phi.at(i, j) = s * d;
            }
        }
    }
    out.phi.sync_periodic_edges();

    const double dtau = 0.5 * h;
    ScalarField cur = out.phi;
    auto minmod = [](double a, double b) {
        if (a * b <= 0.0) return 0.0;
        return std::abs(a) < std::abs(b) ? a : b;
    };
    for (int step = 0; step < n_pseudo_steps; ++step) {
        ScalarField next = cur;
        for (const TubeNode& tn : tube) {
            const int i = tn.i, j = tn.j;
            if (frozen(i, j)) continue;
            const double p0 = ls.phi.at(i, j);
            const double s = p0 / std::sqrt(p0 * p0 + h * h);
            // Second-order ENO one-sided differences wherever the stencil
            // stays on relaxed tube values; the outermost ring reads the
            // stale/clamped fringe and falls back to first order (monotone).
            const double eno =
                std::abs(p0) <= ls.band_halfwidth +
                                    (LevelSet::kMarginCells - 1.0) * h
                    ? 0.5
                    : 0.0;
            auto dxx = [&](int ii, int jj) {
                return (cur.read(ii + 1, jj) - 2.0 * cur.read(ii, jj) + cur.read(ii - 1, jj)) / (h * h);
            };
            auto dyy = [&](int ii, int jj) {
                return (cur.read(ii, jj + 1) - 2.0 * cur.read(ii, jj) + cur.read(ii, jj - 1)) / (h * h);
            };
            const double a = (cur.at(i, j) - cur.read(i - 1, j)) / h +
                             eno * h * minmod(dxx(i - 1, j), dxx(i, j));
            const double b = (cur.read(i + 1, j) - cur.at(i, j)) / h -
                             eno * h * minmod(dxx(i, j), dxx(i + 1, j));
            const double c = (cur.at(i, j) - cur.read(i, j - 1)) / h +
                             eno * h * minmod(dyy(i, j - 1), dyy(i, j));
            const double d = (cur.read(i, j + 1) - cur.at(i, j)) / h -
                             eno * h * minmod(dyy(i, j), dyy(i, j + 1));
            double grad;
            if (p0 > 0.0) {
                grad = std::sqrt(std::max(sqr(std::max(a, 0.0)), sqr(std::min(b, 0.0))) +
                                 std::max(sqr(std::max(c, 0.0)), sqr(std::min(d, 0.0))));
            } else {
                grad = std::sqrt(std::max(sqr(std::min(a, 0.0)), sqr(std::max(b, 0.0))) +
                                 std::max(sqr(std::min(c, 0.0)), sqr(std::max(d, 0.0))));
            }
            next.at(i, j) = cur.at(i, j) - dtau * s * (grad - 1.0);
        }
        next.sync_periodic_edges();
        cur = next;
    }
    out.phi = cur;
    out.phi.sync_periodic_edges();
    out.retag_band();
    return out;
}

// ---- marching squares -----------------------------------------------------------

namespace {

struct EdgeKey {
    int i, j, axis; // axis 0: (i,j)-(i+1,j), axis 1: (i,j)-(i,j+1)
    bool operator<(const EdgeKey& o) const {
        return std::tie(i, j, axis) < std::tie(o.i, o.j, o.axis);
    }
};

} // namespace

std::vector<Vec2> extract_interface(const LevelSet& ls) {
    const Grid& g = ls.grid();
    const auto& phi = ls.phi;
    auto positive = [&](int i, int j) { return phi.read(i, j) > 0.0; };

    // Crossing location on an edge from linear interpolation.
    std::map<EdgeKey, Vec2> crossings;
    auto crossing_point = [&](const EdgeKey& e) -> Vec2 {
        const int i2 = e.axis == 0 ? e.i + 1 : e.i;
        const int j2 = e.axis == 1 ? e.j + 1 : e.j;
        const double fa = phi.read(e.i, e.j);
        const double fb = phi.read(i2, j2);
        const double t = fa / (fa - fb);
        return (1.0 - t) * g.node(e.i, e.j) + t * g.node(i2, j2);
    };

    // Per-cell segments: pairs of crossing edges.
    std::map<EdgeKey, std::vector<EdgeKey>> links;
    auto link = [&](const EdgeKey& a, const EdgeKey& b) {
        crossings.emplace(a, crossing_point(a));
        crossings.emplace(b, crossing_point(b));
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const bool c00 = positive(i, j), c10 = positive(i + 1, j);
            const bool c01 = positive(i, j + 1), c11 = positive(i + 1, j + 1);
            const int idx = c00 + 2 * c10 + 4 * c11 + 8 * c01;
            if (idx == 0 || idx == 15) continue;
            const EdgeKey bottom{i, j, 0}, top{i, j + 1, 0};
            const EdgeKey left{i, j, 1}, right{i + 1, j, 1};
            switch (idx) {
                case 1: case 14: link(bottom, left); break;
                case 2: case 13: link(bottom, right); break;
                case 3: case 12: link(left, right); break;
                case 4: case 11: link(top, right); break;
                case 6: case 9:  link(bottom, top); break;
                case 7: case 8:  link(top, left); break;
                case 5: case 10: {
                    // Saddle: split by the sign of the cell-center average.
                    const double center = 0.25 * (phi.read(i, j) + phi.read(i + 1, j) +
                                                  phi.read(i, j + 1) + phi.read(i + 1, j + 1));
                    const bool center_pos = center > 0.0;
                    if ((idx == 5) == center_pos) {
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(bottom, left);
                        link(top, right);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    if (crossings.empty()) {
        throw TopologyError("extract_interface: no zero crossings found");
    }
    for (const auto& [edge, nbrs] : links) {
        if (nbrs.size() != 2) {
            throw TopologyError("extract_interface: zero set is not a closed curve");
        }
    }

    // Walk the loop.
    std::vector<Vec2> poly;
    const EdgeKey start = links.begin()->first;
    EdgeKey prev = start;
    EdgeKey curr = links[start][0];
    poly.push_back(crossings[start]);
    while (!(curr.i == start.i && curr.j == start.j && curr.axis == start.axis)) {
        poly.push_back(crossings[curr]);
        const auto& nbrs = links[curr];
        const EdgeKey next = (nbrs[0].i == prev.i && nbrs[0].j == prev.j &&
                              nbrs[0].axis == prev.axis)
                                 ? nbrs[1]
                                 : nbrs[0];
        prev = curr;
        curr = next;
    }
    if (poly.size() != crossings.size()) {
        throw TopologyError("extract_interface: zero set has multiple components");
    }

    // Sharp corners indicate a non-smooth or under-resolved zero set.  Track
    // the last well-resolved direction so node-exact crossings (zero-length
    // segments) cannot hide a corner.
    const int n = static_cast<int>(poly.size());
    Vec2 prev_dir = Vec2::Zero();
    int turns_checked = 0;
    for (int k = 0; k < n + 1; ++k) {
        const Vec2 d = poly[(k + 1) % n] - poly[k % n];
        if (d.norm() < 0.05 * g.h) continue;
        const Vec2 dir = d.normalized();
        if (prev_dir.squaredNorm() > 0.0 && ++turns_checked > 0 &&
            prev_dir.dot(dir) < std::cos(M_PI / 4.0)) {
            throw TopologyError("extract_interface: zero set has a sharp corner (non-smooth or under-resolved)");
        }
        prev_dir = dir;
    }

    // Orient with the positive (inside) region on the left.
    const Vec2 mid = 0.5 * (poly[0] + poly[1]);
    const Vec2 dir = (poly[1] - poly[0]).normalized();
    const Vec2 left(-dir.y(), dir.x());
    if (interp_bilinear(phi, mid + 0.25 * g.h * left) < 0.0) {
        std::reverse(poly.begin(), poly.end());
    }
    return poly;
}

std::vector<Vec2> refine_polyline_quadratic(const std::vector<Vec2>& poly,
                                            int factor) {
    const int n = static_cast<int>(poly.size());
    std::vector<Vec2> out;
    out.reserve(n * factor);
    auto quad = [&](int k, double sq, const Vec2& linear) -> Vec2 {
        // Lagrange quadratic through vertices k-1, k, k+1 in chord arclength.
        // Queries stay inside [s0, s2], so clustered vertices keep bounded
        // weights; only exact duplicates fall back to the linear point.
        const Vec2& pm = poly[(k - 1 + n) % n];
        const Vec2& p0 = poly[k % n];
        const Vec2& pp = poly[(k + 1) % n];
        const double s0 = -(p0 - pm).norm();
        const double s2 = (pp - p0).norm();
        const double scale = std::max(-s0, s2);
        if (scale == 0.0) return linear;
        const double w0 = (sq - 0.0) * (sq - s2) / ((s0 - 0.0) * (s0 - s2));
        const double w1 = (sq - s0) * (sq - s2) / ((0.0 - s0) * (0.0 - s2));
        const double w2 = (sq - s0) * (sq - 0.0) / ((s2 - s0) * (s2 - 0.0));
        return w0 * pm + w1 * p0 + w2 * pp;
    };
    for (int k = 0; k < n; ++k) {
        const double seg = (poly[(k + 1) % n] - poly[k]).norm();
        for (int m = 0; m < factor; ++m) {
            const double t = static_cast<double>(m) / factor;
            if (m == 0) {
                out.push_back(poly[k]);
                continue;
            }
            const Vec2 linear = (1.0 - t) * poly[k] + t * poly[(k + 1) % n];
            const Vec2 a = quad(k, t * seg, linear);             // around k
            const Vec2 b = quad(k + 1, (t - 1.0) * seg, linear); // around k+1
            out.push_back((1.0 - t) * a + t * b);
        }
    }
    return out;
}

std::vector<Vec2> extract_interface_refined(const LevelSet& ls) {
    auto poly = extract_interface(ls);
    const Grid& g = ls.grid();
    const int n = static_cast<int>(poly.size());
    std::vector<Vec2> out = poly;
    for (int k = 0; k < n; ++k) {
        const Vec2& p = poly[k];
        // Each vertex sits on a grid edge; slide it along that edge to the
        // zero of the bicubic interpolant.  The slide is capped well below
        // the spacing to the polyline neighbors so the refinement can never
        // reorder or pinch the curve.
        const double ry = (p.y() - g.origin.y()) / g.h;
        const bool on_x_edge = std::abs(ry - std::round(ry)) < 1e-9;
        const Vec2 dir = on_x_edge ? Vec2(1, 0) : Vec2(0, 1);
        const double spacing = std::min((poly[(k + 1) % n] - p).norm(),
                                        (p - poly[(k - 1 + n) % n]).norm());
        const double cap = std::min(0.35 * spacing, 0.45 * g.h);
        double t = 0.0;
        for (int it = 0; it < 6; ++it) {
            const Vec2 q = g.wrap_point(p + t * dir);
            const double f = interp_bicubic(ls.phi, q);
            if (std::abs(f) < 1e-14) break;
            const double e = 0.05 * g.h;
            const double fp = (interp_bicubic(ls.phi, g.wrap_point(p + (t + e) * dir)) -
                               interp_bicubic(ls.phi, g.wrap_point(p + (t - e) * dir))) /
                              (2.0 * e);
            if (std::abs(fp) < 1e-12) break;
            t -= f / fp;
            if (std::abs(t) > cap) {
                t = std::clamp(t, -cap, cap);
                break;
            }
        }
        out[k] = g.wrap_point(p + t * dir);
    }
    return out;
}

double polyline_length(const std::vector<Vec2>& poly) {
    double len = 0.0;
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) len += (poly[(k + 1) % n] - poly[k]).norm();
    return len;
}

double polyline_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    const int n = static_cast<int>(poly.size());
    for (int k = 0; k < n; ++k) {
        const Vec2& p = poly[k];
        const Vec2& q = poly[(k + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double hausdorff_distance(const std::vector<Vec2>& a,
                          const std::vector<Vec2>& b) {
    double h1 = 0.0, h2 = 0.0;
    for (const Vec2& p : a) h1 = std::max(h1, polyline_distance(b, p));
    for (const Vec2& p : b) h2 = std::max(h2, polyline_distance(a, p));
    return std::max(h1, h2);
}

void write_polyline_csv(const std::string& path, const std::vector<Vec2>& poly) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << "x,y\n";
    for (const Vec2& p : poly) {
        os << format_double(p.x()) << "," << format_double(p.y()) << "\n";
    }
    if (!poly.empty()) {
        os << format_double(poly[0].x()) << "," << format_double(poly[0].y()) << "\n";
    }
}

} // namespace iim
