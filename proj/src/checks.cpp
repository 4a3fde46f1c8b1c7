#include "iim/checks.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

namespace iim::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CheckResult make(const std::string& name, double measured, double tol,
                 bool pass_when_leq = true, const std::string& note = "") {
    CheckResult r;
    r.name = name;
    r.measured = measured;
    r.tolerance = tol;
    r.pass = pass_when_leq ? measured <= tol : measured >= tol;
    r.note = note;
    return r;
}

const Vec2 kCenter{0.5, 0.5};

LevelSet circle_ls(int n, double R = 0.25) {
    return init_signed_distance(Circle{kCenter, R}, Grid::unit_square(n));
}

VectorFieldMAC strain_mac(const Grid& g, double alpha) {
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) w.u(i, j) = alpha * (g.uface(i, j).x() - 0.5);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = -alpha * (g.vface(i, j).y() - 0.5);
    return w;
}

} // namespace

// ---- manufactured problem ----------------------------------------------------

GeoPoint ManufacturedProblem::analytic_geo(double th) const {
    const double c = std::cos(th), s = std::sin(th);
    const Vec2 rhat(c, s), that(-s, c);
    GeoPoint gp;
    gp.pos = center + R * rhat;
    gp.n = -rhat;
    gp.t = Vec2(-gp.n.y(), gp.n.x());
    gp.kappa = 1.0 / R;
    gp.f1 = a(th) * that;
    // grad of the ray-constant extensions at the interface
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            gp.grad_f1(i, j) = (that[i] / R) * (a1(th) * that[j] - a(th) * rhat[j]);
    gp.f2 = b(th);
    gp.grad_f2 = (b1(th) / R) * that;
    Mat2 hess_theta;
    hess_theta(0, 0) = 2 * c * s;
    hess_theta(0, 1) = s * s - c * c;
    hess_theta(1, 0) = hess_theta(0, 1);
    hess_theta(1, 1) = -2 * c * s;
    hess_theta /= R * R;
    gp.hess_f2 = (b2(th) / (R * R)) * (that * that.transpose()) + b1(th) * hess_theta;
    gp.g = a1(th) / R;
    gp.grad_g = (a2(th) / (R * R)) * that;
    return gp;
}

Vec2 ManufacturedProblem::velocity_smooth(const Vec2& x) const {
    const double k = 2 * M_PI;
    return {0.05 * k * std::sin(k * x.x()) * std::cos(k * x.y()),
            -0.05 * k * std::cos(k * x.x()) * std::sin(k * x.y())};
}

double ManufacturedProblem::pressure_smooth(const Vec2& x) const {
    return 0.1 * std::cos(2 * M_PI * x.x()) * std::cos(2 * M_PI * x.y());
}

namespace {

Mat2 grad_velocity_smooth(const Vec2& x) {
    // (grad u)_ij = d_i u_j for the stream-function background field.
    const double k = 2 * M_PI;
    const double cx = std::cos(k * x.x()), sx = std::sin(k * x.x());
    const double cy = std::cos(k * x.y()), sy = std::sin(k * x.y());
    Mat2 m;
    m(0, 0) = 0.05 * k * k * cx * cy;  // d_x u
    m(0, 1) = 0.05 * k * k * sx * sy;  // d_x v
    m(1, 0) = -0.05 * k * k * sx * sy; // d_y u
    m(1, 1) = -0.05 * k * k * cx * cy; // d_y v
    return m;
}

} // namespace

double ManufacturedProblem::bulk_velocity_term(double th) const {
    const double c = std::cos(th), s = std::sin(th);
    const Vec2 rhat(c, s), that(-s, c);
    const Vec2 pos = center + R * rhat;
    const Mat2 minus = grad_velocity_smooth(pos);
    const Vec2 W = Re * a(th) * that;
    const Mat2 plus = minus + rhat * W.transpose();
    auto prod = [](const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); };
    return 2.0 * (prod(plus) - prod(minus));
}

Vec2 ManufacturedProblem::velocity_jump(const Vec2& x) const {
    const Vec2 d = x - center;
    const double r = d.norm();
    const double th = std::atan2(d.y(), d.x());
    const double c = std::cos(th), s = std::sin(th);
    const Vec2 rhat(c, s), that(-s, c);
    const double sd = r - R;
    const Vec2 W = Re * a(th) * that;
    const Vec2 grad_p_jump = (b1(th) / R) * that - (a1(th) / R) * rhat;
    const Vec2 Z = Re * (grad_p_jump - (a(th) / R) * that);
    return sd * W + 0.5 * sd * sd * Z;
}

double ManufacturedProblem::pressure_jump(const Vec2& x) const {
    const Vec2 d = x - center;
    const double r = d.norm();
    const double th = std::atan2(d.y(), d.x());
    const double sd = r - R;
    const double P1 = -a1(th) / R;
    const double P2 = bulk_velocity_term(th) - b2(th) / (R * R) + a1(th) / (R * R);
    return b(th) + sd * P1 + 0.5 * sd * sd * P2;
}

Vec2 ManufacturedProblem::velocity(const Vec2& x) const {
    Vec2 u = velocity_smooth(x);
    if ((x - center).norm() < R) u += velocity_jump(x);
    return u;
}

double ManufacturedProblem::pressure(const Vec2& x) const {
    double p = pressure_smooth(x);
    if ((x - center).norm() < R) p += pressure_jump(x);
    return p;
}

// ---- acceptance 1: cross-product identity -----------------------------------------

CheckList tensor_identities(int trials, unsigned seed) {
    const auto t0 = Clock::now();
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::Matrix3d G;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) G(i, j) = dist(gen);
        G -= (G.trace() / 3.0) * Eigen::Matrix3d::Identity();
        Eigen::Vector3d v, w;
        for (int i = 0; i < 3; ++i) {
            v(i) = dist(gen);
            w(i) = dist(gen);
        }
        const double scale = G.norm() * v.norm() * w.norm() + 1e-300;
        worst = std::max(worst, check_cross_identity(G, v, w) / scale);
    }
    const double elapsed = seconds_since(t0);
    CheckList out;
    out.push_back(make("cross_identity_residual_scaled", worst, 1e-12));
    out.push_back(make("cross_identity_runtime_s", elapsed, 1.0));
    return out;
}

// ---- acceptance 2: stretch vs Lagrangian oracle ---------------------------------

namespace {

double strain_chi_error(int n) {
    const double alpha = 1.0, T = 0.2;
    LevelSet ls = circle_ls(n);
    StretchField chi = StretchField::ones(ls.grid());
    const VectorFieldMAC w = strain_mac(ls.grid(), alpha);
    const double h = 1.0 / n;
    const int steps = static_cast<int>(std::ceil(T / (0.4 * h / w.max_abs())));
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        chi = evolve_stretch(chi, ls, w, dt);
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = refresh_band_scalar(ls, chi.chi);
        }
    }
    MarkerCurve mc = MarkerCurve::from_shape(Circle{kCenter, 0.25}, 4096);
    for (int k = 0; k < mc.size(); ++k) {
        const Vec2 d = mc.positions[k] - kCenter;
        mc.positions[k] = kCenter + Vec2(std::exp(alpha * T) * d.x(),
                                         std::exp(-alpha * T) * d.y());
    }
    return compare_eulerian(mc, ls, chi).max_rel_stretch_err;
}

} // namespace

CheckList stretch_vs_oracle() {
    const auto t0 = Clock::now();
    const double e64 = strain_chi_error(64);
    const double e128 = strain_chi_error(128);
    const double e256 = strain_chi_error(256);
    const double order = 0.5 * std::log2(e64 / e256);
    CheckList out;
    out.push_back(make("strain_chi_rel_err_256", e256, 0.01, true,
                       "err64=" + format_double(e64) + " err128=" + format_double(e128)));
    out.push_back(make("strain_chi_order", order, 1.5, false));
    out.push_back(make("strain_chi_runtime_s", seconds_since(t0), 120.0));
    return out;
}

// ---- acceptance 3: rigid-rotation invariance ------------------------------------

CheckList rotation_invariance() {
    const int n = 128;
    const double h = 1.0 / n;
    const Circle shape{{0.5, 0.62}, 0.2};
    LevelSet ls = init_signed_distance(shape, Grid::unit_square(n));
    StretchField chi = StretchField::ones(ls.grid());
    VectorFieldMAC w(ls.grid());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) w.u(i, j) = -(ls.grid().uface(i, j).y() - 0.5);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) w.v(i, j) = ls.grid().vface(i, j).x() - 0.5;

    const double T = 2 * M_PI;
    const int steps = static_cast<int>(std::ceil(T / (0.4 * h / w.max_abs())));
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        chi = evolve_stretch(chi, ls, w, dt);
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = refresh_band_scalar(ls, chi.chi);
        }
    }
    double chi_err = 0.0;
    const auto poly = extract_interface(ls);
    for (const Vec2& p : poly) {
        chi_err = std::max(chi_err, std::abs(interp_bilinear(chi.chi, p) - 1.0));
    }
    const double haus = hausdorff_distance(poly, sample_shape(shape, 4096));
    CheckList out;
    out.push_back(make("rotation_chi_drift", chi_err, 1e-3));
    out.push_back(make("rotation_hausdorff_over_h", haus / h, 0.5));
    return out;
}

// ---- acceptance 4: curvature ---------------------------------------------------

CheckList curvature_accuracy() {
    CheckList out;
    {
        const int n = 128;
        const LevelSet ls = circle_ls(n);
        const CurvatureField k = curvature(ls);
        double worst = 0.0;
        for (const Vec2& p : extract_interface(ls)) {
            worst = std::max(worst, std::abs(interp_bilinear(k, p) - 4.0) / 4.0);
        }
        out.push_back(make("curvature_circle_rel_err_128", worst, 0.02));
    }
    {
        const int n = 256;
        const Ellipse e{kCenter, 0.3, 0.2};
        const LevelSet ls = init_signed_distance(e, Grid::unit_square(n));
        const CurvatureField k = curvature(ls);
        const double want = e.a / (e.b * e.b);
        const double got = interp_bilinear(k, {kCenter.x() + e.a, kCenter.y()});
        out.push_back(make("curvature_ellipse_endpoint_rel_err_256",
                           std::abs(got - want) / want, 0.03));
    }
    return out;
}

// ---- acceptance 5: energy-force duality ----------------------------------------

namespace {

struct DualityResult {
    double residual_s = 0.0;
    double residual_b = 0.0;
    double dt = 0.0;
    double h = 0.0;
};

// Energy change rate vs interface power over a fixed window, with the power
// accumulated per step.  A single-step quotient carries an oscillatory
// grid-phase term of the same order that defeats the halving measurement;
// the fixed-window rate keeps the smooth O(dt + h) part.
DualityResult duality_residuals(int n) {
    const double T = 0.06;
    const Grid g = Grid::unit_square(n);
    const Vec2 c0(0.41, 0.47); // off-center, so the interface power is nonzero
    LevelSet ls = init_signed_distance(Circle{c0, 0.25}, g);
    VectorFieldMAC u(g);
    auto psi = [&](int i, int j) {
        const Vec2 p = g.node(i, j);
        return 0.06 * std::sin(2 * M_PI * p.x()) * std::sin(2 * M_PI * p.y()) +
               0.04 * std::sin(2 * M_PI * p.x()) * std::cos(2 * M_PI * p.y());
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) u.u(i, j) = (psi(i, j + 1) - psi(i, j)) / g.h;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) u.v(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.h;

    const int steps = static_cast<int>(std::ceil(T / (0.4 * g.h / u.max_abs())));
    const double dt = T / steps;

    StretchField chi;
    chi.chi = ScalarField(g, Centering::node, 1.0);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = g.node(i, j);
            const double th = std::atan2(p.y() - c0.y(), p.x() - c0.x());
            chi.chi.at(i, j) = 1.0 + 0.1 * std::sin(2 * th);
        }

    EnergyModel stretch_model = EnergyModel::hookean(4.0);
    {
        const double s = 0.5;
        auto base_es = stretch_model.es;
        auto base_esd = stretch_model.es_d;
        stretch_model.es = [s, base_es](double c) { return s * c + base_es(c); };
        stretch_model.es_d = [s, base_esd](double c) { return s + base_esd(c); };
    }
    const EnergyModel bend_model = EnergyModel::bending_quadratic(0.01);
    const SmoothedDelta delta;

    const double es0 = stretch_energy(ls, chi, stretch_model, delta);
    const double eb0 = bending_energy(ls, bend_model, delta);

    double work_s = 0.0, work_b = 0.0;
    for (int s = 0; s < steps; ++s) {
        const auto gphi = gradient_central(ls.phi);
        const VectorNodeField f1 = compute_f1(ls, chi, stretch_model);
        const CurvatureField kap = curvature(ls);
        const ScalarField f2b = compute_f2(ls, StretchField::ones(g), bend_model);
        double power_s = 0.0, power_b = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double d = delta(ls.phi.at(i, j), g.h);
                if (d == 0.0) continue;
                const Vec2 pos = g.node(i, j);
                const Vec2 uval = interp_bilinear(u, pos);
                const Vec2 gp(gphi[0].at(i, j), gphi[1].at(i, j));
                power_s += (f1.at(i, j).dot(uval) * gp.norm() +
                            kap.at(i, j) * stretch_model.es_d(chi.chi.at(i, j)) *
                                gp.dot(uval)) *
                           d * g.h * g.h;
                power_b += f2b.at(i, j) * gp.dot(uval) * d * g.h * g.h;
            }
        }
        work_s += power_s * dt;
        work_b += power_b * dt;
        chi = evolve_stretch(chi, ls, u, dt);
        ls = advect_phi(ls, u, dt);
    }
    const double es1 = stretch_energy(ls, chi, stretch_model, delta);
    const double eb1 = bending_energy(ls, bend_model, delta);

    DualityResult r;
    r.residual_s = std::abs((es1 - es0) / T + work_s / T);
    r.residual_b = std::abs((eb1 - eb0) / T + work_b / T);
    r.dt = dt;
    r.h = g.h;
    return r;
}

} // namespace

CheckList energy_force_duality() {
    const DualityResult c = duality_residuals(128);
    const DualityResult f = duality_residuals(256);
    const double ratio_s = f.residual_s / c.residual_s;
    const double ratio_b = f.residual_b / c.residual_b;
    CheckList out;
    out.push_back(make("duality_stretch_residual_128", c.residual_s,
                       5.0 * (c.dt + c.h), true,
                       "C=" + format_double(c.residual_s / (c.dt + c.h))));
    out.push_back(make("duality_bending_residual_128", c.residual_b,
                       5.0 * (c.dt + c.h), true,
                       "C=" + format_double(c.residual_b / (c.dt + c.h))));
    out.push_back(make("duality_stretch_halving_ratio", std::abs(ratio_s - 0.5), 0.15,
                       true, "ratio=" + format_double(ratio_s)));
    out.push_back(make("duality_bending_halving_ratio", std::abs(ratio_b - 0.5), 0.15,
                       true, "ratio=" + format_double(ratio_b)));
    return out;
}

// ---- acceptance 6: two bending force forms --------------------------------------

namespace {

double bending_forms_gap(const InterfaceShape& shape, int n) {
    const LevelSet ls = init_signed_distance(shape, Grid::unit_square(n));
    const EnergyModel model = EnergyModel::bending_quadratic(0.01);
    const ScalarField simplified = compute_f2(ls, StretchField::ones(ls.grid()), model);
    const ScalarField divergence = f_b_divergence_form(ls, model);
    double worst = 0.0;
    for (const Vec2& p : extract_interface(ls)) {
        worst = std::max(worst, std::abs(interp_bilinear(simplified, p) -
                                         interp_bilinear(divergence, p)));
    }
    return worst;
}

} // namespace

CheckList bending_two_forms() {
    const Circle circle{kCenter, 0.25};
    const Ellipse ellipse{kCenter, 0.3, 0.2};
    const double c128 = bending_forms_gap(circle, 128);
    const double c256 = bending_forms_gap(circle, 256);
    const double e128 = bending_forms_gap(ellipse, 128);
    const double e256 = bending_forms_gap(ellipse, 256);
    CheckList out;
    out.push_back(make("bending_forms_gap_circle_256", c256, 0.8 / 256,
                       true, "gap128=" + format_double(c128)));
    out.push_back(make("bending_forms_gap_ellipse_256", e256, 20.0 / 256,
                       true, "gap128=" + format_double(e128)));
    out.push_back(make("bending_forms_order_circle", observed_order(c128, c256), 1.0, false));
    out.push_back(make("bending_forms_order_ellipse", observed_order(e128, e256), 1.0, false));
    return out;
}

// ---- acceptance 7: surface-divergence identity --------------------------------------

CheckList surface_divergence_identity() {
    const int n = 256;
    const LevelSet ls = circle_ls(n);
    VectorNodeField v(ls.grid());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = ls.grid().node(i, j);
            v.set(i, j, {std::sin(2 * p.x() + p.y()), std::cos(p.x() - 3 * p.y())});
        }
    CheckList out;
    out.push_back(make("surface_divergence_gap_256",
                       surface_divergence_identity_gap(ls, v), 1e-3));
    return out;
}

// ---- acceptance 8: jump trace identities -----------------------------------------

CheckList jump_trace_identities(int trials, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    double worst_u = 0.0, worst_p = 0.0;
    const double Re = 3.7;
    for (int t = 0; t < trials; ++t) {
        GeoPoint gp;
        const double th = dist(gen);
        gp.n = Vec2(std::cos(th), std::sin(th));
        gp.t = Vec2(-gp.n.y(), gp.n.x());
        gp.kappa = dist(gen);
        gp.f1 = dist(gen) * gp.t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) gp.grad_f1(i, j) = dist(gen);
        gp.f2 = dist(gen);
        gp.grad_f2 = Vec2(dist(gen), dist(gen));
        Mat2 hs;
        hs(0, 0) = dist(gen);
        hs(0, 1) = dist(gen);
        hs(1, 0) = hs(0, 1);
        hs(1, 1) = dist(gen);
        gp.hess_f2 = hs;
        gp.g = dist(gen);
        gp.grad_g = Vec2(dist(gen), dist(gen));
        const double bulk = dist(gen);

        const Vec2 jgp = jump_grad_p(gp);
        const auto jhu = jump_hess_u(gp, Re);
        for (int m = 0; m < 2; ++m) {
            const double scale = std::max(1.0, jhu[m].cwiseAbs().maxCoeff());
            worst_u = std::max(worst_u,
                               std::abs(jhu[m].trace() - Re * jgp[m]) / scale);
        }
        const Mat2 jhp = jump_hess_p(gp, bulk);
        const double scale_p = std::max(1.0, jhp.cwiseAbs().maxCoeff());
        worst_p = std::max(worst_p, std::abs(jhp.trace() - bulk) / scale_p);
    }
    CheckList out;
    out.push_back(make("hess_u_trace_identity", worst_u, 1e-12));
    out.push_back(make("hess_p_trace_identity", worst_p, 1e-12));
    return out;
}

// ---- acceptance 9: manufactured-solution jump recovery ----------------------------

namespace {

struct ExtrapolatedJumps {
    double p;
    Vec2 grad_p;
    Mat2 hess_p;
    Vec2 u;
    Mat2 grad_u;
    std::array<Mat2, 2> hess_u;
};

// One-sided quadratic extrapolation of field values and finite-difference
// derivatives onto the interface from samples at (1.5, 2.5, 3.5) h.
ExtrapolatedJumps extrapolate_jumps(const ManufacturedProblem& mp, double th,
                                    double h) {
    const Vec2 rhat(std::cos(th), std::sin(th));
    const Vec2 pos = mp.center + mp.R * rhat;
    const Vec2 n = -rhat; // points inside (+ side)

    const double d1 = 1.5 * h, d2 = 2.5 * h, d3 = 3.5 * h;
    Eigen::Matrix3d V;
    V << 1, d1, d1 * d1, 1, d2, d2 * d2, 1, d3, d3 * d3;
    const Eigen::Vector3d e1 = Eigen::Vector3d(1, 0, 0);
    const Eigen::Vector3d coef = V.transpose().fullPivLu().solve(e1);

    const double fd = 0.5 * h;
    auto sample = [&](auto&& field, double side) {
        Eigen::Vector3d vals;
        const double ds[3] = {d1, d2, d3};
        for (int k = 0; k < 3; ++k) vals(k) = field(pos + side * ds[k] * n);
        return coef.dot(vals);
    };
    auto grad_of = [&](auto&& field) {
        return [&field, fd](const Vec2& x) -> Vec2 {
            return {(field(x + Vec2(fd, 0)) - field(x - Vec2(fd, 0))) / (2 * fd),
                    (field(x + Vec2(0, fd)) - field(x - Vec2(0, fd))) / (2 * fd)};
        };
    };
    auto hess_of = [&](auto&& field) {
        return [&field, fd](const Vec2& x) -> Mat2 {
            Mat2 m;
            m(0, 0) = (field(x + Vec2(fd, 0)) - 2 * field(x) + field(x - Vec2(fd, 0))) / (fd * fd);
            m(1, 1) = (field(x + Vec2(0, fd)) - 2 * field(x) + field(x - Vec2(0, fd))) / (fd * fd);
            m(0, 1) = (field(x + Vec2(fd, fd)) - field(x + Vec2(fd, -fd)) -
                       field(x + Vec2(-fd, fd)) + field(x + Vec2(-fd, -fd))) / (4 * fd * fd);
            m(1, 0) = m(0, 1);
            return m;
        };
    };

    auto p_field = [&](const Vec2& x) { return mp.pressure(x); };
    auto u_field = [&](const Vec2& x) { return mp.velocity(x).x(); };
    auto v_field = [&](const Vec2& x) { return mp.velocity(x).y(); };

    ExtrapolatedJumps out;
    out.p = sample(p_field, +1.0) - sample(p_field, -1.0);
    out.u = {sample(u_field, +1.0) - sample(u_field, -1.0),
             sample(v_field, +1.0) - sample(v_field, -1.0)};

    auto gp = grad_of(p_field);
    auto jump_vec = [&](auto&& f) -> Vec2 {
        Eigen::Vector3d vx_p, vy_p, vx_m, vy_m;
        const double ds[3] = {d1, d2, d3};
        for (int k = 0; k < 3; ++k) {
            const Vec2 q_p = pos + ds[k] * n;
            const Vec2 q_m = pos - ds[k] * n;
            const Vec2 g_p = f(q_p);
            const Vec2 g_m = f(q_m);
            vx_p(k) = g_p.x();
            vy_p(k) = g_p.y();
            vx_m(k) = g_m.x();
            vy_m(k) = g_m.y();
        }
        return {coef.dot(vx_p) - coef.dot(vx_m), coef.dot(vy_p) - coef.dot(vy_m)};
    };
    auto jump_mat = [&](auto&& f) -> Mat2 {
        Mat2 acc_p = Mat2::Zero(), acc_m = Mat2::Zero();
        const double ds[3] = {d1, d2, d3};
        for (int k = 0; k < 3; ++k) {
            acc_p += coef(k) * f(pos + ds[k] * n);
            acc_m += coef(k) * f(pos - ds[k] * n);
        }
        return acc_p - acc_m;
    };

    out.grad_p = jump_vec(gp);
    out.hess_p = jump_mat(hess_of(p_field));

    auto gu = grad_of(u_field);
    auto gv = grad_of(v_field);
    const Vec2 ju = jump_vec(gu); // [d_i u]
    const Vec2 jv = jump_vec(gv); // [d_i v]
    out.grad_u.col(0) = ju;
    out.grad_u.col(1) = jv;
    out.hess_u[0] = jump_mat(hess_of(u_field));
    out.hess_u[1] = jump_mat(hess_of(v_field));
    return out;
}

double manufactured_recovery_error(const ManufacturedProblem& mp, double h) {
    double worst = 0.0;
    const int samples = 48;
    for (int k = 0; k < samples; ++k) {
        const double th = 2 * M_PI * (k + 0.31) / samples;
        const GeoPoint geo = mp.analytic_geo(th);
        const JumpPoint want = evaluate_jumps(geo, mp.Re, mp.bulk_velocity_term(th),
                                              mp.velocity(geo.pos));
        const ExtrapolatedJumps got = extrapolate_jumps(mp, th, h);
        worst = std::max(worst, std::abs(got.p - want.jump_p));
        worst = std::max(worst, got.u.norm()); // [u] = 0
        worst = std::max(worst, (got.grad_p - want.jump_grad_p).norm());
        worst = std::max(worst, (got.grad_u - want.jump_grad_u).cwiseAbs().maxCoeff());
        worst = std::max(worst, (got.hess_p - want.jump_hess_p).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (got.hess_u[0] - want.jump_hess_u[0]).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (got.hess_u[1] - want.jump_hess_u[1]).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

CheckList manufactured_jump_recovery() {
    const ManufacturedProblem mp;
    const double e1 = manufactured_recovery_error(mp, 1.0 / 128.0);
    const double e2 = manufactured_recovery_error(mp, 1.0 / 256.0);
    CheckList out;
    out.push_back(make("manufactured_recovery_err_h256", e2, 2000.0 / (256.0 * 256.0),
                       true, "err_h128=" + format_double(e1)));
    out.push_back(make("manufactured_recovery_order", observed_order(e1, e2), 1.8, false));
    return out;
}

// ---- acceptance 10: Laplace-Young equilibrium -------------------------------------

CheckList laplace_young_equilibrium() {
    const auto t0 = Clock::now();
    const int n = 128;
    const double sigma = 1.0, Re = 10.0, R = 0.25;
    const Grid g = Grid::unit_square(n);
    LevelSet ls = circle_ls(n, R);
    StretchField chi = StretchField::ones(g);
    const EnergyModel model = EnergyModel::tension(sigma);

    FlowState state{VectorFieldMAC(g, 0.0), ScalarField(g, Centering::cell), 0.0, Re};
    const double dt = 0.9 * 0.25 * Re * g.h * g.h;
    for (int s = 0; s < 100; ++s) {
        state = momentum_step(state, ls, chi, model, dt);
        chi = evolve_stretch(chi, ls, state.u, dt);
        ls = advect_phi(ls, state.u, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = refresh_band_scalar(ls, chi.chi);
        }
    }

    // Piecewise-constant pressure recovered away from the interface.
    double inside = 0.0, outside = 0.0;
    int nin = 0, nout = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double r = (g.cell_center(i, j) - kCenter).norm();
            if (r < R - 4.0 * g.h) {
                inside += state.p.at(i, j);
                ++nin;
            } else if (r > R + 4.0 * g.h) {
                outside += state.p.at(i, j);
                ++nout;
            }
        }
    }
    const double dp = inside / nin - outside / nout;
    const double want = sigma / R;
    CheckList out;
    out.push_back(make("laplace_young_jump_rel_err", std::abs(dp - want) / want, 0.05));
    out.push_back(make("laplace_young_spurious_umax_over_sigma",
                       state.u.max_abs() / sigma, 1e-3));
    out.push_back(make("laplace_young_runtime_s", seconds_since(t0), 120.0));
    return out;
}

// ---- acceptance 11: ellipse relaxation -------------------------------------------

CheckList ellipse_relaxation_run() {
    const auto t0 = Clock::now();
    ScenarioConfig cfg = preset_config("ellipse_relaxation");
    cfg.nx = 128;
    cfg.out_dir = "/tmp/iim_accept_relax";
    cfg.output_every = 1000000; // series only
    const RunSummary sum = run_scenario(cfg);
    CheckList out;
    out.push_back(make("relaxation_perimeter_monotone", sum.perimeter_monotone ? 0.0 : 1.0,
                       0.5, true,
                       "P0=" + format_double(sum.perimeter0) +
                           " P1=" + format_double(sum.perimeter1)));
    out.push_back(make("relaxation_isoperimetric_gain",
                       sum.isoperimetric1 - sum.isoperimetric0, 0.0, false,
                       "q0=" + format_double(sum.isoperimetric0) +
                           " q1=" + format_double(sum.isoperimetric1)));
    out.push_back(make("relaxation_area_drift",
                       std::abs(sum.area1 - sum.area0) / sum.area0, 0.005));
    out.push_back(make("relaxation_runtime_s", seconds_since(t0), 300.0));
    return out;
}

// ---- acceptance 12: reinitialization ---------------------------------------------

CheckList reinitialization_contracts() {
    const int n = 128;
    const double h = 1.0 / n;
    const LevelSet ls0 = circle_ls(n);
    const auto before = extract_interface(ls0);

    LevelSet in = ls0;
    in.phi.values *= 2.0;
    in.retag_band();
    const LevelSet out1 = reinitialize(in);
    const auto grad = gradient_central(out1.phi);
    double dev = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (out1.band_mask(i, j))
                dev = std::max(dev, std::abs(std::hypot(grad[0].at(i, j), grad[1].at(i, j)) - 1.0));
    const double disp = hausdorff_distance(extract_interface(out1), before);

    const LevelSet out2 = reinitialize(out1);
    double idem = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (out1.band_mask(i, j))
                idem = std::max(idem, std::abs(out2.phi.at(i, j) - out1.phi.at(i, j)));

    CheckList out;
    out.push_back(make("reinit_gradient_deviation", dev, 0.05));
    out.push_back(make("reinit_zero_set_displacement_over_h", disp / h, 0.1));
    out.push_back(make("reinit_idempotency_drift", idem, 1e-3));
    return out;
}

// ---- acceptance 13: Taylor-Green decay -------------------------------------------

CheckList taylor_green_decay() {
    const int n = 128;
    const double Re = 100.0;
    const Grid g({0, 0}, {2, 2}, n, n);
    FlowState state{VectorFieldMAC(g, 0.0), ScalarField(g, Centering::cell), 0.0, Re};
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = g.uface(i, j);
            state.u.u(i, j) = std::sin(M_PI * p.x()) * std::cos(M_PI * p.y());
        }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p = g.vface(i, j);
            state.u.v(i, j) = -std::cos(M_PI * p.x()) * std::sin(M_PI * p.y());
        }

    const double T = 0.1;
    const double dt_bound = std::min(0.5 * g.h / state.u.max_abs(), 0.25 * Re * g.h * g.h);
    const int steps = static_cast<int>(std::ceil(T / (0.9 * dt_bound)));
    const double dt = T / steps;
    const double e0 = kinetic_energy(state.u);
    for (int s = 0; s < steps; ++s) state = momentum_step(state, dt);
    const double decay = kinetic_energy(state.u) / e0;
    const double want = std::exp(-4.0 * M_PI * M_PI * T / Re);
    CheckList out;
    out.push_back(make("taylor_green_decay_rel_err", std::abs(decay - want) / want, 0.02,
                       true, "measured=" + format_double(decay) +
                                 " analytic=" + format_double(want)));
    return out;
}

// ---- suite plumbing ---------------------------------------------------------------

std::vector<std::string> suite_names() {
    return {"tensor-identities", "stretch-oracle",  "rotation",
            "curvature",         "energy-duality",  "bending-forms",
            "surface-divergence", "trace-identities", "jump-recovery",
            "laplace-young",     "relaxation",      "reinit",
            "taylor-green",      "all"};
}

CheckList run_suite(const std::string& name) {
    if (name == "tensor-identities") return tensor_identities();
    if (name == "stretch-oracle") return stretch_vs_oracle();
    if (name == "rotation") return rotation_invariance();
    if (name == "curvature") return curvature_accuracy();
    if (name == "energy-duality") return energy_force_duality();
    if (name == "bending-forms") return bending_two_forms();
    if (name == "surface-divergence") return surface_divergence_identity();
    if (name == "trace-identities") return jump_trace_identities();
    if (name == "jump-recovery") return manufactured_jump_recovery();
    if (name == "laplace-young") return laplace_young_equilibrium();
    if (name == "relaxation") return ellipse_relaxation_run();
    if (name == "reinit") return reinitialization_contracts();
    if (name == "taylor-green") return taylor_green_decay();
    if (name == "all") {
        CheckList all;
        for (const auto& s : suite_names()) {
            if (s == "all") continue;
            const CheckList part = run_suite(s);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw ConfigError("unknown verification suite '" + name + "'");
}

void print_report(std::ostream& os, const CheckList& results) {
    os << "check,measured,tolerance,pass\n";
    for (const CheckResult& r : results) {
        os << r.name << "," << format_double(r.measured) << ","
           << format_double(r.tolerance) << "," << (r.pass ? "PASS" : "FAIL");
        if (!r.note.empty()) os << ",," << r.note;
        os << "\n";
    }
}

bool all_pass(const CheckList& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace iim::checks
