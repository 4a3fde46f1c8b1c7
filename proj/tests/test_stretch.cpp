#include "doctest.h"

#include <cmath>

#include "iim/oracle.hpp"
#include "iim/stretch.hpp"
#include "test_support.hpp"

using namespace iim;
using namespace iim::test;

namespace {

const Vec2 kCenter{0.5, 0.5};

LevelSet circle_ls(int n, double R = 0.25) {
    return init_signed_distance(Circle{kCenter, R}, Grid::unit_square(n));
}

VectorFieldMAC strain_field(const Grid& g, double alpha) {
    return sample_mac(
        g, [&](double x, double) { return alpha * (x - 0.5); },
        [&](double, double y) { return -alpha * (y - 0.5); });
}

VectorFieldMAC rotation_field(const Grid& g, double omega) {
    return sample_mac(
        g, [&](double, double y) { return -omega * (y - 0.5); },
        [&](double x, double) { return omega * (x - 0.5); });
}

} // namespace

TEST_CASE("evolve_stretch with zero velocity leaves chi unchanged") {
    const LevelSet ls = circle_ls(64);
    const StretchField chi0 = StretchField::ones(ls.grid());
    const VectorFieldMAC w(ls.grid(), 0.0);
    const StretchField out = evolve_stretch(chi0, ls, w, 0.01);
    CHECK((out.chi.values - chi0.chi.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("rigid rotation keeps chi constant over a full revolution") {
    const int n = 128;
    const double h = 1.0 / n;
    LevelSet ls = init_signed_distance(Circle{{0.5, 0.58}, 0.2}, Grid::unit_square(n));
    StretchField chi = StretchField::ones(ls.grid());
    const auto w = rotation_field(ls.grid(), 1.0);

    // The reaction coefficient is identically zero for rigid rotation.
    const ScalarField r = stretch_reaction(ls, w);
    double rmax = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (ls.band_mask(i, j)) rmax = std::max(rmax, std::abs(r.at(i, j)));
    CHECK(rmax < 1e-10);

    const double T = 2 * M_PI;
    const int steps = static_cast<int>(std::ceil(T / (0.4 * h / w.max_abs())));
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        chi = evolve_stretch(chi, ls, w, dt);
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = extend_scalar(ls, chi.chi);
        }
    }
    double worst = 0.0;
    for (const Vec2& p : extract_interface(ls)) {
        worst = std::max(worst, std::abs(interp_bilinear(chi.chi, p) - 1.0));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("linear strain: chi matches the marker oracle at t = 0.2") {
    const int n = 256;
    const double alpha = 1.0;
    LevelSet ls = circle_ls(n);
    StretchField chi = StretchField::ones(ls.grid());
    const auto w = strain_field(ls.grid(), alpha);

    const double T = 0.2;
    const double h = 1.0 / n;
    const int steps = static_cast<int>(std::ceil(T / (0.4 * h / w.max_abs())));
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        chi = evolve_stretch(chi, ls, w, dt);
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = extend_scalar(ls, chi.chi);
        }
    }

    // Closed-form map: X = c + (e^{at} dx0, e^{-at} dy0).
    double worst = 0.0;
    for (const Vec2& p : extract_interface(ls)) {
        const double xi = std::atan2(p.y() - 0.5, (p.x() - 0.5) * std::exp(-2 * alpha * T));
        const double want = std::sqrt(sqr(std::exp(alpha * T) * std::sin(xi)) +
                                      sqr(std::exp(-alpha * T) * std::cos(xi)));
        worst = std::max(worst, std::abs(interp_bilinear(chi.chi, p) - want) / want);
    }
    CHECK(worst < 0.01);
}

TEST_CASE("incompressibility form equivalence of the reaction term") {
    const int n = 128;
    const LevelSet ls = circle_ls(n);
    const auto w = mac_from_stream(ls.grid(), [](double x, double y) {
        return 0.15 * std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
    });
    const ScalarField r = stretch_reaction(ls, w);

    // -(n.grad w.n) computed independently.
    const NormalField nf = normal(ls);
    VectorNodeField wn(ls.grid());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            wn.x.at(i, j) = 0.5 * (w.read_u(i, j - 1) + w.read_u(i, j));
            wn.y.at(i, j) = 0.5 * (w.read_v(i - 1, j) + w.read_v(i, j));
        }
    const auto dwx = gradient_central(wn.x);
    const auto dwy = gradient_central(wn.y);
    const ScalarField div = divergence_mac(w);
    const double dmax = div.values.abs().maxCoeff();

    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            Mat2 gw;
            gw(0, 0) = dwx[0].at(i, j);
            gw(0, 1) = dwy[0].at(i, j);
            gw(1, 0) = dwx[1].at(i, j);
            gw(1, 1) = dwy[1].at(i, j);
            const Vec2 nn = nf.at(i, j);
            const double lhs = -nn.dot(gw * nn);
            worst = std::max(worst, std::abs(lhs - r.at(i, j)));
        }
    CHECK(worst <= 5.0 * dmax + 50.0 * sqr(1.0 / n));
}

TEST_CASE("chi stays strictly positive under strong compression") {
    const int n = 96;
    LevelSet ls = circle_ls(n);
    StretchField chi = StretchField::ones(ls.grid());
    const auto w = strain_field(ls.grid(), 2.0);
    const double dt = 0.4 * (1.0 / n) / w.max_abs();
    for (int s = 0; s < 50; ++s) {
        chi = evolve_stretch(chi, ls, w, dt);
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) {
            ls = reinitialize(ls);
            chi.chi = extend_scalar(ls, chi.chi);
        }
    }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (ls.band_mask(i, j)) CHECK(chi.chi.at(i, j) > 0.0);
}

TEST_CASE("extend_scalar: constant field is an exact fixed point") {
    const LevelSet ls = circle_ls(128);
    const auto q = sample_nodes(ls.grid(), [](double, double) { return 2.5; });
    const ScalarField out = extend_scalar(ls, q);
    CHECK((out.values - q.values).abs().maxCoeff() < 1e-10);
}

TEST_CASE("extend_scalar: q = x equals the foot-point value to O(h^2)") {
    const int n = 256;
    const double h = 1.0 / n;
    const LevelSet ls = circle_ls(n);
    const auto q = sample_nodes(ls.grid(), [](double x, double) { return x; });
    const ScalarField out = extend_scalar(ls, q);
    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            const Vec2 p = ls.grid().node(i, j);
            // Analytic foot point on the circle.
            const Vec2 fp = kCenter + 0.25 * (p - kCenter).normalized();
            worst = std::max(worst, std::abs(out.at(i, j) - fp.x()));
        }
    CHECK(worst < 2 * h * h);
}

TEST_CASE("extend_scalar only reads interface-adjacent data (locality)") {
    const int n = 128;
    const LevelSet ls = circle_ls(n);
    const auto q1 = sample_nodes(ls.grid(), [](double x, double y) {
        return std::sin(3 * x + y);
    });
    auto q2 = q1;
    // Perturb far from the interface only (outside |phi| < 3h around zero set).
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (std::abs(ls.phi.at(i, j)) > 3.0 / n) q2.at(i, j) += 100.0;
    const ScalarField e1 = extend_scalar(ls, q1);
    const ScalarField e2 = extend_scalar(ls, q2);
    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (ls.band_mask(i, j))
                worst = std::max(worst, std::abs(e1.at(i, j) - e2.at(i, j)));
    CHECK(worst < 1e-12);
}

TEST_CASE("extended fields are constant along normals") {
    const int n = 128;
    const LevelSet ls = circle_ls(n);
    const auto q = sample_nodes(ls.grid(), [](double x, double y) {
        return std::sin(2 * x - y);
    });
    const ScalarField out = extend_scalar(ls, q);
    const NormalField nf = normal(ls);
    const auto grad = gradient_central(out);
    double max_normal_deriv = 0.0, max_grad = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            const Vec2 gq(grad[0].at(i, j), grad[1].at(i, j));
            max_normal_deriv = std::max(max_normal_deriv, std::abs(nf.at(i, j).dot(gq)));
            max_grad = std::max(max_grad, gq.norm());
        }
    CHECK(max_normal_deriv <= 0.05 * max_grad);
}

TEST_CASE("extend_velocity: constants, interface values, shear bound") {
    const int n = 128;
    const LevelSet ls = circle_ls(n);

    SUBCASE("constant velocity is unchanged") {
        const auto u = sample_mac(ls.grid(), [](double, double) { return 0.7; },
                                  [](double, double) { return -0.2; });
        const VectorFieldMAC out = extend_velocity(ls, u);
        CHECK((out.u - u.u).abs().maxCoeff() < 1e-12);
        CHECK((out.v - u.v).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("extension depends only on interface-adjacent velocity data") {
        const auto rot = rotation_field(ls.grid(), 1.0);
        auto rot_perturbed = rot;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= n; ++i)
                if (std::abs(interp_bilinear(ls.phi, ls.grid().uface(i, j))) > 4.0 / n)
                    rot_perturbed.u(i, j) += 50.0;
        const VectorFieldMAC e1 = extend_velocity(ls, rot);
        const VectorFieldMAC e2 = extend_velocity(ls, rot_perturbed);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= n; ++i)
                if (std::abs(interp_bilinear(ls.phi, ls.grid().uface(i, j))) < 2.0 / n)
                    worst = std::max(worst, std::abs(e1.u(i, j) - e2.u(i, j)));
        CHECK(worst < 1e-10);
    }
    SUBCASE("extended rotation agrees with the original on the interface") {
        const auto rot = rotation_field(ls.grid(), 1.0);
        const VectorFieldMAC ext = extend_velocity(ls, rot);
        double worst = 0.0;
        for (const Vec2& p : extract_interface(ls)) {
            worst = std::max(worst, (interp_bilinear(ext, p) - interp_bilinear(rot, p)).norm());
        }
        CHECK(worst < 5e-4); // one-sided O(h^2) mixing across the interface
    }
    SUBCASE("shear: normal derivative bound on the band") {
        const auto shear = sample_mac(ls.grid(),
                                      [](double, double y) { return y; },
                                      [](double, double) { return 0.0; });
        const VectorFieldMAC ext = extend_velocity(ls, shear);
        VectorNodeField en(ls.grid());
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                en.x.at(i, j) = 0.5 * (ext.read_u(i, j - 1) + ext.read_u(i, j));
                en.y.at(i, j) = 0.5 * (ext.read_v(i - 1, j) + ext.read_v(i, j));
            }
        const NormalField nf = normal(ls);
        const auto gx = gradient_central(en.x);
        double worst = 0.0;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (!ls.band_mask(i, j)) continue;
                const Vec2 g(gx[0].at(i, j), gx[1].at(i, j));
                worst = std::max(worst, std::abs(nf.at(i, j).dot(g)));
            }
        CHECK(worst <= 0.05 * 1.0); // max |grad u| = 1 for this shear
    }
}
