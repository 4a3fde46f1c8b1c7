#include "doctest.h"

#include <cmath>
#include <fstream>

#include "iim/levelset.hpp"
#include "test_support.hpp"

using namespace iim;
using namespace iim::test;

namespace {

const Circle kCircle{{0.5, 0.5}, 0.25};

LevelSet circle_ls(int n) {
    return init_signed_distance(kCircle, Grid::unit_square(n));
}

// Brute-force signed distance against a densely sampled curve; the test-side
// oracle for non-circular shapes.
double brute_signed_distance(const InterfaceShape& s, const Vec2& x) {
    return shape_signed_distance(s, x, 65536);
}

} // namespace

TEST_CASE("signed distance of a circle: center and interface values") {
    const int n = 128;
    const LevelSet ls = circle_ls(n);
    const double h = 1.0 / n;
    CHECK(std::abs(interp_bilinear(ls.phi, {0.5, 0.5}) - 0.25) < h * h * 4);
    for (double th = 0.0; th < 2 * M_PI; th += 0.37) {
        const Vec2 p = Vec2(0.5, 0.5) + 0.25 * Vec2(std::cos(th), std::sin(th));
        CHECK(std::abs(interp_bilinear(ls.phi, p)) < h * h * 4);
    }
}

TEST_CASE("degenerate ellipse equals circle") {
    const int n = 96;
    const LevelSet a = circle_ls(n);
    const LevelSet b = init_signed_distance(Ellipse{{0.5, 0.5}, 0.25, 0.25},
                                            Grid::unit_square(n));
    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (a.band_mask(i, j))
                worst = std::max(worst, std::abs(a.phi.at(i, j) - b.phi.at(i, j)));
    CHECK(worst < 1e-5);
}

TEST_CASE("ellipse signed distance matches brute-force nearest point") {
    const int n = 128;
    const double h = 1.0 / n;
    const Ellipse e{{0.5, 0.5}, 0.3, 0.2};
    const LevelSet ls = init_signed_distance(e, Grid::unit_square(n));
    CHECK(std::abs(interp_bilinear(ls.phi, {0.8, 0.5})) < h * h * 4);

    const Grid& g = ls.grid();
    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            const Vec2 p = g.node(i, j);
            worst = std::max(worst, std::abs(ls.phi.at(i, j) - brute_signed_distance(e, p)));
        }
    CHECK(worst < 2 * h * 0.05);

    const auto grad = gradient_central(ls.phi);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            const double m = std::hypot(grad[0].at(i, j), grad[1].at(i, j));
            CHECK(m > 0.97);
            CHECK(m < 1.03);
        }
}

TEST_CASE("shape touching the boundary is a configuration error") {
    CHECK_THROWS_AS(init_signed_distance(Circle{{0.5, 0.5}, 0.499},
                                         Grid::unit_square(64)),
                    ConfigError);
}

TEST_CASE("advect_phi with zero velocity is the identity") {
    const LevelSet ls = circle_ls(64);
    const VectorFieldMAC w(ls.grid(), 0.0);
    const LevelSet out = advect_phi(ls, w, 0.004);
    CHECK((out.phi.values - ls.phi.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("advect_phi rejects CFL violations") {
    const LevelSet ls = circle_ls(64);
    const auto w = sample_mac(ls.grid(), [](double, double) { return 1.0; },
                              [](double, double) { return 0.0; });
    CHECK_THROWS_AS(advect_phi(ls, w, 1.0 / 64.0), StepError);
}

TEST_CASE("constant advection translates the zero set") {
    const int n = 128;
    const double h = 1.0 / n;
    LevelSet ls = circle_ls(n);
    const auto w = sample_mac(ls.grid(), [](double, double) { return 1.0; },
                              [](double, double) { return 0.0; });
    const double T = 0.125;
    const int steps = 40;
    const double dt = T / steps;
    REQUIRE(dt / h <= 0.5);
    for (int s = 0; s < steps; ++s) {
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0 && s + 1 < steps) ls = reinitialize(ls);
    }
    const auto got = extract_interface(ls);
    const auto want = sample_shape(Circle{{0.5 + T, 0.5}, 0.25}, 4096);
    CHECK(hausdorff_distance(got, want) < 0.1 * h);
}

TEST_CASE("rigid rotation returns the interface after one revolution") {
    const int n = 128;
    const double h = 1.0 / n;
    LevelSet ls = circle_ls(n);
    // Circle is centered on the rotation axis shifted so the interface moves.
    const Circle c{{0.5, 0.62}, 0.2};
    ls = init_signed_distance(c, Grid::unit_square(n));
    const double omega = 1.0;
    const auto w = sample_mac(
        ls.grid(), [&](double, double y) { return -omega * (y - 0.5); },
        [&](double x, double) { return omega * (x - 0.5); });
    const double T = 2 * M_PI / omega;
    const int steps = static_cast<int>(std::ceil(T / (0.4 * h / w.max_abs())));
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) ls = reinitialize(ls);
    }
    const auto got = extract_interface(ls);
    const auto want = sample_shape(c, 4096);
    CHECK(hausdorff_distance(got, want) < 0.5 * h);
}

TEST_CASE("forward-backward advection returns the interface") {
    const int n = 128;
    const double h = 1.0 / n;
    LevelSet ls = circle_ls(n);
    const auto fwd = sample_mac(
        ls.grid(),
        [](double x, double y) { return std::sin(M_PI * x) * std::cos(M_PI * y); },
        [](double x, double y) { return -std::cos(M_PI * x) * std::sin(M_PI * y); });
    VectorFieldMAC bwd = fwd;
    bwd.u = -fwd.u;
    bwd.v = -fwd.v;
    const auto start = extract_interface(ls);
    const double dt = 0.4 * h / fwd.max_abs();
    const int steps = 60;
    for (int s = 0; s < steps; ++s) {
        ls = advect_phi(ls, fwd, dt);
        if ((s + 1) % 10 == 0) ls = reinitialize(ls);
    }
    for (int s = 0; s < steps; ++s) {
        ls = advect_phi(ls, bwd, dt);
        if ((s + 1) % 10 == 0) ls = reinitialize(ls);
    }
    CHECK(hausdorff_distance(extract_interface(ls), start) < h);
}

TEST_CASE("area is conserved under divergence-free advection") {
    const int n = 128;
    LevelSet ls = circle_ls(n);
    const auto w = mac_from_stream(ls.grid(), [](double x, double y) {
        return 0.08 * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y);
    });
    const double area0 = std::abs(polyline_area(extract_interface(ls)));
    const double dt = 0.4 * (1.0 / n) / w.max_abs();
    for (int s = 0; s < 110; ++s) {
        ls = advect_phi(ls, w, dt);
        if ((s + 1) % 10 == 0) ls = reinitialize(ls);
    }
    const double area1 = std::abs(polyline_area(extract_interface(ls)));
    CHECK(std::abs(area1 - area0) / area0 < 0.005);
}

namespace {

double band_gradient_deviation(const LevelSet& ls) {
    const auto grad = gradient_central(ls.phi);
    double worst = 0.0;
    const Grid& g = ls.grid();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            if (!ls.band_mask(i, j)) continue;
            worst = std::max(worst, std::abs(std::hypot(grad[0].at(i, j), grad[1].at(i, j)) - 1.0));
        }
    return worst;
}

} // namespace

TEST_CASE("reinitialize: fixed point, rescaled and tanh-distorted inputs") {
    const int n = 128;
    const double h = 1.0 / n;
    const LevelSet ls = circle_ls(n);
    const auto before = extract_interface(ls);

    SUBCASE("already signed distance") {
        const LevelSet out = reinitialize(ls);
        CHECK(hausdorff_distance(extract_interface(out), before) < 0.02 * h);
        CHECK(band_gradient_deviation(out) < 0.05);
    }
    SUBCASE("doubled signed distance") {
        LevelSet in = ls;
        in.phi.values *= 2.0;
        in.retag_band();
        const LevelSet out = reinitialize(in);
        CHECK(band_gradient_deviation(out) < 0.05);
        CHECK(hausdorff_distance(extract_interface(out), before) < 0.1 * h);
    }
    SUBCASE("tanh profile") {
        LevelSet in = ls;
        in.phi.values = (in.phi.values / 0.1).tanh();
        in.band_halfwidth = ls.band_halfwidth;
        in.retag_band();
        // tanh compresses |phi|, so the band mask from raw values is wider;
        // re-tagging keeps the maintained region meaningful.
        const LevelSet out = reinitialize(in, 80);
        CHECK(band_gradient_deviation(out) < 0.05);
        CHECK(hausdorff_distance(extract_interface(out), before) < 0.1 * h);
    }
}

TEST_CASE("reinitialize is idempotent up to tolerance") {
    const int n = 128;
    LevelSet in = circle_ls(n);
    in.phi.values *= 1.5;
    in.retag_band();
    const LevelSet once = reinitialize(in);
    const LevelSet twice = reinitialize(once);
    double worst = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (once.band_mask(i, j))
                worst = std::max(worst, std::abs(twice.phi.at(i, j) - once.phi.at(i, j)));
    CHECK(worst <= 1e-3);
}

TEST_CASE("extract_interface: perimeter against analytic arclength") {
    const int n = 128;
    SUBCASE("circle") {
        const auto poly = extract_interface(circle_ls(n));
        const double want = 2 * M_PI * 0.25;
        CHECK(std::abs(polyline_length(poly) - want) / want < 0.005);
        for (const Vec2& p : poly) {
            CHECK(std::abs(interp_bilinear(circle_ls(n).phi, p)) <= 1e-12);
        }
    }
    SUBCASE("ellipse vs quadrature oracle") {
        const Ellipse e{{0.5, 0.5}, 0.3, 0.2};
        const auto poly = extract_interface(init_signed_distance(e, Grid::unit_square(256)));
        // Arclength by fine composite quadrature of the parametric speed.
        const int m = 1 << 20;
        double want = 0.0;
        for (int k = 0; k < m; ++k) {
            const double th = 2 * M_PI * (k + 0.5) / m;
            want += std::hypot(-e.a * std::sin(th), e.b * std::cos(th)) * (2 * M_PI / m);
        }
        CHECK(std::abs(polyline_length(poly) - want) / want < 0.005);
    }
}

TEST_CASE("extract_interface rejects a grid-aligned box distance field") {
    const Grid g = Grid::unit_square(64);
    // min-distance to an axis-aligned box: sharp corners in the zero set.
    // Edges fall exactly on grid lines (0.25 = 16h).
    auto box_sd = [](double x, double y) {
        const double dx = std::abs(x - 0.5) - 0.25;
        const double dy = std::abs(y - 0.5) - 0.25;
        const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
        const double inside = std::min(std::max(dx, dy), 0.0);
        return -(outside + inside);
    };
    LevelSet ls;
    ls.phi = sample_nodes(g, box_sd);
    ls.band_halfwidth = 8.0 * g.h;
    ls.retag_band();
    CHECK_THROWS_AS(extract_interface(ls), TopologyError);
}

TEST_CASE("polyline CSV closes the loop") {
    const auto poly = extract_interface(circle_ls(64));
    const std::string path = "/tmp/iim_poly_test.csv";
    write_polyline_csv(path, poly);
    std::ifstream is(path);
    std::string first, second, last, line;
    std::getline(is, first);  // header
    std::getline(is, second); // first vertex
    while (std::getline(is, line))
        if (!line.empty()) last = line;
    CHECK(second == last);
}

TEST_CASE("parametric curve: exact near-interface seeding, fast-sweeping far field") {
    const int n = 128;
    const double h = 1.0 / n;
    // Wavy closed blob sampled as a parametric polyline.
    ParametricCurve blob;
    for (int k = 0; k < 512; ++k) {
        const double th = 2 * M_PI * k / 512;
        const double r = 0.22 + 0.03 * std::cos(3 * th);
        blob.points.push_back(Vec2(0.5, 0.5) + r * Vec2(std::cos(th), std::sin(th)));
    }
    const InterfaceShape shape = blob;
    const LevelSet ls = init_signed_distance(shape, Grid::unit_square(n));

    // Band values match the brute-force nearest-point oracle tightly.
    double band_err = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (!ls.band_mask(i, j)) continue;
            const Vec2 p = ls.grid().node(i, j);
            band_err = std::max(band_err,
                                std::abs(ls.phi.at(i, j) - shape_signed_distance(shape, p, 16384)));
        }
    CHECK(band_err < 2 * h * 0.05);

    // Far field comes from fast sweeping: first-order accurate, right sign.
    double far_err = 0.0;
    for (int j = 0; j <= n; j += 4)
        for (int i = 0; i <= n; i += 4) {
            if (ls.maintained_mask(i, j)) continue;
            const Vec2 p = ls.grid().node(i, j);
            const double want = shape_signed_distance(shape, p, 16384);
            CHECK(ls.phi.at(i, j) * want > 0.0);
            far_err = std::max(far_err, std::abs(ls.phi.at(i, j) - want));
        }
    CHECK(far_err < 0.08); // O(h) * propagation distance at this scale
}
