#include "iim/forces.hpp"

#include <cmath>

namespace iim {

double SmoothedDelta::operator()(double r, double h) const {
    const double eps = half_width_cells * h;
    const double a = std::abs(r);
    switch (kernel) {
        case Kernel::cosine:
            if (a >= eps) return 0.0;
            return (1.0 + std::cos(M_PI * r / eps)) / (2.0 * eps);
        case Kernel::peskin4: {
            const double s = a / h;
            if (s >= 2.0) return 0.0;
            if (s <= 1.0) return (3.0 - 2.0 * s + std::sqrt(1.0 + 4.0 * s - 4.0 * s * s)) / (8.0 * h);
            return (5.0 - 2.0 * s - std::sqrt(-7.0 + 12.0 * s - 4.0 * s * s)) / (8.0 * h);
        }
    }
    return 0.0;
}

VectorNodeField compute_f1(const LevelSet& ls, const StretchField& chi,
                           const EnergyModel& model) {
    const Grid& g = ls.grid();
    ScalarField esp(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            esp.at(i, j) = model.es_d(chi.chi.at(i, j));
    return tangential_gradient(ls, esp);
}

ScalarField compute_f2(const LevelSet& ls, const StretchField& chi,
                       const EnergyModel& model) {
    const Grid& g = ls.grid();
    const CurvatureField kap = curvature(ls);
    const TensorNodeField gn = grad_normal(ls);
    const NormalField nf = normal(ls);

    // Lap_tan acts on the normally-extended E_b'(kappa) so the nested
    // stencils see ray-constant data.
    ScalarField ebp(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            ebp.at(i, j) = model.eb_d(kap.at(i, j));
    const ScalarField ebp_ext = extend_scalar(ls, ebp);
    const ScalarField lap_ebp = tangential_laplacian(ls, ebp_ext);

    ScalarField f2(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double k = kap.at(i, j);
            const Vec2 n = nf.at(i, j);
            const Mat2 proj = Mat2::Identity() - n * n.transpose();
            const Mat2 m = proj * gn.at(i, j);
            // grad(n):grad(n)^T with the projected tensors.
            const double gn_contract = (m * m).trace();
            f2.at(i, j) = k * model.es_d(chi.chi.at(i, j)) + model.eb(k) * k -
                          model.eb_d(k) * gn_contract - lap_ebp.at(i, j);
        }
    }
    return f2;
}

ScalarField f_b_divergence_form(const LevelSet& ls, const EnergyModel& model) {
    const Grid& g = ls.grid();
    const NormalField nf = normal(ls);
    const CurvatureField kap = curvature(ls);
    const auto gphi = gradient_central(ls.phi);

    ScalarField inner(g, Centering::node); // E_b'(kappa) |grad phi|
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double mag = std::hypot(gphi[0].at(i, j), gphi[1].at(i, j));
            inner.at(i, j) = model.eb_d(kap.at(i, j)) * mag;
        }
    }
    const auto ginner = gradient_central(inner);

    VectorNodeField vfield(g);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 n = nf.at(i, j);
            const double mag = std::max(std::hypot(gphi[0].at(i, j), gphi[1].at(i, j)), 1e-30);
            const Vec2 gi(ginner[0].at(i, j), ginner[1].at(i, j));
            const Mat2 proj = Mat2::Identity() - n * n.transpose();
            const Vec2 v = -model.eb(kap.at(i, j)) * n - proj * gi / mag;
            vfield.set(i, j, v);
        }
    }
    const auto dvx = gradient_central(vfield.x);
    const auto dvy = gradient_central(vfield.y);
    ScalarField out(g, Centering::node);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            out.at(i, j) = dvx[0].at(i, j) + dvy[1].at(i, j);
    return out;
}

namespace {

void require_delta_fits(const LevelSet& ls, const SmoothedDelta& delta) {
    if (delta.half_width_cells * ls.grid().h > ls.band_halfwidth) {
        throw ConfigError("smoothed delta support exceeds the band halfwidth");
    }
}

} // namespace

double stretch_energy(const LevelSet& ls, const StretchField& chi,
                      const EnergyModel& model, const SmoothedDelta& delta) {
    require_delta_fits(ls, delta);
    const Grid& g = ls.grid();
    const auto gphi = gradient_central(ls.phi);
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double phi = ls.phi.at(i, j);
            const double d = delta(phi, g.h);
            if (d == 0.0) continue;
            const double mag = std::hypot(gphi[0].at(i, j), gphi[1].at(i, j));
            const double c = chi.chi.at(i, j);
            e += model.es(c) / c * mag * d * g.h * g.h;
        }
    }
    return e;
}

double bending_energy(const LevelSet& ls, const EnergyModel& model,
                      const SmoothedDelta& delta) {
    require_delta_fits(ls, delta);
    const Grid& g = ls.grid();
    const auto gphi = gradient_central(ls.phi);
    const CurvatureField kap = curvature(ls);
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double phi = ls.phi.at(i, j);
            const double d = delta(phi, g.h);
            if (d == 0.0) continue;
            const double mag = std::hypot(gphi[0].at(i, j), gphi[1].at(i, j));
            e += model.eb(kap.at(i, j)) * mag * d * g.h * g.h;
        }
    }
    return e;
}

double delta_moment(const LevelSet& ls, const SmoothedDelta& delta) {
    const Grid& g = ls.grid();
    const auto gphi = gradient_central(ls.phi);
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double d = delta(ls.phi.at(i, j), g.h);
            if (d == 0.0) continue;
            m += d * std::hypot(gphi[0].at(i, j), gphi[1].at(i, j)) * g.h * g.h;
        }
    }
    return m;
}

VectorFieldMAC spread_force(const LevelSet& ls, const InterfaceForce& f,
                            const SmoothedDelta& delta) {
    require_delta_fits(ls, delta);
    const Grid& g = ls.grid();
    const auto gphi = gradient_central(ls.phi);
    VectorNodeField gphi_field(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            gphi_field.set(i, j, {gphi[0].at(i, j), gphi[1].at(i, j)});

    VectorFieldMAC out(g, 0.0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 p = g.uface(i, j);
            const double phi = interp_bilinear(ls.phi, p);
            const double d = delta(phi, g.h);
            if (d == 0.0) continue;
            const Vec2 gp = interp_bilinear(gphi_field, p);
            const double f1x = interp_bilinear(f.f1.x, p);
            const double f2 = interp_bilinear(f.f2, p);
            out.u(i, j) = (f1x * gp.norm() + f2 * gp.x()) * d;
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.vface(i, j);
            const double phi = interp_bilinear(ls.phi, p);
            const double d = delta(phi, g.h);
            if (d == 0.0) continue;
            const Vec2 gp = interp_bilinear(gphi_field, p);
            const double f1y = interp_bilinear(f.f1.y, p);
            const double f2 = interp_bilinear(f.f2, p);
            out.v(i, j) = (f1y * gp.norm() + f2 * gp.y()) * d;
        }
    }
    out.sync_periodic_edges();
    return out;
}

} // namespace iim
