#include "iim/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace iim {

CorrectionLedger CorrectionLedger::empty(const Grid& g) {
    CorrectionLedger led;
    led.p_laplacian = Array2D::Zero(g.nx, g.ny);
    led.p_grad_u = Array2D::Zero(g.nx + 1, g.ny);
    led.p_grad_v = Array2D::Zero(g.nx, g.ny + 1);
    led.lap_u = Array2D::Zero(g.nx + 1, g.ny);
    led.lap_v = Array2D::Zero(g.nx, g.ny + 1);
    return led;
}

namespace {

struct Crossing {
    Vec2 point;
    double theta;
};

// Single crossing on the segment a->b located by bisection on interpolated
// phi; same-sign endpoints with an opposite-sign midpoint indicate two
// crossings (under-resolved).
std::optional<Crossing> find_crossing(const LevelSet& ls, const Vec2& a,
                                      const Vec2& b, const char* what) {
    const double fa = interp_bilinear(ls.phi, a);
    const double fb = interp_bilinear(ls.phi, b);
    const double reach = 2.0 * (b - a).norm();
    if (std::abs(fa) > reach && std::abs(fb) > reach) return std::nullopt;
    if ((fa > 0.0) == (fb > 0.0)) {
        const double fm = interp_bilinear(ls.phi, 0.5 * (a + b));
        if ((fm > 0.0) != (fa > 0.0)) {
            // Two crossings.  A shallow sliver (depth well below the arm
            // length) is tangential grazing of a resolved interface and its
            // jump contribution is below the scheme order; a deep sliver is a
            // genuinely under-resolved feature.
            const double arm = (b - a).norm();
            if (std::abs(fm) > 0.1 * arm) {
                std::ostringstream os;
                os << what << ": two interface crossings on one stencil arm near ("
                   << 0.5 * (a.x() + b.x()) << ", " << 0.5 * (a.y() + b.y())
                   << "); the interface is under-resolved";
                throw ResolutionError(os.str());
            }
        }
        return std::nullopt;
    }
    double lo = 0.0, hi = 1.0;
    double flo = fa;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = interp_bilinear(ls.phi, a + mid * (b - a));
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    const double theta = 0.5 * (lo + hi);
    return Crossing{a + theta * (b - a), theta};
}

double taylor_jump_p(const JumpPoint& jp, const Vec2& probe) {
    const Vec2 d = probe - jp.pos;
    return jp.jump_p + d.dot(jp.jump_grad_p) + 0.5 * d.dot(jp.jump_hess_p * d);
}

double taylor_jump_u(const JumpPoint& jp, const Vec2& probe, int comp) {
    const Vec2 d = probe - jp.pos;
    // [u] = 0; first and second derivative terms only.
    return d.dot(jp.jump_grad_u.col(comp)) + 0.5 * d.dot(jp.jump_hess_u[comp] * d);
}

} // namespace

CorrectionLedger assemble_corrections(const LevelSet& ls, const JumpSet& js,
                                      double /*Re*/) {
    const Grid& g = ls.grid();
    CorrectionLedger led = CorrectionLedger::empty(g);
    led.active = true;
    if (js.points.empty()) return led;
    const double h = g.h;
    const double cull = 3.0 * h;

    auto base_sign = [&](double phi_base) { return phi_base >= 0.0 ? -1.0 : 1.0; };

    // Pressure Laplacian arms (cell -> neighbor cell).
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 c = g.cell_center(i, j);
            const double phic = interp_bilinear(ls.phi, c);
            if (std::abs(phic) > cull) continue;
            const double sigma = base_sign(phic);
            const Vec2 nbrs[4] = {g.cell_center(i - 1, j), g.cell_center(i + 1, j),
                                  g.cell_center(i, j - 1), g.cell_center(i, j + 1)};
            for (const Vec2& nb : nbrs) {
                const auto cr = find_crossing(ls, c, nb, "pressure laplacian");
                if (!cr) continue;
                const JumpPoint jp = interpolate_jumps(js, cr->point);
                led.p_laplacian(i, j) += sigma * taylor_jump_p(jp, nb) / (h * h);
            }
        }
    }

    // Face pressure gradients (face -> adjacent cells).
    auto pgrad_arm = [&](const Vec2& face, const Vec2& cell, double weight,
                         double sigma) {
        const auto cr = find_crossing(ls, face, cell, "pressure gradient");
        if (!cr) return 0.0;
        const JumpPoint jp = interpolate_jumps(js, cr->point);
        return weight * sigma * taylor_jump_p(jp, cell);
    };
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 f = g.uface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            led.p_grad_u(i, j) +=
                pgrad_arm(f, g.cell_center(i - 1, j), -1.0 / h, sigma) +
                pgrad_arm(f, g.cell_center(i, j), 1.0 / h, sigma);
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 f = g.vface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            led.p_grad_v(i, j) +=
                pgrad_arm(f, g.cell_center(i, j - 1), -1.0 / h, sigma) +
                pgrad_arm(f, g.cell_center(i, j), 1.0 / h, sigma);
        }
    }

    // Velocity Laplacians (face -> neighbor faces of the same kind).
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 f = g.uface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            const Vec2 nbrs[4] = {g.uface(i - 1, j), g.uface(i + 1, j),
                                  g.uface(i, j - 1), g.uface(i, j + 1)};
            for (const Vec2& nb : nbrs) {
                const auto cr = find_crossing(ls, f, nb, "u laplacian");
                if (!cr) continue;
                const JumpPoint jp = interpolate_jumps(js, cr->point);
                led.lap_u(i, j) += sigma * taylor_jump_u(jp, nb, 0) / (h * h);
            }
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 f = g.vface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            const Vec2 nbrs[4] = {g.vface(i - 1, j), g.vface(i + 1, j),
                                  g.vface(i, j - 1), g.vface(i, j + 1)};
            for (const Vec2& nb : nbrs) {
                const auto cr = find_crossing(ls, f, nb, "v laplacian");
                if (!cr) continue;
                const JumpPoint jp = interpolate_jumps(js, cr->point);
                led.lap_v(i, j) += sigma * taylor_jump_u(jp, nb, 1) / (h * h);
            }
        }
    }

    // Convection arms: jump polynomials depend on the stage velocity, so only
    // the geometry and the velocity-gradient jump are frozen here.
    auto conv_arm = [&](std::vector<CorrectionLedger::ConvArm>& dst, int fi,
                        int fj, int term, const Vec2& center, const Vec2& probe,
                        double weight, double sigma) {
        const auto cr = find_crossing(ls, center, probe, "convection");
        if (!cr) return;
        CorrectionLedger::ConvArm arm;
        arm.face_i = fi;
        arm.face_j = fj;
        arm.term = term;
        arm.weight = weight;
        arm.sign = sigma;
        arm.probe = probe;
        arm.crossing = cr->point;
        arm.jump_grad_u = interpolate_jumps(js, cr->point).jump_grad_u;
        dst.push_back(arm);
    };
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 f = g.uface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            conv_arm(led.conv_u, i, j, 0, f, g.cell_center(i - 1, j), -1.0 / h, sigma);
            conv_arm(led.conv_u, i, j, 0, f, g.cell_center(i, j), 1.0 / h, sigma);
            conv_arm(led.conv_u, i, j, 1, f, g.node(i, j), -1.0 / h, sigma);
            conv_arm(led.conv_u, i, j, 1, f, g.node(i, j + 1), 1.0 / h, sigma);
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 f = g.vface(i, j);
            const double phif = interp_bilinear(ls.phi, f);
            if (std::abs(phif) > cull) continue;
            const double sigma = base_sign(phif);
            conv_arm(led.conv_v, i, j, 0, f, g.cell_center(i, j - 1), -1.0 / h, sigma);
            conv_arm(led.conv_v, i, j, 0, f, g.cell_center(i, j), 1.0 / h, sigma);
            conv_arm(led.conv_v, i, j, 1, f, g.node(i, j), -1.0 / h, sigma);
            conv_arm(led.conv_v, i, j, 1, f, g.node(i + 1, j), 1.0 / h, sigma);
        }
    }
    return led;
}

std::vector<double> bulk_velocity_jump_terms(const GeoData& geo,
                                             const VectorFieldMAC& u,
                                             double offset_cells) {
    const Grid& g = u.grid;
    const double h = g.h;

    // Cell-centered one-sided-safe derivative fields.
    ScalarField dxu(g, Centering::cell), dyv(g, Centering::cell);
    ScalarField dyu(g, Centering::cell), dxv(g, Centering::cell);
    auto ucc = [&](int i, int j) { return 0.5 * (u.read_u(i, j) + u.read_u(i + 1, j)); };
    auto vcc = [&](int i, int j) { return 0.5 * (u.read_v(i, j) + u.read_v(i, j + 1)); };
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            dxu.at(i, j) = (u.read_u(i + 1, j) - u.read_u(i, j)) / h;
            dyv.at(i, j) = (u.read_v(i, j + 1) - u.read_v(i, j)) / h;
            dyu.at(i, j) = (ucc(i, j + 1) - ucc(i, j - 1)) / (2.0 * h);
            dxv.at(i, j) = (vcc(i + 1, j) - vcc(i - 1, j)) / (2.0 * h);
        }
    }

    std::vector<double> out;
    out.reserve(geo.size());
    for (const GeoPoint& gp : geo) {
        auto product = [&](const Vec2& at) {
            const Vec2 p = g.wrap_point(at);
            return interp_bilinear(dxu, p) * interp_bilinear(dyv, p) -
                   interp_bilinear(dxv, p) * interp_bilinear(dyu, p);
        };
        // n points to the + side; sample clear of the interface on each side.
        const double plus = product(gp.pos + offset_cells * h * gp.n);
        const double minus = product(gp.pos - offset_cells * h * gp.n);
        out.push_back(2.0 * (plus - minus));
    }
    return out;
}

namespace {

struct FaceArrays {
    Array2D au; // acceleration on u-faces
    Array2D av; // acceleration on v-faces
};

// Convective + diffusive acceleration (no pressure, no body force; the
// interface enters only through the ledger corrections).
FaceArrays acceleration(const VectorFieldMAC& u, double Re,
                        const CorrectionLedger* led) {
    const Grid& g = u.grid;
    const double h = g.h;
    FaceArrays a;
    a.au = Array2D::Zero(g.nx + 1, g.ny);
    a.av = Array2D::Zero(g.nx, g.ny + 1);

    auto ucc = [&](int i, int j) { return 0.5 * (u.read_u(i, j) + u.read_u(i + 1, j)); };
    auto vcc = [&](int i, int j) { return 0.5 * (u.read_v(i, j) + u.read_v(i, j + 1)); };
    auto unode = [&](int i, int j) { return 0.5 * (u.read_u(i, j - 1) + u.read_u(i, j)); };
    auto vnode = [&](int i, int j) { return 0.5 * (u.read_v(i - 1, j) + u.read_v(i, j)); };

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double conv =
                (sqr(ucc(i, j)) - sqr(ucc(i - 1, j))) / h +
                (unode(i, j + 1) * vnode(i, j + 1) - unode(i, j) * vnode(i, j)) / h;
            const double lap = (u.read_u(i + 1, j) + u.read_u(i - 1, j) +
                                u.read_u(i, j + 1) + u.read_u(i, j - 1) -
                                4.0 * u.read_u(i, j)) / (h * h);
            const double lap_corr = led ? led->lap_u(i, j) : 0.0;
            a.au(i, j) = -conv + (lap - lap_corr) / Re;
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double conv =
                (sqr(vcc(i, j)) - sqr(vcc(i, j - 1))) / h +
                (unode(i + 1, j) * vnode(i + 1, j) - unode(i, j) * vnode(i, j)) / h;
            const double lap = (u.read_v(i + 1, j) + u.read_v(i - 1, j) +
                                u.read_v(i, j + 1) + u.read_v(i, j - 1) -
                                4.0 * u.read_v(i, j)) / (h * h);
            const double lap_corr = led ? led->lap_v(i, j) : 0.0;
            a.av(i, j) = -conv + (lap - lap_corr) / Re;
        }
    }

    if (led && led->active) {
        for (const auto& arm : led->conv_u) {
            const Vec2 d = arm.probe - arm.crossing;
            const Vec2 uc = interp_bilinear(u, arm.crossing);
            double jump;
            if (arm.term == 0) {
                jump = 2.0 * uc.x() * d.dot(arm.jump_grad_u.col(0));
            } else {
                jump = uc.x() * d.dot(arm.jump_grad_u.col(1)) +
                       uc.y() * d.dot(arm.jump_grad_u.col(0));
            }
            // conv enters a with a minus sign; corrected conv = conv - w*sigma*J.
            a.au(arm.face_i, arm.face_j) += arm.weight * arm.sign * jump;
        }
        for (const auto& arm : led->conv_v) {
            const Vec2 d = arm.probe - arm.crossing;
            const Vec2 uc = interp_bilinear(u, arm.crossing);
            double jump;
            if (arm.term == 0) {
                jump = 2.0 * uc.y() * d.dot(arm.jump_grad_u.col(1));
            } else {
                jump = uc.x() * d.dot(arm.jump_grad_u.col(1)) +
                       uc.y() * d.dot(arm.jump_grad_u.col(0));
            }
            a.av(arm.face_i, arm.face_j) += arm.weight * arm.sign * jump;
        }
    }
    return a;
}

ScalarField face_divergence(const Grid& g, const FaceArrays& a) {
    ScalarField out(g, Centering::cell);
    auto au = [&](int i, int j) { return a.au(g.node_i(i), g.cell_j(j)); };
    auto av = [&](int i, int j) { return a.av(g.cell_i(i), g.node_j(j)); };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = (au(i + 1, j) - au(i, j)) / g.h + (av(i, j + 1) - av(i, j)) / g.h;
    return out;
}

} // namespace

ScalarField pressure_rhs(const FlowState& state, const VectorFieldMAC& accel,
                         double dt, const CorrectionLedger* ledger) {
    const Grid& g = state.u.grid;
    FaceArrays fa{accel.u, accel.v};
    ScalarField rhs = face_divergence(g, fa);
    const ScalarField D = divergence_mac(state.u);
    rhs.values += D.values / dt;
    if (ledger && ledger->active) rhs.values += ledger->p_laplacian;
    return rhs;
}

FlowState momentum_step(const FlowState& state, double dt,
                        const CorrectionLedger* ledger) {
    const Grid& g = state.u.grid;
    if (!state.u.all_finite()) {
        throw StepError("momentum_step: velocity contains non-finite values at t=" +
                        format_double(state.t));
    }
    const double umax = state.u.max_abs();
    const double adv_limit = umax > 0.0 ? 0.5 * g.h / umax : std::numeric_limits<double>::max();
    const double diff_limit = 0.25 * state.Re * g.h * g.h;
    if (dt > std::min(adv_limit, diff_limit) * (1.0 + 1e-12)) {
        throw StepError("momentum_step: dt violates the advective/diffusive CFL bound");
    }

    auto stage = [&](const VectorFieldMAC& u) { return acceleration(u, state.Re, ledger); };

    const FaceArrays a0 = stage(state.u);

    // Predictor with its own projection so the stage-2 convection sees a
    // divergence-consistent field.
    VectorFieldMAC accel0(g);
    accel0.u = a0.au;
    accel0.v = a0.av;
    const ScalarField rhs0 = pressure_rhs(state, accel0, dt, ledger);
    const PoissonResult p0 = solve_pressure_poisson(rhs0);
    const VectorFieldMAC gp0 = gradient_faces(p0.p);
    VectorFieldMAC u1(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double corr = ledger && ledger->active ? ledger->p_grad_u(i, j) : 0.0;
            u1.u(i, j) = state.u.u(i, j) + dt * (a0.au(i, j) - (gp0.u(i, j) - corr));
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double corr = ledger && ledger->active ? ledger->p_grad_v(i, j) : 0.0;
            u1.v(i, j) = state.u.v(i, j) + dt * (a0.av(i, j) - (gp0.v(i, j) - corr));
        }
    u1.sync_periodic_edges();

    const FaceArrays a1 = stage(u1);

    VectorFieldMAC a_half(g);
    a_half.u = 0.5 * (a0.au + a1.au);
    a_half.v = 0.5 * (a0.av + a1.av);
    const ScalarField rhs = pressure_rhs(state, a_half, dt, ledger);
    const PoissonResult pbar = solve_pressure_poisson(rhs);
    const VectorFieldMAC gp = gradient_faces(pbar.p);

    FlowState out = state;
    out.t = state.t + dt;
    out.p = pbar.p;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double corr = ledger && ledger->active ? ledger->p_grad_u(i, j) : 0.0;
            out.u.u(i, j) = state.u.u(i, j) + dt * (a_half.u(i, j) - (gp.u(i, j) - corr));
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double corr = ledger && ledger->active ? ledger->p_grad_v(i, j) : 0.0;
            out.u.v(i, j) = state.u.v(i, j) + dt * (a_half.v(i, j) - (gp.v(i, j) - corr));
        }
    out.u.sync_periodic_edges();
    if (!out.u.all_finite()) {
        throw StepError("momentum_step: produced non-finite velocity at t=" +
                        format_double(out.t));
    }
    return out;
}

FlowState momentum_step(const FlowState& state, const LevelSet& ls,
                        const StretchField& chi, const EnergyModel& model,
                        double dt) {
    const GeoData geo = build_geodata(ls, chi, model);
    const auto bulk = bulk_velocity_jump_terms(geo, state.u);
    JumpSet js;
    js.points.reserve(geo.size());
    for (size_t k = 0; k < geo.size(); ++k) {
        js.points.push_back(evaluate_jumps(geo[k], state.Re, bulk[k],
                                           interp_bilinear(state.u, geo[k].pos)));
    }
    const CorrectionLedger ledger = assemble_corrections(ls, js, state.Re);
    return momentum_step(state, dt, &ledger);
}

void apply_temporal_jumps(FlowState& state, const LevelSet& before,
                          const LevelSet& after, const JumpSet& js, double dt) {
    if (js.points.empty()) return;
    const Grid& g = state.u.grid;
    auto fix = [&](const Vec2& pos, int comp) -> double {
        const double pb = interp_bilinear(before.phi, pos);
        const double pa = interp_bilinear(after.phi, pos);
        if ((pb > 0.0) == (pa > 0.0)) return 0.0;
        if (std::abs(pb) > 3.0 * g.h || std::abs(pa) > 3.0 * g.h) return 0.0;
        const double theta_t = pb / (pb - pa);
        const JumpPoint jp = interpolate_jumps(js, pos);
        const double u_dot_n = interp_bilinear(state.u, pos).dot(jp.n);
        const double spatial = comp == 0 ? jp.jump_u_t.x() : jp.jump_u_t.y();
        const double temporal = temporal_jump(spatial, u_dot_n);
        return dt * (0.5 - theta_t) * temporal;
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) state.u.u(i, j) += fix(g.uface(i, j), 0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) state.u.v(i, j) += fix(g.vface(i, j), 1);
    state.u.sync_periodic_edges();
}

} // namespace iim
