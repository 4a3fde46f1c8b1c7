#pragma once

#include <vector>

#include "iim/forces.hpp"

namespace iim {

// Geometric and force data at one interface point, the input of every jump
// formula.  Derivative entries are Cartesian derivatives of the normally
// extended fields, so they encode surface derivatives.
struct GeoPoint {
    Vec2 pos = Vec2::Zero();
    Vec2 n = Vec2::Zero();   // unit normal (inward, grad phi direction)
    Vec2 t = Vec2::Zero();   // unit tangent, rot90(n)
    double kappa = 0.0;
    Vec2 f1 = Vec2::Zero();            // tangential force density
    Mat2 grad_f1 = Mat2::Zero();       // (grad_f1)(i,j) = d_i (f1)_j
    double f2 = 0.0;                   // normal force density
    Vec2 grad_f2 = Vec2::Zero();
    Mat2 hess_f2 = Mat2::Zero();
    double g = 0.0;                    // surf_div(f1) - n.grad(f2)
    Vec2 grad_g = Vec2::Zero();
};

using GeoData = std::vector<GeoPoint>;

// Jumps [A] = A(+) - A(-) across the interface, + being the side n points to
// (phi > 0, inside).
struct JumpPoint {
    Vec2 pos = Vec2::Zero();
    Vec2 n = Vec2::Zero();
    Vec2 t = Vec2::Zero();
    double jump_p = 0.0;
    Mat2 jump_grad_u = Mat2::Zero();              // [d_i u_j]
    Vec2 jump_grad_p = Vec2::Zero();
    std::array<Mat2, 2> jump_hess_u{Mat2::Zero(), Mat2::Zero()}; // [d_i d_j u_m]
    Mat2 jump_hess_p = Mat2::Zero();
    Vec2 jump_u_t = Vec2::Zero();
};

struct JumpSet {
    std::vector<JumpPoint> points;
};

// ---- per-point jump formulas ---------------------------------------------

double jump_pressure(const GeoPoint& geo);

// [d_i u_j] = -Re n_i (f1)_j; requires f1 orthogonal to n.
Mat2 jump_grad_u(const GeoPoint& geo, double Re);

// [d_i p] = (d_i - n_i n.grad) f2 + n_i surf_div(f1).
Vec2 jump_grad_p(const GeoPoint& geo);

// (1/Re)[d_i d_j u] = kappa (delta_ij - 2 n_i n_j) f1
//   - (n_j d_i + n_i d_j - 2 n_i n_j n_k d_k) f1 + n_i n_j [grad p].
std::array<Mat2, 2> jump_hess_u(const GeoPoint& geo, double Re);

// [d_i d_j p] with the 2D bulk velocity-product term supplied by the caller.
Mat2 jump_hess_p(const GeoPoint& geo, double bulk_velocity_jump_term);

// [u_t] = -u.[grad u].
Vec2 jump_u_t(const GeoPoint& geo, const Vec2& u_at_point,
              const Mat2& jump_grad_u);

// [[A]] = [A] if u.n < 0, -[A] if u.n > 0, 0 (with a warning) otherwise.
double temporal_jump(double spatial_jump, double u_dot_n);

// Full jump evaluation at one point.
JumpPoint evaluate_jumps(const GeoPoint& geo, double Re,
                         double bulk_velocity_jump_term = 0.0,
                         const Vec2& u_at_point = Vec2::Zero());

// ---- assembly ----------------------------------------------------------------

// GeoData along the interface, with geometry and force derivatives computed
// spectrally on the arclength-parametrized zero-set curve (low-pass filtered)
// and Cartesian tensors reconstructed from the ray-constant extension
// identities
//   grad q = q_s t,   hess q = q_ss t t + kappa q_s (n t + t n).
// Surface-smooth data keeps the stencil corrections consistent; band-stencil
// derivatives carry grid-scale noise that the 1/h^2 weights amplify.
GeoData build_geodata(const LevelSet& ls, const StretchField& chi,
                      const EnergyModel& model);

// Band-stencil variant: forces from (phi, chi, model), normal extension of
// f1, f2, g, then Cartesian derivatives by central differences on the band.
GeoData build_geodata_band(const LevelSet& ls, const StretchField& chi,
                           const EnergyModel& model);

JumpSet evaluate_jumps(const GeoData& geo, double Re,
                       const VectorFieldMAC* u = nullptr);

// Arclength-linear interpolation of the JumpSet at an arbitrary point near
// the polyline (used for stencil corrections at crossing locations).
JumpPoint interpolate_jumps(const JumpSet& js, const Vec2& x);

void write_jumps_csv(const std::string& path, const JumpSet& js);

} // namespace iim
