#pragma once

#include "iim/geometry.hpp"
#include "iim/levelset.hpp"

namespace iim {

// Tangential stretch field chi on the narrow band; chi = 1 on the interface
// at t = 0 when the Lagrangian parameter is initial arclength.
struct StretchField {
    ScalarField chi;

    static StretchField ones(const Grid& g) {
        StretchField s;
        s.chi = ScalarField(g, Centering::node, 1.0);
        return s;
    }
};

// One WENO5/TVD-RK3 transport step of a band scalar (shared with advect_phi).
ScalarField advect_band_scalar(const ScalarField& q, const LevelSet& ls,
                               const VectorFieldMAC& w, double dt);

// Advection-reaction step of chi_t + w.grad(chi) = ((I-nn):grad w) chi,
// Strang-split with an integrating-factor reaction update.
StretchField evolve_stretch(const StretchField& chi, const LevelSet& ls,
                            const VectorFieldMAC& w, double dt);

// Constant-along-normal extension of q off the interface: every tube node
// takes the value of the input field at its interface foot point (the
// stationary solution of q_tau + sgn(phi) grad(phi).grad(q) = 0).
// n_refine bounds the Newton refinements of the foot point.
ScalarField extend_scalar(const LevelSet& ls, const ScalarField& q,
                          int n_refine = 8);

// Componentwise extension of a MAC velocity: faces -> nodes, extend, -> faces.
VectorFieldMAC extend_velocity(const LevelSet& ls, const VectorFieldMAC& u);

// Post-reinitialization band maintenance: re-extends only the outer shell
// (|phi| > band - 2h) where the transport taper degrades values, preserving
// the accurately advected inner band (repeated whole-band extension
// accumulates foot-point drift at first order).
ScalarField refresh_band_scalar(const LevelSet& ls, const ScalarField& q,
                                int n_refine = 8);

// Interface foot point of x (nearest point on the zero set along grad(phi)).
Vec2 interface_foot_point(const LevelSet& ls, const Vec2& x, int n_refine = 8);

// Reaction coefficient (I - nn):grad(w) at the nodes.
ScalarField stretch_reaction(const LevelSet& ls, const VectorFieldMAC& w);

} // namespace iim
