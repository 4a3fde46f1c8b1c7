#pragma once

#include <optional>

#include "iim/jumps.hpp"
#include "iim/oracle.hpp"

namespace iim {

// MAC velocity + cell pressure at simulation time t.
struct FlowState {
    VectorFieldMAC u;
    ScalarField p;
    double t = 0.0;
    double Re = 1.0;
};

struct PoissonResult {
    ScalarField p;            // zero mean
    double compat_mean = 0.0; // mean removed from the RHS
    double rel_residual = 0.0;
};

// Periodic 5-point Poisson solve, exact in Fourier space for the discrete
// operator.  The RHS mean is removed (compatibility) and reported.
PoissonResult solve_pressure_poisson(const ScalarField& rhs_cells);

// One finite-difference arm that crosses the interface.
struct StencilCrossing {
    Vec2 probe = Vec2::Zero();    // the stencil point read across the interface
    Vec2 crossing = Vec2::Zero(); // interface location on the arm
    double theta = 0.0;           // fraction from the arm base
    double sign = 0.0;            // +1 when the base sits on the phi < 0 side
    JumpPoint jumps;              // interface data interpolated at the crossing
};

// Correction data for every corrected operator.  Dense arrays hold the
// u-independent Taylor corrections (pressure and diffusion); convection arms
// are kept symbolic because their jump polynomial depends on the current
// velocity at the crossing.
struct CorrectionLedger {
    bool active = false;
    Array2D p_laplacian; // add to the Poisson RHS, cells
    Array2D p_grad_u;    // subtract from the face pressure gradient, u-faces
    Array2D p_grad_v;    // v-faces
    Array2D lap_u;       // subtract from the u-face Laplacian
    Array2D lap_v;       // subtract from the v-face Laplacian

    struct ConvArm {
        int face_i = 0, face_j = 0; // owning face
        int term = 0;               // 0: d/dx arm, 1: d/dy arm
        double weight = 0.0;        // signed stencil weight (+-1/h)
        double sign = 0.0;
        Vec2 probe = Vec2::Zero();
        Vec2 crossing = Vec2::Zero();
        Mat2 jump_grad_u = Mat2::Zero();
    };
    std::vector<ConvArm> conv_u, conv_v;

    static CorrectionLedger empty(const Grid& g);
};

// Locates every stencil arm crossing the interface and assembles the Taylor
// jump corrections from the JumpSet.
CorrectionLedger assemble_corrections(const LevelSet& ls, const JumpSet& js,
                                      double Re);

// Bulk velocity-product jump 2[du/dx dv/dy] - 2[dv/dx du/dy] per interface
// point, from one-sided samples at +-offset*h along the normal.
std::vector<double> bulk_velocity_jump_terms(const GeoData& geo,
                                             const VectorFieldMAC& u,
                                             double offset_cells = 2.5);

// Explicit RK2 Navier-Stokes step; f enters only through the corrections.
// Passing no ledger runs the plain solver (bitwise identical to a ledger with
// zero jumps).
FlowState momentum_step(const FlowState& state, double dt,
                        const CorrectionLedger* ledger = nullptr);

// Convenience form: evaluates forces and jumps from (phi, chi, model),
// assembles the correction ledger, and takes the step.
FlowState momentum_step(const FlowState& state, const LevelSet& ls,
                        const StretchField& chi, const EnergyModel& model,
                        double dt);

// Divergence feedback RHS (the discrete realization of the pressure-Poisson
// equation with D retained): div(a) + D/dt + corrections.
ScalarField pressure_rhs(const FlowState& state, const VectorFieldMAC& accel,
                         double dt, const CorrectionLedger* ledger);

double kinetic_energy(const VectorFieldMAC& u);

// Temporal-jump fix at faces the interface swept during the step.
void apply_temporal_jumps(FlowState& state, const LevelSet& before,
                          const LevelSet& after, const JumpSet& js, double dt);

} // namespace iim
