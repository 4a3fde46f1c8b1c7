#pragma once

#include "iim/energy.hpp"
#include "iim/geometry.hpp"
#include "iim/stretch.hpp"

namespace iim {

// Regularized one-dimensional delta for energy quadrature and validation
// spreading only; the immersed-interface pipeline never spreads forces.
struct SmoothedDelta {
    enum class Kernel { cosine, peskin4 };

    double half_width_cells = 2.0;
    Kernel kernel = Kernel::cosine;

    double operator()(double r, double h) const;
};

// Tangential force density f1 (vector, orthogonal to n) and normal force
// density f2 (scalar) on the band; the full singular force is
// f = f1 |grad phi| delta(phi) + f2 grad(phi) delta(phi).
struct InterfaceForce {
    VectorNodeField f1;
    ScalarField f2;
};

// f1 = (I - nn).grad(E_s'(chi)); chi must be extended on the band.
VectorNodeField compute_f1(const LevelSet& ls, const StretchField& chi,
                           const EnergyModel& model);

// f2 = kappa E_s'(chi) + E_b kappa - E_b' grad(n):grad(n)^T - Lap_tan E_b'.
ScalarField compute_f2(const LevelSet& ls, const StretchField& chi,
                       const EnergyModel& model);

// Bending coefficient in divergence form,
//   div(-E_b n - (I-nn)/|grad phi| . grad(E_b' |grad phi|)),
// the independent route to the bending part of f2.
ScalarField f_b_divergence_form(const LevelSet& ls, const EnergyModel& model);

// Band quadrature of (1/chi) E_s(chi) |grad phi| delta(phi).
double stretch_energy(const LevelSet& ls, const StretchField& chi,
                      const EnergyModel& model, const SmoothedDelta& delta);

// Band quadrature of E_b(kappa) |grad phi| delta(phi).
double bending_energy(const LevelSet& ls, const EnergyModel& model,
                      const SmoothedDelta& delta);

// Regularized body force sampled on faces (validation only).
VectorFieldMAC spread_force(const LevelSet& ls, const InterfaceForce& f,
                            const SmoothedDelta& delta);

// Discrete delta moment sum delta(phi) |grad phi| h^2, which must approximate
// the interface length.
double delta_moment(const LevelSet& ls, const SmoothedDelta& delta);

} // namespace iim
