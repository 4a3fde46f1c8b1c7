#pragma once

#include <functional>
#include <vector>

#include "iim/energy.hpp"
#include "iim/levelset.hpp"
#include "iim/stretch.hpp"

namespace iim {

// Lagrangian marker reference: positions X(xi_k) at xi_k = 2 pi k / N.
// Brute-force cross-check for the Eulerian pipeline; never drives the flow.
struct MarkerCurve {
    std::vector<Vec2> positions;
    std::vector<double> chi_ref; // |X_xi| at t = 0, for stretch normalization

    int size() const { return static_cast<int>(positions.size()); }

    static MarkerCurve from_shape(const InterfaceShape& shape, int n);
};

using AnalyticVelocity = std::function<Vec2(const Vec2&, double)>;

bool needs_resample(const MarkerCurve& mc);

// Classical RK4 marker transport.
MarkerCurve advect_markers(const MarkerCurve& mc, const AnalyticVelocity& vel,
                           double t, double dt);
MarkerCurve advect_markers(const MarkerCurve& mc, const VectorFieldMAC& vel,
                           double dt);

// |X_xi| per marker, 4th-order centered differences in xi.
std::vector<double> marker_stretch(const MarkerCurve& mc);

// Total stretch energy integral E_s(|X_xi|/chi_ref) chi_ref dxi (trapezoid,
// grid-independent).
double marker_energy(const MarkerCurve& mc, const std::vector<double>& chi_ref,
                     const EnergyModel& model);

struct OracleReport {
    double hausdorff = 0.0;
    double max_rel_stretch_err = 0.0;
};

// Compares the marker curve against the Eulerian (phi, chi) representation.
OracleReport compare_eulerian(const MarkerCurve& mc, const LevelSet& ls,
                              const StretchField& chi);

void write_marker_csv(const std::string& path, const MarkerCurve& mc);

} // namespace iim
