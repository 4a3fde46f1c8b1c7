#pragma once

#include <optional>
#include <string>

#include "iim/solver.hpp"

namespace iim {

// Flat key-value run configuration; presets fill the defaults.
struct ScenarioConfig {
    std::string preset;     // static_circle | ellipse_relaxation | shear_stretch | taylor_green
    int nx = 128;
    double extent = 1.0;
    std::string shape = "circle"; // circle | ellipse | none
    double cx = 0.5, cy = 0.5;
    double radius = 0.25;
    double a = 0.3, b = 0.2;
    double sigma = 0.0;     // constant tension
    double hookean_k = 0.0; // Hookean stretch stiffness
    double bending_c = 0.0; // quadratic bending modulus
    double Re = 10.0;
    double cfl = 0.4;
    double dt = 0.0;        // 0: choose from the CFL bounds
    double t_end = 1.0;
    int reinit_every = 10;
    int output_every = 50;
    std::string out_dir = "out";
    bool extension_velocity = false; // transport phi/chi with Tu instead of u
    std::string flow = "solve";     // solve | strain | taylor_green_exact
    double strain_alpha = 1.0;
    unsigned seed = 0;

    EnergyModel energy_model() const;
    std::optional<InterfaceShape> interface_shape() const;
};

ScenarioConfig preset_config(const std::string& name);
ScenarioConfig parse_config_file(const std::string& path);
void validate(const ScenarioConfig& cfg);

struct RunSummary {
    double t = 0.0;
    int steps = 0;
    double area0 = 0.0, area1 = 0.0;
    double perimeter0 = 0.0, perimeter1 = 0.0;
    double max_u = 0.0;
    double kinetic = 0.0;
    double es = 0.0, eb = 0.0;
    bool perimeter_monotone = true; // within 1e-4 per step
    double isoperimetric0 = 0.0, isoperimetric1 = 0.0;
};

// Full coupled run: forces -> jumps -> momentum -> transport -> reinit
// cadence, with series.csv / interface / field / jump snapshots in out_dir.
RunSummary run_scenario(const ScenarioConfig& cfg);

} // namespace iim
