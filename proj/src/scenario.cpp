#include "iim/scenario.hpp"
#include <limits>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace iim {

EnergyModel ScenarioConfig::energy_model() const {
    EnergyModel m;
    if (hookean_k != 0.0) {
        m = EnergyModel::hookean(hookean_k);
        if (sigma != 0.0) {
            // Tension adds linearly on top of the Hookean part.
            const double s = sigma, k = hookean_k;
            m.es = [s, k](double chi) { return s * chi + 0.5 * k * sqr(chi - 1.0); };
            m.es_d = [s, k](double chi) { return s + k * (chi - 1.0); };
            m.es_dd = [k](double) { return k; };
        }
    } else if (sigma != 0.0) {
        m = EnergyModel::tension(sigma);
    }
    if (bending_c != 0.0) {
        m = m.with_bending(EnergyModel::bending_quadratic(bending_c));
    }
    return m;
}

std::optional<InterfaceShape> ScenarioConfig::interface_shape() const {
    if (shape == "none") return std::nullopt;
    if (shape == "circle") return Circle{{cx, cy}, radius};
    if (shape == "ellipse") return Ellipse{{cx, cy}, a, b};
    throw ConfigError("unknown shape '" + shape + "'");
}

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg;
    cfg.preset = name;
    if (name == "static_circle") {
        cfg.shape = "circle";
        cfg.sigma = 1.0;
        cfg.Re = 10.0;
        cfg.t_end = 0.05;
    } else if (name == "ellipse_relaxation") {
        cfg.shape = "ellipse";
        cfg.sigma = 1.0;
        cfg.Re = 10.0;
        cfg.t_end = 0.25;
    } else if (name == "shear_stretch") {
        cfg.shape = "circle";
        cfg.flow = "strain";
        cfg.t_end = 0.2;
    } else if (name == "taylor_green") {
        cfg.shape = "none";
        cfg.flow = "taylor_green_exact";
        cfg.extent = 2.0;
        cfg.Re = 100.0;
        cfg.t_end = 0.1;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");

    // First pass finds the preset so explicit keys override its defaults.
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw ConfigError("malformed config line: '" + line + "'");
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ScenarioConfig cfg;
    for (const auto& [k, v] : entries) {
        if (k == "preset") cfg = preset_config(v);
    }
    for (const auto& [k, v] : entries) {
        if (k == "preset") continue;
        else if (k == "nx") cfg.nx = std::stoi(v);
        else if (k == "extent") cfg.extent = std::stod(v);
        else if (k == "shape") cfg.shape = v;
        else if (k == "cx") cfg.cx = std::stod(v);
        else if (k == "cy") cfg.cy = std::stod(v);
        else if (k == "radius") cfg.radius = std::stod(v);
        else if (k == "a") cfg.a = std::stod(v);
        else if (k == "b") cfg.b = std::stod(v);
        else if (k == "sigma") cfg.sigma = std::stod(v);
        else if (k == "hookean_k") cfg.hookean_k = std::stod(v);
        else if (k == "bending_c") cfg.bending_c = std::stod(v);
        else if (k == "Re") cfg.Re = std::stod(v);
        else if (k == "cfl") cfg.cfl = std::stod(v);
        else if (k == "dt") cfg.dt = std::stod(v);
        else if (k == "t_end") cfg.t_end = std::stod(v);
        else if (k == "reinit_every") cfg.reinit_every = std::stoi(v);
        else if (k == "output_every") cfg.output_every = std::stoi(v);
        else if (k == "out_dir") cfg.out_dir = v;
        else if (k == "extension_velocity") cfg.extension_velocity = v == "1" || v == "true";
        else if (k == "flow") cfg.flow = v;
        else if (k == "strain_alpha") cfg.strain_alpha = std::stod(v);
        else if (k == "seed") cfg.seed = static_cast<unsigned>(std::stoul(v));
        else throw ConfigError("unknown config key '" + k + "'");
    }
    return cfg;
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.nx < 8) throw ConfigError("nx must be >= 8");
    if (cfg.extent <= 0) throw ConfigError("extent must be positive");
    if (cfg.Re <= 0) throw ConfigError("Re must be positive");
    if (cfg.t_end <= 0) throw ConfigError("t_end must be positive");
    if (cfg.dt < 0) throw ConfigError("dt must be non-negative");
    if (cfg.cfl <= 0 || cfg.cfl > 0.5) throw ConfigError("cfl must lie in (0, 0.5]");
    if (cfg.reinit_every < 1) throw ConfigError("reinit_every must be >= 1");
    if (cfg.output_every < 1) throw ConfigError("output_every must be >= 1");
    if (cfg.flow != "solve" && cfg.flow != "strain" && cfg.flow != "taylor_green_exact") {
        throw ConfigError("unknown flow mode '" + cfg.flow + "'");
    }
    cfg.interface_shape(); // validates the shape tag
}

namespace {

VectorFieldMAC strain_velocity(const Grid& g, double alpha, const Vec2& c) {
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) w.u(i, j) = alpha * (g.uface(i, j).x() - c.x());
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = -alpha * (g.vface(i, j).y() - c.y());
    return w;
}

VectorFieldMAC taylor_green_velocity(const Grid& g) {
    VectorFieldMAC u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 p = g.uface(i, j);
            u.u(i, j) = std::sin(M_PI * p.x()) * std::cos(M_PI * p.y());
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.vface(i, j);
            u.v(i, j) = -std::cos(M_PI * p.x()) * std::sin(M_PI * p.y());
        }
    return u;
}

} // namespace

RunSummary run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const Grid grid({0, 0}, {cfg.extent, cfg.extent}, cfg.nx, cfg.nx);
    const EnergyModel model = cfg.energy_model();
    const SmoothedDelta delta;

    const auto shape = cfg.interface_shape();
    std::optional<LevelSet> ls;
    StretchField chi;
    if (shape) {
        ls = init_signed_distance(*shape, grid);
        chi = StretchField::ones(grid);
    }

    FlowState state{VectorFieldMAC(grid, 0.0), ScalarField(grid, Centering::cell), 0.0, cfg.Re};
    if (cfg.flow == "taylor_green_exact") state.u = taylor_green_velocity(grid);
    const VectorFieldMAC prescribed =
        cfg.flow == "strain" ? strain_velocity(grid, cfg.strain_alpha, {cfg.cx, cfg.cy})
                             : VectorFieldMAC(grid, 0.0);
    if (cfg.flow == "strain") state.u = prescribed;

    // Time step from the CFL bounds of every active mechanism.
    auto pick_dt = [&]() {
        if (cfg.dt > 0) return cfg.dt;
        // Strictly inside the diffusive stability boundary; at equality the
        // checkerboard mode is neutrally stable and convection tips it over.
        double dt = 0.9 * 0.25 * cfg.Re * grid.h * grid.h;
        if (cfg.flow == "strain") dt = std::numeric_limits<double>::max();
        const double umax = std::max(state.u.max_abs(), prescribed.max_abs());
        if (umax > 0) dt = std::min(dt, cfg.cfl * grid.h / umax);
        return dt;
    };
    const double dt = pick_dt();
    const int steps = static_cast<int>(std::ceil(cfg.t_end / dt - 1e-12));

    std::ofstream series(cfg.out_dir + "/series.csv");
    series << "t,E_s,E_b,area,perimeter,kinetic\n";

    RunSummary sum;
    double prev_perimeter = 0.0;

    auto record = [&](int step, bool snapshot) {
        double es = 0.0, eb = 0.0, area = 0.0, perim = 0.0;
        if (ls) {
            es = stretch_energy(*ls, chi, model, delta);
            eb = bending_energy(*ls, model, delta);
            const auto poly = extract_interface(*ls);
            area = std::abs(polyline_area(poly));
            perim = polyline_length(poly);
            if (snapshot) {
                write_polyline_csv(cfg.out_dir + "/interface_" + std::to_string(step) + ".csv", poly);
                write_field(cfg.out_dir + "/field_phi_" + std::to_string(step), ls->phi, "phi", state.t);
                write_field(cfg.out_dir + "/field_chi_" + std::to_string(step), chi.chi, "chi", state.t);
                if (cfg.flow == "solve") {
                    const GeoData geo = build_geodata(*ls, chi, model);
                    const JumpSet js = evaluate_jumps(geo, cfg.Re, &state.u);
                    write_jumps_csv(cfg.out_dir + "/jumps_" + std::to_string(step) + ".csv", js);
                }
            }
        }
        if (snapshot) {
            write_field(cfg.out_dir + "/field_p_" + std::to_string(step), state.p, "p", state.t);
        }
        const double ke = kinetic_energy(state.u);
        series << format_double(state.t) << "," << format_double(es) << ","
               << format_double(eb) << "," << format_double(area) << ","
               << format_double(perim) << "," << format_double(ke) << "\n";

        if (step == 0) {
            sum.area0 = area;
            sum.perimeter0 = perim;
            if (perim > 0) sum.isoperimetric0 = 4 * M_PI * area / (perim * perim);
            prev_perimeter = perim;
        } else {
            if (perim > prev_perimeter + 1e-4) sum.perimeter_monotone = false;
            prev_perimeter = perim;
        }
        sum.t = state.t;
        sum.area1 = area;
        sum.perimeter1 = perim;
        if (perim > 0) sum.isoperimetric1 = 4 * M_PI * area / (perim * perim);
        sum.kinetic = ke;
        sum.es = es;
        sum.eb = eb;
        sum.max_u = std::max(sum.max_u, state.u.max_abs());
    };

    record(0, true);

    for (int s = 0; s < steps; ++s) {
        LevelSet before = ls ? *ls : LevelSet{};
        JumpSet js;
        if (cfg.flow == "solve") {
            std::optional<CorrectionLedger> ledger;
            if (ls) {
                const GeoData geo = build_geodata(*ls, chi, model);
                const auto bulk = bulk_velocity_jump_terms(geo, state.u);
                js.points.reserve(geo.size());
                for (size_t k = 0; k < geo.size(); ++k) {
                    js.points.push_back(evaluate_jumps(
                        geo[k], cfg.Re, bulk[k], interp_bilinear(state.u, geo[k].pos)));
                }
                ledger = assemble_corrections(*ls, js, cfg.Re);
            }
            state = momentum_step(state, dt, ledger ? &*ledger : nullptr);
        } else if (cfg.flow == "strain") {
            state.u = prescribed;
            state.t += dt;
        } else {
            state = momentum_step(state, dt, nullptr);
        }

        if (ls) {
            const VectorFieldMAC transport =
                cfg.extension_velocity ? extend_velocity(*ls, state.u) : state.u;
            chi = evolve_stretch(chi, *ls, transport, dt);
            *ls = advect_phi(*ls, transport, dt);
            if (cfg.flow == "solve" && !js.points.empty()) {
                apply_temporal_jumps(state, before, *ls, js, dt);
            }
            if ((s + 1) % cfg.reinit_every == 0) {
                *ls = reinitialize(*ls);
                chi.chi = refresh_band_scalar(*ls, chi.chi);
            }
        }
        sum.steps = s + 1;
        record(s + 1, (s + 1) % cfg.output_every == 0 || s + 1 == steps);
    }
    return sum;
}

} // namespace iim
