// iimflow: immersed-interface membrane flow driver.
//
// Subcommands:
//   simulate  run a scenario from a preset and/or config file
//   verify    run a verification suite, print a CSV report
//   jumps     evaluate interface jump conditions from field snapshots
//   reinit    reinitialize a level-set snapshot to signed distance
//   info      build and format information
//
// Exit codes: 0 pass, 1 check failure, 2 usage error, 3 input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "iim/checks.hpp"
#include "iim/scenario.hpp"

namespace {

int cmd_simulate(const std::string& config, const std::string& preset,
                 const std::string& out_dir, int resolution, unsigned seed) {
    iim::ScenarioConfig cfg;
    if (!config.empty()) {
        cfg = iim::parse_config_file(config);
    } else if (!preset.empty()) {
        cfg = iim::preset_config(preset);
    } else {
        std::cerr << "simulate needs --config or --preset\n";
        return 2;
    }
    if (!preset.empty() && !config.empty()) cfg.preset = preset;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (resolution > 0) cfg.nx = resolution;
    if (seed != 0) cfg.seed = seed;

    const iim::RunSummary sum = iim::run_scenario(cfg);
    std::cout << "steps=" << sum.steps << " t=" << iim::format_double(sum.t)
              << " area=" << iim::format_double(sum.area1)
              << " perimeter=" << iim::format_double(sum.perimeter1)
              << " E_s=" << iim::format_double(sum.es)
              << " E_b=" << iim::format_double(sum.eb)
              << " kinetic=" << iim::format_double(sum.kinetic) << "\n";
    std::cout << "outputs in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& report_path) {
    const auto names = iim::checks::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "unknown suite '" << suite << "'; available:";
        for (const auto& n : names) std::cerr << " " << n;
        std::cerr << "\n";
        return 2;
    }
    const iim::checks::CheckList results = iim::checks::run_suite(suite);
    if (report_path.empty()) {
        iim::checks::print_report(std::cout, results);
    } else {
        std::ofstream os(report_path);
        if (!os) {
            std::cerr << "cannot open '" << report_path << "'\n";
            return 3;
        }
        iim::checks::print_report(os, results);
    }
    return iim::checks::all_pass(results) ? 0 : 1;
}

int cmd_jumps(const std::string& phi_path, const std::string& chi_path,
              const std::string& u_path, const std::string& v_path,
              double sigma, double hookean_k, double bending_c, double Re,
              const std::string& out_path) {
    const iim::NamedField phi = iim::read_field(phi_path);
    const iim::NamedField chi = iim::read_field(chi_path);
    if (!(phi.field.grid == chi.field.grid)) {
        std::cerr << "grid mismatch between '" << phi_path << "' and '" << chi_path << "'\n";
        return 3;
    }

    iim::LevelSet ls;
    ls.phi = phi.field;
    ls.band_halfwidth = iim::LevelSet::kDefaultBandCells * phi.field.grid.h;
    ls.retag_band();
    iim::StretchField chi_field;
    chi_field.chi = chi.field;

    iim::ScenarioConfig model_cfg;
    model_cfg.sigma = sigma;
    model_cfg.hookean_k = hookean_k;
    model_cfg.bending_c = bending_c;
    const iim::EnergyModel model = model_cfg.energy_model();

    const iim::GeoData geo = iim::build_geodata(ls, chi_field, model);
    std::optional<iim::VectorFieldMAC> u;
    if (!u_path.empty()) {
        const iim::NamedField un = iim::read_field(u_path);
        const iim::NamedField vn = iim::read_field(v_path);
        if (!(un.field.grid == phi.field.grid) || !(vn.field.grid == phi.field.grid)) {
            std::cerr << "grid mismatch between velocity and phi snapshots\n";
            return 3;
        }
        // Node-sampled velocity snapshots; move to faces by averaging.
        iim::VectorFieldMAC w(phi.field.grid);
        const iim::Grid& g = phi.field.grid;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                w.u(i, j) = 0.5 * (un.field.read(i, j) + un.field.read(i, j + 1));
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                w.v(i, j) = 0.5 * (vn.field.read(i, j) + vn.field.read(i + 1, j));
        u = w;
    }
    const iim::JumpSet js = iim::evaluate_jumps(geo, Re, u ? &*u : nullptr);
    iim::write_jumps_csv(out_path, js);
    std::cout << "wrote " << js.points.size() << " interface points to " << out_path << "\n";
    return 0;
}

int cmd_reinit(const std::string& in_path, const std::string& out_path, int steps) {
    const iim::NamedField in = iim::read_field(in_path);
    if (in.field.centering != iim::Centering::node) {
        std::cerr << "reinit expects a node-centered level-set snapshot\n";
        return 3;
    }
    iim::LevelSet ls;
    ls.phi = in.field;
    ls.band_halfwidth = iim::LevelSet::kDefaultBandCells * in.field.grid.h;
    ls.retag_band();
    const iim::LevelSet out = iim::reinitialize(ls, steps);
    iim::write_field(out_path, out.phi, in.name, in.t);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

void cmd_info() {
    std::cout << "iimflow: 2D Eulerian immersed-interface membrane toolkit\n"
              << "grid: uniform MAC, periodic by default\n"
              << "presets: static_circle ellipse_relaxation shear_stretch taylor_green\n"
              << "verify suites:";
    for (const auto& n : iim::checks::suite_names()) std::cout << " " << n;
    std::cout << "\nfield snapshot: 'FIELD <name> <centering> <nx> <ny> <h> <t>' +"
                 " row-major ASCII or BINARY block\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D Eulerian immersed-interface membrane toolkit"};
    app.require_subcommand(1);

    std::string config, preset, out_dir;
    int resolution = 0;
    unsigned seed = 0;
    auto* sim = app.add_subcommand("simulate", "run a scenario");
    sim->add_option("--config", config, "flat key-value config file");
    sim->add_option("--preset", preset,
                    "static_circle|ellipse_relaxation|shear_stretch|taylor_green");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--resolution", resolution, "grid cells per axis");
    sim->add_option("--seed", seed, "seed for randomized property tests");

    std::string suite, report_path;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "suite name (see 'info')")->required();
    ver->add_option("--report", report_path, "write the CSV report to a file");

    std::string phi_path, chi_path, u_path, v_path, jumps_out = "jumps.csv";
    double sigma = 0.0, hookean_k = 0.0, bending_c = 0.0, Re = 1.0;
    auto* jmp = app.add_subcommand("jumps", "evaluate jump conditions from snapshots");
    jmp->add_option("phi", phi_path, "level-set field snapshot")->required();
    jmp->add_option("chi", chi_path, "stretch field snapshot")->required();
    jmp->add_option("--u", u_path, "node-sampled u-component snapshot");
    jmp->add_option("--v", v_path, "node-sampled v-component snapshot");
    jmp->add_option("--sigma", sigma, "constant tension");
    jmp->add_option("--hookean", hookean_k, "Hookean stretch stiffness");
    jmp->add_option("--bending", bending_c, "quadratic bending modulus");
    jmp->add_option("--Re", Re, "Reynolds number");
    jmp->add_option("--out", jumps_out, "output CSV path");

    std::string reinit_in, reinit_out = "reinit_out.field";
    int reinit_steps = 40;
    auto* rei = app.add_subcommand("reinit", "reinitialize a level-set snapshot");
    rei->add_option("field", reinit_in, "input field snapshot")->required();
    rei->add_option("--out", reinit_out, "output path");
    rei->add_option("--steps", reinit_steps, "pseudo-time steps");

    auto* inf = app.add_subcommand("info", "print build information");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config, preset, out_dir, resolution, seed);
        if (ver->parsed()) return cmd_verify(suite, report_path);
        if (jmp->parsed()) {
            if (u_path.empty() != v_path.empty()) {
                std::cerr << "--u and --v must be given together\n";
                return 2;
            }
            return cmd_jumps(phi_path, chi_path, u_path, v_path, sigma, hookean_k,
                             bending_c, Re, jumps_out);
        }
        if (rei->parsed()) return cmd_reinit(reinit_in, reinit_out, reinit_steps);
        if (inf->parsed()) {
            cmd_info();
            return 0;
        }
    } catch (const iim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iim::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const iim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
