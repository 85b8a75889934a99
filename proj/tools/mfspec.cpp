#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mfspec/experiment.hpp"

namespace {

struct Overrides {
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> q_min, q_max;
    std::optional<int> grid_points;
};

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--out-dir", o.out_dir, "directory for CSV and SVG output")->capture_default_str();
    app->add_option("--seed", o.seed, "seed for the dimension check");
    app->add_option("--q-min", o.q_min, "lower end of the q range");
    app->add_option("--q-max", o.q_max, "upper end of the q range");
    app->add_option("--grid-points", o.grid_points, "points on the q and alpha grids")->check(CLI::Range(64, 1000000));
}

int execute(mfspec::ExperimentConfig cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.q_min) cfg.q_min = *o.q_min;
    if (o.q_max) cfg.q_max = *o.q_max;
    if (o.grid_points) cfg.grid_points = *o.grid_points;
    if (!(cfg.q_min < cfg.q_max)) {
        std::cerr << "error: q-min must be below q-max\n";
        return mfspec::kExitConfig;
    }
    try {
        auto res = mfspec::run_experiment(cfg, o.out_dir, std::cout);
        return res.exit_code;
    } catch (const mfspec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mfspec::kExitInvariant;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multifractal spectra of countable full shifts"};
    app.require_subcommand(1);

    Overrides run_o, preset_o;
    std::string config_path, preset_name;

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "config file")->required();
    add_overrides(run, run_o);

    auto* list = app.add_subcommand("list-presets", "list the built-in potential pairs");

    auto* preset = app.add_subcommand("preset", "run a built-in pair with default outputs");
    preset->add_option("name", preset_name, "preset name")->required();
    add_overrides(preset, preset_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : mfspec::kExitConfig;
    }

    if (*list) {
        for (const auto& p : mfspec::presets()) std::cout << p.name << "\n    " << p.description << "\n";
        return 0;
    }
    try {
        if (*run) return execute(mfspec::load_config(config_path), run_o);
        mfspec::ExperimentConfig cfg;
        const auto& p = mfspec::find_preset(preset_name);
        cfg.name = p.name;
        cfg.phi = p.phi;
        cfg.psi = p.psi;
        return execute(cfg, preset_o);
    } catch (const mfspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mfspec::kExitConfig;
    }
}
