// Command-line front end for the OAM dephasing simulator.
//
//   oamsim simulate <config>   fidelity vs distance for every configured l
//   oamsim sweep-l  <config>   end-of-fiber fidelity vs l
//   oamsim compare  <config>   Monte Carlo vs closed-form dephasing model
//   oamsim preset   <fig1..5>  built-in experiment presets
//
// Common flags: --seed, --trials, --workers, --out, --format csv|svg.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oamsim/harness.hpp"

namespace {

struct CommonFlags {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    bool trials_set = false;
    int workers = 0;
    bool workers_set = false;
    std::string out_path;
    std::string format = "csv";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_format) {
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--trials", flags.trials, "Monte Carlo trial count (overrides the config)")
        ->each([&flags](const std::string&) { flags.trials_set = true; });
    cmd->add_option("--workers", flags.workers, "Worker thread count (overrides the config)")
        ->each([&flags](const std::string&) { flags.workers_set = true; });
    cmd->add_option("--out", flags.out_path, "Output file path");
    if (with_format) {
        cmd->add_option("--format", flags.format, "Output format: csv or svg")
            ->check(CLI::IsMember({"csv", "svg"}));
    }
}

void apply_overrides(oamsim::ExperimentConfig& config, const CommonFlags& flags) {
    if (flags.seed_set) config.master_seed = flags.seed;
    if (flags.trials_set) config.trials = flags.trials;
    if (flags.workers_set) config.workers = flags.workers;
    config.validate();
}

oamsim::EmitFormat parse_format(const std::string& format) {
    return format == "svg" ? oamsim::EmitFormat::kSvg : oamsim::EmitFormat::kCsv;
}

std::string default_out(const std::string& stem, const std::string& format) {
    return stem + "." + format;
}

int run_curve_command(const oamsim::ExperimentConfig& config, bool sweep, const CommonFlags& flags,
                      const std::string& default_stem) {
    const oamsim::FidelityCurve curve =
        sweep ? oamsim::sweep_l(config) : oamsim::run_experiment(config);
    const std::string path =
        flags.out_path.empty() ? default_out(default_stem, flags.format) : flags.out_path;
    oamsim::emit(curve, parse_format(flags.format), path);
    std::cout << curve.rows.size() << " rows written to " << path << "\n";
    return 0;
}

int run_compare_command(const oamsim::ExperimentConfig& config, const CommonFlags& flags) {
    const std::vector<oamsim::CompareRow> rows = oamsim::compare_analytic(config);
    std::size_t passed = 0, failed = 0, out_of_regime = 0;
    for (const oamsim::CompareRow& row : rows) {
        switch (row.status) {
            case oamsim::CompareStatus::kPass: ++passed; break;
            case oamsim::CompareStatus::kFail: ++failed; break;
            case oamsim::CompareStatus::kOutOfRegime: ++out_of_regime; break;
        }
    }
    if (!flags.out_path.empty()) {
        oamsim::write_text_file(flags.out_path, oamsim::render_compare_csv(rows));
        std::cout << rows.size() << " rows written to " << flags.out_path << "\n";
    }
    std::cout << "compare: " << passed << " pass, " << failed << " fail, " << out_of_regime
              << " out-of-regime\n";
    if (failed > 0) {
        std::cerr << "error: " << failed << " rows exceeded the 3-standard-error bound\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and analytic model of OAM-qubit dephasing in a segmented fiber"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    bool print_config = false;

    CommonFlags simulate_flags, sweep_flags, compare_flags, preset_flags;

    CLI::App* simulate = app.add_subcommand("simulate", "Fidelity vs distance");
    simulate->add_option("config", config_path, "Experiment config file")->required();
    add_common_flags(simulate, simulate_flags, true);

    CLI::App* sweep = app.add_subcommand("sweep-l", "End-of-fiber fidelity vs l");
    sweep->add_option("config", config_path, "Experiment config file")->required();
    add_common_flags(sweep, sweep_flags, true);

    CLI::App* compare = app.add_subcommand("compare", "Monte Carlo vs analytic model");
    compare->add_option("config", config_path, "Experiment config file")->required();
    add_common_flags(compare, compare_flags, false);

    CLI::App* preset = app.add_subcommand("preset", "Run a built-in figure preset");
    preset->add_option("name", preset_name, "One of fig1, fig2, fig3, fig4, fig5")->required();
    add_common_flags(preset, preset_flags, true);
    preset->add_flag("--print-config", print_config,
                     "Print the preset's config file to stdout and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            oamsim::ExperimentConfig config = oamsim::load_config_file(config_path);
            apply_overrides(config, simulate_flags);
            return run_curve_command(config, false, simulate_flags, "fidelity_curve");
        }
        if (sweep->parsed()) {
            oamsim::ExperimentConfig config = oamsim::load_config_file(config_path);
            apply_overrides(config, sweep_flags);
            return run_curve_command(config, true, sweep_flags, "fidelity_sweep");
        }
        if (compare->parsed()) {
            oamsim::ExperimentConfig config = oamsim::load_config_file(config_path);
            apply_overrides(config, compare_flags);
            return run_compare_command(config, compare_flags);
        }
        if (preset->parsed()) {
            oamsim::ExperimentConfig config = oamsim::preset_config(preset_name);
            apply_overrides(config, preset_flags);
            if (print_config) {
                std::cout << oamsim::render_config(config);
                return 0;
            }
            return run_curve_command(config, oamsim::preset_is_sweep(preset_name), preset_flags,
                                     preset_name);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
