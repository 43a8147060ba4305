#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pnsim/config.hpp"
#include "pnsim/experiment.hpp"
#include "pnsim/network_model.hpp"
#include "pnsim/rng.hpp"
#include "pnsim/validation.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kValidation = 2, kNumerical = 3 };

struct RunFlags {
    std::string out;
    long long seed = -1;
    bool deterministic = false;
    int threads = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--out", f.out, "CSV output path (default: stdout, or the config's output key)");
    cmd->add_option("--seed", f.seed, "Master seed, overrides the configuration")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--deterministic", f.deterministic, "Single-threaded execution with a fixed merge order");
    cmd->add_option("--threads", f.threads, "Worker threads (default: hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
}

int execute(pnsim::ExperimentConfig cfg, const RunFlags& f) {
    if (f.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(f.seed);
    if (!f.out.empty()) cfg.output = f.out;
    cfg.validate();

    std::cerr << "# effective configuration\n";
    pnsim::echo_config(std::cerr, cfg);
    if (!cfg.output.empty()) {
        std::ofstream side(cfg.output + ".config.txt");
        pnsim::echo_config(side, cfg);
    }

    pnsim::RunOptions opts;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    opts.threads = f.deterministic ? 1 : (f.threads > 0 ? f.threads : static_cast<int>(hw));
    opts.progress = &std::cerr;
    const pnsim::ExperimentResult result = pnsim::run_experiment(cfg, opts);

    if (cfg.output.empty()) {
        pnsim::write_csv(std::cout, result.records);
    } else {
        std::ofstream os(cfg.output);
        if (!os) throw pnsim::ConfigError("cannot write '" + cfg.output + "'");
        pnsim::write_csv(os, result.records);
    }
    std::cerr << "invalid SINR values: " << result.invalid_sinr << " of " << result.sinr_evaluations
              << "; pseudo-inverse fallbacks: " << result.pseudo_inverse_fallbacks << '\n';
    if (result.invalid_fraction() > cfg.max_invalid_fraction) {
        std::cerr << "error: invalid SINR fraction " << result.invalid_fraction() << " exceeds "
                  << cfg.max_invalid_fraction << '\n';
        return kNumerical;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cell-free OFDM uplink simulator with oscillator phase noise"};
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string run_config;
    auto* run = app.add_subcommand("run", "Run the experiment described by a configuration file");
    run->add_option("config", run_config, "Configuration file")->required();
    add_run_flags(run, run_flags);

    RunFlags fig_flags;
    std::vector<std::string> overrides;
    auto* fig2 = app.add_subcommand("fig2", "SE per UE versus channel use, full-scale preset");
    auto* fig3 = app.add_subcommand("fig3", "SE per UE versus number of UEs at channel use 60");
    for (auto* cmd : {fig2, fig3}) {
        cmd->add_option("overrides", overrides, "key=value overrides");
        add_run_flags(cmd, fig_flags);
    }

    pnsim::ValidationOptions vopts;
    auto* validate = app.add_subcommand("validate", "Run the model self-checks at small size");
    validate->add_option("--n", vopts.num_subcarriers, "Subcarriers of the test grid")->check(CLI::Range(8, 4096));
    validate->add_flag("--inject-stride-fault", vopts.inject_stride_fault,
                       "Run the fast kernel with its symbol stride off by one");

    std::string geo_config;
    std::string geo_out;
    int geo_index = 0;
    auto* dump = app.add_subcommand("dump-geometry", "Write AP and UE positions of one geometry as CSV");
    dump->add_option("config", geo_config, "Configuration file")->required();
    dump->add_option("--geometry", geo_index, "Geometry index")->check(CLI::NonNegativeNumber);
    dump->add_option("--out", geo_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return execute(pnsim::load_config(run_config), run_flags);
        if (*fig2 || *fig3) {
            pnsim::ExperimentConfig cfg = *fig2 ? pnsim::preset_fig2() : pnsim::preset_fig3();
            for (const auto& o : overrides) pnsim::apply_override(cfg, o);
            return execute(cfg, fig_flags);
        }
        if (*validate) {
            const auto checks = pnsim::run_validation(vopts);
            return pnsim::print_report(std::cout, checks) ? kOk : kValidation;
        }
        if (*dump) {
            const pnsim::ExperimentConfig cfg = pnsim::load_config(geo_config);
            cfg.validate();
            const auto net = pnsim::make_network(cfg.layout, cfg.prop, cfg.pilot_policy,
                                                 pnsim::derive_seed(cfg.master_seed, geo_index, 0, "geometry"));
            if (geo_out.empty()) {
                pnsim::write_geometry_csv(std::cout, net.positions);
            } else {
                std::ofstream os(geo_out);
                pnsim::write_geometry_csv(os, net.positions);
            }
            return kOk;
        }
    } catch (const pnsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const pnsim::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
