// Reliability-aware EV drivetrain control toolkit: synthesize controllers,
// run WLTC-style closed-loop simulations, and project IGBT lifetime.

#include <CLI11.hpp>
#include <iostream>

#include "evdrive/cli.hpp"

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"EV drivetrain reliability control toolkit"};
    app.require_subcommand(1);

    std::string config_path;

    auto* synth = app.add_subcommand("synthesize", "Synthesize a controller for one mode");
    std::string mode_str, synth_out;
    synth->add_option("--mode", mode_str, "performance_oriented | reliability_aware")
        ->required();
    synth->add_option("--config", config_path, "toolkit config JSON");
    synth->add_option("--out", synth_out, "output controller JSON")->required();

    auto* sim = app.add_subcommand("simulate", "Run one closed-loop drive-cycle simulation");
    std::string sim_controller, sim_cycle, sim_out;
    sim->add_option("--controller", sim_controller, "controller JSON")->required();
    sim->add_option("--cycle", sim_cycle, "drive cycle CSV (t_s,v_kmh)")->required();
    sim->add_option("--config", config_path, "toolkit config JSON");
    sim->add_option("--out", sim_out, "output log CSV")->required();

    auto* ana = app.add_subcommand("analyze", "Rainflow + Miner damage report from a log");
    std::string ana_log, ana_out;
    ana->add_option("--log", ana_log, "simulation log CSV")->required();
    ana->add_option("--config", config_path, "toolkit config JSON");
    ana->add_option("--out", ana_out, "output damage report JSON")->required();

    auto* cmp = app.add_subcommand("compare", "Run both control modes and compare");
    std::string cmp_cycle, cmp_dir;
    cmp->add_option("--cycle", cmp_cycle, "drive cycle CSV (t_s,v_kmh)")->required();
    cmp->add_option("--config", config_path, "toolkit config JSON");
    cmp->add_option("--out-dir", cmp_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const evdrive::ToolkitConfig cfg = evdrive::load_config(config_path);
    if (synth->parsed()) {
        evdrive::cmd_synthesize(cfg, evdrive::mode_from_string(mode_str), synth_out, std::cout);
    } else if (sim->parsed()) {
        evdrive::cmd_simulate(cfg, sim_controller, sim_cycle, sim_out, std::cout);
    } else if (ana->parsed()) {
        evdrive::cmd_analyze(cfg, ana_log, ana_out, std::cout);
    } else if (cmp->parsed()) {
        evdrive::cmd_compare(cfg, cmp_cycle, cmp_dir, std::cout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const evdrive::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const evdrive::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const evdrive::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
