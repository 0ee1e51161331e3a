#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "evdrive/config.hpp"
#include "evdrive/controller_io.hpp"
#include "evdrive/pipeline.hpp"
#include "evdrive/sim.hpp"

namespace evdrive {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
}

inline nlohmann::json damage_report_to_json(const DamageReport& rep, double cycles_per_day,
                                            const std::string& histogram_csv) {
    nlohmann::json j;
    j["schema"] = "evdrive.damage/1";
    j["damage_per_drive_cycle"] = rep.damage;
    // infinite projections (zero damage) serialize as null
    j["drive_cycles_to_failure"] =
        std::isfinite(rep.drive_cycles_to_failure)
            ? nlohmann::json(rep.drive_cycles_to_failure)
            : nlohmann::json(nullptr);
    j["years_at_daily_usage"] =
        std::isfinite(rep.years) ? nlohmann::json(rep.years) : nlohmann::json(nullptr);
    j["cycles_per_day"] = cycles_per_day;
    j["total_rainflow_cycle_count"] = rep.total_cycle_count;
    j["histogram_csv"] = histogram_csv;
    return j;
}

inline std::string histogram_path_for(const std::string& report_path) {
    std::filesystem::path p(report_path);
    p.replace_extension();
    return p.string() + "_histogram.csv";
}

}  // namespace detail

/// synthesize --mode M --config F --out F
inline void cmd_synthesize(const ToolkitConfig& cfg, ControlMode mode,
                           const std::string& out_path, std::ostream& msg) {
    ControllerRealization k = synthesize_mode(cfg, mode);
    const double norm = hinf_norm(close_loop(design_plant(cfg, mode), k.continuous_sys), 1e-6);
    save_controller(out_path, k);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "mode=%s gamma_achieved=%.6g closed_loop_norm=%.6g order=%d\n",
                  to_string(mode).c_str(), k.gamma_achieved, norm, k.continuous_sys.order());
    msg << buf << "controller written to " << out_path << "\n";
}

/// simulate --controller F --cycle F --config F --out F
inline void cmd_simulate(const ToolkitConfig& cfg, const std::string& controller_path,
                         const std::string& cycle_path, const std::string& out_path,
                         std::ostream& msg) {
    ControllerRealization k = load_controller(controller_path);
    DriveCycle cycle = load_drive_cycle(cycle_path);
    Scenario sc = make_scenario(cfg, cycle, std::move(k));
    SimulationLog log = run_closed_loop(sc);
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write log file: " + out_path);
        write_log_csv(out, log);
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "rmse_kmh=%.6g energy_loss_J=%.6g peak_T_j=%.6g rows=%zu\n",
                  tracking_rmse_kmh(log, cfg.vehicle), log.energy_loss_J, log.peak_T_j,
                  log.rows());
    msg << buf << "log written to " << out_path << "\n";
}

/// analyze --log F --config F --out F  (writes the report JSON and a
/// plot-ready histogram CSV next to it)
inline void cmd_analyze(const ToolkitConfig& cfg, const std::string& log_path,
                        const std::string& out_path, std::ostream& msg) {
    SimulationLog log = read_log_csv(log_path);
    DamageReport rep = analyze(log, analysis_config_from(cfg), cfg.lifetime);
    const std::string hist_path = detail::histogram_path_for(out_path);
    {
        std::ofstream out(hist_path, std::ios::binary);
        if (!out) throw IoError("cannot write histogram file: " + hist_path);
        write_histogram_csv(out, rep.histogram);
    }
    detail::write_text_file(
        out_path,
        detail::damage_report_to_json(rep, cfg.sim.cycles_per_day, hist_path).dump(2) + "\n");
    char buf[256];
    std::snprintf(buf, sizeof buf, "damage=%.6g drive_cycles=%.6g years=%.6g cycles=%.6g\n",
                  rep.damage, rep.drive_cycles_to_failure, rep.years, rep.total_cycle_count);
    msg << buf << "report written to " << out_path << "\n";
}

struct ModeOutcome {
    ControlMode mode;
    double gamma{0.0};
    double rmse_kmh{0.0};
    double energy_loss_J{0.0};
    double peak_T_j{0.0};
    double damage{0.0};
    double years{0.0};
};

/// compare --cycle F --config F --out-dir D: full pipeline for both control
/// modes plus a side-by-side table and the relative damage reduction.
inline void cmd_compare(const ToolkitConfig& cfg, const std::string& cycle_path,
                        const std::string& out_dir, std::ostream& msg) {
    DriveCycle cycle = load_drive_cycle(cycle_path);
    std::filesystem::create_directories(out_dir);

    ModeOutcome outcomes[2];
    const ControlMode modes[2] = {ControlMode::performance_oriented,
                                  ControlMode::reliability_aware};
    for (int i = 0; i < 2; ++i) {
        const ControlMode mode = modes[i];
        const std::string base = out_dir + "/" + to_string(mode);
        ControllerRealization k = synthesize_mode(cfg, mode);
        save_controller(base + "_controller.json", k);
        SimulationLog log = run_closed_loop(make_scenario(cfg, cycle, k));
        {
            std::ofstream out(base + "_log.csv", std::ios::binary);
            if (!out) throw IoError("cannot write log file: " + base + "_log.csv");
            write_log_csv(out, log);
        }
        DamageReport rep = analyze(log, analysis_config_from(cfg), cfg.lifetime);
        {
            std::ofstream out(base + "_histogram.csv", std::ios::binary);
            if (!out) throw IoError("cannot write histogram: " + base + "_histogram.csv");
            write_histogram_csv(out, rep.histogram);
        }
        detail::write_text_file(base + "_damage.json",
                                detail::damage_report_to_json(rep, cfg.sim.cycles_per_day,
                                                              base + "_histogram.csv")
                                        .dump(2) +
                                    "\n");
        outcomes[i] = {mode,
                       k.gamma_achieved,
                       tracking_rmse_kmh(log, cfg.vehicle),
                       log.energy_loss_J,
                       log.peak_T_j,
                       rep.damage,
                       rep.years};
    }

    const double reduction =
        outcomes[0].damage > 0.0
            ? 100.0 * (outcomes[0].damage - outcomes[1].damage) / outcomes[0].damage
            : 0.0;

    nlohmann::json cj;
    cj["schema"] = "evdrive.comparison/1";
    cj["cycle"] = cycle.name;
    for (int i = 0; i < 2; ++i) {
        nlohmann::json m;
        m["gamma_achieved"] = outcomes[i].gamma;
        m["rmse_kmh"] = outcomes[i].rmse_kmh;
        m["energy_loss_J"] = outcomes[i].energy_loss_J;
        m["peak_T_j"] = outcomes[i].peak_T_j;
        m["damage_per_drive_cycle"] = outcomes[i].damage;
        m["years_at_daily_usage"] = outcomes[i].years;
        cj["modes"][to_string(outcomes[i].mode)] = std::move(m);
    }
    cj["damage_reduction_percent"] = reduction;
    detail::write_text_file(out_dir + "/comparison.json", cj.dump(2) + "\n");

    char buf[512];
    msg << "mode                  rmse_kmh   energy_J    damage      years\n";
    for (const auto& o : outcomes) {
        std::snprintf(buf, sizeof buf, "%-21s %-10.4g %-11.6g %-11.4g %-10.4g\n",
                      to_string(o.mode).c_str(), o.rmse_kmh, o.energy_loss_J, o.damage,
                      o.years);
        msg << buf;
    }
    std::snprintf(buf, sizeof buf, "damage reduction: %.1f%%\n", reduction);
    msg << buf << "comparison written to " << out_dir << "/comparison.json\n";
}

}  // namespace evdrive
