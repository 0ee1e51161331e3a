#pragma once

#include <string>

#include "evdrive/config.hpp"
#include "evdrive/controller_io.hpp"
#include "evdrive/drive_cycle.hpp"
#include "evdrive/hinf.hpp"
#include "evdrive/motor.hpp"
#include "evdrive/sim.hpp"

namespace evdrive {

inline TransferWeight tracking_weight_from(const ToolkitConfig& cfg) {
    return make_tracking_weight(cfg.W_e.corner_rad_s, cfg.W_e.low_gain, cfg.W_e.high_gain);
}

inline TransferWeight current_weight_from(const ToolkitConfig& cfg, ControlMode mode) {
    const WeightConfig& w = cfg.W_I(mode);
    return make_current_weight(w.corner_rad_s, w.low_gain, w.high_gain);
}

inline GeneralizedPlant design_plant(const ToolkitConfig& cfg, ControlMode mode) {
    return build_generalized_plant(linearize(cfg.motor), tracking_weight_from(cfg),
                                   current_weight_from(cfg, mode),
                                   {cfg.synthesis.eps_control, cfg.synthesis.eps_noise});
}

/// Weights -> plant -> gamma iteration -> Tustin discretization at the
/// simulation step. The two modes differ only in the current weight.
inline ControllerRealization synthesize_mode(const ToolkitConfig& cfg, ControlMode mode) {
    cfg.validate();
    GeneralizedPlant plant = design_plant(cfg, mode);
    ControllerRealization k = synthesize(plant, cfg.synthesis.gamma_lo, cfg.synthesis.gamma_hi,
                                         cfg.synthesis.gamma_rel_tol);
    k.mode_tag = mode;
    k.continuous_sys.input_labels = {"e_track", "i_d", "i_q"};
    k.continuous_sys.output_labels = {"u_aux_d", "u_aux_q"};
    k.discrete_sys = discretize(k.continuous_sys, cfg.sim.dt);
    return k;
}

inline Scenario make_scenario(const ToolkitConfig& cfg, const DriveCycle& cycle,
                              ControllerRealization controller) {
    Scenario sc;
    sc.motor = cfg.motor;
    sc.vehicle = cfg.vehicle;
    sc.cycle = cycle;
    sc.controller = std::move(controller);
    sc.thermal = cfg.thermal;
    sc.loss = cfg.loss;
    sc.dt = cfg.sim.dt;
    sc.log_decimation = cfg.sim.log_decimation;
    return sc;
}

inline AnalysisConfig analysis_config_from(const ToolkitConfig& cfg) {
    return {cfg.sim.hysteresis_K, cfg.sim.edges_dT, cfg.sim.edges_ton, cfg.sim.cycles_per_day};
}

}  // namespace evdrive
