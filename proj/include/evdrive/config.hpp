#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evdrive/drive_cycle.hpp"
#include "evdrive/errors.hpp"
#include "evdrive/hinf.hpp"
#include "evdrive/motor.hpp"
#include "evdrive/thermal.hpp"

namespace evdrive {

struct WeightConfig {
    double corner_rad_s;
    double low_gain;   // DC / low-frequency gain
    double high_gain;  // high-frequency gain
};

struct SynthesisConfig {
    double eps_control{0.1};
    double eps_noise{0.01};
    double gamma_lo{0.0};
    double gamma_hi{1e5};
    double gamma_rel_tol{1e-3};
};

struct SimConfig {
    double dt{1e-3};
    int log_decimation{10};
    double hysteresis_K{0.5};
    std::vector<double> edges_dT;
    std::vector<double> edges_ton;
    double cycles_per_day{2.0};
};

/// Full toolkit configuration. Every value in the JSON form carries a
/// `source` tag in {paper, calibrated, assumed} so paper-backed numbers
/// stay distinguishable from artifact choices.
struct ToolkitConfig {
    MotorParams motor{};
    VehicleParams vehicle{};
    ThermalParams thermal{};
    LossParams loss{};
    LifetimeParams lifetime{};
    WeightConfig W_e{};
    WeightConfig W_I_performance{};
    WeightConfig W_I_reliability{};
    SynthesisConfig synthesis{};
    SimConfig sim{};
    std::map<std::string, std::string> provenance;  // dotted field path -> source

    const WeightConfig& W_I(ControlMode m) const {
        return m == ControlMode::performance_oriented ? W_I_performance : W_I_reliability;
    }

    void validate() const {
        motor.validate();
        vehicle.validate();
        thermal.validate();
        loss.validate();
        lifetime.validate();
        if (!(synthesis.eps_control > 0 && synthesis.eps_noise > 0))
            throw ValidationError("synthesis epsilons must be positive");
        if (!(synthesis.gamma_hi > synthesis.gamma_lo && synthesis.gamma_lo >= 0))
            throw ValidationError("synthesis gamma range invalid");
        if (!(synthesis.gamma_rel_tol > 0 && synthesis.gamma_rel_tol < 1))
            throw ValidationError("synthesis gamma tolerance out of range");
        if (!(sim.dt > 0 && sim.dt <= 0.01)) throw ValidationError("sim dt must be in (0, 0.01]");
        if (sim.log_decimation < 1) throw ValidationError("sim log_decimation must be >= 1");
        if (sim.hysteresis_K < 0) throw ValidationError("sim hysteresis must be >= 0");
        if (sim.edges_dT.size() < 2 || sim.edges_ton.size() < 2)
            throw ValidationError("sim histogram edges need at least 2 entries per axis");
        if (!(sim.cycles_per_day > 0)) throw ValidationError("cycles_per_day must be positive");
    }
};

/// Paper-anchored lifetime targets: ~922k cycles at (40 K, 150 degC, 10 s)
/// and ~30k cycles at (80 K, 150 degC, 10 s).
inline std::pair<LifetimeAnchor, LifetimeAnchor> lifetime_anchors() {
    return {{40.0, 150.0, 10.0, 922e3}, {80.0, 150.0, 10.0, 30e3}};
}

inline ToolkitConfig default_config() {
    ToolkitConfig c;
    auto& prov = c.provenance;

    // J is the effective inertia at the motor shaft: rotor plus the vehicle
    // mass reflected through wheel radius and gear ratio, so the controller
    // shapes the acceleration current (the load torque alone would otherwise
    // dictate i_q and leave the two control modes indistinguishable)
    c.motor = {0.05, 5e-4, 5e-4, 0.1, 4, 1.37, 5e-3};
    for (const char* f : {"motor.R_s", "motor.L_d", "motor.L_q", "motor.Phi_F", "motor.p",
                          "motor.J", "motor.B_f"})
        prov[f] = "assumed";

    c.vehicle = {1500.0, 0.3, 10.0, 0.01, 0.75, 0.95};
    for (const char* f : {"vehicle.mass", "vehicle.wheel_radius", "vehicle.gear_ratio",
                          "vehicle.C_rr", "vehicle.rho_Cd_A", "vehicle.driveline_eff"})
        prov[f] = "assumed";

    c.thermal = {0.6, 5.0, 60.0};
    for (const char* f : {"thermal.R_theta", "thermal.C_theta", "thermal.T_ambient"})
        prov[f] = "assumed";

    c.loss = {0.9, 2.5e-3, 0.5};
    for (const char* f : {"loss.V_ce0", "loss.r_CE", "loss.duty"}) prov[f] = "assumed";

    LifetimeParams base{};
    base.A0 = 1.0;
    base.A1 = 1.0;
    base.alpha = -4.923;
    base.T0 = 40.0;
    base.lambda = 80.0;
    base.Ea = 0.06606;
    base.C_ton = 1.434;
    base.gamma_ton = -0.462;
    base.k_thick = 1.0;
    const auto [anchor_lo, anchor_hi] = lifetime_anchors();
    c.lifetime = calibrate_lifetime(base, anchor_lo, anchor_hi);
    prov["lifetime.A0"] = "calibrated";
    prov["lifetime.A1"] = "calibrated";
    for (const char* f : {"lifetime.alpha", "lifetime.T0", "lifetime.lambda", "lifetime.Ea",
                          "lifetime.C_ton", "lifetime.gamma_ton", "lifetime.k_thick"})
        prov[f] = "assumed";
    prov["lifetime.kB"] = "paper";

    c.W_e = {20.0, 2000.0, 0.5};
    c.W_I_performance = {1.0, 1e-3, 1e-3};
    // corner at the thermal response bandwidth 1/(R_theta C_theta)
    c.W_I_reliability = {1.0 / c.thermal.time_constant(), 40.0, 0.05};
    for (const char* f :
         {"weights.W_e.corner_rad_s", "weights.W_e.low_gain", "weights.W_e.high_gain",
          "weights.W_I.performance_oriented.corner_rad_s",
          "weights.W_I.performance_oriented.low_gain",
          "weights.W_I.performance_oriented.high_gain",
          "weights.W_I.reliability_aware.corner_rad_s",
          "weights.W_I.reliability_aware.low_gain",
          "weights.W_I.reliability_aware.high_gain"})
        prov[f] = "calibrated";

    c.synthesis = {};
    for (const char* f : {"synthesis.eps_control", "synthesis.eps_noise", "synthesis.gamma_lo",
                          "synthesis.gamma_hi", "synthesis.gamma_rel_tol"})
        prov[f] = "assumed";

    // the fastest plant mode is the electrical coupling at omega_e =
    // p * omega_m ~ 4.9e3 rad/s at WLTC top speed; 0.1 ms keeps the
    // per-step rotation well inside the RK4 accuracy range
    c.sim.dt = 1e-4;
    c.sim.log_decimation = 100;
    c.sim.hysteresis_K = 0.5;
    for (int i = 0; i <= 30; ++i) c.sim.edges_dT.push_back(2.0 * i);
    for (int i = 0; i <= 12; ++i) c.sim.edges_ton.push_back(std::pow(10.0, -1.0 + 0.25 * i));
    c.sim.cycles_per_day = 2.0;
    for (const char* f : {"simulation.dt", "simulation.log_decimation",
                          "simulation.hysteresis_K", "simulation.edges_dT",
                          "simulation.edges_ton"})
        prov[f] = "assumed";
    prov["simulation.cycles_per_day"] = "paper";

    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

namespace detail {

inline const std::set<std::string>& valid_sources() {
    static const std::set<std::string> s{"paper", "calibrated", "assumed"};
    return s;
}

inline nlohmann::json tagged(const ToolkitConfig& c, const std::string& path,
                             nlohmann::json value) {
    const auto it = c.provenance.find(path);
    const std::string source = it == c.provenance.end() ? "assumed" : it->second;
    return nlohmann::json{{"value", std::move(value)}, {"source", source}};
}

/// Strict reader for one JSON object level: every key must be consumed.
class StrictObject {
public:
    StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError("config: " + path_ + " must be an object");
    }

    const nlohmann::json& child(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) throw ValidationError("config: missing key " + join(key));
        return *it;
    }

    nlohmann::json leaf(const std::string& key, std::map<std::string, std::string>& prov) {
        const nlohmann::json& v = child(key);
        if (!v.is_object() || !v.contains("value") || !v.contains("source"))
            throw ValidationError("config: " + join(key) +
                                  " must be an object {value, source}");
        for (const auto& item : v.items())
            if (item.key() != "value" && item.key() != "source")
                throw ValidationError("config: unknown key " + join(key) + "." + item.key());
        const std::string src = v.at("source").get<std::string>();
        if (!valid_sources().count(src))
            throw ValidationError("config: " + join(key) + ".source must be one of "
                                  "paper|calibrated|assumed");
        prov[join(key)] = src;
        return v.at("value");
    }

    double number(const std::string& key, std::map<std::string, std::string>& prov) {
        const nlohmann::json v = leaf(key, prov);
        if (!v.is_number()) throw ValidationError("config: " + join(key) + " must be a number");
        return v.get<double>();
    }

    std::vector<double> number_array(const std::string& key,
                                     std::map<std::string, std::string>& prov) {
        const nlohmann::json v = leaf(key, prov);
        if (!v.is_array()) throw ValidationError("config: " + join(key) + " must be an array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number())
                throw ValidationError("config: " + join(key) + " must contain numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ValidationError("config: unknown key " + join(item.key()));
    }

private:
    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

inline nlohmann::json config_to_json(const ToolkitConfig& c) {
    using nlohmann::json;
    auto t = [&c](const std::string& p, json v) { return detail::tagged(c, p, std::move(v)); };
    json j;
    j["schema"] = "evdrive.config/1";
    j["motor"] = {{"R_s", t("motor.R_s", c.motor.R_s)},
                  {"L_d", t("motor.L_d", c.motor.L_d)},
                  {"L_q", t("motor.L_q", c.motor.L_q)},
                  {"Phi_F", t("motor.Phi_F", c.motor.Phi_F)},
                  {"p", t("motor.p", c.motor.p)},
                  {"J", t("motor.J", c.motor.J)},
                  {"B_f", t("motor.B_f", c.motor.B_f)}};
    j["vehicle"] = {{"mass", t("vehicle.mass", c.vehicle.mass)},
                    {"wheel_radius", t("vehicle.wheel_radius", c.vehicle.wheel_radius)},
                    {"gear_ratio", t("vehicle.gear_ratio", c.vehicle.gear_ratio)},
                    {"C_rr", t("vehicle.C_rr", c.vehicle.C_rr)},
                    {"rho_Cd_A", t("vehicle.rho_Cd_A", c.vehicle.rho_Cd_A)},
                    {"driveline_eff", t("vehicle.driveline_eff", c.vehicle.driveline_eff)}};
    j["thermal"] = {{"R_theta", t("thermal.R_theta", c.thermal.R_theta)},
                    {"C_theta", t("thermal.C_theta", c.thermal.C_theta)},
                    {"T_ambient", t("thermal.T_ambient", c.thermal.T_ambient)}};
    j["loss"] = {{"V_ce0", t("loss.V_ce0", c.loss.V_ce0)},
                 {"r_CE", t("loss.r_CE", c.loss.r_CE)},
                 {"duty", t("loss.duty", c.loss.duty)}};
    j["lifetime"] = {{"A0", t("lifetime.A0", c.lifetime.A0)},
                     {"A1", t("lifetime.A1", c.lifetime.A1)},
                     {"alpha", t("lifetime.alpha", c.lifetime.alpha)},
                     {"T0", t("lifetime.T0", c.lifetime.T0)},
                     {"lambda", t("lifetime.lambda", c.lifetime.lambda)},
                     {"Ea", t("lifetime.Ea", c.lifetime.Ea)},
                     {"kB", t("lifetime.kB", c.lifetime.kB)},
                     {"C_ton", t("lifetime.C_ton", c.lifetime.C_ton)},
                     {"gamma_ton", t("lifetime.gamma_ton", c.lifetime.gamma_ton)},
                     {"k_thick", t("lifetime.k_thick", c.lifetime.k_thick)}};
    auto weight = [&](const char* base, const WeightConfig& w) {
        const std::string b(base);
        return json{{"corner_rad_s", t(b + ".corner_rad_s", w.corner_rad_s)},
                    {"low_gain", t(b + ".low_gain", w.low_gain)},
                    {"high_gain", t(b + ".high_gain", w.high_gain)}};
    };
    j["weights"] = {
        {"W_e", weight("weights.W_e", c.W_e)},
        {"W_I",
         {{"performance_oriented",
           weight("weights.W_I.performance_oriented", c.W_I_performance)},
          {"reliability_aware", weight("weights.W_I.reliability_aware", c.W_I_reliability)}}}};
    j["synthesis"] = {
        {"eps_control", t("synthesis.eps_control", c.synthesis.eps_control)},
        {"eps_noise", t("synthesis.eps_noise", c.synthesis.eps_noise)},
        {"gamma_lo", t("synthesis.gamma_lo", c.synthesis.gamma_lo)},
        {"gamma_hi", t("synthesis.gamma_hi", c.synthesis.gamma_hi)},
        {"gamma_rel_tol", t("synthesis.gamma_rel_tol", c.synthesis.gamma_rel_tol)}};
    j["simulation"] = {{"dt", t("simulation.dt", c.sim.dt)},
                       {"log_decimation", t("simulation.log_decimation", c.sim.log_decimation)},
                       {"hysteresis_K", t("simulation.hysteresis_K", c.sim.hysteresis_K)},
                       {"edges_dT", t("simulation.edges_dT", c.sim.edges_dT)},
                       {"edges_ton", t("simulation.edges_ton", c.sim.edges_ton)},
                       {"cycles_per_day", t("simulation.cycles_per_day", c.sim.cycles_per_day)}};
    return j;
}

inline ToolkitConfig config_from_json(const nlohmann::json& j) {
    ToolkitConfig c;
    auto& prov = c.provenance;
    detail::StrictObject root(j, "");
    const auto& schema = root.child("schema");
    if (!schema.is_string() || schema.get<std::string>() != "evdrive.config/1")
        throw ValidationError("config: unsupported schema (expected evdrive.config/1)");

    detail::StrictObject motor(root.child("motor"), "motor");
    c.motor.R_s = motor.number("R_s", prov);
    c.motor.L_d = motor.number("L_d", prov);
    c.motor.L_q = motor.number("L_q", prov);
    c.motor.Phi_F = motor.number("Phi_F", prov);
    const double p = motor.number("p", prov);
    if (p != std::floor(p)) throw ValidationError("config: motor.p must be an integer");
    c.motor.p = static_cast<int>(p);
    c.motor.J = motor.number("J", prov);
    c.motor.B_f = motor.number("B_f", prov);
    motor.finish();

    detail::StrictObject veh(root.child("vehicle"), "vehicle");
    c.vehicle.mass = veh.number("mass", prov);
    c.vehicle.wheel_radius = veh.number("wheel_radius", prov);
    c.vehicle.gear_ratio = veh.number("gear_ratio", prov);
    c.vehicle.C_rr = veh.number("C_rr", prov);
    c.vehicle.rho_Cd_A = veh.number("rho_Cd_A", prov);
    c.vehicle.driveline_eff = veh.number("driveline_eff", prov);
    veh.finish();

    detail::StrictObject th(root.child("thermal"), "thermal");
    c.thermal.R_theta = th.number("R_theta", prov);
    c.thermal.C_theta = th.number("C_theta", prov);
    c.thermal.T_ambient = th.number("T_ambient", prov);
    th.finish();

    detail::StrictObject lo(root.child("loss"), "loss");
    c.loss.V_ce0 = lo.number("V_ce0", prov);
    c.loss.r_CE = lo.number("r_CE", prov);
    c.loss.duty = lo.number("duty", prov);
    lo.finish();

    detail::StrictObject lt(root.child("lifetime"), "lifetime");
    c.lifetime.A0 = lt.number("A0", prov);
    c.lifetime.A1 = lt.number("A1", prov);
    c.lifetime.alpha = lt.number("alpha", prov);
    c.lifetime.T0 = lt.number("T0", prov);
    c.lifetime.lambda = lt.number("lambda", prov);
    c.lifetime.Ea = lt.number("Ea", prov);
    c.lifetime.kB = lt.number("kB", prov);
    c.lifetime.C_ton = lt.number("C_ton", prov);
    c.lifetime.gamma_ton = lt.number("gamma_ton", prov);
    c.lifetime.k_thick = lt.number("k_thick", prov);
    lt.finish();

    detail::StrictObject weights(root.child("weights"), "weights");
    auto read_weight = [&prov](const nlohmann::json& wj, const std::string& path) {
        detail::StrictObject w(wj, path);
        WeightConfig out{};
        out.corner_rad_s = w.number("corner_rad_s", prov);
        out.low_gain = w.number("low_gain", prov);
        out.high_gain = w.number("high_gain", prov);
        w.finish();
        return out;
    };
    c.W_e = read_weight(weights.child("W_e"), "weights.W_e");
    detail::StrictObject wi(weights.child("W_I"), "weights.W_I");
    c.W_I_performance =
        read_weight(wi.child("performance_oriented"), "weights.W_I.performance_oriented");
    c.W_I_reliability =
        read_weight(wi.child("reliability_aware"), "weights.W_I.reliability_aware");
    wi.finish();
    weights.finish();

    detail::StrictObject sy(root.child("synthesis"), "synthesis");
    c.synthesis.eps_control = sy.number("eps_control", prov);
    c.synthesis.eps_noise = sy.number("eps_noise", prov);
    c.synthesis.gamma_lo = sy.number("gamma_lo", prov);
    c.synthesis.gamma_hi = sy.number("gamma_hi", prov);
    c.synthesis.gamma_rel_tol = sy.number("gamma_rel_tol", prov);
    sy.finish();

    detail::StrictObject si(root.child("simulation"), "simulation");
    c.sim.dt = si.number("dt", prov);
    const double dec = si.number("log_decimation", prov);
    if (dec != std::floor(dec) || dec < 1)
        throw ValidationError("config: simulation.log_decimation must be a positive integer");
    c.sim.log_decimation = static_cast<int>(dec);
    c.sim.hysteresis_K = si.number("hysteresis_K", prov);
    c.sim.edges_dT = si.number_array("edges_dT", prov);
    c.sim.edges_ton = si.number_array("edges_ton", prov);
    c.sim.cycles_per_day = si.number("cycles_per_day", prov);
    si.finish();

    root.finish();
    c.validate();
    return c;
}

/// Load a config file; falls back to the EVDRIVE_CONFIG environment variable
/// and finally to the built-in defaults when no path is given.
inline ToolkitConfig load_config(const std::string& path = "") {
    std::string p = path;
    if (p.empty()) {
        if (const char* env = std::getenv("EVDRIVE_CONFIG")) p = env;
    }
    if (p.empty()) return default_config();
    std::ifstream in(p);
    if (!in) throw IoError("cannot open config file: " + p);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config: JSON parse failure in " + p + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace evdrive
