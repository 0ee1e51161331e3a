#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "evdrive/drive_cycle.hpp"
#include "evdrive/errors.hpp"
#include "evdrive/hinf.hpp"
#include "evdrive/motor.hpp"
#include "evdrive/rainflow.hpp"
#include "evdrive/thermal.hpp"

namespace evdrive {

/// Everything one closed-loop run needs.
struct Scenario {
    MotorParams motor;
    VehicleParams vehicle;
    DriveCycle cycle;
    ControllerRealization controller;
    ThermalParams thermal;
    LossParams loss;
    double dt{1e-3};
    int log_decimation{10};

    void validate() const {
        motor.validate();
        vehicle.validate();
        cycle.validate();
        thermal.validate();
        loss.validate();
        if (!(dt > 0.0 && dt <= 0.01))
            throw ValidationError("scenario dt must be in (0, 0.01] s");
        if (log_decimation < 1) throw ValidationError("log_decimation must be >= 1");
        if (controller.discrete_sys.order() == 0 && controller.discrete_sys.A.size() == 0 &&
            controller.discrete_sys.B.size() == 0)
            throw ValidationError("scenario controller has no discrete realization");
        controller.discrete_sys.validate();
        if (controller.discrete_sys.domain != TimeDomain::discrete)
            throw ValidationError("scenario controller must be discrete-time");
        if (std::abs(controller.discrete_sys.dt - dt) > 1e-12 * dt)
            throw ValidationError("controller sample time does not match scenario dt");
        if (controller.discrete_sys.inputs() != 3 || controller.discrete_sys.outputs() != 2)
            throw ValidationError("controller must map [e, i_d, i_q] to [u_d, u_q]");
        if (!motor.surface_mount())
            throw ValidationError("simulation requires a surface-mount motor");
    }
};

/// Decimated time record of one run plus whole-run scalar summaries
/// (accumulated at every step regardless of decimation).
struct SimulationLog {
    double dt_log{0.0};
    std::vector<double> t, omega_ref, omega_m, i_d, i_q, u_d, u_q, tau_l, P_loss, T_j;

    double energy_loss_J{0.0};
    double peak_T_j{0.0};
    double rmse_omega{0.0};  // tracking error RMSE over all steps (rad/s)

    size_t rows() const { return t.size(); }
    void validate() const {
        const size_t n = t.size();
        for (const auto* col : {&omega_ref, &omega_m, &i_d, &i_q, &u_d, &u_q, &tau_l, &P_loss,
                                &T_j})
            if (col->size() != n) throw ValidationError("simulation log column length mismatch");
        if (!(dt_log > 0.0)) throw ValidationError("simulation log dt missing");
    }
};

namespace detail {
inline MotorState rk4_motor_step(const MotorState& s, const VoltagePair& v_stator, double tau_l,
                                 const MotorParams& mp, double dt) {
    auto add = [](const MotorState& a, const MotorState& b, double h) {
        return MotorState{a.i_d + h * b.i_d, a.i_q + h * b.i_q, a.omega_m + h * b.omega_m};
    };
    const MotorState k1 = nonlinear_state_derivative(s, v_stator, tau_l, mp);
    const MotorState k2 = nonlinear_state_derivative(add(s, k1, dt / 2), v_stator, tau_l, mp);
    const MotorState k3 = nonlinear_state_derivative(add(s, k2, dt / 2), v_stator, tau_l, mp);
    const MotorState k4 = nonlinear_state_derivative(add(s, k3, dt), v_stator, tau_l, mp);
    MotorState out = s;
    out.i_d += dt / 6.0 * (k1.i_d + 2 * k2.i_d + 2 * k3.i_d + k4.i_d);
    out.i_q += dt / 6.0 * (k1.i_q + 2 * k2.i_q + 2 * k3.i_q + k4.i_q);
    out.omega_m += dt / 6.0 * (k1.omega_m + 2 * k2.omega_m + 2 * k3.omega_m + k4.omega_m);
    return out;
}
}  // namespace detail

/// Fixed-step closed-loop simulation: discrete controller -> decoupling ->
/// RK4 on the bilinear motor -> conduction loss -> exact thermal step.
inline SimulationLog run_closed_loop(const Scenario& sc) {
    sc.validate();
    const auto& K = sc.controller.discrete_sys;
    const double dt = sc.dt;
    const long n_steps = std::lround(sc.cycle.duration() / dt);

    MotorState x{};
    Eigen::VectorXd xK = Eigen::VectorXd::Zero(K.order());
    double Tj = sc.thermal.T_ambient;

    SimulationLog log;
    log.dt_log = dt * sc.log_decimation;
    const size_t reserve = static_cast<size_t>(n_steps / sc.log_decimation) + 2;
    for (auto* col : {&log.t, &log.omega_ref, &log.omega_m, &log.i_d, &log.i_q, &log.u_d,
                      &log.u_q, &log.tau_l, &log.P_loss, &log.T_j})
        col->reserve(reserve);

    double sum_sq_err = 0.0;
    log.peak_T_j = Tj;

    for (long k = 0; k <= n_steps; ++k) {
        const double t = k * dt;
        const double w_ref = motor_speed_reference(sc.cycle, sc.vehicle, std::min(t, sc.cycle.duration()));
        const double tau_l = load_torque(sc.cycle, sc.vehicle, std::min(t, sc.cycle.duration()));

        if (!std::isfinite(x.i_d) || !std::isfinite(x.i_q) || !std::isfinite(x.omega_m) ||
            !std::isfinite(Tj))
            throw NumericalError("simulation diverged at step " + std::to_string(k) + " (t=" +
                                 std::to_string(t) + " s)");

        const double err = w_ref - x.omega_m;
        Eigen::Vector3d y(err, x.i_d, x.i_q);
        const Eigen::Vector2d u_aux = K.C * xK + K.D * y;
        const VoltagePair v_st =
            stator_from_auxiliary({u_aux(0), u_aux(1), VoltageFrame::auxiliary}, x, sc.motor);
        const double P = conduction_loss(on_state_current(x), sc.loss);

        if (k % sc.log_decimation == 0) {
            log.t.push_back(t);
            log.omega_ref.push_back(w_ref);
            log.omega_m.push_back(x.omega_m);
            log.i_d.push_back(x.i_d);
            log.i_q.push_back(x.i_q);
            log.u_d.push_back(v_st.v_d);
            log.u_q.push_back(v_st.v_q);
            log.tau_l.push_back(tau_l);
            log.P_loss.push_back(P);
            log.T_j.push_back(Tj);
        }
        sum_sq_err += err * err;
        log.peak_T_j = std::max(log.peak_T_j, Tj);
        if (k == n_steps) break;

        log.energy_loss_J += P * dt;
        x = detail::rk4_motor_step(x, v_st, tau_l, sc.motor, dt);
        xK = (K.A * xK + K.B * y).eval();
        Tj = step_junction_temperature(Tj, P, dt, sc.thermal);
    }
    log.rmse_omega = std::sqrt(sum_sq_err / static_cast<double>(n_steps + 1));
    return log;
}

/// Tracking RMSE converted to vehicle speed in km/h.
inline double tracking_rmse_kmh(const SimulationLog& log, const VehicleParams& vp) {
    log.validate();
    if (log.rows() == 0) throw ValidationError("tracking_rmse: empty log");
    double s = 0.0;
    for (size_t i = 0; i < log.rows(); ++i) {
        const double e = log.omega_ref[i] - log.omega_m[i];
        s += e * e;
    }
    const double rmse_rad = std::sqrt(s / static_cast<double>(log.rows()));
    return rmse_rad * vp.wheel_radius / vp.gear_ratio * 3.6;
}

/// Rainflow + Miner settings for the analysis stage.
struct AnalysisConfig {
    double hysteresis_K{0.5};
    std::vector<double> edges_dT;
    std::vector<double> edges_ton;
    double cycles_per_day{2.0};
};

struct DamageReport {
    CycleHistogram histogram;
    double damage{0.0};
    double drive_cycles_to_failure{0.0};
    double years{0.0};
    double total_cycle_count{0.0};
};

/// Junction-temperature fatigue pipeline: turning points -> rainflow ->
/// histogram -> Miner damage -> lifetime projection.
inline DamageReport analyze(const SimulationLog& log, const AnalysisConfig& cfg,
                            const LifetimeParams& lp) {
    log.validate();
    const auto tps = extract_turning_points(log.t, log.T_j, cfg.hysteresis_K);
    const auto cycles = rainflow_count(tps);
    DamageReport rep;
    rep.histogram = bin_cycles(cycles, cfg.edges_dT, cfg.edges_ton);
    std::vector<ThermalCycleBin> bins;
    bins.reserve(cycles.size());
    for (const auto& c : cycles) {
        bins.push_back({c.range, c.mean, c.duration(), c.count});
        rep.total_cycle_count += c.count;
    }
    rep.damage = miner_damage(bins, lp);
    const auto proj = lifetime_projection(rep.damage, cfg.cycles_per_day);
    rep.drive_cycles_to_failure = proj.drive_cycles;
    rep.years = proj.years;
    return rep;
}

// ---------------------------------------------------------------------------
// Log persistence: CSV and a compact binary format, both schema-versioned.
// ---------------------------------------------------------------------------

inline void write_log_csv(std::ostream& os, const SimulationLog& log) {
    log.validate();
    os << "# schema: evdrive.simlog/1\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "# dt_log=%.17g energy_loss_J=%.17g rmse_omega=%.17g\n",
                  log.dt_log, log.energy_loss_J, log.rmse_omega);
    os << buf;
    os << "t,omega_ref,omega_m,i_d,i_q,u_d,u_q,tau_l,P_loss,T_j\n";
    for (size_t i = 0; i < log.rows(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      log.t[i], log.omega_ref[i], log.omega_m[i], log.i_d[i], log.i_q[i],
                      log.u_d[i], log.u_q[i], log.tau_l[i], log.P_loss[i], log.T_j[i]);
        os << buf;
    }
}

inline SimulationLog read_log_csv(std::istream& in, const std::string& name) {
    SimulationLog log;
    std::string line;
    size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# schema:", 0) == 0) {
            if (line.find("evdrive.simlog/1") == std::string::npos)
                throw ValidationError(name + ": unsupported log schema: " + line);
            continue;
        }
        if (line.rfind("# dt_log=", 0) == 0) {
            std::sscanf(line.c_str(), "# dt_log=%lg energy_loss_J=%lg rmse_omega=%lg",
                        &log.dt_log, &log.energy_loss_J, &log.rmse_omega);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("t,", 0) != 0)
                throw ValidationError(name + ": missing log column header at row " +
                                      std::to_string(lineno));
            if (line.find("T_j") == std::string::npos)
                throw ValidationError(name + ": log is missing the T_j column");
            header_seen = true;
            continue;
        }
        double v[10];
        const int got =
            std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg", &v[0], &v[1],
                        &v[2], &v[3], &v[4], &v[5], &v[6], &v[7], &v[8], &v[9]);
        if (got != 10)
            throw ValidationError(name + ": malformed log row " + std::to_string(lineno));
        log.t.push_back(v[0]);
        log.omega_ref.push_back(v[1]);
        log.omega_m.push_back(v[2]);
        log.i_d.push_back(v[3]);
        log.i_q.push_back(v[4]);
        log.u_d.push_back(v[5]);
        log.u_q.push_back(v[6]);
        log.tau_l.push_back(v[7]);
        log.P_loss.push_back(v[8]);
        log.T_j.push_back(v[9]);
    }
    if (log.dt_log == 0.0 && log.rows() >= 2) log.dt_log = log.t[1] - log.t[0];
    for (size_t i = 0; i < log.rows(); ++i) log.peak_T_j = std::max(log.peak_T_j, log.T_j[i]);
    log.validate();
    return log;
}

inline SimulationLog read_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open log file: " + path);
    return read_log_csv(in, path);
}

/// Compact binary form: magic, version, row count, then column-major doubles.
inline void write_log_binary(std::ostream& os, const SimulationLog& log) {
    log.validate();
    const char magic[8] = {'E', 'V', 'L', 'O', 'G', 'B', 'I', 'N'};
    os.write(magic, 8);
    const std::uint32_t version = 1, ncols = 10;
    const std::uint64_t nrows = log.rows();
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&ncols), 4);
    os.write(reinterpret_cast<const char*>(&nrows), 8);
    os.write(reinterpret_cast<const char*>(&log.dt_log), 8);
    os.write(reinterpret_cast<const char*>(&log.energy_loss_J), 8);
    os.write(reinterpret_cast<const char*>(&log.rmse_omega), 8);
    for (const auto* col : {&log.t, &log.omega_ref, &log.omega_m, &log.i_d, &log.i_q, &log.u_d,
                            &log.u_q, &log.tau_l, &log.P_loss, &log.T_j})
        os.write(reinterpret_cast<const char*>(col->data()),
                 static_cast<std::streamsize>(col->size() * sizeof(double)));
}

inline SimulationLog read_log_binary(std::istream& in, const std::string& name) {
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::string(magic, 8) != "EVLOGBIN")
        throw ValidationError(name + ": not an evdrive binary log");
    std::uint32_t version = 0, ncols = 0;
    std::uint64_t nrows = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&ncols), 4);
    in.read(reinterpret_cast<char*>(&nrows), 8);
    if (version != 1 || ncols != 10)
        throw ValidationError(name + ": unsupported binary log version");
    SimulationLog log;
    in.read(reinterpret_cast<char*>(&log.dt_log), 8);
    in.read(reinterpret_cast<char*>(&log.energy_loss_J), 8);
    in.read(reinterpret_cast<char*>(&log.rmse_omega), 8);
    for (auto* col : {&log.t, &log.omega_ref, &log.omega_m, &log.i_d, &log.i_q, &log.u_d,
                      &log.u_q, &log.tau_l, &log.P_loss, &log.T_j}) {
        col->resize(nrows);
        in.read(reinterpret_cast<char*>(col->data()),
                static_cast<std::streamsize>(nrows * sizeof(double)));
        if (static_cast<std::uint64_t>(in.gcount()) != nrows * sizeof(double))
            throw ValidationError(name + ": truncated binary log");
    }
    for (size_t i = 0; i < log.rows(); ++i) log.peak_T_j = std::max(log.peak_T_j, log.T_j[i]);
    log.validate();
    return log;
}

}  // namespace evdrive
