#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "evdrive/errors.hpp"

namespace evdrive {

/// Speed-vs-time trace, km/h over seconds, linearly interpolated.
struct DriveCycle {
    std::vector<double> t;      // s, strictly increasing from 0
    std::vector<double> v_kmh;  // >= 0
    std::string name;

    double duration() const { return t.back(); }

    double speed_kmh(double at) const {
        check_range(at);
        const auto it = std::upper_bound(t.begin(), t.end(), at);
        if (it == t.end()) return v_kmh.back();
        const size_t i = static_cast<size_t>(it - t.begin());
        if (i == 0) return v_kmh.front();
        const double f = (at - t[i - 1]) / (t[i] - t[i - 1]);
        return v_kmh[i - 1] + f * (v_kmh[i] - v_kmh[i - 1]);
    }

    double speed_mps(double at) const { return speed_kmh(at) / 3.6; }

    void check_range(double at) const {
        if (at < t.front() || at > t.back())
            throw ValidationError("time " + std::to_string(at) + " s outside drive cycle [" +
                                  std::to_string(t.front()) + ", " + std::to_string(t.back()) +
                                  "]");
    }

    void validate() const {
        if (t.size() < 2) throw ValidationError("drive cycle needs at least 2 samples");
        if (t.size() != v_kmh.size()) throw ValidationError("drive cycle column length mismatch");
        if (t.front() != 0.0) throw ValidationError("drive cycle must start at t = 0");
        for (size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1]))
                throw ValidationError("drive cycle time not increasing at row " +
                                      std::to_string(i + 1));
        for (size_t i = 0; i < v_kmh.size(); ++i)
            if (!(v_kmh[i] >= 0.0))
                throw ValidationError("negative speed at row " + std::to_string(i + 1));
    }
};

/// Longitudinal vehicle lump used to map the cycle onto the motor shaft.
struct VehicleParams {
    double mass;           // kg
    double wheel_radius;   // m
    double gear_ratio;     // motor : wheel
    double C_rr;           // rolling resistance coefficient
    double rho_Cd_A;       // aero lump rho * C_d * A (kg/m)
    double driveline_eff;  // (0, 1]

    void validate() const {
        if (!(mass > 0 && wheel_radius > 0 && gear_ratio > 0 && C_rr > 0 && rho_Cd_A > 0))
            throw ValidationError("vehicle parameters must be strictly positive");
        if (!(driveline_eff > 0.0 && driveline_eff <= 1.0))
            throw ValidationError("driveline efficiency must be in (0, 1]");
    }
};

/// Parse a two-column CSV (t_s, v_kmh); the header row is optional.
/// Malformed rows are reported with their line number.
inline DriveCycle load_drive_cycle(std::istream& in, const std::string& name) {
    DriveCycle cycle;
    cycle.name = name;
    std::string line;
    size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string a, b, extra;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw ValidationError(name + ": expected two comma-separated columns at row " +
                                  std::to_string(lineno));
        if (std::getline(row, extra, ',') && !extra.empty())
            throw ValidationError(name + ": too many columns at row " + std::to_string(lineno));
        if (first_content) {
            first_content = false;
            // optional header
            try {
                std::stod(a);
            } catch (const std::exception&) {
                continue;
            }
        }
        try {
            cycle.t.push_back(std::stod(a));
            cycle.v_kmh.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ValidationError(name + ": could not parse numbers at row " +
                                  std::to_string(lineno));
        }
        const size_t i = cycle.t.size() - 1;
        if (i > 0 && !(cycle.t[i] > cycle.t[i - 1]))
            throw ValidationError(name + ": time goes backwards at row " +
                                  std::to_string(lineno));
        if (cycle.v_kmh[i] < 0.0)
            throw ValidationError(name + ": negative speed at row " + std::to_string(lineno));
    }
    cycle.validate();
    return cycle;
}

inline DriveCycle load_drive_cycle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open drive cycle file: " + path);
    return load_drive_cycle(in, path);
}

/// Motor speed target for the cycle speed at time t.
inline double motor_speed_reference(const DriveCycle& cycle, const VehicleParams& vp, double t) {
    return cycle.speed_mps(t) / vp.wheel_radius * vp.gear_ratio;
}

/// Vehicle acceleration by symmetric finite difference over one sample
/// spacing (one-sided at the cycle ends).
inline double vehicle_accel(const DriveCycle& cycle, double t) {
    cycle.check_range(t);
    const auto it = std::upper_bound(cycle.t.begin(), cycle.t.end(), t);
    size_t i = it == cycle.t.end() ? cycle.t.size() - 1
                                   : static_cast<size_t>(it - cycle.t.begin());
    if (i == 0) i = 1;
    const double h = cycle.t[i] - cycle.t[i - 1];
    const double t0 = cycle.t.front(), t1 = cycle.t.back();
    if (t - h < t0) return (cycle.speed_mps(t + h) - cycle.speed_mps(t)) / h;
    if (t + h > t1) return (cycle.speed_mps(t) - cycle.speed_mps(t - h)) / h;
    return (cycle.speed_mps(t + h) - cycle.speed_mps(t - h)) / (2.0 * h);
}

/// Road-load torque at the motor shaft:
/// F = m a + C_rr m g [v > 0] + 1/2 rho Cd A v^2, tau = F r / (gear * eff).
inline double load_torque(const DriveCycle& cycle, const VehicleParams& vp, double t) {
    constexpr double g = 9.81;
    const double v = cycle.speed_mps(t);
    const double a = vehicle_accel(cycle, t);
    double force = vp.mass * a + 0.5 * vp.rho_Cd_A * v * v;
    if (v > 0.0) force += vp.C_rr * vp.mass * g;
    return force * vp.wheel_radius / (vp.gear_ratio * vp.driveline_eff);
}

}  // namespace evdrive
