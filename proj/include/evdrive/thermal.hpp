#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "evdrive/errors.hpp"
#include "evdrive/motor.hpp"

namespace evdrive {

/// IGBT conduction-loss parameters.
struct LossParams {
    double V_ce0;  // on-state voltage threshold (V)
    double r_CE;   // on-state resistance (ohm)
    double duty;   // average duty factor (0, 1]

    void validate() const {
        if (!(V_ce0 >= 0.0)) throw ValidationError("V_ce0 must be >= 0");
        if (!(r_CE > 0.0)) throw ValidationError("r_CE must be > 0");
        if (!(duty > 0.0 && duty <= 1.0)) throw ValidationError("duty must be in (0, 1]");
    }
};

/// First-order junction-to-ambient thermal network.
struct ThermalParams {
    double R_theta;    // thermal resistance (K/W)
    double C_theta;    // thermal capacitance (J/K)
    double T_ambient;  // heatsink temperature (degC)

    double time_constant() const { return R_theta * C_theta; }
    void validate() const {
        if (!(R_theta > 0.0 && C_theta > 0.0))
            throw ValidationError("thermal resistance and capacitance must be > 0");
    }
};

/// Empirical power-cycling lifetime model constants. kB is the Boltzmann
/// constant in eV/K and is fixed.
struct LifetimeParams {
    double A0;         // overall scale (cycles)
    double A1;         // range-decay base
    double alpha;      // temperature-range exponent
    double T0;         // reference range (K)
    double lambda;     // range decay constant (K)
    double Ea;         // activation energy (eV)
    double kB{8.617e-5};
    double C_ton;      // on-time shape constant
    double gamma_ton;  // on-time exponent
    double k_thick;    // chip thickness factor

    void validate() const {
        if (!(A0 > 0.0)) throw ValidationError("lifetime A0 must be > 0");
        if (kB != 8.617e-5) throw ValidationError("kB is fixed at 8.617e-5 eV/K");
        for (double v : {A1, alpha, T0, lambda, Ea, C_ton, gamma_ton, k_thick})
            if (!std::isfinite(v)) throw ValidationError("lifetime parameters must be finite");
    }
};

/// One (delta T, t_on) stress bin with its cycle count (half cycles allowed).
struct ThermalCycleBin {
    double delta_T;  // K
    double mean_Tj;  // degC
    double t_on;     // s
    double count;    // cycles

    void validate() const {
        if (!(delta_T > 0.0 && t_on > 0.0 && count > 0.0))
            throw ValidationError("thermal cycle bin requires positive range, duration, count");
    }
};

/// Conduction loss duty * (V_ce0 i + r_CE i^2).
inline double conduction_loss(double i_on, const LossParams& lp) {
    if (!(i_on >= 0.0))
        throw ValidationError("conduction_loss: on-state current must be >= 0");
    return lp.duty * (lp.V_ce0 * i_on + lp.r_CE * i_on * i_on);
}

/// Device current magnitude from the dq pair (amplitude-invariant transform).
inline double on_state_current(const MotorState& s) {
    return std::hypot(s.i_d, s.i_q);
}

/// Exact step of C dT/dt = P - (T - T_a)/R under constant P:
/// relax toward T_a + P R with time constant R C.
inline double step_junction_temperature(double T_j, double P, double dt,
                                        const ThermalParams& tp) {
    if (!(dt > 0.0)) throw ValidationError("step_junction_temperature: dt must be > 0");
    if (!(P >= 0.0)) throw ValidationError("step_junction_temperature: P must be >= 0");
    const double T_ss = tp.T_ambient + P * tp.R_theta;
    return T_ss + (T_j - T_ss) * std::exp(-dt / tp.time_constant());
}

/// Cycles to failure under a (delta T, mean Tj, t_on) stress. Evaluated in
/// log space; the Arrhenius term uses Kelvin.
inline double cycles_to_failure(double delta_T, double mean_Tj, double t_on,
                                const LifetimeParams& lp) {
    if (!(delta_T > 0.0)) throw ValidationError("cycles_to_failure: delta_T must be > 0");
    if (!(t_on > 0.0)) throw ValidationError("cycles_to_failure: t_on must be > 0");
    if (!(mean_Tj > -273.15))
        throw ValidationError("cycles_to_failure: mean_Tj below absolute zero");
    const double T_kelvin = mean_Tj + 273.15;
    const double beta = std::exp(-(delta_T - lp.T0) / lp.lambda);
    const double log_nf = std::log(lp.A0) + beta * std::log(lp.A1) +
                          (lp.alpha - beta) * std::log(delta_T) +
                          lp.Ea / (lp.kB * T_kelvin) +
                          std::log((lp.C_ton + std::pow(t_on, lp.gamma_ton)) /
                                   (lp.C_ton + std::pow(2.0, lp.gamma_ton))) +
                          std::log(lp.k_thick);
    const double nf = std::exp(log_nf);
    if (!std::isfinite(nf) || !(nf > 0.0))
        throw NumericalError("cycles_to_failure: non-finite result");
    return nf;
}

/// Miner damage: D = sum count_i / N_f,i. Failure is conventionally D = 1.
inline double miner_damage(const std::vector<ThermalCycleBin>& bins, const LifetimeParams& lp) {
    double damage = 0.0;
    for (const auto& b : bins) {
        b.validate();
        const double nf = cycles_to_failure(b.delta_T, b.mean_Tj, b.t_on, lp);
        damage += b.count / nf;
    }
    return damage;
}

struct LifetimeProjection {
    double drive_cycles;  // cycles to D = 1; +inf when damage is zero
    double years;         // at the given daily usage
};

inline LifetimeProjection lifetime_projection(double damage_per_cycle, double cycles_per_day) {
    if (damage_per_cycle < 0.0)
        throw ValidationError("lifetime_projection: damage must be >= 0");
    if (!(cycles_per_day > 0.0))
        throw ValidationError("lifetime_projection: cycles_per_day must be > 0");
    if (damage_per_cycle == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    const double cycles = 1.0 / damage_per_cycle;
    return {cycles, cycles / (cycles_per_day * 365.0)};
}

/// Anchor pair used to pin the lifetime scale constants.
struct LifetimeAnchor {
    double delta_T;
    double mean_Tj;
    double t_on;
    double N_f;
};

/// Closed-form two-point calibration: with alpha, T0, lambda, Ea, the
/// on-time shape and k_thick held, solve A1 from the anchor ratio and A0
/// from the first anchor. Both anchors must share mean_Tj and t_on.
inline LifetimeParams calibrate_lifetime(LifetimeParams base, const LifetimeAnchor& a,
                                         const LifetimeAnchor& b) {
    if (a.mean_Tj != b.mean_Tj || a.t_on != b.t_on)
        throw ValidationError("calibrate_lifetime: anchors must share mean_Tj and t_on");
    const double beta_a = std::exp(-(a.delta_T - base.T0) / base.lambda);
    const double beta_b = std::exp(-(b.delta_T - base.T0) / base.lambda);
    if (beta_a == beta_b)
        throw ValidationError("calibrate_lifetime: anchors do not separate A1");
    const double log_power_ratio = (base.alpha - beta_a) * std::log(a.delta_T) -
                                   (base.alpha - beta_b) * std::log(b.delta_T);
    const double log_A1 = (std::log(a.N_f / b.N_f) - log_power_ratio) / (beta_a - beta_b);
    base.A1 = std::exp(log_A1);
    base.A0 = 1.0;
    base.A0 = a.N_f / cycles_to_failure(a.delta_T, a.mean_Tj, a.t_on, base);
    base.validate();
    return base;
}

}  // namespace evdrive
