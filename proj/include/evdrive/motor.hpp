#pragma once

#include <cmath>

#include "evdrive/errors.hpp"
#include "evdrive/state_space.hpp"

namespace evdrive {

/// Physical constants of a surface-mounted PMSM.
struct MotorParams {
    double R_s;    // stator resistance (ohm)
    double L_d;    // d-axis inductance (H)
    double L_q;    // q-axis inductance (H)
    double Phi_F;  // permanent-magnet flux (Wb)
    int p;         // pole pairs
    double J;      // rotor inertia (kg m^2)
    double B_f;    // viscous friction (N m s/rad)

    /// Linear speed equation is only valid when L_d ~ L_q.
    bool surface_mount() const { return std::abs(L_d - L_q) <= 1e-6 * L_d; }

    void validate() const {
        if (!(R_s > 0 && L_d > 0 && L_q > 0 && Phi_F > 0 && J > 0 && B_f > 0))
            throw ValidationError("motor parameters must be strictly positive");
        if (p < 1) throw ValidationError("motor pole pair count must be >= 1");
    }
};

/// dq-frame state. Electrical speed is always derived as p * omega_m.
struct MotorState {
    double i_d{0.0};      // A
    double i_q{0.0};      // A
    double omega_m{0.0};  // mechanical speed (rad/s)

    double omega_e(const MotorParams& mp) const { return mp.p * omega_m; }
};

enum class VoltageFrame { stator, auxiliary };

/// dq voltage pair. The frame tag distinguishes physical stator voltages
/// from the decoupled auxiliary inputs the linear controller works with.
struct VoltagePair {
    double v_d{0.0};
    double v_q{0.0};
    VoltageFrame frame{VoltageFrame::stator};
};

struct TorqueSample {
    double tau_e{0.0};  // produced electrical torque (N m)
    double tau_l{0.0};  // load torque (N m)
};

/// tau_e = 3/2 p [Phi_F i_q + (L_d - L_q) i_d i_q]. The reluctance term
/// vanishes for surface-mounted machines.
inline double electrical_torque(const MotorState& s, const MotorParams& mp) {
    return 1.5 * mp.p * (mp.Phi_F * s.i_q + (mp.L_d - mp.L_q) * s.i_d * s.i_q);
}

/// Add the speed-dependent cross-coupling terms to stator voltages.
inline VoltagePair auxiliary_from_stator(const VoltagePair& v, const MotorState& s,
                                         const MotorParams& mp) {
    if (v.frame != VoltageFrame::stator)
        throw ValidationError("auxiliary_from_stator: input must be tagged stator");
    const double we = s.omega_e(mp);
    return {v.v_d + we * mp.L_q * s.i_q,
            v.v_q - we * mp.L_d * s.i_d - we * mp.Phi_F,
            VoltageFrame::auxiliary};
}

/// Exact inverse of auxiliary_from_stator at the same state (decoupling).
inline VoltagePair stator_from_auxiliary(const VoltagePair& v, const MotorState& s,
                                         const MotorParams& mp) {
    if (v.frame != VoltageFrame::auxiliary)
        throw ValidationError("stator_from_auxiliary: input must be tagged auxiliary");
    const double we = s.omega_e(mp);
    return {v.v_d - we * mp.L_q * s.i_q,
            v.v_q + we * mp.L_d * s.i_d + we * mp.Phi_F,
            VoltageFrame::stator};
}

/// Time derivative of the state under auxiliary inputs. Linear in
/// (state, inputs); requires a surface-mounted machine.
inline MotorState state_derivative(const MotorState& s, const VoltagePair& v_aux,
                                   double tau_l, const MotorParams& mp) {
    if (v_aux.frame != VoltageFrame::auxiliary)
        throw ValidationError("state_derivative: voltages must be tagged auxiliary");
    if (!mp.surface_mount())
        throw ValidationError("state_derivative: requires surface-mount motor (L_d ~ L_q)");
    MotorState d;
    d.i_d = (v_aux.v_d - mp.R_s * s.i_d) / mp.L_d;
    d.i_q = (v_aux.v_q - mp.R_s * s.i_q) / mp.L_q;
    d.omega_m = (1.5 * mp.p * mp.Phi_F * s.i_q - tau_l - mp.B_f * s.omega_m) / mp.J;
    return d;
}

/// Derivative of the true bilinear plant under stator voltages: the
/// cross-coupling is evaluated at the instantaneous state, so the
/// controller-side decoupling cancels it exactly only at sample instants.
inline MotorState nonlinear_state_derivative(const MotorState& s, const VoltagePair& v_stator,
                                             double tau_l, const MotorParams& mp) {
    return state_derivative(s, auxiliary_from_stator(v_stator, s, mp), tau_l, mp);
}

/// 3-state LTI model with state [i_d, i_q, omega_m], inputs
/// [u_aux_d, u_aux_q, tau_l]. Exact (not an approximation) for
/// surface-mounted machines under auxiliary inputs.
inline StateSpaceModel linearize(const MotorParams& mp) {
    mp.validate();
    if (!mp.surface_mount())
        throw ValidationError("linearize: requires surface-mount motor (L_d ~ L_q)");
    StateSpaceModel sys;
    sys.A = Eigen::MatrixXd::Zero(3, 3);
    sys.A(0, 0) = -mp.R_s / mp.L_d;
    sys.A(1, 1) = -mp.R_s / mp.L_q;
    sys.A(2, 1) = 1.5 * mp.p * mp.Phi_F / mp.J;
    sys.A(2, 2) = -mp.B_f / mp.J;
    sys.B = Eigen::MatrixXd::Zero(3, 3);
    sys.B(0, 0) = 1.0 / mp.L_d;
    sys.B(1, 1) = 1.0 / mp.L_q;
    sys.B(2, 2) = -1.0 / mp.J;
    sys.C = Eigen::MatrixXd::Identity(3, 3);
    sys.D = Eigen::MatrixXd::Zero(3, 3);
    sys.input_labels = {"u_aux_d", "u_aux_q", "tau_l"};
    sys.output_labels = {"i_d", "i_q", "omega_m"};
    return sys;
}

}  // namespace evdrive
