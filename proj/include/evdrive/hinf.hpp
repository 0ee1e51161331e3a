#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "evdrive/errors.hpp"
#include "evdrive/riccati.hpp"
#include "evdrive/state_space.hpp"

namespace evdrive {

enum class ControlMode { performance_oriented, reliability_aware };

inline std::string to_string(ControlMode m) {
    return m == ControlMode::performance_oriented ? "performance_oriented" : "reliability_aware";
}

inline ControlMode mode_from_string(const std::string& s) {
    if (s == "performance_oriented") return ControlMode::performance_oriented;
    if (s == "reliability_aware") return ControlMode::reliability_aware;
    throw ValidationError("unknown control mode '" + s +
                          "' (expected performance_oriented or reliability_aware)");
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// SISO frequency weight, first order or static.
struct TransferWeight {
    enum class Kind { tracking, current };
    StateSpaceModel realization;
    Kind kind{Kind::tracking};
    double low_freq_gain{1.0};
    double high_freq_gain{1.0};
    double corner_rad_s{1.0};
};

namespace detail {
/// Balanced first-order lag: W(s) = hf + (lo - hf) c / (s + c).
inline StateSpaceModel first_order_lag(double corner, double lo_gain, double hf_gain) {
    StateSpaceModel w;
    const double k = std::sqrt((lo_gain - hf_gain) * corner);
    w.A = Eigen::MatrixXd::Constant(1, 1, -corner);
    w.B = Eigen::MatrixXd::Constant(1, 1, k);
    w.C = Eigen::MatrixXd::Constant(1, 1, k);
    w.D = Eigen::MatrixXd::Constant(1, 1, hf_gain);
    return w;
}
}  // namespace detail

/// Large gain below the corner frequency, small above: penalizes
/// steady-state speed tracking error.
inline TransferWeight make_tracking_weight(double corner_rad_s, double dc_gain, double hf_gain) {
    if (!(dc_gain > hf_gain && hf_gain > 0.0))
        throw ValidationError("tracking weight requires dc_gain > hf_gain > 0");
    if (!(corner_rad_s > 0.0)) throw ValidationError("tracking weight corner must be positive");
    TransferWeight w;
    w.kind = TransferWeight::Kind::tracking;
    w.low_freq_gain = dc_gain;
    w.high_freq_gain = hf_gain;
    w.corner_rad_s = corner_rad_s;
    w.realization = detail::first_order_lag(corner_rad_s, dc_gain, hf_gain);
    return w;
}

/// Elevated gain below the thermal response bandwidth to penalize the slow
/// current (and hence temperature) swings. Equal gains give the static
/// weight used by the performance-oriented mode.
inline TransferWeight make_current_weight(double thermal_bandwidth_rad_s, double lf_gain,
                                          double hf_gain) {
    if (!(lf_gain >= hf_gain && hf_gain > 0.0))
        throw ValidationError("current weight requires lf_gain >= hf_gain > 0");
    TransferWeight w;
    w.kind = TransferWeight::Kind::current;
    w.low_freq_gain = lf_gain;
    w.high_freq_gain = hf_gain;
    w.corner_rad_s = thermal_bandwidth_rad_s;
    if (lf_gain == hf_gain) {
        w.realization = StateSpaceModel::static_gain(Eigen::MatrixXd::Constant(1, 1, lf_gain));
        return w;
    }
    if (!(thermal_bandwidth_rad_s > 0.0))
        throw ValidationError("current weight bandwidth must be positive");
    w.realization = detail::first_order_lag(thermal_bandwidth_rad_s, lf_gain, hf_gain);
    return w;
}

// ---------------------------------------------------------------------------
// Generalized plant
// ---------------------------------------------------------------------------

namespace detail {
inline bool pbh_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             double tol = 1e-9) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return true;
    const double scale = A.norm() + B.norm() + 1.0;
    Eigen::VectorXcd ev = A.eigenvalues();
    for (int i = 0; i < n; ++i) {
        if (ev(i).real() < 0.0) continue;
        Eigen::MatrixXcd M(n, n + B.cols());
        M << A.cast<std::complex<double>>() -
                 ev(i) * Eigen::MatrixXcd::Identity(n, n),
            B.cast<std::complex<double>>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        if (svd.singularValues()(n - 1) <= tol * scale) return false;
    }
    return true;
}

inline bool pbh_detectable(const Eigen::MatrixXd& C, const Eigen::MatrixXd& A,
                           double tol = 1e-9) {
    return pbh_stabilizable(A.transpose(), C.transpose(), tol);
}
}  // namespace detail

/// Weighted design plant with partitioned channels
/// [z; y] = P [w; u], w exogenous, u control, z performance, y measurement.
struct GeneralizedPlant {
    StateSpaceModel realization;
    int n_w{0}, n_u{0}, n_z{0}, n_y{0};

    int order() const { return realization.order(); }
    Eigen::MatrixXd A() const { return realization.A; }
    Eigen::MatrixXd B1() const { return realization.B.leftCols(n_w); }
    Eigen::MatrixXd B2() const { return realization.B.rightCols(n_u); }
    Eigen::MatrixXd C1() const { return realization.C.topRows(n_z); }
    Eigen::MatrixXd C2() const { return realization.C.bottomRows(n_y); }
    Eigen::MatrixXd D11() const { return realization.D.topLeftCorner(n_z, n_w); }
    Eigen::MatrixXd D12() const { return realization.D.topRightCorner(n_z, n_u); }
    Eigen::MatrixXd D21() const { return realization.D.bottomLeftCorner(n_y, n_w); }
    Eigen::MatrixXd D22() const { return realization.D.bottomRightCorner(n_y, n_u); }

    void validate() const {
        realization.validate();
        if (realization.domain != TimeDomain::continuous)
            throw ValidationError("generalized plant must be continuous-time");
        if (n_w + n_u != realization.inputs() || n_z + n_y != realization.outputs())
            throw ValidationError("generalized plant channel partition does not match realization");
        if (n_w < 1 || n_u < 1 || n_z < 1 || n_y < 1)
            throw ValidationError("generalized plant needs nonempty channel partitions");
        if (n_z < n_u) throw ValidationError("D12 cannot have full column rank (n_z < n_u)");
        if (n_w < n_y) throw ValidationError("D21 cannot have full row rank (n_w < n_y)");
        auto rank_ok = [](const Eigen::MatrixXd& M, int need) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
            return svd.singularValues()(need - 1) > 1e-12 * (1.0 + svd.singularValues()(0));
        };
        if (!rank_ok(D12(), n_u)) throw ValidationError("D12 is column rank deficient");
        if (!rank_ok(D21().transpose(), n_y)) throw ValidationError("D21 is row rank deficient");
        if (!detail::pbh_stabilizable(A(), B2()))
            throw ValidationError("(A, B2) is not stabilizable");
        if (!detail::pbh_detectable(C2(), A()))
            throw ValidationError("(C2, A) is not detectable");
    }
};

struct RegularizationEpsilons {
    double control{1e-4};  // weight on u appended to z (rank of D12)
    double noise{1e-4};    // measurement noise channels appended to w (rank of D21)
};

/// Assemble the weighted plant of the speed-tracking design:
///   w = [omega_ref, tau_l, n_id, n_iq], u = [u_aux_d, u_aux_q],
///   z = [W_e (omega_ref - omega_m), W_I i_q, W_I i_d, eps_u u],
///   y = [omega_ref - omega_m, i_d + eps_n n_id, i_q + eps_n n_iq].
inline GeneralizedPlant build_generalized_plant(const StateSpaceModel& motor,
                                                const TransferWeight& W_e,
                                                const TransferWeight& W_I,
                                                const RegularizationEpsilons& reg = {}) {
    motor.validate();
    if (motor.order() != 3 || motor.inputs() != 3 || motor.outputs() != 3)
        throw ValidationError("build_generalized_plant expects the 3-state motor model");
    if (!(reg.control > 0.0 && reg.noise > 0.0))
        throw ValidationError("regularization epsilons must be positive");

    const int nWe = W_e.realization.order();
    const int nWI = W_I.realization.order();
    const int n = 3 + nWe + 2 * nWI;
    const int iWe = 3, iWIq = 3 + nWe, iWId = 3 + nWe + nWI;
    const int n_w = 4, n_u = 2, n_z = 5, n_y = 3;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n_w + n_u);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n_z + n_y, n);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_z + n_y, n_w + n_u);

    A.topLeftCorner(3, 3) = motor.A;
    // motor inputs: [u_aux_d, u_aux_q, tau_l]
    B.block(0, n_w + 0, 3, 2) = motor.B.leftCols(2);
    B.block(0, 1, 3, 1) = motor.B.col(2);  // tau_l is w(1)

    // tracking weight state, driven by e = omega_ref - omega_m
    if (nWe > 0) {
        A.block(iWe, iWe, nWe, nWe) = W_e.realization.A;
        A.block(iWe, 2, nWe, 1) = -W_e.realization.B;
        B.block(iWe, 0, nWe, 1) = W_e.realization.B;
    }
    // current weight states, driven by i_q and i_d
    if (nWI > 0) {
        A.block(iWIq, iWIq, nWI, nWI) = W_I.realization.A;
        A.block(iWIq, 1, nWI, 1) = W_I.realization.B;
        A.block(iWId, iWId, nWI, nWI) = W_I.realization.A;
        A.block(iWId, 0, nWI, 1) = W_I.realization.B;
    }

    const double DWe = W_e.realization.D(0, 0);
    const double DWI = W_I.realization.D(0, 0);
    // z0 = W_e e
    if (nWe > 0) C.block(0, iWe, 1, nWe) = W_e.realization.C;
    C(0, 2) = -DWe;
    D(0, 0) = DWe;
    // z1 = W_I i_q, z2 = W_I i_d
    if (nWI > 0) {
        C.block(1, iWIq, 1, nWI) = W_I.realization.C;
        C.block(2, iWId, 1, nWI) = W_I.realization.C;
    }
    C(1, 1) = DWI;
    C(2, 0) = DWI;
    // z3, z4 = eps_u * u
    D(3, n_w + 0) = reg.control;
    D(4, n_w + 1) = reg.control;
    // y0 = e, y1 = i_d + eps_n n_id, y2 = i_q + eps_n n_iq
    C(n_z + 0, 2) = -1.0;
    D(n_z + 0, 0) = 1.0;
    C(n_z + 1, 0) = 1.0;
    D(n_z + 1, 2) = reg.noise;
    C(n_z + 2, 1) = 1.0;
    D(n_z + 2, 3) = reg.noise;

    GeneralizedPlant P;
    P.realization.A = std::move(A);
    P.realization.B = std::move(B);
    P.realization.C = std::move(C);
    P.realization.D = std::move(D);
    P.realization.input_labels = {"omega_ref", "tau_l", "n_id", "n_iq", "u_aux_d", "u_aux_q"};
    P.realization.output_labels = {"z_track", "z_iq", "z_id", "z_ud", "z_uq",
                                   "e_track", "i_d", "i_q"};
    P.n_w = n_w;
    P.n_u = n_u;
    P.n_z = n_z;
    P.n_y = n_y;
    P.validate();
    return P;
}

// ---------------------------------------------------------------------------
// H-infinity norm
// ---------------------------------------------------------------------------

namespace detail {
/// True iff the norm-test Hamiltonian for level gamma has an eigenvalue on
/// the imaginary axis, i.e. sigma_max(G(j w)) crosses gamma somewhere.
inline bool gain_crosses_level(const StateSpaceModel& sys, double gamma, double axis_tol) {
    const int n = sys.order();
    const Eigen::MatrixXd &A = sys.A, &B = sys.B, &C = sys.C, &D = sys.D;
    Eigen::MatrixXd R = gamma * gamma * Eigen::MatrixXd::Identity(D.cols(), D.cols()) -
                        D.transpose() * D;
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    // gamma at or below sigma_max(D): the level is certainly crossed
    if (llt.info() != Eigen::Success) return true;
    const Eigen::MatrixXd RiBt = llt.solve(B.transpose());
    const Eigen::MatrixXd RiDtC = llt.solve(D.transpose() * C);
    Eigen::MatrixXd H(2 * n, 2 * n);
    H << A + B * RiDtC, B * RiBt,
        -C.transpose() * (C + D * RiDtC), -(A + B * RiDtC).transpose();
    Eigen::VectorXcd ev = H.eigenvalues();
    for (int i = 0; i < 2 * n; ++i)
        if (std::abs(ev(i).real()) <= axis_tol * (1.0 + std::abs(ev(i)))) return true;
    return false;
}
}  // namespace detail

/// H-infinity norm of a stable continuous-time system: bisection on the
/// Hamiltonian imaginary-axis test, seeded with a frequency sweep.
inline double hinf_norm(const StateSpaceModel& sys, double rel_tol = 1e-6) {
    sys.validate();
    if (sys.domain != TimeDomain::continuous)
        throw ValidationError("hinf_norm expects a continuous-time system");
    if (!sys.is_stable())
        throw NumericalError("hinf_norm: system is unstable (norm is infinite)");
    if (!(rel_tol > 0.0)) throw ValidationError("hinf_norm: tolerance must be positive");
    const double d_gain = max_singular_value(sys.D);
    if (sys.order() == 0) return d_gain;

    // Lower bound from a sweep: eigenfrequencies plus a broad log grid.
    std::vector<double> omegas{0.0};
    const Eigen::VectorXcd p = sys.poles();
    for (int i = 0; i < p.size(); ++i) {
        const double wi = std::abs(p(i).imag()), mi = std::abs(p(i));
        for (double f : {0.5, 1.0, 2.0}) {
            if (wi > 0) omegas.push_back(wi * f);
            if (mi > 0) omegas.push_back(mi * f);
        }
    }
    for (int k = 0; k <= 60; ++k) omegas.push_back(std::pow(10.0, -4.0 + k * (10.0 / 60.0)));
    double lo = d_gain;
    for (double w : omegas) lo = std::max(lo, max_singular_value(sys.freq_response(w)));
    if (lo == 0.0) return 0.0;

    const double axis_tol = 1e-8;
    double hi = lo * (1.0 + 2.0 * rel_tol) + 1e-14;
    int guard = 0;
    while (detail::gain_crosses_level(sys, hi, axis_tol)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw NumericalError("hinf_norm: upper bound search failed");
    }
    while (hi - lo > rel_tol * lo) {
        const double mid = std::sqrt(hi * lo);
        if (detail::gain_crosses_level(sys, mid, axis_tol)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Lower LFT
// ---------------------------------------------------------------------------

/// Close the lower loop of P with controller K: the w -> z map F_l(P, K).
inline StateSpaceModel close_loop(const GeneralizedPlant& P, const StateSpaceModel& K) {
    P.realization.validate();
    K.validate();
    if (K.domain != TimeDomain::continuous)
        throw ValidationError("close_loop expects a continuous-time controller");
    if (K.inputs() != P.n_y || K.outputs() != P.n_u)
        throw ValidationError("close_loop: controller dimensions incompatible with plant");

    const Eigen::MatrixXd D22 = P.D22();
    const Eigen::MatrixXd& DK = K.D;
    const int nu = P.n_u;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(nu, nu) - DK * D22;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw NumericalError("close_loop: ill-posed interconnection (I - DK D22 singular)");
    const Eigen::MatrixXd Mi = lu.inverse();

    const Eigen::MatrixXd A = P.A(), B1 = P.B1(), B2 = P.B2();
    const Eigen::MatrixXd C1 = P.C1(), C2 = P.C2();
    const Eigen::MatrixXd D11 = P.D11(), D12 = P.D12(), D21 = P.D21();
    const int n = P.order(), nk = K.order();

    const Eigen::MatrixXd MiDKC2 = Mi * DK * C2;
    const Eigen::MatrixXd MiCK = Mi * K.C;
    const Eigen::MatrixXd MiDKD21 = Mi * DK * D21;

    StateSpaceModel cl;
    cl.A.resize(n + nk, n + nk);
    cl.A << A + B2 * MiDKC2, B2 * MiCK,
        K.B * (C2 + D22 * MiDKC2), K.A + K.B * D22 * MiCK;
    cl.B.resize(n + nk, P.n_w);
    cl.B << B1 + B2 * MiDKD21, K.B * (D21 + D22 * MiDKD21);
    cl.C.resize(P.n_z, n + nk);
    cl.C << C1 + D12 * MiDKC2, D12 * MiCK;
    cl.D = D11 + D12 * MiDKD21;
    return cl;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

/// Output-feedback controller with the performance level it achieves.
struct ControllerRealization {
    StateSpaceModel continuous_sys;
    StateSpaceModel discrete_sys;  // filled once discretized for a simulation step
    double gamma_achieved{0.0};
    ControlMode mode_tag{ControlMode::performance_oriented};
};

namespace detail {

/// Inverse symmetric square root of a positive definite matrix;
/// nullopt when not (numerically) positive definite.
inline std::optional<Eigen::MatrixXd> inv_sqrt_pd(const Eigen::MatrixXd& M, double floor_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    if (es.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= floor_tol) return std::nullopt;
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

inline GeneralizedPlant assemble_plant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B1,
                                       const Eigen::MatrixXd& B2, const Eigen::MatrixXd& C1,
                                       const Eigen::MatrixXd& C2, const Eigen::MatrixXd& D11,
                                       const Eigen::MatrixXd& D12, const Eigen::MatrixXd& D21,
                                       const Eigen::MatrixXd& D22) {
    GeneralizedPlant P;
    P.n_w = static_cast<int>(B1.cols());
    P.n_u = static_cast<int>(B2.cols());
    P.n_z = static_cast<int>(C1.rows());
    P.n_y = static_cast<int>(C2.rows());
    const int n = static_cast<int>(A.rows());
    P.realization.A = A;
    P.realization.B.resize(n, P.n_w + P.n_u);
    P.realization.B << B1, B2;
    P.realization.C.resize(P.n_z + P.n_y, n);
    P.realization.C << C1, C2;
    P.realization.D.resize(P.n_z + P.n_y, P.n_w + P.n_u);
    P.realization.D << D11, D12, D21, D22;
    return P;
}

/// Absorb the w -> z feedthrough: wrap the closed loop T in the constant
/// Julia operator of D11 / gamma, which maps the gamma-ball of transfer
/// matrices onto itself and sends the feedthrough to zero:
///   T~ = -D11 + (I - D11 D11^T/g^2)^{1/2} T (I - D11^T T/g^2)^{-1}
///        (I - D11^T D11/g^2)^{1/2}.
/// All blocks keep their natural scale; gamma enters only through 1/gamma^2
/// corrections. Requires sigma_max(D11) < gamma.
inline std::optional<GeneralizedPlant> julia_shift_d11(const GeneralizedPlant& P, double gamma) {
    const int m1 = P.n_w, p1 = P.n_z;
    const double g2 = gamma * gamma;
    const Eigen::MatrixXd N = P.D11();
    if (max_singular_value(N) >= gamma * (1.0 - 1e-9)) return std::nullopt;
    const Eigen::MatrixXd So = Eigen::MatrixXd::Identity(p1, p1) - N * N.transpose() / g2;
    const Eigen::MatrixXd Si = Eigen::MatrixXd::Identity(m1, m1) - N.transpose() * N / g2;
    const auto Si_isqrt = inv_sqrt_pd(Si, 1e-12);
    const auto So_isqrt = inv_sqrt_pd(So, 1e-12);
    if (!Si_isqrt || !So_isqrt) return std::nullopt;
    // feedback of z into w through D11^T / gamma^2
    const Eigen::MatrixXd NtPhi = N.transpose() * So.inverse() / g2;

    const Eigen::MatrixXd A = P.A() + P.B1() * NtPhi * P.C1();
    const Eigen::MatrixXd B1 = P.B1() * (*Si_isqrt);
    const Eigen::MatrixXd B2 = P.B2() + P.B1() * NtPhi * P.D12();
    const Eigen::MatrixXd C1 = (*So_isqrt) * P.C1();
    const Eigen::MatrixXd C2 = P.C2() + P.D21() * NtPhi * P.C1();
    const Eigen::MatrixXd D12 = (*So_isqrt) * P.D12();
    const Eigen::MatrixXd D21 = P.D21() * (*Si_isqrt);
    const Eigen::MatrixXd D22 = P.D22() + P.D21() * NtPhi * P.D12();
    return assemble_plant(A, B1, B2, C1, C2, Eigen::MatrixXd::Zero(p1, m1), D12, D21, D22);
}

struct SynthOptions {
    double axis_tol{1e-8};
    double psd_tol{1e-7};
};

/// Central controller for one performance level, or nullopt when gamma is
/// infeasible. D11 is removed exactly by the constant-contraction loop shift
/// (requires gamma > sigma_max(D11), which is tight whenever the D11 rows
/// carry no direct control feedthrough, as in the plants built here); D12
/// and D21 are normalized by SVD; the two game Riccati equations carry the
/// cross terms left after normalization.
inline std::optional<StateSpaceModel> central_controller(const GeneralizedPlant& P, double gamma,
                                                         const SynthOptions& opt = {}) {
    const int n = P.order(), m1 = P.n_w, m2 = P.n_u, p1 = P.n_z, p2 = P.n_y;
    const double g2 = gamma * gamma;

    const auto shifted = julia_shift_d11(P, gamma);
    if (!shifted) return std::nullopt;

    Eigen::MatrixXd A = shifted->A(), B1 = shifted->B1(), B2 = shifted->B2();
    Eigen::MatrixXd C1 = shifted->C1(), C2 = shifted->C2();
    Eigen::MatrixXd D12 = shifted->D12(), D21 = shifted->D21(), D22 = shifted->D22();

    // Normalize D12 to [0; I] (rotate z, scale u) and D21 to [0 I]
    // (rotate w, scale y). Rotations are norm-preserving; the scalings are
    // undone on the controller afterwards.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd12(D12, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd12.singularValues()(m2 - 1) <= 1e-12 * (1.0 + svd12.singularValues()(0)))
        return std::nullopt;
    Eigen::MatrixXd Tz(p1, p1);
    Tz.topRows(p1 - m2) = svd12.matrixU().rightCols(p1 - m2).transpose();
    Tz.bottomRows(m2) = svd12.matrixU().leftCols(m2).transpose();
    const Eigen::MatrixXd Su =
        svd12.matrixV() * svd12.singularValues().cwiseInverse().asDiagonal();
    C1 = Tz * C1;
    B2 = B2 * Su;
    D22 = D22 * Su;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd21(D21, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd21.singularValues()(p2 - 1) <= 1e-12 * (1.0 + svd21.singularValues()(0)))
        return std::nullopt;
    Eigen::MatrixXd Tw(m1, m1);
    Tw.leftCols(m1 - p2) = svd21.matrixV().rightCols(m1 - p2);
    Tw.rightCols(p2) = svd21.matrixV().leftCols(p2);
    const Eigen::MatrixXd Sy =
        svd21.singularValues().cwiseInverse().asDiagonal() * svd21.matrixU().transpose();
    B1 = B1 * Tw;
    C2 = Sy * C2;
    D22 = Sy * D22;

    // Game Riccati equations with the residual cross terms.
    const Eigen::MatrixXd C1a = C1.topRows(p1 - m2), C1b = C1.bottomRows(m2);
    const Eigen::MatrixXd B1a = B1.leftCols(m1 - p2), B1b = B1.rightCols(p2);

    const CareOptions care_opt{opt.axis_tol, 6, 1e12};
    const auto X = solve_care_general(
        A - B2 * C1b, B2 * B2.transpose() - B1 * B1.transpose() / g2,
        C1a.transpose() * C1a, care_opt);
    if (!X) return std::nullopt;
    const auto Y = solve_care_general(
        (A - B1b * C2).transpose(), C2.transpose() * C2 - C1.transpose() * C1 / g2,
        B1a * B1a.transpose(), care_opt);
    if (!Y) return std::nullopt;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esx(*X), esy(*Y);
    if (esx.eigenvalues().minCoeff() < -opt.psd_tol * (1.0 + X->norm())) return std::nullopt;
    if (esy.eigenvalues().minCoeff() < -opt.psd_tol * (1.0 + Y->norm())) return std::nullopt;

    const Eigen::MatrixXd XY = (*X) * (*Y);
    if (XY.eigenvalues().cwiseAbs().maxCoeff() >= g2) return std::nullopt;  // rho(XY) < gamma^2

    const Eigen::MatrixXd Z =
        (Eigen::MatrixXd::Identity(n, n) - (*Y) * (*X) / g2).partialPivLu().inverse();
    const Eigen::MatrixXd F = -(B2.transpose() * (*X) + C1b);
    const Eigen::MatrixXd L = -((*Y) * C2.transpose() + B1b);

    StateSpaceModel K;
    K.A = A + B1 * B1.transpose() * (*X) / g2 + B2 * F +
          Z * L * (C2 + B1b.transpose() * (*X) / g2);
    K.B = -Z * L;
    K.C = F;
    K.D = Eigen::MatrixXd::Zero(m2, p2);

    // Reattach the D22 of the shifted plant, then undo the u / y scalings.
    K.A -= K.B * D22 * K.C;
    K.C = Su * K.C;
    K.B = K.B * Sy;

    // Guard: accept only if the controller closes the original plant stably.
    StateSpaceModel cl = close_loop(P, K);
    if (cl.spectral_abscissa() >= 0.0) return std::nullopt;
    return K;
}

}  // namespace detail

/// Smallest-gamma stabilizing output-feedback controller found by bisection
/// over the two-Riccati feasibility test. The returned level is snapped to a
/// fixed multiplicative grid so the result does not depend on the search
/// interval. Throws NumericalError when the whole range is infeasible.
inline ControllerRealization synthesize(const GeneralizedPlant& plant, double gamma_lo,
                                        double gamma_hi, double rel_tol = 1e-3) {
    plant.validate();
    if (!(gamma_lo >= 0.0) || !(gamma_hi > gamma_lo))
        throw ValidationError("synthesize: need 0 <= gamma_lo < gamma_hi");
    if (!(rel_tol >= 1e-9 && rel_tol < 1.0))
        throw ValidationError("synthesize: rel_tol out of range");

    auto attempt = [&](double g) { return detail::central_controller(plant, g); };

    auto K_best = attempt(gamma_hi);
    if (!K_best)
        throw NumericalError("synthesize: upper gamma bound " + std::to_string(gamma_hi) +
                             " is infeasible");
    double feasible = gamma_hi;
    double infeasible = 0.0;
    if (gamma_lo > 0.0) {
        if (auto K_lo = attempt(gamma_lo)) {
            feasible = gamma_lo;
            K_best = std::move(K_lo);
        } else {
            infeasible = gamma_lo;
        }
    }
    if (feasible > gamma_lo) {
        double bad = std::max(infeasible, gamma_hi * 1e-12);
        while (feasible - bad > rel_tol * feasible) {
            const double mid = std::sqrt(feasible * bad);
            if (auto Km = attempt(mid)) {
                feasible = mid;
                K_best = std::move(Km);
            } else {
                bad = mid;
            }
        }
        infeasible = bad;
    }

    // Snap to the canonical grid gamma = (1 + rel_tol)^k so the result does
    // not depend on the search interval: use the smallest feasible grid point.
    const double lg = std::log1p(rel_tol);
    long k = static_cast<long>(std::ceil(std::log(feasible) / lg - 1e-9));
    const double floor_gamma = std::max(gamma_lo, infeasible);
    while (true) {
        const double cand = std::exp(static_cast<double>(k) * lg);
        if (cand < floor_gamma) break;
        auto Kc = attempt(cand);
        if (!Kc) break;  // first failure can only mean the grid point is below
                         // the boundary; the proven (feasible, K_best) stands
        K_best = std::move(Kc);
        feasible = cand;
        --k;
    }

    ControllerRealization out;
    out.continuous_sys = std::move(*K_best);
    out.gamma_achieved = feasible;

    StateSpaceModel cl = close_loop(plant, out.continuous_sys);
    if (cl.spectral_abscissa() >= 0.0)
        throw NumericalError("synthesize: closed loop not internally stable");
    const double norm = hinf_norm(cl, std::min(rel_tol, 1e-6));
    if (norm > out.gamma_achieved * (1.0 + rel_tol))
        throw NumericalError("synthesize: closed-loop norm " + std::to_string(norm) +
                             " exceeds achieved gamma " + std::to_string(out.gamma_achieved));
    return out;
}

}  // namespace evdrive
