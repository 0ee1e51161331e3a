#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evdrive/errors.hpp"

namespace evdrive {

enum class TimeDomain { continuous, discrete };

/// LTI system x' = Ax + Bu, y = Cx + Du (x' is d/dt or the next sample).
///
/// Channel labels are optional; when present they must match the matrix
/// dimensions and be unique per direction.
struct StateSpaceModel {
    Eigen::MatrixXd A, B, C, D;
    TimeDomain domain{TimeDomain::continuous};
    double dt{0.0};  // sample time, > 0 iff discrete
    std::vector<std::string> input_labels, output_labels;

    int order() const { return static_cast<int>(A.rows()); }
    int inputs() const { return static_cast<int>(D.cols()); }
    int outputs() const { return static_cast<int>(D.rows()); }

    static StateSpaceModel static_gain(const Eigen::MatrixXd& gain) {
        StateSpaceModel s;
        s.A.resize(0, 0);
        s.B.resize(0, gain.cols());
        s.C.resize(gain.rows(), 0);
        s.D = gain;
        return s;
    }

    void validate() const {
        if (A.rows() != A.cols()) throw ValidationError("state matrix A must be square");
        if (B.rows() != A.rows()) throw ValidationError("B row count must match state dimension");
        if (C.cols() != A.cols()) throw ValidationError("C column count must match state dimension");
        if (D.rows() != C.rows() || D.cols() != B.cols())
            throw ValidationError("D must be outputs x inputs");
        if (domain == TimeDomain::discrete && !(dt > 0.0))
            throw ValidationError("discrete system requires dt > 0");
        if (domain == TimeDomain::continuous && dt != 0.0)
            throw ValidationError("continuous system must have dt == 0");
        check_labels(input_labels, inputs(), "input");
        check_labels(output_labels, outputs(), "output");
    }

    /// Transfer matrix C (sI - A)^{-1} B + D at a complex point s (or z).
    Eigen::MatrixXcd eval(std::complex<double> s) const {
        if (order() == 0) return D.cast<std::complex<double>>();
        Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(order(), order()) -
                             A.cast<std::complex<double>>();
        return C.cast<std::complex<double>>() * M.partialPivLu().solve(B.cast<std::complex<double>>()) +
               D.cast<std::complex<double>>();
    }

    /// Frequency response at angular frequency omega (rad/s).
    Eigen::MatrixXcd freq_response(double omega) const {
        if (domain == TimeDomain::continuous) return eval({0.0, omega});
        return eval(std::polar(1.0, omega * dt));
    }

    Eigen::VectorXcd poles() const {
        return order() == 0 ? Eigen::VectorXcd{} : Eigen::VectorXcd{A.eigenvalues()};
    }

    /// Largest real part (continuous) of any pole; -inf for static systems.
    double spectral_abscissa() const {
        if (order() == 0) return -std::numeric_limits<double>::infinity();
        return A.eigenvalues().real().maxCoeff();
    }

    bool is_stable() const {
        if (order() == 0) return true;
        const Eigen::VectorXcd p = poles();
        if (domain == TimeDomain::continuous) return p.real().maxCoeff() < 0.0;
        return p.cwiseAbs().maxCoeff() < 1.0;
    }

private:
    static void check_labels(const std::vector<std::string>& labels, int expected,
                             const char* what) {
        if (labels.empty()) return;
        if (static_cast<int>(labels.size()) != expected)
            throw ValidationError(std::string(what) + " label count mismatch");
        std::set<std::string> seen(labels.begin(), labels.end());
        if (static_cast<int>(seen.size()) != expected)
            throw ValidationError(std::string(what) + " labels must be unique");
    }
};

inline double max_singular_value(const Eigen::MatrixXcd& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    return M.jacobiSvd().singularValues()(0);
}

inline double max_singular_value(const Eigen::MatrixXd& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    return M.jacobiSvd().singularValues()(0);
}

/// Bilinear (Tustin) discretization. Preserves DC gain exactly and maps the
/// open left half plane into the open unit disk.
inline StateSpaceModel discretize(const StateSpaceModel& sys, double dt) {
    sys.validate();
    if (sys.domain != TimeDomain::continuous)
        throw ValidationError("discretize expects a continuous-time system");
    if (!(dt > 0.0)) throw ValidationError("discretize requires dt > 0");
    const int n = sys.order();
    StateSpaceModel out = sys;
    out.domain = TimeDomain::discrete;
    out.dt = dt;
    if (n == 0) return out;

    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - 0.5 * dt * sys.A);
    if (std::abs(lu.determinant()) < 1e-300)
        throw NumericalError("discretize: I - A*dt/2 is singular (pole at 2/dt)");
    out.A = lu.solve(I + 0.5 * dt * sys.A);
    out.B = lu.solve(dt * sys.B);
    out.C = sys.C * lu.inverse();
    out.D = sys.D + 0.5 * sys.C * lu.solve(dt * sys.B);
    return out;
}

}  // namespace evdrive
