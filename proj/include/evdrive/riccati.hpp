#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <optional>

#include "evdrive/errors.hpp"

namespace evdrive {

/// Solve F^T X + X F + W = 0 for X (Kronecker-vectorized dense solve;
/// intended for the small state dimensions of this toolkit).
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W) {
    const int n = static_cast<int>(F.rows());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    // vec(F^T X + X F) = (I (x) F^T + F^T (x) I) vec(X), column-major vec.
    for (int j = 0; j < n; ++j) {
        K.block(j * n, j * n, n, n) += F.transpose();
        for (int l = 0; l < n; ++l) K.block(l * n, j * n, n, n) += F(j, l) * I;
    }
    Eigen::VectorXd w(Eigen::Map<const Eigen::VectorXd>(W.data(), n * n));
    Eigen::VectorXd x = K.fullPivLu().solve(-w);
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
}

inline double care_residual_norm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X) {
    return (A.transpose() * X + X * A - X * S * X + Q).norm();
}

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// Residual in extended precision: for large solutions the double-precision
/// evaluation noise of X S X can exceed the residual itself.
inline double care_residual_norm_accurate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X) {
    const MatrixXld Al = A.cast<long double>(), Sl = S.cast<long double>(),
                    Ql = Q.cast<long double>(), Xl = X.cast<long double>();
    return static_cast<double>(
        (Al.transpose() * Xl + Xl * Al - Xl * Sl * Xl + Ql).norm());
}

struct CareOptions {
    double axis_tol{1e-8};     // reject Hamiltonian eigenvalues this close to j-omega axis
    int newton_steps{6};       // residual polish iterations
    double cond_limit{1e12};   // basis inversion conditioning guard
};

namespace detail {
/// In-place diagonal balancing M -> D^{-1} M D with power-of-two scalings;
/// returns diag(D). Improves eigenvector accuracy for badly scaled problems.
inline Eigen::VectorXd balance_in_place(Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    for (int sweep = 0; sweep < 50; ++sweep) {
        bool converged = true;
        for (int i = 0; i < n; ++i) {
            double r = M.row(i).template lpNorm<1>() - std::abs(M(i, i));
            double c = M.col(i).template lpNorm<1>() - std::abs(M(i, i));
            if (r == 0.0 || c == 0.0) continue;
            double f = 1.0;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c >= r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (f != 1.0) {
                converged = false;
                d(i) *= f;
                M.col(i) *= f;
                M.row(i) /= f;
            }
        }
        if (converged) break;
    }
    return d;
}
}  // namespace detail

/// Stabilizing solution of A^T X + X A - X S X + Q = 0 with symmetric S
/// (possibly indefinite) and symmetric Q, via the stable invariant subspace
/// of the Hamiltonian [[A, -S], [-Q, -A^T]]. Returns nullopt when no
/// stabilizing solution exists (eigenvalues on the axis, defective basis).
inline std::optional<Eigen::MatrixXd> solve_care_general(const Eigen::MatrixXd& A,
                                                         const Eigen::MatrixXd& S,
                                                         const Eigen::MatrixXd& Q,
                                                         const CareOptions& opt = {}) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return Eigen::MatrixXd::Zero(0, 0);
    Eigen::MatrixXd H(2 * n, 2 * n);
    H << A, -S, -Q, -A.transpose();
    const Eigen::VectorXd bal = detail::balance_in_place(H);

    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) return std::nullopt;
    const auto& vals = es.eigenvalues();
    const Eigen::MatrixXcd vecs = bal.asDiagonal() * es.eigenvectors();

    std::vector<int> stable;
    for (int i = 0; i < 2 * n; ++i) {
        if (std::abs(vals(i).real()) <= opt.axis_tol * (1.0 + std::abs(vals(i))))
            return std::nullopt;  // axis eigenvalue: no stabilizing solution
        if (vals(i).real() < 0.0) stable.push_back(i);
    }
    if (static_cast<int>(stable.size()) != n) return std::nullopt;

    Eigen::MatrixXcd U1(n, n), U2(n, n);
    for (int k = 0; k < n; ++k) {
        U1.col(k) = vecs.col(stable[k]).head(n);
        U2.col(k) = vecs.col(stable[k]).tail(n);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U1);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > opt.cond_limit) return std::nullopt;

    Eigen::MatrixXcd Xc = U1.transpose().fullPivLu().solve(U2.transpose()).transpose();
    Eigen::MatrixXd X = Xc.real();
    if (Xc.imag().norm() > 1e-6 * (1.0 + X.norm())) return std::nullopt;
    X = 0.5 * (X + X.transpose());

    // Newton polish: F = A - S X, solve F^T dX + dX F = -residual. The
    // residual and the iterate are kept in extended precision; without it,
    // evaluation noise floors the achievable residual for large solutions.
    const MatrixXld Al = A.cast<long double>(), Sl = S.cast<long double>(),
                    Ql = Q.cast<long double>();
    MatrixXld Xl = X.cast<long double>();
    long double best = (Al.transpose() * Xl + Xl * Al - Xl * Sl * Xl + Ql).norm();
    for (int it = 0; it < opt.newton_steps; ++it) {
        if (static_cast<double>(best) <= 1e-13 * (1.0 + X.norm())) break;
        const MatrixXld Rl = Al.transpose() * Xl + Xl * Al - Xl * Sl * Xl + Ql;
        const Eigen::MatrixXd F = (Al - Sl * Xl).cast<double>();
        Eigen::MatrixXd dX = solve_lyapunov(F, Rl.cast<double>());
        dX = 0.5 * (dX + dX.transpose()).eval();
        const MatrixXld Xn = Xl + dX.cast<long double>();
        const long double rn =
            (Al.transpose() * Xn + Xn * Al - Xn * Sl * Xn + Ql).norm();
        if (rn < best) {
            Xl = Xn;
            best = rn;
        } else {
            break;
        }
    }
    X = Xl.cast<double>();

    // Stabilizing by construction; verify to guard against a defective basis.
    Eigen::MatrixXd F = A - S * X;
    if (F.eigenvalues().real().maxCoeff() >= 0.0) return std::nullopt;
    return X;
}

/// Stabilizing solution of A^T X + X A - X B R^{-1} B^T X + Q = 0.
/// Requires R symmetric positive definite, Q positive semidefinite and
/// (A, B) stabilizable; throws NumericalError when no stabilizing solution
/// exists or the residual target cannot be met.
inline Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                  const CareOptions& opt = {}) {
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        throw ValidationError("solve_care: R must be symmetric positive definite");
    const Eigen::MatrixXd S = B * llt.solve(B.transpose());
    auto X = solve_care_general(A, S, Q, opt);
    if (!X)
        throw NumericalError(
            "solve_care: no stabilizing solution (Hamiltonian eigenvalues on the imaginary axis)");
    const double res = care_residual_norm_accurate(A, S, Q, *X);
    if (res > 1e-8 * (1.0 + X->norm()))
        throw NumericalError("solve_care: residual " + std::to_string(res) +
                             " exceeds tolerance");
    return *X;
}

}  // namespace evdrive
