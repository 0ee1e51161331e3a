#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "evdrive/riccati.hpp"

using namespace evdrive;

TEST_CASE("lyapunov solver") {
    std::mt19937 rng(5);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Eigen::MatrixXd M(n, n), W(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                M(i, j) = dist(rng);
                W(i, j) = dist(rng);
            }
        W = (W + W.transpose()).eval();
        Eigen::MatrixXd F =
            M - (M.cwiseAbs().rowwise().sum().maxCoeff() + 0.2) * Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd X = solve_lyapunov(F, W);
        CHECK((F.transpose() * X + X * F + W).norm() <= 1e-9 * (1.0 + X.norm()));
    }
}

TEST_CASE("known Riccati solutions") {
    SUBCASE("A = 0, B = Q = R = I gives X = I") {
        const auto I = Eigen::MatrixXd::Identity(3, 3);
        Eigen::MatrixXd X = solve_care(Eigen::MatrixXd::Zero(3, 3), I, I, I);
        CHECK((X - I).norm() < 1e-10);
    }

    SUBCASE("scalar stabilizing branch x = 1 + sqrt(2)") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, 1.0);
        Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
        Eigen::MatrixXd X = solve_care(a, one, one, one);
        CHECK(X(0, 0) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
        CHECK(a(0, 0) - X(0, 0) < 0.0);  // closure stable
    }

    SUBCASE("stable A with zero cost gives X = 0") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, -1.0);
        Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
        Eigen::MatrixXd X = solve_care(a, one, Eigen::MatrixXd::Zero(1, 1), one);
        CHECK(std::abs(X(0, 0)) < 1e-12);
    }
}

TEST_CASE("randomized stabilizable problems meet the residual contract") {
    std::mt19937 rng(17);
    std::normal_distribution<double> dist(0.0, 1.0);
    int solved = 0, attempts = 0;
    while (solved < 100 && attempts < 130) {
        ++attempts;
        const int n = 1 + static_cast<int>(rng() % 8);
        const int m = 1 + static_cast<int>(rng() % n);
        Eigen::MatrixXd A(n, n), B(n, m), Mq(n, n), Mr(m, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = dist(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) B(i, j) = dist(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Mq(i, j) = dist(rng);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Mr(i, j) = dist(rng);
        Eigen::MatrixXd Q = Mq.transpose() * Mq;
        Eigen::MatrixXd R = Mr.transpose() * Mr + Eigen::MatrixXd::Identity(m, m);

        Eigen::MatrixXd X = solve_care(A, B, Q, R);
        // a draw this close to uncontrollable cannot even have its residual
        // evaluated meaningfully in double precision; redraw
        if (X.norm() > 1e7) continue;
        ++solved;
        Eigen::MatrixXd S = B * R.inverse() * B.transpose();
        // residual evaluated in extended precision, independent expression
        using MXL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        const MXL Al = A.cast<long double>(), Sl = S.cast<long double>(),
                  Ql = Q.cast<long double>(), Xl = X.cast<long double>();
        const double res = static_cast<double>(
            (Al.transpose() * Xl + Xl * Al - Xl * Sl * Xl + Ql).norm());
        CHECK(res <= 1e-8 * (1.0 + X.norm()));
        CHECK((X - X.transpose()).norm() <= 1e-10 * (1.0 + X.norm()));
        CHECK((A - S * X).eigenvalues().real().maxCoeff() < 0.0);
    }
    CHECK(solved == 100);
}

TEST_CASE("imaginary-axis Hamiltonian eigenvalues are rejected") {
    // a = 0, b = 0, q = 1: Hamiltonian eigenvalues at the origin
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    CHECK_THROWS_AS(solve_care(zero, zero, one, one), NumericalError);
    CHECK(!solve_care_general(zero, zero, one).has_value());
}
