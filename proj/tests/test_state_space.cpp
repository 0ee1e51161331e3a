#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "evdrive/state_space.hpp"

using namespace evdrive;

namespace {
StateSpaceModel first_order_lag() {
    // G(s) = 1/(s+1)
    StateSpaceModel g;
    g.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    g.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
    g.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
    g.D = Eigen::MatrixXd::Zero(1, 1);
    return g;
}
}  // namespace

TEST_CASE("validation catches dimension and label errors") {
    StateSpaceModel s = first_order_lag();
    s.validate();

    StateSpaceModel bad = s;
    bad.B = Eigen::MatrixXd::Zero(2, 1);
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = s;
    bad.domain = TimeDomain::discrete;
    CHECK_THROWS_AS(bad.validate(), ValidationError);  // dt missing

    bad = s;
    bad.input_labels = {"u", "u2"};
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    StateSpaceModel twoin = s;
    twoin.B = Eigen::MatrixXd::Ones(1, 2);
    twoin.D = Eigen::MatrixXd::Zero(1, 2);
    twoin.input_labels = {"u", "u"};
    CHECK_THROWS_AS(twoin.validate(), ValidationError);  // duplicate labels
}

TEST_CASE("frequency response of a first-order lag") {
    StateSpaceModel g = first_order_lag();
    CHECK(std::abs(g.freq_response(0.0)(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g.freq_response(1.0)(0, 0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(g.is_stable());
    CHECK(g.spectral_abscissa() == doctest::Approx(-1.0));
}

TEST_CASE("static gain systems") {
    auto s = StateSpaceModel::static_gain(Eigen::MatrixXd::Constant(2, 3, 1.5));
    s.validate();
    CHECK(s.order() == 0);
    CHECK(s.is_stable());
    CHECK(s.freq_response(10.0)(1, 2) == std::complex<double>(1.5, 0.0));
}

TEST_CASE("Tustin discretization") {
    SUBCASE("integrator pole maps to z = 1") {
        StateSpaceModel integ;
        integ.A = Eigen::MatrixXd::Zero(1, 1);
        integ.B = Eigen::MatrixXd::Ones(1, 1);
        integ.C = Eigen::MatrixXd::Ones(1, 1);
        integ.D = Eigen::MatrixXd::Zero(1, 1);
        auto d = discretize(integ, 0.01);
        CHECK(d.A(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.dt == 0.01);
        CHECK(d.domain == TimeDomain::discrete);
    }

    SUBCASE("DC gain preserved exactly") {
        auto d = discretize(first_order_lag(), 0.05);
        CHECK(std::abs(d.freq_response(0.0)(0, 0) - 1.0) < 1e-14);
    }

    SUBCASE("low-frequency response matches the continuous system") {
        const double dt = 0.001;
        auto g = first_order_lag();
        auto d = discretize(g, dt);
        const double w = 0.1 * (2.0 / dt);
        const auto gc = g.freq_response(w)(0, 0);
        const auto gd = d.freq_response(w)(0, 0);
        CHECK(std::abs(gd - gc) <= 0.01 * std::abs(gc));
    }

    SUBCASE("stable maps to stable") {
        std::mt19937 rng(11);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int k = 0; k < 50; ++k) {
            const int n = 1 + static_cast<int>(rng() % 5);
            Eigen::MatrixXd M(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) M(i, j) = dist(rng);
            StateSpaceModel s;
            s.A = M - (M.cwiseAbs().rowwise().sum().maxCoeff() + 0.1) *
                          Eigen::MatrixXd::Identity(n, n);
            s.B = Eigen::MatrixXd::Ones(n, 1);
            s.C = Eigen::MatrixXd::Ones(1, n);
            s.D = Eigen::MatrixXd::Zero(1, 1);
            REQUIRE(s.is_stable());
            auto d = discretize(s, 0.01);
            CHECK(d.poles().cwiseAbs().maxCoeff() < 1.0);
        }
    }

    SUBCASE("singular I - A dt/2 is reported") {
        StateSpaceModel s = first_order_lag();
        s.A(0, 0) = 200.0;  // pole exactly at 2/dt
        CHECK_THROWS_AS(discretize(s, 0.01), NumericalError);
    }
}
