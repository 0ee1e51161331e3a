#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "evdrive/motor.hpp"

using namespace evdrive;

namespace {
MotorParams default_motor() {
    return {0.05, 1e-3, 1e-3, 0.1, 4, 0.01, 1e-3};
}
}  // namespace

TEST_CASE("electrical torque") {
    MotorParams mp = default_motor();
    CHECK(electrical_torque({0.0, 10.0, 0.0}, mp) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(electrical_torque({0.0, 0.0, 50.0}, mp) == 0.0);

    // full two-term formula, hand evaluated
    MotorParams salient = mp;
    salient.L_d = 1.1e-3;
    salient.L_q = 1.0e-3;
    CHECK(electrical_torque({5.0, 10.0, 0.0}, salient) == doctest::Approx(6.03).epsilon(1e-12));
}

TEST_CASE("torque is linear in i_q and independent of i_d for L_d == L_q") {
    MotorParams mp = default_motor();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int k = 0; k < 100; ++k) {
        const double iq = dist(rng), id1 = dist(rng), id2 = dist(rng);
        CHECK(electrical_torque({id1, iq, 0.0}, mp) ==
              doctest::Approx(electrical_torque({id2, iq, 0.0}, mp)).epsilon(1e-14));
        CHECK(electrical_torque({id1, 2.0 * iq, 0.0}, mp) ==
              doctest::Approx(2.0 * electrical_torque({id1, iq, 0.0}, mp)).epsilon(1e-14));
    }
}

TEST_CASE("frame conversions") {
    MotorParams mp = default_motor();

    SUBCASE("zero speed is the identity") {
        VoltagePair v{3.0, -2.0, VoltageFrame::stator};
        auto aux = auxiliary_from_stator(v, {5.0, -4.0, 0.0}, mp);
        CHECK(aux.v_d == 3.0);
        CHECK(aux.v_q == -2.0);
        CHECK(aux.frame == VoltageFrame::auxiliary);
    }

    SUBCASE("hand-evaluated case") {
        MotorState s{0.0, 10.0, 100.0};
        auto aux = auxiliary_from_stator({0.0, 0.0, VoltageFrame::stator}, s, mp);
        CHECK(aux.v_d == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(aux.v_q == doctest::Approx(-40.0).epsilon(1e-12));
        auto back = stator_from_auxiliary(aux, s, mp);
        CHECK(back.v_d == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(back.v_q == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }

    SUBCASE("round trip on randomized inputs") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> dist(-200.0, 200.0);
        for (int k = 0; k < 500; ++k) {
            VoltagePair v{dist(rng), dist(rng), VoltageFrame::stator};
            MotorState s{dist(rng), dist(rng), dist(rng)};
            auto back = stator_from_auxiliary(auxiliary_from_stator(v, s, mp), s, mp);
            const double scale = std::abs(v.v_d) + std::abs(v.v_q) + 1.0;
            CHECK(std::abs(back.v_d - v.v_d) <= 1e-12 * scale);
            CHECK(std::abs(back.v_q - v.v_q) <= 1e-12 * scale);
            CHECK(back.frame == VoltageFrame::stator);
        }
    }

    SUBCASE("wrong frame tag is rejected") {
        VoltagePair aux{0.0, 0.0, VoltageFrame::auxiliary};
        CHECK_THROWS_AS(auxiliary_from_stator(aux, {}, mp), ValidationError);
        VoltagePair st{0.0, 0.0, VoltageFrame::stator};
        CHECK_THROWS_AS(stator_from_auxiliary(st, {}, mp), ValidationError);
    }
}

TEST_CASE("state derivative") {
    MotorParams mp = default_motor();

    SUBCASE("equilibrium is a fixed point") {
        MotorState s{2.0, 10.0, 300.0};
        VoltagePair v{mp.R_s * s.i_d, mp.R_s * s.i_q, VoltageFrame::auxiliary};
        const double tau_l = 1.5 * mp.p * mp.Phi_F * s.i_q - mp.B_f * s.omega_m;
        auto d = state_derivative(s, v, tau_l, mp);
        CHECK(std::abs(d.i_d) < 1e-12);
        CHECK(std::abs(d.i_q) < 1e-12);
        CHECK(std::abs(d.omega_m) < 1e-12);
    }

    SUBCASE("pure load torque decelerates the shaft") {
        auto d = state_derivative({}, {0.0, 0.0, VoltageFrame::auxiliary}, 1.0, mp);
        CHECK(d.omega_m == doctest::Approx(-100.0).epsilon(1e-12));
        CHECK(d.i_d == 0.0);
        CHECK(d.i_q == 0.0);
    }

    SUBCASE("steady-state q current balances the load") {
        // algebraic solve of d omega/dt = 0 as oracle
        MotorParams tiny_friction = mp;
        tiny_friction.B_f = 1e-12;
        const double tau_l = 6.0;
        const double iq = (tau_l + tiny_friction.B_f * 200.0) / (1.5 * mp.p * mp.Phi_F);
        CHECK(iq == doctest::Approx(10.0).epsilon(1e-9));
        auto d = state_derivative({0.0, iq, 200.0}, {0.0, 0.0, VoltageFrame::auxiliary}, tau_l,
                                  tiny_friction);
        CHECK(std::abs(d.omega_m) < 1e-9);
    }
}

TEST_CASE("linearized model") {
    MotorParams mp = default_motor();
    StateSpaceModel sys = linearize(mp);
    sys.validate();
    REQUIRE(sys.order() == 3);
    REQUIRE(sys.inputs() == 3);

    SUBCASE("matches state_derivative on randomized points") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(-100.0, 100.0);
        for (int k = 0; k < 1000; ++k) {
            Eigen::Vector3d x(dist(rng), dist(rng), dist(rng));
            Eigen::Vector3d u(dist(rng), dist(rng), dist(rng));
            Eigen::Vector3d dx = sys.A * x + sys.B * u;
            auto d = state_derivative({x(0), x(1), x(2)},
                                      {u(0), u(1), VoltageFrame::auxiliary}, u(2), mp);
            const double scale = dx.cwiseAbs().maxCoeff() + 1.0;
            CHECK(std::abs(dx(0) - d.i_d) <= 1e-13 * scale);
            CHECK(std::abs(dx(1) - d.i_q) <= 1e-13 * scale);
            CHECK(std::abs(dx(2) - d.omega_m) <= 1e-13 * scale);
        }
    }

    SUBCASE("eigenvalues match the characteristic polynomial by hand") {
        // block-triangular A: {-R_s/L_d} and the lower-triangular i_q/omega block
        Eigen::VectorXcd ev = sys.A.eigenvalues();
        std::vector<double> got{ev(0).real(), ev(1).real(), ev(2).real()};
        std::sort(got.begin(), got.end());
        std::vector<double> want{-mp.R_s / mp.L_d, -mp.R_s / mp.L_q, -mp.B_f / mp.J};
        std::sort(want.begin(), want.end());
        for (int i = 0; i < 3; ++i) {
            CHECK(ev(i).imag() == 0.0);
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
        }
        CHECK(sys.A.eigenvalues().real().maxCoeff() < 0.0);
    }

    SUBCASE("load torque column reads off the inertial equation") {
        CHECK(sys.B(0, 2) == 0.0);
        CHECK(sys.B(1, 2) == 0.0);
        CHECK(sys.B(2, 2) == doctest::Approx(-1.0 / mp.J).epsilon(1e-14));
    }

    SUBCASE("non-surface-mount parameters are rejected") {
        MotorParams salient = mp;
        salient.L_d = 1.2e-3;
        CHECK_THROWS_AS(linearize(salient), ValidationError);
    }
}

TEST_CASE("parameter validation") {
    MotorParams mp = default_motor();
    mp.J = 0.0;
    CHECK_THROWS_AS(mp.validate(), ValidationError);
    mp = default_motor();
    mp.p = 0;
    CHECK_THROWS_AS(mp.validate(), ValidationError);
}
