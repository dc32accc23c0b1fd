#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nitool/models.hpp"
#include "nitool/state_space.hpp"
#include "test_support.hpp"

#include <random>

using namespace nitool;

namespace {

StateSpaceSystem first_order_lag(double gain = 1.0) {
    return StateSpaceSystem(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0),
                            Matrix::Constant(1, 1, gain), Matrix::Zero(1, 1), "lag");
}

}  // namespace

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(StateSpaceSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                                     Matrix::Zero(1, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(StateSpaceSystem(Matrix::Zero(2, 2), Matrix::Zero(1, 1), Matrix::Zero(1, 2),
                                     Matrix::Zero(1, 1)),
                    std::invalid_argument);
    Matrix bad = Matrix::Zero(1, 1);
    bad(0, 0)  = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(
        StateSpaceSystem(bad, Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1)),
        std::invalid_argument);
}

TEST_CASE("evaluate") {
    SUBCASE("p(s) = 1/(s^2+s+1) at s = 0 equals the direct polynomial value") {
        const auto sys = modal_to_state_space(ModalModel{{{1.0, 0.5, 1.0}}});
        CHECK(std::abs(evaluate(sys, Complex(0, 0))(0, 0) - Complex(1.0, 0.0)) < 1e-12);
    }
    SUBCASE("worked M(s) at s = 0") {
        const auto    m  = example_m();
        ComplexMatrix m0 = evaluate(m, Complex(0, 0));
        CHECK(std::abs(m0(0, 0) - Complex(2, 0)) < 1e-12);
        CHECK(std::abs(m0(0, 1) - Complex(-1, 0)) < 1e-12);
        CHECK(std::abs(m0(1, 1) - Complex(1, 0)) < 1e-12);
    }
    SUBCASE("evaluation at a pole throws") {
        const auto sys = first_order_lag();
        CHECK_THROWS_AS(evaluate(sys, Complex(-1.0, 0.0)), PoleError);
    }
    SUBCASE("conjugate symmetry of the real-rational response") {
        std::mt19937_64 eng(29);
        const auto      sys = test::random_stable_system(eng, 5, 2);
        for (double omega : {0.1, 1.0, 17.0}) {
            const ComplexMatrix plus  = evaluate(sys, Complex(0, omega));
            const ComplexMatrix minus = evaluate(sys, Complex(0, -omega));
            CHECK((minus - plus.conjugate()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("dc_gain and gain_at_infinity") {
    SUBCASE("two-mass uncertainty at k = 2 matches the congruence form") {
        const auto   plant = two_mass_plant(TwoMassParams{2.0, 1.0});
        const Matrix d0    = dc_gain(plant.uncertainty);
        Matrix       expected(2, 2);
        expected << 0.1, -0.1, -0.1, 0.1;  // Psi^-1 diag(1/10, 0) Psi^-T
        CHECK((d0 - expected).norm() < 1e-12);
    }
    SUBCASE("modal model DC gain is the sum of mode gains") {
        const auto sys = modal_to_state_space(ModalModel{{{2.0, 0.1, 1.0}, {3.0, 0.2, 5.0}}});
        CHECK(dc_gain(sys)(0, 0) == doctest::Approx(5.0).epsilon(1e-10));
    }
    SUBCASE("static system returns D") {
        Matrix d(2, 2);
        d << 1, 2, 2, 1;
        const auto sys = StateSpaceSystem::static_gain(d);
        CHECK((dc_gain(sys) - d).norm() == 0.0);
        CHECK((gain_at_infinity(sys) - d).norm() == 0.0);
    }
    SUBCASE("strictly proper system has zero gain at infinity") {
        CHECK(gain_at_infinity(first_order_lag()).norm() == 0.0);
        CHECK(gain_at_infinity(example_m()).norm() == 0.0);
    }
    SUBCASE("dc_gain equals evaluate at zero") {
        std::mt19937_64 eng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const auto          sys = test::random_stable_system(eng, 4, 2);
            const ComplexMatrix at0 = evaluate(sys, Complex(0, 0));
            CHECK((at0.real() - dc_gain(sys)).norm() < 1e-10);
            CHECK(at0.imag().norm() < 1e-12);
        }
    }
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(first_order_lag()).hurwitz);
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const StateSpaceSystem marginal(rot, Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1));
    CHECK_FALSE(is_hurwitz(marginal).hurwitz);
    CHECK(is_hurwitz(marginal).max_real_part == doctest::Approx(0.0).epsilon(1e-12));

    // damped two-mass physical plant: roots of s^2+s+1 and s^2+(2a+1)s+(2k+1)
    const auto plant = two_mass_plant(TwoMassParams{0.3, 0.2});
    CHECK(is_hurwitz(plant.full).hurwitz);
}

TEST_CASE("is_minimal") {
    SUBCASE("first-order canonical lag is minimal") {
        CHECK(is_minimal(first_order_lag()));
    }
    SUBCASE("duplicated pole with dead second state is not") {
        Matrix a(2, 2);
        a << -1, 0, 0, -1;
        Matrix b(2, 1);
        b << 1, 0;
        Matrix c(1, 2);
        c << 1, 0;
        CHECK_FALSE(is_minimal(StateSpaceSystem(a, b, c, Matrix::Zero(1, 1))));
    }
    SUBCASE("two-mass 4-state physical plant is minimal") {
        const auto plant = two_mass_plant(TwoMassParams{2.0, 1.0});
        CHECK(plant.full.order() == 4);
        CHECK(is_minimal(plant.full));
    }
}

TEST_CASE("add") {
    SUBCASE("adding the zero system preserves the transfer function") {
        const auto sys = first_order_lag(3.0);
        const auto sum = add(sys, StateSpaceSystem::zero_system(1));
        for (double omega : {0.0, 0.5, 2.0}) {
            CHECK(std::abs(evaluate(sum, Complex(0, omega)) (0, 0) -
                           evaluate(sys, Complex(0, omega))(0, 0)) < 1e-12);
        }
    }
    SUBCASE("two scalar modes add pointwise at s = j") {
        const auto p_half = modal_to_state_space(ModalModel{{{0.5, 0.5, 1.0}}});
        const auto d_half = modal_to_state_space(ModalModel{{{0.5, 1.5, std::sqrt(5.0)}}});
        const auto sum    = add(p_half, d_half);
        const Complex s(0, 1);
        CHECK(std::abs(evaluate(sum, s)(0, 0) -
                       (evaluate(p_half, s)(0, 0) + evaluate(d_half, s)(0, 0))) < 1e-12);
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(add(first_order_lag(), StateSpaceSystem::zero_system(2)),
                        std::invalid_argument);
    }
    SUBCASE("frequency response is additive for random stable systems") {
        std::mt19937_64 eng(37);
        for (int trial = 0; trial < 5; ++trial) {
            const auto s1  = test::random_stable_system(eng, 4, 2);
            const auto s2  = test::random_stable_system(eng, 3, 2);
            const auto sum = add(s1, s2);
            std::uniform_real_distribution<double> uw(0.01, 50.0);
            for (int i = 0; i < 50; ++i) {
                const Complex s(0, uw(eng));
                CHECK((evaluate(sum, s) - evaluate(s1, s) - evaluate(s2, s)).cwiseAbs().maxCoeff() <
                      1e-9);
            }
        }
    }
}

TEST_CASE("close_positive_feedback") {
    SUBCASE("zero second operand keeps the first operand's poles and unit transfer") {
        std::mt19937_64 eng(41);
        const auto      m      = test::random_stable_system(eng, 4, 2);
        const auto      closed = close_positive_feedback(m, StateSpaceSystem::zero_system(2));
        const auto      before = eigenvalues(m.a);
        const auto      after  = eigenvalues(closed.a);
        REQUIRE(after.size() == before.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(std::abs(after[i] - before[i]) < 1e-9);
        }
        const ComplexMatrix r = evaluate(closed, Complex(0, 1.3));
        CHECK((r - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matched SISO lags give the hand-computed closed-loop poles") {
        const auto half_lag = first_order_lag(0.5);
        const auto closed   = close_positive_feedback(half_lag, half_lag);
        const auto poles    = eigenvalues(closed.a);
        REQUIRE(poles.size() == 2);
        // roots of (s+1)^2 - 0.25
        CHECK(poles[0].real() == doctest::Approx(-1.5));
        CHECK(poles[1].real() == doctest::Approx(-0.5));
    }
    SUBCASE("worked pair at k = 2 is closed-loop stable") {
        const auto plant  = two_mass_plant(TwoMassParams{2.0, 1.0});
        const auto closed = close_positive_feedback(plant.uncertainty, example_m());
        for (const Complex& lambda : eigenvalues(closed.a)) {
            CHECK(lambda.real() < 0.0);
        }
    }
    SUBCASE("algebraic loop throws IllPosed") {
        const auto unit = StateSpaceSystem::static_gain(Matrix::Identity(1, 1));
        CHECK_THROWS_AS(close_positive_feedback(unit, unit), IllPosedError);
    }
}
