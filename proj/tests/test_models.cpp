#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nitool/models.hpp"
#include "nitool/stability.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace nitool;

namespace {

SweepConfig light_sweep() {
    SweepConfig cfg;
    cfg.points = 250;
    return cfg;
}

StabilityConfig light_cfg() {
    StabilityConfig cfg;
    cfg.sweep.points = 250;
    return cfg;
}

Complex scalar_mode(double k, double zeta, double wn, Complex s) {
    return k * wn * wn / (s * s + 2.0 * zeta * wn * s + wn * wn);
}

}  // namespace

TEST_CASE("modal_to_state_space") {
    SUBCASE("single mode (1, 0.5, 1) realizes p(s) = 1/(s^2+s+1)") {
        const auto sys = modal_to_state_space(ModalModel{{{1.0, 0.5, 1.0}}});
        for (double omega : {0.0, 0.3, 1.0, 4.0}) {
            const Complex s(0, omega);
            CHECK(std::abs(evaluate(sys, s)(0, 0) - 1.0 / (s * s + s + 1.0)) < 1e-12);
        }
    }
    SUBCASE("DC gain is the sum of the mode gains") {
        const auto sys = modal_to_state_space(ModalModel{{{2.0, 0.1, 1.0}, {3.0, 0.2, 5.0}}});
        CHECK(dc_gain(sys)(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("empty mode list gives the zero system") {
        const auto sys = modal_to_state_space(ModalModel{});
        CHECK(sys.order() == 0);
        CHECK(std::abs(evaluate(sys, Complex(0, 3.0))(0, 0)) == 0.0);
    }
    SUBCASE("invariant violations throw") {
        CHECK_THROWS_AS(modal_to_state_space(ModalModel{{{0.0, 0.5, 1.0}}}), std::invalid_argument);
        CHECK_THROWS_AS(modal_to_state_space(ModalModel{{{1.0, -0.1, 1.0}}}), std::invalid_argument);
        CHECK_THROWS_AS(modal_to_state_space(ModalModel{{{1.0, 0.5, 0.0}}}), std::invalid_argument);
    }
    SUBCASE("transfer equals the mode sum at random frequencies") {
        std::mt19937_64                        eng(123);
        std::uniform_real_distribution<double> uw(0.05, 30.0);
        const ModalModel model{{{2.0, 0.1, 1.0}, {0.7, 0.3, 3.0}, {1.2, 0.05, 9.0}}};
        const auto       sys = modal_to_state_space(model);
        for (int i = 0; i < 30; ++i) {
            const Complex s(0, uw(eng));
            Complex       expected = 0.0;
            for (const Mode& mode : model.modes) {
                expected += scalar_mode(mode.gain, mode.damping, mode.natural_frequency, s);
            }
            CHECK(std::abs(evaluate(sys, s)(0, 0) - expected) < 1e-10);
        }
    }
}

TEST_CASE("two_mass_plant") {
    SUBCASE("nominal DC gain") {
        const auto plant = two_mass_plant(TwoMassParams{1.0, 1.0});
        Matrix     expected(2, 2);
        expected << 0.5, 0.5, 0.5, 0.5;
        CHECK((dc_gain(plant.nominal) - expected).norm() < 1e-12);
    }
    SUBCASE("uncertainty DC gain at k = 2") {
        const auto plant = two_mass_plant(TwoMassParams{2.0, 1.0});
        Matrix     expected(2, 2);
        expected << 0.1, -0.1, -0.1, 0.1;
        CHECK((dc_gain(plant.uncertainty) - expected).norm() < 1e-12);
    }
    SUBCASE("off-diagonal entry matches the hand-derived symbolic formula") {
        const double  k = 1.0, alpha = 1.0;
        const auto    plant = two_mass_plant(TwoMassParams{k, alpha});
        const Complex s(0, 1);
        const Complex p     = 1.0 / (s * s + s + 1.0);
        const Complex delta = 1.0 / (s * s + (2.0 * alpha + 1.0) * s + (2.0 * k + 1.0));
        const Complex expected = p * delta * (alpha * s + k);
        CHECK(std::abs(evaluate(plant.full, s)(0, 1) - expected) < 1e-12);
    }
    SUBCASE("decomposition P_Delta = P + Delta across the sweep") {
        std::mt19937_64                        eng(321);
        std::uniform_real_distribution<double> uk(0.05, 20.0), ua(0.05, 20.0);
        SweepConfig cfg;
        cfg.points = 40;
        for (int draw = 0; draw < 20; ++draw) {
            const auto plant = two_mass_plant(TwoMassParams{uk(eng), ua(eng)});
            for (const double omega : sweep_grid(cfg)) {
                const Complex       s(0, omega);
                const ComplexMatrix sum =
                    evaluate(plant.nominal, s) + evaluate(plant.uncertainty, s);
                CHECK((evaluate(plant.full, s) - sum).norm() <= 1e-9);
            }
        }
    }
    SUBCASE("uncertainty classifies Ni for random positive parameters") {
        std::mt19937_64                        eng(654);
        std::uniform_real_distribution<double> uk(0.05, 20.0), ua(0.05, 20.0);
        for (int draw = 0; draw < 10; ++draw) {
            const auto plant = two_mass_plant(TwoMassParams{uk(eng), ua(eng)});
            const auto v     = classify(plant.uncertainty, light_sweep());
            CHECK(v.class_tag == NiClass::Ni);
        }
    }
    SUBCASE("invariants enforced") {
        CHECK_THROWS_AS(two_mass_plant(TwoMassParams{0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(two_mass_plant(TwoMassParams{1.0, -0.5}), std::invalid_argument);
    }
}

TEST_CASE("example_controller") {
    const auto c = example_controller();

    SUBCASE("C(0) = Psi^-T diag(-2/3, -1) Psi^-1") {
        Matrix psi_inv(2, 2);
        psi_inv << 1, 0, -1, 1;
        Matrix diag0(2, 2);
        diag0 << -2.0 / 3.0, 0, 0, -1;
        const Matrix expected = psi_inv.transpose() * diag0 * psi_inv;
        CHECK((dc_gain(c) - expected).norm() < 1e-12);
    }
    SUBCASE("strictly proper") {
        CHECK(gain_at_infinity(c).norm() == 0.0);
    }
    SUBCASE("stable") {
        CHECK(is_hurwitz(c).hurwitz);
    }
}

TEST_CASE("closed-loop M") {
    const auto plant = two_mass_plant(TwoMassParams{2.0, 1.0});
    const auto m_raw = closed_loop_m(plant.nominal, example_controller());
    const auto m     = example_m();

    SUBCASE("M(0) and the maximum eigenvalue") {
        Matrix expected(2, 2);
        expected << 2, -1, -1, 1;
        CHECK((dc_gain(m_raw) - expected).norm() < 1e-10);
        CHECK(sym_eigen(dc_gain(m)).values.maxCoeff() ==
              doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    }
    SUBCASE("M(inf) = 0") {
        CHECK(gain_at_infinity(m_raw).norm() == 0.0);
        CHECK(gain_at_infinity(m).norm() == 0.0);
    }
    SUBCASE("raw interconnection matches the closed form across frequencies") {
        SweepConfig cfg;
        cfg.points = 50;
        double max_dev = 0.0;
        for (const double omega : sweep_grid(cfg)) {
            const Complex s(0, omega);
            max_dev = std::max(max_dev,
                               (evaluate(m_raw, s) - evaluate(m, s)).cwiseAbs().maxCoeff());
        }
        CHECK(max_dev <= 1e-8);
    }
    SUBCASE("raw interconnection is non-minimal by construction, reduced form is minimal") {
        CHECK(m_raw.order() == 6);
        CHECK_FALSE(is_minimal(m_raw));
        CHECK(is_minimal(m));
    }
    SUBCASE("the reduced form classifies strictly negative imaginary") {
        const auto v = classify(m, light_sweep());
        CHECK(v.class_tag == NiClass::StrictNi);
    }
    SUBCASE("ill-posed plant/controller pairing throws") {
        const auto p = StateSpaceSystem::static_gain(Matrix::Identity(1, 1));
        const auto c = StateSpaceSystem::static_gain(-Matrix::Identity(1, 1));
        CHECK_THROWS_AS(closed_loop_m(p, c), IllPosedError);
    }
}

TEST_CASE("random modal models classify Ni or StrictNi") {
    // mode frequencies within a decade, light damping: the physical regime
    std::mt19937_64 eng_outer(0);
    int             strict_count = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64                        eng(1234 + seed);
        std::uniform_real_distribution<double> uk(0.2, 5.0), uz(0.02, 0.3), uw(0.5, 5.0);
        ModalModel                             model;
        const int n_modes = 1 + static_cast<int>(eng() % 6);
        for (int i = 0; i < n_modes; ++i) {
            model.modes.push_back(Mode{uk(eng), uz(eng), uw(eng)});
        }
        const auto v = classify(modal_to_state_space(model), light_sweep());
        CHECK(v.at_least_ni());
        if (v.class_tag == NiClass::StrictNi) ++strict_count;
    }
    CHECK(strict_count > 0);
    (void)eng_outer;
}

TEST_CASE("stability boundary at k = 0.75, insensitive to the damping") {
    const auto m = example_m();
    for (const double alpha : {0.1, 1.0, 10.0}) {
        const auto below = theorem_stability_test(
            two_mass_plant(TwoMassParams{0.74, alpha}).uncertainty, m, light_cfg());
        const auto above = theorem_stability_test(
            two_mass_plant(TwoMassParams{0.76, alpha}).uncertainty, m, light_cfg());
        CHECK(below.theorem_verdict == TheoremVerdict::Unstable);
        CHECK(above.theorem_verdict == TheoremVerdict::Stable);
        CHECK(below.agreement.value());
        CHECK(above.agreement.value());
    }
}
