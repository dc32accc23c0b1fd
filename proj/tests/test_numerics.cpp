#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nitool/models.hpp"
#include "nitool/numerics.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace nitool;

TEST_CASE("eigenvalues of small matrices") {
    SUBCASE("rotation matrix has +-i") {
        Matrix m(2, 2);
        m << 0, 1, -1, 0;
        const auto eigs = eigenvalues(m);
        REQUIRE(eigs.size() == 2);
        CHECK(eigs[0].real() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(eigs[0].imag() == doctest::Approx(-1.0));
        CHECK(eigs[1].imag() == doctest::Approx(1.0));
    }
    SUBCASE("diagonal matrix") {
        Matrix m(2, 2);
        m << -1, 0, 0, -2;
        const auto eigs = eigenvalues(m);
        CHECK(eigs[0].real() == doctest::Approx(-2.0));
        CHECK(eigs[1].real() == doctest::Approx(-1.0));
    }
    SUBCASE("companion matrix of s^2 + s + 1") {
        Matrix m(2, 2);
        m << 0, 1, -1, -1;
        // quadratic formula: (-1 +- i sqrt(3)) / 2
        const auto eigs = eigenvalues(m);
        CHECK(eigs[0].real() == doctest::Approx(-0.5));
        CHECK(std::abs(eigs[0].imag()) == doctest::Approx(std::sqrt(3.0) / 2.0));
        CHECK(std::abs(eigs[1].imag()) == doctest::Approx(std::sqrt(3.0) / 2.0));
    }
    SUBCASE("non-square input throws") {
        CHECK_THROWS_AS(eigenvalues(Matrix::Zero(2, 3)), std::invalid_argument);
    }
    SUBCASE("sorted by (Re, Im) and transpose-invariant as a multiset") {
        std::mt19937_64 eng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix m  = test::random_matrix(eng, 8, 8);
            const auto   e1 = eigenvalues(m);
            const auto   e2 = eigenvalues(Matrix(m.transpose()));
            REQUIRE(e1.size() == e2.size());
            for (std::size_t i = 0; i < e1.size(); ++i) {
                CHECK(std::abs(e1[i] - e2[i]) < 1e-9 * (1.0 + m.norm()));
            }
        }
    }
}

TEST_CASE("sym_eigen") {
    SUBCASE("the worked 2x2 DC gain matrix") {
        Matrix m(2, 2);
        m << 2, -1, -1, 1;
        const auto   eig  = sym_eigen(m);
        const double root = std::sqrt(5.0);
        CHECK(eig.values(0) == doctest::Approx((3.0 - root) / 2.0));
        CHECK(eig.values(1) == doctest::Approx((3.0 + root) / 2.0));
    }
    SUBCASE("identity") {
        const auto eig = sym_eigen(Matrix::Identity(3, 3));
        CHECK(eig.values.minCoeff() == doctest::Approx(1.0));
        CHECK(eig.values.maxCoeff() == doctest::Approx(1.0));
        CHECK((eig.vectors * eig.vectors.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
    }
    SUBCASE("zero matrix") {
        const auto eig = sym_eigen(Matrix::Zero(2, 2));
        CHECK(eig.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("asymmetric input rejected") {
        Matrix m(2, 2);
        m << 0, 1, 0, 0;
        CHECK_THROWS_AS(sym_eigen(m), std::invalid_argument);
    }
    SUBCASE("reconstruction residual") {
        std::mt19937_64 eng(7);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix m = test::random_matrix(eng, 6, 6);
            m        = Matrix(0.5 * (m + m.transpose()).eval());
            const auto   eig           = sym_eigen(m);
            const Matrix reconstructed = eig.vectors.transpose() * m * eig.vectors;
            CHECK((reconstructed - Matrix(eig.values.asDiagonal())).norm() <=
                  1e-9 * (1.0 + m.norm()));
            CHECK((eig.vectors.transpose() * eig.vectors - Matrix::Identity(6, 6)).norm() < 1e-12);
        }
    }
}

TEST_CASE("spectral_max_real") {
    SUBCASE("worked DC loop gain at k = 2") {
        const auto   plant = two_mass_plant(TwoMassParams{2.0, 1.0});
        const Matrix d0    = dc_gain(plant.uncertainty);
        const Matrix m0    = dc_gain(example_m());
        CHECK(spectral_max_real(Matrix(d0 * m0)) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("identity") {
        CHECK(spectral_max_real(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
    }
    SUBCASE("nilpotent") {
        Matrix m(2, 2);
        m << 0, 1, 0, 0;
        CHECK(spectral_max_real(m) == doctest::Approx(0.0));
    }
    SUBCASE("rotation matrix violates the real-spectrum contract") {
        Matrix m(2, 2);
        m << 0, 1, -1, 0;
        CHECK_THROWS_AS(spectral_max_real(m), ComplexSpectrumError);
    }
}

TEST_CASE("solve_linear") {
    SUBCASE("identity coefficient returns rhs") {
        std::mt19937_64 eng(3);
        const Matrix    b = test::random_matrix(eng, 3, 2);
        CHECK((solve_linear(Matrix::Identity(3, 3), b) - b).norm() < 1e-14);
    }
    SUBCASE("diagonal system") {
        Matrix a(2, 2);
        a << 2, 0, 0, 4;
        Matrix b(2, 1);
        b << 1, 1;
        const Matrix x = solve_linear(a, b);
        CHECK(x(0, 0) == doctest::Approx(0.5));
        CHECK(x(1, 0) == doctest::Approx(0.25));
    }
    SUBCASE("two-mass nominal plant DC gain through the solve") {
        const auto   plant = two_mass_plant(TwoMassParams{1.0, 1.0});
        const Matrix p0 =
            plant.nominal.d - plant.nominal.c * solve_linear(plant.nominal.a, plant.nominal.b);
        Matrix expected(2, 2);
        expected << 0.5, 0.5, 0.5, 0.5;  // p(0)/2 * [1 1;1 1]
        CHECK((p0 - expected).norm() < 1e-12);
    }
    SUBCASE("singular matrix throws") {
        Matrix a(2, 2);
        a << 1, 2, 2, 4;
        CHECK_THROWS_AS(solve_linear(a, Matrix::Identity(2, 2)), SingularMatrixError);
    }
    SUBCASE("multiply-back residual on random well-conditioned systems") {
        std::mt19937_64 eng(5);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix a = test::random_matrix(eng, 6, 6);
            a += 6.0 * Matrix::Identity(6, 6);
            const Matrix b = test::random_matrix(eng, 6, 3);
            const Matrix x = solve_linear(a, b);
            CHECK((a * x - b).norm() <= 1e-9 * (1.0 + b.norm()));
        }
    }
}

TEST_CASE("project_psd") {
    SUBCASE("clips the negative eigenvalue") {
        Matrix m(2, 2);
        m << 1, 0, 0, -1;
        Matrix expected(2, 2);
        expected << 1, 0, 0, 0;
        CHECK((project_psd(m) - expected).norm() < 1e-14);
    }
    SUBCASE("PSD input is a fixed point") {
        Matrix m(2, 2);
        m << 2, 1, 1, 2;
        CHECK((project_psd(m) - m).norm() < 1e-12);
    }
    SUBCASE("symmetric indefinite example") {
        Matrix m(2, 2);
        m << 0, 1, 1, 0;
        Matrix expected(2, 2);
        expected << 0.5, 0.5, 0.5, 0.5;
        CHECK((project_psd(m) - expected).norm() < 1e-12);
    }
    SUBCASE("idempotent with nonnegative spectrum") {
        std::mt19937_64 eng(13);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix m = test::random_matrix(eng, 5, 5);
            m        = Matrix(0.5 * (m + m.transpose()).eval());
            const Matrix p = project_psd(m);
            CHECK((project_psd(p) - p).norm() <= 1e-10 * (1.0 + p.norm()));
            CHECK(sym_eigen(p).values.minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("rank") {
    CHECK(rank(Matrix::Identity(3, 3), 1e-10) == 3);
    CHECK(rank(Matrix::Zero(3, 3), 1e-10) == 0);
    Matrix outer(2, 2);
    outer << 1, 2, 2, 4;
    CHECK(rank(outer, 1e-10) == 1);
}

TEST_CASE("tolerances validate") {
    Tolerances tol;
    CHECK_NOTHROW(tol.validate());
    tol.eq_tol = 0.0;
    CHECK_THROWS_AS(tol.validate(), std::invalid_argument);
    tol                = Tolerances{};
    tol.hurwitz_margin = 1e-9;
    CHECK_THROWS_AS(tol.validate(), std::invalid_argument);
}
