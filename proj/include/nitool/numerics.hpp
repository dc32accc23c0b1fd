#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace nitool {

using Matrix        = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Vector        = Eigen::VectorXd;
using Complex       = std::complex<double>;

/// Thrown when a linear solve meets a matrix that is rank-deficient at the
/// configured tolerance scale.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown by spectral_max_real when the spectrum carries imaginary parts
/// beyond tolerance, i.e. the caller violated the real-spectrum contract.
struct ComplexSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an eigenvalue iteration fails to converge. Never silent.
struct EigenSolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tolerance bundle used by every sign test in the library, so that each
/// verdict is auditable against a single configuration.
///
/// hurwitz_margin is the maximum allowed real part: an eigenvalue counts as
/// stable iff Re(lambda) < hurwitz_margin, i.e. strictly negative beyond
/// roundoff with the (negative) default.
struct Tolerances {
    double eq_tol         = 1e-8;
    double psd_tol        = 1e-8;
    double hurwitz_margin = -1e-9;

    void validate() const {
        if (!(eq_tol > 0.0) || !(psd_tol > 0.0)) {
            throw std::invalid_argument("Tolerances: eq_tol and psd_tol must be strictly positive");
        }
        if (!(hurwitz_margin < 0.0)) {
            throw std::invalid_argument("Tolerances: hurwitz_margin must be strictly negative");
        }
    }
};

/// True iff every entry of m is finite (no NaN/Inf).
bool all_finite(const Matrix& m);
bool all_finite(const ComplexMatrix& m);

/// All n eigenvalues of a square real matrix, with multiplicity, sorted by
/// (Re, Im) so that results are reproducible.
std::vector<Complex> eigenvalues(const Matrix& m);

struct SymEigenResult {
    Vector values;   // ascending
    Matrix vectors;  // orthonormal columns
};

/// Eigendecomposition of a symmetric matrix. The input is symmetrized as
/// (m + m^T)/2 before decomposition; inputs asymmetric beyond asym_tol
/// (max-abs norm) are rejected.
SymEigenResult sym_eigen(const Matrix& m, double asym_tol = 1e-8);

/// Maximum real part of the spectrum of a matrix that the caller asserts has
/// real spectrum (e.g. a product of symmetric matrices one of which is PSD).
/// Verifies max |Im lambda_i| <= eq_tol * (1 + ||m||_F) and throws
/// ComplexSpectrumError otherwise.
double spectral_max_real(const Matrix& m, const Tolerances& tol = {});

/// Solves a x = b for square nonsingular a (partial-pivot LU plus one step of
/// iterative refinement). Throws SingularMatrixError when the reciprocal
/// condition estimate falls below rcond_floor.
Matrix solve_linear(const Matrix& a, const Matrix& b, double rcond_floor = 1e-8);

/// Nearest (Frobenius) positive-semidefinite matrix: clip negative
/// eigenvalues to zero and reassemble.
Matrix project_psd(const Matrix& m, double asym_tol = 1e-8);

/// Numerical rank: number of singular values exceeding tol * sigma_max.
Eigen::Index rank(const Matrix& m, double tol);

}  // namespace nitool
