#include "nitool/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nitool {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

bool all_finite(const ComplexMatrix& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

std::vector<Complex> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    if (m.rows() == 0) {
        return {};
    }
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverError("eigenvalues: QR iteration did not converge");
    }

    std::vector<Complex> out(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

SymEigenResult sym_eigen(const Matrix& m, double asym_tol) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("sym_eigen: matrix must be square");
    }
    if (m.rows() > 0) {
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (asym > asym_tol) {
            std::ostringstream msg;
            msg << "sym_eigen: input asymmetry " << asym << " exceeds tolerance " << asym_tol;
            throw std::invalid_argument(msg.str());
        }
    }
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverError("sym_eigen: eigensolver did not converge");
    }
    return SymEigenResult{solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_max_real(const Matrix& m, const Tolerances& tol) {
    tol.validate();
    const auto   eigs  = eigenvalues(m);
    const double scale = tol.eq_tol * (1.0 + m.norm());

    double max_imag = 0.0;
    double max_real = -std::numeric_limits<double>::infinity();
    for (const Complex& lambda : eigs) {
        max_imag = std::max(max_imag, std::abs(lambda.imag()));
        max_real = std::max(max_real, lambda.real());
    }
    if (max_imag > scale) {
        std::ostringstream msg;
        msg << "spectral_max_real: spectrum has imaginary parts up to " << max_imag
            << " (allowed " << scale << "); real-spectrum contract violated";
        throw ComplexSpectrumError(msg.str());
    }
    return max_real;
}

Matrix solve_linear(const Matrix& a, const Matrix& b, double rcond_floor) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("solve_linear: coefficient matrix must be square");
    }
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("solve_linear: dimension mismatch between a and b");
    }
    if (a.rows() == 0) {
        return b;
    }
    Eigen::PartialPivLU<Matrix> lu(a);
    const double                rcond = lu.rcond();
    if (!(rcond > rcond_floor)) {
        std::ostringstream msg;
        msg << "solve_linear: matrix rank-deficient at tolerance scale (rcond estimate "
            << rcond << ", floor " << rcond_floor << ")";
        throw SingularMatrixError(msg.str());
    }
    Matrix x = lu.solve(b);
    // one step of iterative refinement keeps the residual at roundoff scale
    x += lu.solve(b - a * x);
    return x;
}

Matrix project_psd(const Matrix& m, double asym_tol) {
    const SymEigenResult eig = sym_eigen(m, asym_tol);
    const Vector clipped     = eig.values.cwiseMax(0.0);
    Matrix p = eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
    return 0.5 * (p + p.transpose());
}

Eigen::Index rank(const Matrix& m, double tol) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector&            sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    const double threshold = tol * sv(0);
    Eigen::Index r         = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) ++r;
    }
    return r;
}

}  // namespace nitool
