#include "nitool/state_space.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace nitool {

StateSpaceSystem::StateSpaceSystem(Matrix a_in, Matrix b_in, Matrix c_in, Matrix d_in,
                                   std::string label)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)), d(std::move(d_in)),
      name(std::move(label)) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("StateSpaceSystem: A must be square");
    }
    const Eigen::Index n = a.rows();
    if (b.rows() != n) {
        throw std::invalid_argument("StateSpaceSystem: B must have as many rows as A");
    }
    if (c.cols() != n) {
        throw std::invalid_argument("StateSpaceSystem: C must have as many columns as A");
    }
    if (d.rows() != c.rows() || d.cols() != b.cols()) {
        throw std::invalid_argument("StateSpaceSystem: D must be (rows of C) x (cols of B)");
    }
    if (!all_finite(a) || !all_finite(b) || !all_finite(c) || !all_finite(d)) {
        throw std::invalid_argument("StateSpaceSystem: matrices must be finite");
    }
}

StateSpaceSystem StateSpaceSystem::static_gain(Matrix d_in, std::string label) {
    const Eigen::Index p = d_in.rows();
    const Eigen::Index m = d_in.cols();
    return StateSpaceSystem(Matrix::Zero(0, 0), Matrix::Zero(0, m), Matrix::Zero(p, 0),
                            std::move(d_in), std::move(label));
}

StateSpaceSystem StateSpaceSystem::zero_system(Eigen::Index io_dim, std::string label) {
    return static_gain(Matrix::Zero(io_dim, io_dim), std::move(label));
}

ComplexMatrix evaluate(const StateSpaceSystem& sys, Complex s) {
    if (sys.order() == 0) {
        return sys.d.cast<Complex>();
    }
    const Eigen::Index n = sys.order();
    ComplexMatrix      resolvent_arg = -sys.a.cast<Complex>();
    resolvent_arg.diagonal().array() += s;

    Eigen::PartialPivLU<ComplexMatrix> lu(resolvent_arg);
    if (!(lu.rcond() > 1e-14)) {
        std::ostringstream msg;
        msg << "evaluate: s = " << s << " is a pole of '" << sys.name << "' at tolerance";
        throw PoleError(msg.str());
    }
    const ComplexMatrix x = lu.solve(sys.b.cast<Complex>());
    return sys.d.cast<Complex>() + sys.c.cast<Complex>() * x;
}

Matrix dc_gain(const StateSpaceSystem& sys) {
    if (sys.order() == 0) {
        return sys.d;
    }
    return sys.d - sys.c * solve_linear(sys.a, sys.b);
}

Matrix gain_at_infinity(const StateSpaceSystem& sys) {
    return sys.d;
}

HurwitzResult is_hurwitz(const StateSpaceSystem& sys, double margin) {
    if (sys.order() == 0) {
        return HurwitzResult{true, -std::numeric_limits<double>::infinity()};
    }
    double max_real = -std::numeric_limits<double>::infinity();
    for (const Complex& lambda : eigenvalues(sys.a)) {
        max_real = std::max(max_real, lambda.real());
    }
    return HurwitzResult{max_real < margin, max_real};
}

namespace {

// Hautus test: (A, B) is controllable iff [lambda I - A, B] has full row rank
// at every eigenvalue of A. Far better conditioned than the Kalman matrix,
// whose Krylov columns collapse numerically beyond order ten or so.
bool hautus_full_rank(const Matrix& a, const Matrix& b, double rank_tol) {
    const Eigen::Index n = a.rows();
    ComplexMatrix      pencil(n, n + b.cols());
    pencil.rightCols(b.cols()) = b.cast<Complex>();
    for (const Complex& lambda : eigenvalues(a)) {
        pencil.leftCols(n) = -a.cast<Complex>();
        pencil.leftCols(n).diagonal().array() += lambda;
        Eigen::JacobiSVD<ComplexMatrix> svd(pencil);
        const Vector&                   sv = svd.singularValues();
        if (sv(sv.size() - 1) <= rank_tol * sv(0)) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool is_minimal(const StateSpaceSystem& sys, double rank_tol) {
    const Eigen::Index n = sys.order();
    if (n == 0) {
        return true;
    }
    const Eigen::Index m = sys.inputs();
    const Eigen::Index p = sys.outputs();

    // Kalman rank tests as the fast path; each power block is normalized
    // before assembly (positive block scaling preserves rank but keeps the
    // singular values on one scale)
    Matrix ctrb(n, n * m);
    Matrix block = sys.b;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double scale        = std::max(1e-300, block.norm());
        ctrb.middleCols(k * m, m) = block / scale;
        block                     = sys.a * block;
    }
    bool controllable = rank(ctrb, rank_tol) == n;
    if (!controllable) {
        // the Kalman matrix is often numerically rank-deficient for minimal
        // higher-order systems; the Hautus pencil arbitrates
        controllable = hautus_full_rank(sys.a, sys.b, rank_tol);
    }
    if (!controllable) {
        return false;
    }

    Matrix obsv(n * p, n);
    Matrix row = sys.c;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double scale        = std::max(1e-300, row.norm());
        obsv.middleRows(k * p, p) = row / scale;
        row                       = row * sys.a;
    }
    bool observable = rank(obsv, rank_tol) == n;
    if (!observable) {
        observable = hautus_full_rank(Matrix(sys.a.transpose()), Matrix(sys.c.transpose()),
                                      rank_tol);
    }
    return observable;
}

StateSpaceSystem add(const StateSpaceSystem& sys1, const StateSpaceSystem& sys2) {
    if (sys1.inputs() != sys2.inputs() || sys1.outputs() != sys2.outputs()) {
        throw std::invalid_argument("add: systems must share I/O dimensions");
    }
    const Eigen::Index n1 = sys1.order();
    const Eigen::Index n2 = sys2.order();

    Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1)     = sys1.a;
    a.bottomRightCorner(n2, n2) = sys2.a;

    Matrix b(n1 + n2, sys1.inputs());
    b.topRows(n1)    = sys1.b;
    b.bottomRows(n2) = sys2.b;

    Matrix c(sys1.outputs(), n1 + n2);
    c.leftCols(n1)  = sys1.c;
    c.rightCols(n2) = sys2.c;

    return StateSpaceSystem(std::move(a), std::move(b), std::move(c), sys1.d + sys2.d,
                            sys1.name + "+" + sys2.name);
}

StateSpaceSystem close_positive_feedback(const StateSpaceSystem& m, const StateSpaceSystem& n) {
    if (m.inputs() != n.outputs() || n.inputs() != m.outputs()) {
        throw std::invalid_argument("close_positive_feedback: incompatible I/O dimensions");
    }
    const Eigen::Index nm = m.order();
    const Eigen::Index nn = n.order();
    const Eigen::Index p  = m.outputs();

    // series product M(s)N(s), states ordered [states of M; states of N]
    Matrix a_s = Matrix::Zero(nm + nn, nm + nn);
    a_s.topLeftCorner(nm, nm)     = m.a;
    a_s.topRightCorner(nm, nn)    = m.b * n.c;
    a_s.bottomRightCorner(nn, nn) = n.a;

    Matrix b_s(nm + nn, n.inputs());
    b_s.topRows(nm)    = m.b * n.d;
    b_s.bottomRows(nn) = n.b;

    Matrix c_s(p, nm + nn);
    c_s.leftCols(nm)  = m.c;
    c_s.rightCols(nn) = m.d * n.c;

    const Matrix d_s = m.d * n.d;

    // well-posedness of (I - MN)^-1
    const Matrix e = Matrix::Identity(p, p) - d_s;
    const double scale = 1e-12 * (1.0 + m.d.norm() * n.d.norm());
    if (std::abs(Eigen::PartialPivLU<Matrix>(e).determinant()) <= scale) {
        throw IllPosedError("close_positive_feedback: I - D*Dbar singular, loop ill posed");
    }
    const Matrix e_inv = solve_linear(e, Matrix::Identity(p, p), 1e-14);

    Matrix a_cl = a_s + b_s * e_inv * c_s;
    Matrix b_cl = b_s * e_inv;
    Matrix c_cl = e_inv * c_s;
    return StateSpaceSystem(std::move(a_cl), std::move(b_cl), std::move(c_cl), e_inv,
                            "closed[" + m.name + "," + n.name + "]");
}

}  // namespace nitool
