#pragma once

#include "nitool/numerics.hpp"

#include <string>

namespace nitool {

/// Thrown when a frequency-response evaluation lands on (or numerically too
/// close to) a pole of the system.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a feedback interconnection is ill posed, i.e. the algebraic
/// loop I - D*Dbar is singular at tolerance.
struct IllPosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Continuous-time LTI system x' = Ax + Bu, y = Cx + Du.
///
/// The state dimension may be zero (a static gain y = Du). All analysis in
/// this library targets square transfer matrices (outputs == inputs), but the
/// carrier itself allows rectangular I/O.
struct StateSpaceSystem {
    Matrix      a;  // n x n
    Matrix      b;  // n x m
    Matrix      c;  // p x n
    Matrix      d;  // p x m
    std::string name;

    StateSpaceSystem(Matrix a_in, Matrix b_in, Matrix c_in, Matrix d_in, std::string label = "");

    Eigen::Index order() const { return a.rows(); }
    Eigen::Index inputs() const { return d.cols(); }
    Eigen::Index outputs() const { return d.rows(); }
    bool         is_square_io() const { return inputs() == outputs(); }

    /// Memoryless system y = Du.
    static StateSpaceSystem static_gain(Matrix d_in, std::string label = "static");

    /// The io_dim x io_dim zero system.
    static StateSpaceSystem zero_system(Eigen::Index io_dim, std::string label = "zero");
};

/// Frequency-response value D + C (sI - A)^-1 B. Throws PoleError when sI - A
/// is singular at tolerance.
ComplexMatrix evaluate(const StateSpaceSystem& sys, Complex s);

/// Zero-frequency gain D - C A^-1 B. Requires A nonsingular (always true for
/// Hurwitz A); throws SingularMatrixError otherwise.
Matrix dc_gain(const StateSpaceSystem& sys);

/// Gain at infinite frequency, i.e. the feedthrough D.
Matrix gain_at_infinity(const StateSpaceSystem& sys);

struct HurwitzResult {
    bool   hurwitz;
    double max_real_part;
};

/// True iff every eigenvalue of A satisfies Re(lambda) < margin (margin is
/// negative by default, so imaginary-axis modes are rejected).
HurwitzResult is_hurwitz(const StateSpaceSystem& sys, double margin = -1e-9);

/// Kalman rank tests: true iff the controllability matrix [B AB ... A^{n-1}B]
/// and the stacked observability matrix both have rank n at rank_tol.
bool is_minimal(const StateSpaceSystem& sys, double rank_tol = 1e-8);

/// Block-diagonal state concatenation realizing the transfer-matrix sum.
StateSpaceSystem add(const StateSpaceSystem& sys1, const StateSpaceSystem& sys2);

/// Closed-loop realization of (I - M(s) N(s))^-1 for the positive feedback
/// pair [M, N]. The state ordering is [states of M; states of N]. Throws
/// IllPosedError when I - D*Dbar is singular at tolerance.
StateSpaceSystem close_positive_feedback(const StateSpaceSystem& m, const StateSpaceSystem& n);

}  // namespace nitool
