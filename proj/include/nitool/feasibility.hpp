#pragma once

#include "nitool/state_space.hpp"

#include <optional>
#include <string>

namespace nitool {

/// Structured LMI feasibility problem from the negative-imaginary state-space
/// characterisation: find symmetric Y with
///
///   Y >= eps_pd * I,   A Y + Y A^T <= 0,   B = -A Y C^T.
///
/// The strict condition Y > 0 is closed numerically by the eps_pd floor.
struct FeasibilityProblem {
    Matrix a;  // n x n, Hurwitz (caller-verified, guarded here)
    Matrix b;  // n x m
    Matrix c;  // m x n
    double eps_pd;
    int    max_iters    = 5000;
    double residual_tol = 1e-8;

    FeasibilityProblem(Matrix a_in, Matrix b_in, Matrix c_in);
    FeasibilityProblem(Matrix a_in, Matrix b_in, Matrix c_in, double eps_pd_in, int max_iters_in,
                       double residual_tol_in);

    static FeasibilityProblem from_system(const StateSpaceSystem& sys);

    /// Default strictness floor 1e-6 * (1 + ||A^-1 B||_F), so the floor stays
    /// meaningful across system magnitudes.
    static double default_eps_pd(const Matrix& a, const Matrix& b);
};

/// Witness of class-C membership: the matrix Y plus the three residuals the
/// validity test is made of.
struct NiCertificate {
    Matrix y;                    // n x n symmetric
    double lin_residual  = 0.0;  // ||B + A Y C^T||_F
    double lyap_max_eig  = 0.0;  // lambda_max(A Y + Y A^T)
    double y_min_eig     = 0.0;  // lambda_min(Y)
    int    iterations    = 0;
};

/// Builds a certificate for a candidate Y by recomputing all residuals from
/// the system matrices.
NiCertificate certificate_from_y(const StateSpaceSystem& sys, const Matrix& y, int iterations = 0);

struct FeasibilityDiagnostics {
    double lin_residual  = 0.0;
    double lyap_max_eig  = 0.0;
    double y_min_eig     = 0.0;
    int    iterations    = 0;
    bool   affine_consistent = true;
    bool   stalled           = false;
    std::string note;
};

/// Either a valid certificate or a best-effort report. NotProven is never a
/// proof of infeasibility: alternating projections cannot certify that.
struct FeasibilityOutcome {
    enum class Status { Feasible, NotProven };

    Status                       status = Status::NotProven;
    std::optional<NiCertificate> certificate;
    FeasibilityDiagnostics       diagnostics;

    bool feasible() const { return status == Status::Feasible; }
};

/// Alternating projections with Dykstra corrections over the three constraint
/// sets (affine, shifted-PSD cone, Lyapunov cone), followed by a convex
/// polishing descent on the affine manifold for instances whose feasible set
/// touches the Lyapunov cone tangentially (lossless-boundary modes).
/// Deterministic: identical problems yield bit-identical outcomes.
FeasibilityOutcome solve_ni_feasibility(const FeasibilityProblem& problem);

/// Recomputes the three certificate residuals from scratch and applies the
/// validity thresholds derived from tol; independent of the solver path.
bool verify_certificate(const StateSpaceSystem& sys, const NiCertificate& cert,
                        const Tolerances& tol = {});

namespace detail {

/// Frobenius-orthogonal projector onto {Y symmetric : Y C^T = G}, realized in
/// an orthonormal basis of symmetric matrices via an SVD of the constraint
/// operator. Exposed for the projection property tests.
class AffineProjector {
public:
    AffineProjector(const Matrix& g, const Matrix& c);

    bool         consistent() const { return consistent_; }
    double       consistency_residual() const { return consistency_residual_; }
    Eigen::Index null_dimension() const { return null_.cols(); }

    Matrix project(const Matrix& y) const;
    Matrix particular() const;

    Vector to_null_coords(const Matrix& y) const;
    Matrix from_null_coords(const Vector& t) const;

    /// Pushes a symmetric gradient/direction matrix into null-space
    /// coordinates (no affine offset).
    Vector direction_to_null_coords(const Matrix& g) const;

private:
    Eigen::Index n_ = 0;
    Matrix       null_;        // nsym x d, orthonormal columns
    Vector       particular_;  // nsym
    bool         consistent_ = true;
    double       consistency_residual_ = 0.0;
};

Vector sym_to_vec(const Matrix& s);
Matrix vec_to_sym(const Vector& v, Eigen::Index n);

/// Solves the Lyapunov equation A X + X A^T = Q for Hurwitz A (dense
/// Kronecker factorization, adequate at desk scale).
class LyapunovSolver {
public:
    explicit LyapunovSolver(const Matrix& a);
    Matrix solve(const Matrix& q) const;

private:
    Eigen::Index                n_;
    Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace detail

}  // namespace nitool
