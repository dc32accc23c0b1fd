#pragma once

#include "nitool/classification.hpp"

#include <optional>
#include <vector>

namespace nitool {

/// Thrown by det_I_minus_AB_nonzero when the sign suppositions on the two
/// matrices fail.
struct SuppositionViolatedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a quantity that must be nonzero under valid suppositions comes
/// out below tolerance anyway, i.e. the computation (not the theory) broke.
struct NumericalBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StabilityConfig {
    Tolerances  tol{};
    SweepConfig sweep{};
    double      marginal_band = 1e-6;  // |dc_loop_eig - 1| inside this band is not decided
};

/// Matrix-level guarantee behind the frequency-axis argument: if
/// j[a - a*] >= 0 and j[b - b*] > 0 then det(I - a b) != 0. Returns true under
/// valid suppositions; throws SuppositionViolatedError when the sign checks
/// fail, NumericalBreakdownError when the determinant is below tol despite
/// valid suppositions.
bool det_I_minus_AB_nonzero(const ComplexMatrix& a, const ComplexMatrix& b, double tol);

enum class TheoremVerdict { Stable, Unstable, NumericallyMarginal, PreconditionFailed };
enum class OracleVerdict { Stable, Unstable, IllPosed };

const char* to_string(TheoremVerdict v);
const char* to_string(OracleVerdict v);

struct OracleReport {
    OracleVerdict        verdict;
    double               max_real_part = 0.0;
    std::vector<Complex> spectrum;  // eigenvalues of the closed-loop state matrix
};

struct PreconditionReport {
    ClassificationVerdict m_class;  // operand in the C role: must be at least Ni
    ClassificationVerdict n_class;  // operand in the Cs role: must be StrictNi
    bool                  m_inf_n_inf_zero = false;
    double                m_inf_n_inf_residual = 0.0;
    bool                  n_inf_psd = false;
    double                n_inf_min_eig = 0.0;

    bool passed() const {
        return m_class.at_least_ni() && n_class.class_tag == NiClass::StrictNi &&
               m_inf_n_inf_zero && n_inf_psd;
    }
};

struct StabilityReport {
    PreconditionReport         preconditions;
    std::optional<double>      dc_loop_eig;  // max eigenvalue of M(0) N(0)
    TheoremVerdict             theorem_verdict = TheoremVerdict::PreconditionFailed;
    std::string                failure_reason;
    std::optional<OracleReport> oracle;
    std::optional<bool>        agreement;  // set only when both routes produced a verdict
};

/// The DC-loop-gain test: with m in class C and n in class Cs, plus
/// M(inf)N(inf) = 0 and N(inf) >= 0, the positive-feedback loop [m, n] is
/// internally stable iff the largest eigenvalue of M(0)N(0) is below one.
/// The roles are explicit because the hypotheses are asymmetric. The
/// closed-loop eigenvalue oracle runs alongside and the report records
/// whether the two verdicts agree.
StabilityReport theorem_stability_test(const StateSpaceSystem& m_role_c,
                                       const StateSpaceSystem& n_role_cs,
                                       const StabilityConfig&  cfg = {});

/// Direct route: eigenvalues of the closed-loop state matrix of
/// (I - M N)^-1. Requires both operands Hurwitz (else the equivalence with
/// internal stability does not hold and this throws instead of guessing).
OracleReport oracle_stability(const StateSpaceSystem& m, const StateSpaceSystem& n,
                              const Tolerances& tol = {});

struct PhiTDecomposition {
    Matrix phi;
    Matrix t;
    double residual;   // ||A_cl - Phi T||_F / (1 + ||A_cl||_F)
    double t_min_eig;  // the stability pivot: T > 0 iff the loop is stable
};

/// Factorization of the closed-loop state matrix as Phi T with
/// Phi = blkdiag(A Y, Abar Ybar) and the proof's T block matrix, built from
/// the two certificates. Certificates are re-verified first.
PhiTDecomposition phi_t_decomposition(const StateSpaceSystem& m, const StateSpaceSystem& n,
                                      const NiCertificate& y, const NiCertificate& ybar,
                                      const Tolerances& tol = {});

enum class MarginPart { I, II };

struct MarginReport {
    /// Supremal admissible DC gain of the uncertainty, 1 / lambda_max(M(0)).
    /// Absent means unbounded (lambda_max(M(0)) <= 0).
    std::optional<double> gamma_star;
    /// True: uncertainties with lambda_max(Delta(0)) strictly below gamma_star
    /// are covered (the non-strict M-side condition holds with equality).
    bool                  strict = true;
    MarginPart         part   = MarginPart::I;
    double                m0_max_eig = 0.0;
    ClassificationVerdict m_class;
};

/// Small-gain style margin: part I needs m StrictNi with M(inf) >= 0 and
/// bounds uncertainties in the plain NI class; part II needs m Ni and bounds
/// uncertainties in the strict class.
MarginReport robustness_margin(const StateSpaceSystem& m, MarginPart part,
                               const StabilityConfig& cfg = {});

/// The canonical destabilizing choice (1/lambda_max(M(0))) / (s+1) * I. At
/// this DC gain the loop is exactly marginal; any strictly larger gain makes
/// the closed loop unstable. Throws std::domain_error when lambda_max(M(0))
/// is not positive.
StateSpaceSystem destabilizing_uncertainty(const StateSpaceSystem& m, const Tolerances& tol = {});

}  // namespace nitool
