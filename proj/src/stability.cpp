#include "nitool/stability.hpp"

#include <cmath>
#include <sstream>

namespace nitool {

const char* to_string(TheoremVerdict v) {
    switch (v) {
        case TheoremVerdict::Stable: return "Stable";
        case TheoremVerdict::Unstable: return "Unstable";
        case TheoremVerdict::NumericallyMarginal: return "NumericallyMarginal";
        case TheoremVerdict::PreconditionFailed: return "PreconditionFailed";
    }
    return "?";
}

const char* to_string(OracleVerdict v) {
    switch (v) {
        case OracleVerdict::Stable: return "Stable";
        case OracleVerdict::Unstable: return "Unstable";
        case OracleVerdict::IllPosed: return "IllPosed";
    }
    return "?";
}

bool det_I_minus_AB_nonzero(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw std::invalid_argument("det_I_minus_AB_nonzero: matrices must be square, same size");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("det_I_minus_AB_nonzero: tol must be positive");
    }

    const auto hermitian_min_eig = [](const ComplexMatrix& x) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(imag_part_matrix(x),
                                                            Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    };
    const double a_min = hermitian_min_eig(a);
    const double b_min = hermitian_min_eig(b);
    if (a_min < -tol) {
        std::ostringstream msg;
        msg << "det_I_minus_AB_nonzero: j[a - a*] not PSD (min eig " << a_min << ")";
        throw SuppositionViolatedError(msg.str());
    }
    if (!(b_min > tol)) {
        std::ostringstream msg;
        msg << "det_I_minus_AB_nonzero: j[b - b*] not PD (min eig " << b_min << ")";
        throw SuppositionViolatedError(msg.str());
    }

    const ComplexMatrix residue =
        ComplexMatrix::Identity(a.rows(), a.cols()) - a * b;
    const double det = std::abs(Eigen::PartialPivLU<ComplexMatrix>(residue).determinant());
    if (det > tol) {
        return true;
    }
    std::ostringstream msg;
    msg << "det_I_minus_AB_nonzero: |det(I - ab)| = " << det
        << " below tolerance despite valid suppositions";
    throw NumericalBreakdownError(msg.str());
}

OracleReport oracle_stability(const StateSpaceSystem& m, const StateSpaceSystem& n,
                              const Tolerances& tol) {
    tol.validate();
    if (!is_hurwitz(m, tol.hurwitz_margin).hurwitz || !is_hurwitz(n, tol.hurwitz_margin).hurwitz) {
        throw std::invalid_argument(
            "oracle_stability: both operands must be Hurwitz (stabilizability/detectability of "
            "the interconnection relies on it)");
    }
    OracleReport report;
    try {
        const StateSpaceSystem closed = close_positive_feedback(m, n);
        report.spectrum               = eigenvalues(closed.a);
        report.max_real_part          = -std::numeric_limits<double>::infinity();
        for (const Complex& lambda : report.spectrum) {
            report.max_real_part = std::max(report.max_real_part, lambda.real());
        }
        report.verdict = report.max_real_part < tol.hurwitz_margin ? OracleVerdict::Stable
                                                                   : OracleVerdict::Unstable;
    } catch (const IllPosedError&) {
        report.verdict       = OracleVerdict::IllPosed;
        report.max_real_part = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

StabilityReport theorem_stability_test(const StateSpaceSystem& m_role_c,
                                       const StateSpaceSystem& n_role_cs,
                                       const StabilityConfig&  cfg) {
    cfg.tol.validate();
    StabilityReport report;

    report.preconditions.m_class = classify(m_role_c, cfg.sweep, cfg.tol);
    report.preconditions.n_class = classify(n_role_cs, cfg.sweep, cfg.tol);

    const Matrix m_inf = gain_at_infinity(m_role_c);
    const Matrix n_inf = gain_at_infinity(n_role_cs);

    report.preconditions.m_inf_n_inf_residual = (m_inf * n_inf).norm();
    report.preconditions.m_inf_n_inf_zero =
        report.preconditions.m_inf_n_inf_residual <= cfg.tol.eq_tol * (1.0 + m_inf.norm() * n_inf.norm());

    const Matrix n_inf_sym = 0.5 * (n_inf + n_inf.transpose());
    report.preconditions.n_inf_min_eig =
        n_inf_sym.rows() == 0
            ? 0.0
            : sym_eigen(n_inf_sym, std::numeric_limits<double>::infinity()).values.minCoeff();
    report.preconditions.n_inf_psd = report.preconditions.n_inf_min_eig >= -cfg.tol.psd_tol;

    // DC loop gain is reported whenever computable, verdicts only on passed
    // preconditions.
    const bool dc_computable = is_hurwitz(m_role_c, cfg.tol.hurwitz_margin).hurwitz &&
                               is_hurwitz(n_role_cs, cfg.tol.hurwitz_margin).hurwitz;
    if (dc_computable) {
        const Matrix m0 = dc_gain(m_role_c);
        const Matrix n0 = dc_gain(n_role_cs);
        const Matrix product =
            0.5 * (m0 + m0.transpose()) * (0.5 * (n0 + n0.transpose()));
        report.dc_loop_eig = spectral_max_real(product, cfg.tol);
    }

    if (!report.preconditions.passed()) {
        report.theorem_verdict = TheoremVerdict::PreconditionFailed;
        std::ostringstream why;
        if (!report.preconditions.m_class.at_least_ni()) {
            why << "C-role operand classifies " << to_string(report.preconditions.m_class.class_tag)
                << "; ";
        }
        if (report.preconditions.n_class.class_tag != NiClass::StrictNi) {
            why << "Cs-role operand classifies "
                << to_string(report.preconditions.n_class.class_tag) << "; ";
        }
        if (!report.preconditions.m_inf_n_inf_zero) {
            why << "M(inf)N(inf) != 0; ";
        }
        if (!report.preconditions.n_inf_psd) {
            why << "N(inf) not PSD; ";
        }
        report.failure_reason = why.str();
    } else {
        const double eig = *report.dc_loop_eig;
        if (eig < 1.0 - cfg.marginal_band) {
            report.theorem_verdict = TheoremVerdict::Stable;
        } else if (eig > 1.0 + cfg.marginal_band) {
            report.theorem_verdict = TheoremVerdict::Unstable;
        } else {
            report.theorem_verdict = TheoremVerdict::NumericallyMarginal;
        }
    }

    if (dc_computable) {
        report.oracle = oracle_stability(m_role_c, n_role_cs, cfg.tol);
    }

    const bool theorem_decided = report.theorem_verdict == TheoremVerdict::Stable ||
                                 report.theorem_verdict == TheoremVerdict::Unstable;
    if (theorem_decided && report.oracle.has_value() &&
        report.oracle->verdict != OracleVerdict::IllPosed) {
        const bool theorem_stable = report.theorem_verdict == TheoremVerdict::Stable;
        const bool oracle_stable  = report.oracle->verdict == OracleVerdict::Stable;
        report.agreement          = theorem_stable == oracle_stable;
    }
    return report;
}

PhiTDecomposition phi_t_decomposition(const StateSpaceSystem& m, const StateSpaceSystem& n,
                                      const NiCertificate& y, const NiCertificate& ybar,
                                      const Tolerances& tol) {
    if (!verify_certificate(m, y, tol) || !verify_certificate(n, ybar, tol)) {
        throw std::invalid_argument("phi_t_decomposition: invalid certificate");
    }
    const Eigen::Index nm = m.order();
    const Eigen::Index nn = n.order();

    const Matrix y_inv    = solve_linear(y.y, Matrix::Identity(nm, nm), 1e-14);
    const Matrix ybar_inv = solve_linear(ybar.y, Matrix::Identity(nn, nn), 1e-14);

    PhiTDecomposition out;
    out.phi = Matrix::Zero(nm + nn, nm + nn);
    out.phi.topLeftCorner(nm, nm)     = m.a * y.y;
    out.phi.bottomRightCorner(nn, nn) = n.a * ybar.y;

    out.t = Matrix::Zero(nm + nn, nm + nn);
    out.t.topLeftCorner(nm, nm) = y_inv - m.c.transpose() * n.d * m.c;
    out.t.topRightCorner(nm, nn)    = -m.c.transpose() * n.c;
    out.t.bottomLeftCorner(nn, nm)  = -n.c.transpose() * m.c;
    out.t.bottomRightCorner(nn, nn) = ybar_inv - n.c.transpose() * m.d * n.c;
    out.t = Matrix(0.5 * (out.t + out.t.transpose()).eval());

    const Matrix a_cl = close_positive_feedback(m, n).a;
    out.residual      = (a_cl - out.phi * out.t).norm() / (1.0 + a_cl.norm());
    out.t_min_eig = sym_eigen(out.t, std::numeric_limits<double>::infinity()).values.minCoeff();
    return out;
}

MarginReport robustness_margin(const StateSpaceSystem& m, MarginPart part,
                               const StabilityConfig& cfg) {
    cfg.tol.validate();
    MarginReport report;
    report.part    = part;
    report.m_class = classify(m, cfg.sweep, cfg.tol);

    if (part == MarginPart::I) {
        if (report.m_class.class_tag != NiClass::StrictNi) {
            throw std::invalid_argument("robustness_margin part I: system must be StrictNi");
        }
        const Matrix m_inf = gain_at_infinity(m);
        const double min_eig =
            m_inf.rows() == 0
                ? 0.0
                : sym_eigen(0.5 * (m_inf + m_inf.transpose()),
                            std::numeric_limits<double>::infinity())
                      .values.minCoeff();
        if (min_eig < -cfg.tol.psd_tol) {
            throw std::invalid_argument("robustness_margin part I: M(inf) must be PSD");
        }
    } else {
        if (!report.m_class.at_least_ni()) {
            throw std::invalid_argument("robustness_margin part II: system must be at least Ni");
        }
    }

    const Matrix m0 = dc_gain(m);
    report.m0_max_eig =
        sym_eigen(0.5 * (m0 + m0.transpose()), std::numeric_limits<double>::infinity())
            .values.maxCoeff();
    if (report.m0_max_eig > cfg.tol.psd_tol) {
        report.gamma_star = 1.0 / report.m0_max_eig;
    }
    return report;
}

StateSpaceSystem destabilizing_uncertainty(const StateSpaceSystem& m, const Tolerances& tol) {
    tol.validate();
    const Matrix m0 = dc_gain(m);
    const double lambda_max =
        sym_eigen(0.5 * (m0 + m0.transpose()), std::numeric_limits<double>::infinity())
            .values.maxCoeff();
    if (!(lambda_max > tol.psd_tol)) {
        throw std::domain_error("destabilizing_uncertainty: lambda_max(M(0)) must be positive");
    }
    const Eigen::Index p = m.outputs();
    return StateSpaceSystem(-Matrix::Identity(p, p), Matrix::Identity(p, p),
                            (1.0 / lambda_max) * Matrix::Identity(p, p), Matrix::Zero(p, p),
                            "destabilizing-uncertainty");
}

}  // namespace nitool
