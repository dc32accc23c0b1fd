#include "nitool/classification.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nitool {

const char* to_string(NiClass c) {
    switch (c) {
        case NiClass::StrictNi: return "StrictNi";
        case NiClass::Ni: return "Ni";
        case NiClass::NotNi: return "NotNi";
        case NiClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

struct GridScan {
    double min_eig    = std::numeric_limits<double>::infinity();
    double argmin     = 0.0;
    bool   has_violation = false;
    double first_violation_omega = 0.0;
    double first_violation_eig   = 0.0;
    // strictness is judged per point relative to the local magnitude: the
    // spectrum of j[R - R*] decays toward the open-interval ends (like 1/w^3
    // for relative degree two), so an absolute floor would wrongly demote
    // every strictly proper system
    bool strict = true;
};

GridScan scan_samples(const std::vector<FrequencySample>& samples, double psd_tol) {
    GridScan scan;
    for (const FrequencySample& s : samples) {
        const double lo = s.imag_part_spectrum.size() > 0 ? s.imag_part_spectrum.minCoeff() : 0.0;
        const double hi = s.imag_part_spectrum.size() > 0 ? s.imag_part_spectrum.maxCoeff() : 0.0;
        if (lo < scan.min_eig) {
            scan.min_eig = lo;
            scan.argmin  = s.omega;
        }
        if (!scan.has_violation && lo < -psd_tol) {
            scan.has_violation        = true;
            scan.first_violation_omega = s.omega;
            scan.first_violation_eig   = lo;
        }
        if (!(lo > psd_tol * std::max(hi, std::numeric_limits<double>::min()))) {
            scan.strict = false;
        }
    }
    return scan;
}

double det_sweep_minimum(const std::vector<FrequencySample>& samples) {
    double min_abs = std::numeric_limits<double>::infinity();
    const Complex j(0.0, 1.0);
    for (const FrequencySample& s : samples) {
        // R - R* = -j * (j [R - R*])
        const ComplexMatrix diff = -j * imag_part_matrix(s.value);
        const double        det  = std::abs(Eigen::PartialPivLU<ComplexMatrix>(diff).determinant());
        min_abs = std::min(min_abs, det);
    }
    return min_abs;
}

}  // namespace

ClassificationVerdict classify(const StateSpaceSystem& sys, const SweepConfig& sweep,
                               const Tolerances& tol, bool det_sweep) {
    tol.validate();
    if (!sys.is_square_io()) {
        throw std::invalid_argument("classify: system must have square I/O");
    }

    ClassificationVerdict v;
    v.checks.minimal = is_minimal(sys);
    const HurwitzResult hur = is_hurwitz(sys, tol.hurwitz_margin);
    v.checks.a_hurwitz = hur.hurwitz;
    const double d_asym = sys.inputs() == 0
                              ? 0.0
                              : (sys.d - sys.d.transpose()).cwiseAbs().maxCoeff();
    v.checks.d_symmetric = d_asym <= tol.eq_tol * (1.0 + sys.d.cwiseAbs().maxCoeff());

    if (!v.checks.minimal) {
        v.class_tag = NiClass::Inconclusive;
        v.reason    = "non-minimal realization (controllability/observability rank tests failed); not silently reduced";
        return v;
    }
    if (!v.checks.a_hurwitz) {
        std::ostringstream msg;
        msg << "A is not Hurwitz (max Re eigenvalue " << hur.max_real_part << ")";
        v.class_tag = NiClass::NotNi;
        v.reason    = msg.str();
        return v;
    }
    if (!v.checks.d_symmetric) {
        v.class_tag = NiClass::NotNi;
        v.reason    = "D is not symmetric";
        return v;
    }

    const auto     samples = sweep_frequency_response(sys, sweep);
    const GridScan scan    = scan_samples(samples, tol.psd_tol);
    v.strictness_evidence  = scan.min_eig;
    if (det_sweep) {
        v.det_sweep_min = det_sweep_minimum(samples);
    }

    if (scan.has_violation) {
        v.class_tag = NiClass::NotNi;
        v.falsifier = Falsifier{scan.first_violation_omega, scan.first_violation_eig};
        std::ostringstream msg;
        msg << "lambda_min(j[R - R*]) = " << scan.first_violation_eig << " at omega = "
            << scan.first_violation_omega;
        v.reason = msg.str();
        return v;
    }

    const FeasibilityOutcome outcome = solve_ni_feasibility(FeasibilityProblem::from_system(sys));
    if (outcome.feasible()) {
        v.certificate = outcome.certificate;
        v.class_tag   = scan.strict ? NiClass::StrictNi : NiClass::Ni;
        if (v.class_tag == NiClass::StrictNi) {
            v.reason = "LMI certificate; strictness grid-certified (not an exact transmission-zero test)";
        } else {
            v.reason = "LMI certificate";
        }
        return v;
    }

    v.class_tag = NiClass::Inconclusive;
    std::ostringstream msg;
    msg << "no falsifying frequency and LMI solver not proven feasible"
        << " (lin residual " << outcome.diagnostics.lin_residual << ", lyap max eig "
        << outcome.diagnostics.lyap_max_eig << ", min eig Y " << outcome.diagnostics.y_min_eig
        << ")";
    v.reason = msg.str();
    return v;
}

bool check_dc_ordering(const StateSpaceSystem& sys, const ClassificationVerdict& verdict,
                       const Tolerances& tol) {
    tol.validate();
    if (!verdict.at_least_ni()) {
        throw std::invalid_argument("check_dc_ordering: verdict must be Ni or StrictNi");
    }
    const Matrix diff = dc_gain(sys) - gain_at_infinity(sys);
    const double min_eig =
        sym_eigen(0.5 * (diff + diff.transpose()), std::numeric_limits<double>::infinity())
            .values.minCoeff();

    bool ok = verdict.class_tag == NiClass::StrictNi ? min_eig > tol.psd_tol
                                                     : min_eig >= -tol.psd_tol;

    if (ok && verdict.certificate.has_value() && sys.order() > 0) {
        const Matrix cyc = sys.c * verdict.certificate->y * sys.c.transpose();
        ok = (diff - cyc).norm() <= 100.0 * tol.eq_tol * (1.0 + cyc.norm());
    }
    return ok;
}

ClassifiedSystem sum_with_class(const ClassifiedSystem& s1, const ClassifiedSystem& s2,
                                const Tolerances& tol) {
    if (!s1.verdict.at_least_ni() || !s2.verdict.at_least_ni()) {
        throw std::invalid_argument("sum_with_class: both summands must classify Ni or StrictNi");
    }
    if (!s1.verdict.certificate.has_value() || !s2.verdict.certificate.has_value()) {
        throw std::invalid_argument("sum_with_class: both summands must carry certificates");
    }

    ClassifiedSystem out{add(s1.system, s2.system), ClassificationVerdict{}};

    const Eigen::Index n1 = s1.system.order();
    const Eigen::Index n2 = s2.system.order();
    Matrix y = Matrix::Zero(n1 + n2, n1 + n2);
    y.topLeftCorner(n1, n1)     = s1.verdict.certificate->y;
    y.bottomRightCorner(n2, n2) = s2.verdict.certificate->y;

    out.verdict.certificate = certificate_from_y(out.system, y);
    out.verdict.class_tag   = (s1.verdict.class_tag == NiClass::StrictNi ||
                             s2.verdict.class_tag == NiClass::StrictNi)
                                  ? NiClass::StrictNi
                                  : NiClass::Ni;
    out.verdict.reason = "class propagated through additive closure, block-diagonal certificate";

    out.verdict.checks.minimal   = is_minimal(out.system);
    out.verdict.checks.a_hurwitz = is_hurwitz(out.system, tol.hurwitz_margin).hurwitz;
    const double d_asym = (out.system.d - out.system.d.transpose()).cwiseAbs().maxCoeff();
    out.verdict.checks.d_symmetric =
        d_asym <= tol.eq_tol * (1.0 + out.system.d.cwiseAbs().maxCoeff());
    return out;
}

namespace {

Matrix gaussian_matrix(std::mt19937_64& eng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = normal(eng);
        }
    }
    return m;
}

Matrix random_spd(std::mt19937_64& eng, Eigen::Index n, double eig_lo, double eig_hi) {
    const Matrix            gauss = gaussian_matrix(eng, n, n);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    }
    std::uniform_real_distribution<double> uni(eig_lo, eig_hi);
    Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lambda(i) = uni(eng);
    }
    Matrix spd = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (spd + spd.transpose());
}

}  // namespace

GeneratedNi generate_ni(int order, int io_dim, std::uint64_t seed, bool strict,
                        bool zero_feedthrough) {
    if (order < 1 || io_dim < 1) {
        throw std::invalid_argument("generate_ni: order and io_dim must be >= 1");
    }
    if (strict && io_dim > order) {
        throw std::invalid_argument(
            "generate_ni: strictness needs io_dim <= order (rank of j[R - R*] is capped by C)");
    }
    const Eigen::Index n = order;
    const Eigen::Index m = io_dim;

    std::mt19937_64 eng(seed);

    for (int attempt = 0; attempt < 20; ++attempt) {
        const Matrix y0 = random_spd(eng, n, 0.5, 2.0);

        const Matrix w    = gaussian_matrix(eng, n, n);
        const Matrix skew = 0.5 * (w - w.transpose());
        const Matrix v    = gaussian_matrix(eng, n, n);
        Matrix       q    = v * v.transpose() / static_cast<double>(n);
        q.diagonal().array() += 0.1;
        const Matrix z = skew - q;

        // A = Z Y0^-1, so A Y0 + Y0 A^T = Z + Z^T = -2Q < 0 and A is Hurwitz
        const Matrix a = y0.ldlt().solve(z.transpose()).transpose();
        const Matrix c = gaussian_matrix(eng, m, n);
        const Matrix b = -a * y0 * c.transpose();

        Matrix d = Matrix::Zero(m, m);
        if (!zero_feedthrough) {
            const Matrix dw = gaussian_matrix(eng, m, m);
            d               = 0.25 * (dw + dw.transpose());
        }

        StateSpaceSystem sys(a, b, c, d, "generated-ni");
        if (!is_minimal(sys)) {
            continue;
        }
        if (strict) {
            SweepConfig probe;
            probe.points = 400;
            const auto samples   = sweep_frequency_response_serial(sys, probe);
            bool       strict_ok = true;
            for (const auto& s : samples) {
                const double lo = s.imag_part_spectrum.minCoeff();
                const double hi = s.imag_part_spectrum.maxCoeff();
                if (!(lo > 1e-8 * std::max(hi, std::numeric_limits<double>::min()))) {
                    strict_ok = false;
                    break;
                }
            }
            if (!strict_ok) {
                continue;
            }
        }
        return GeneratedNi{sys, certificate_from_y(sys, y0)};
    }
    throw std::runtime_error("generate_ni: bounded redraws exhausted");
}

}  // namespace nitool
