#pragma once

#include "nitool/feasibility.hpp"
#include "nitool/sweep.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nitool {

enum class NiClass { StrictNi, Ni, NotNi, Inconclusive };

const char* to_string(NiClass c);

/// Concrete counterexample: a frequency where lambda_min(j[R - R*]) dips
/// below -psd_tol.
struct Falsifier {
    double omega;
    double min_eig;
};

struct PipelineChecks {
    bool d_symmetric = false;
    bool a_hurwitz   = false;
    bool minimal     = false;
};

struct ClassificationVerdict {
    NiClass                      class_tag = NiClass::Inconclusive;
    std::optional<NiCertificate> certificate;
    std::optional<Falsifier>     falsifier;
    std::optional<double>        strictness_evidence;  // min over the grid of lambda_min(j[R-R*])
    std::optional<double>        det_sweep_min;        // min |det(R - R*)| when requested
    PipelineChecks               checks;
    std::string                  reason;

    bool at_least_ni() const {
        return class_tag == NiClass::Ni || class_tag == NiClass::StrictNi;
    }
};

/// Classifies a square LTI system into StrictNi / Ni / NotNi / Inconclusive.
///
/// Pipeline: minimality gate (non-minimal input is Inconclusive, never
/// silently reduced), then the Hurwitz and D = D^T necessary conditions, then
/// the frequency-sweep falsifier, then the LMI certificate. Membership is
/// proved by the certificate; the grid is a falsifier for NotNi and the
/// (documented, grid-certified) evidence for strictness.
ClassificationVerdict classify(const StateSpaceSystem& sys, const SweepConfig& sweep = {},
                               const Tolerances& tol = {}, bool det_sweep = false);

/// DC-ordering check: a negative imaginary system's DC gain dominates its
/// gain at infinity, so lambda_min(R(0) - R(inf)) must be >= -psd_tol for Ni
/// and > psd_tol for StrictNi; when a certificate is present the identity
/// R(0) - R(inf) = C Y C^T is cross-checked as well.
bool check_dc_ordering(const StateSpaceSystem& sys, const ClassificationVerdict& verdict,
                       const Tolerances& tol = {});

struct ClassifiedSystem {
    StateSpaceSystem      system;
    ClassificationVerdict verdict;
};

/// Additive closure: the sum realization is block-diagonal, so
/// blkdiag(Y1, Y2) certifies the sum without re-solving. The class tag is
/// StrictNi when either summand is strict, else Ni.
ClassifiedSystem sum_with_class(const ClassifiedSystem& s1, const ClassifiedSystem& s2,
                                const Tolerances& tol = {});

struct GeneratedNi {
    StateSpaceSystem system;
    NiCertificate    certificate;
};

/// Draws a random NI system by construction: Y0 > 0 random SPD, A = (S - Q) Y0^-1
/// with S skew and Q > 0, B = -A Y0 C^T for random C. The construction makes A
/// Hurwitz and Y0 a valid certificate by design. With strict = true the draw is
/// re-tried (bounded) until the frequency grid certifies strictness; with
/// zero_feedthrough = true the system has D = 0 (clean M(inf)N(inf) = 0 pairing).
GeneratedNi generate_ni(int order, int io_dim, std::uint64_t seed, bool strict,
                        bool zero_feedthrough = false);

}  // namespace nitool
