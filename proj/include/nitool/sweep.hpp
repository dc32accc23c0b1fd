#pragma once

#include "nitool/state_space.hpp"

#include <vector>

namespace nitool {

/// Logarithmically spaced frequency grid on the open interval (0, inf).
struct SweepConfig {
    double omega_min = 1e-4;  // rad/s
    double omega_max = 1e4;   // rad/s
    int    points    = 2000;

    void validate() const {
        if (!(omega_min > 0.0) || !(omega_min < omega_max)) {
            throw std::invalid_argument("SweepConfig: need 0 < omega_min < omega_max");
        }
        if (points < 2) {
            throw std::invalid_argument("SweepConfig: need at least 2 points");
        }
    }
};

std::vector<double> sweep_grid(const SweepConfig& cfg);

/// Frequency-response sample: R(j*omega) together with the spectrum of the
/// Hermitian matrix j[R - R*], whose sign pattern defines the NI classes.
struct FrequencySample {
    double        omega = 0.0;
    ComplexMatrix value;
    Vector        imag_part_spectrum;  // real, ascending
};

/// j (R - R*), symmetrized to exact Hermitian. For SISO inputs this equals
/// -2 Im(R) as a 1x1 matrix.
ComplexMatrix imag_part_matrix(const ComplexMatrix& r_jw);

/// One sample at a given frequency (omega >= 0 allowed; the grid itself never
/// includes 0).
FrequencySample sample_at(const StateSpaceSystem& sys, double omega);

/// Serial reference sweep. Kept as the ground truth the parallel kernel is
/// tested against.
std::vector<FrequencySample> sweep_frequency_response_serial(const StateSpaceSystem& sys,
                                                             const SweepConfig&      cfg);

/// Production sweep: OpenMP-parallel over grid points when built with OpenMP,
/// identical output to the serial reference either way.
std::vector<FrequencySample> sweep_frequency_response(const StateSpaceSystem& sys,
                                                      const SweepConfig&      cfg);

}  // namespace nitool
