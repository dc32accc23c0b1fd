#include "nitool/sweep.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace nitool {

std::vector<double> sweep_grid(const SweepConfig& cfg) {
    cfg.validate();
    const double log_lo = std::log(cfg.omega_min);
    const double log_hi = std::log(cfg.omega_max);
    const double step   = (log_hi - log_lo) / static_cast<double>(cfg.points - 1);

    std::vector<double> grid(static_cast<std::size_t>(cfg.points));
    for (int i = 0; i < cfg.points; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
    }
    return grid;
}

ComplexMatrix imag_part_matrix(const ComplexMatrix& r_jw) {
    if (r_jw.rows() != r_jw.cols()) {
        throw std::invalid_argument("imag_part_matrix: matrix must be square");
    }
    const Complex j(0.0, 1.0);
    ComplexMatrix h = j * (r_jw - r_jw.adjoint());
    return 0.5 * (h + ComplexMatrix(h.adjoint()));
}

FrequencySample sample_at(const StateSpaceSystem& sys, double omega) {
    if (!(omega >= 0.0)) {
        throw std::invalid_argument("sample_at: omega must be nonnegative");
    }
    FrequencySample sample;
    sample.omega = omega;
    sample.value = evaluate(sys, Complex(0.0, omega));

    const ComplexMatrix h = imag_part_matrix(sample.value);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverError("sample_at: Hermitian eigensolver did not converge");
    }
    sample.imag_part_spectrum = solver.eigenvalues();
    return sample;
}

std::vector<FrequencySample> sweep_frequency_response_serial(const StateSpaceSystem& sys,
                                                             const SweepConfig&      cfg) {
    const std::vector<double>    grid = sweep_grid(cfg);
    std::vector<FrequencySample> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = sample_at(sys, grid[i]);
    }
    return out;
}

std::vector<FrequencySample> sweep_frequency_response(const StateSpaceSystem& sys,
                                                      const SweepConfig&      cfg) {
    const std::vector<double>    grid = sweep_grid(cfg);
    std::vector<FrequencySample> out(grid.size());

    // Exceptions must not escape the parallel region; capture the first one
    // and rethrow after the loop.
    bool        failed = false;
    std::string failure;

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = sample_at(sys, grid[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (!failed) {
                    failed  = true;
                    failure = e.what();
                }
            }
        }
    }

    if (failed) {
        throw PoleError("sweep_frequency_response: " + failure);
    }
    return out;
}

}  // namespace nitool
