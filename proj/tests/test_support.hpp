#pragma once

#include "nitool/classification.hpp"

#include <random>

namespace nitool::test {

inline Matrix random_matrix(std::mt19937_64& eng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix                           m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = normal(eng);
        }
    }
    return m;
}

inline StateSpaceSystem random_stable_system(std::mt19937_64& eng, Eigen::Index order,
                                             Eigen::Index io) {
    Matrix a = random_matrix(eng, order, order);
    a -= (2.0 + a.cwiseAbs().rowwise().sum().maxCoeff()) * Matrix::Identity(order, order);
    return StateSpaceSystem(a, random_matrix(eng, order, io), random_matrix(eng, io, order),
                            random_matrix(eng, io, io), "random-stable");
}

// Gain scaling f*R(s) preserves the NI class and maps the certificate to f*Y.
inline GeneratedNi scale_gain(const GeneratedNi& gen, double factor) {
    StateSpaceSystem sys(gen.system.a, factor * gen.system.b, gen.system.c,
                         factor * gen.system.d, gen.system.name);
    return GeneratedNi{sys, certificate_from_y(sys, Matrix(factor * gen.certificate.y))};
}

}  // namespace nitool::test
