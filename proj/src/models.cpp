#include "nitool/models.hpp"

#include <cmath>
#include <utility>

namespace nitool {

void ModalModel::validate() const {
    for (const Mode& mode : modes) {
        if (!(mode.gain > 0.0) || !(mode.damping > 0.0) || !(mode.natural_frequency > 0.0)) {
            throw std::invalid_argument(
                "ModalModel: every mode needs gain > 0, damping > 0, natural frequency > 0");
        }
    }
}

void TwoMassParams::validate() const {
    if (!(stiffness_k > 0.0) || !(damping_alpha > 0.0)) {
        throw std::invalid_argument("TwoMassParams: k and alpha must be strictly positive");
    }
}

StateSpaceSystem modal_to_state_space(const ModalModel& model, std::string name) {
    model.validate();
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(model.modes.size());

    Matrix a = Matrix::Zero(n, n);
    Matrix b = Matrix::Zero(n, 1);
    Matrix c = Matrix::Zero(1, n);

    for (std::size_t i = 0; i < model.modes.size(); ++i) {
        const Mode&        mode = model.modes[i];
        const Eigen::Index at   = 2 * static_cast<Eigen::Index>(i);
        const double       wn2  = mode.natural_frequency * mode.natural_frequency;

        a(at, at + 1)     = 1.0;
        a(at + 1, at)     = -wn2;
        a(at + 1, at + 1) = -2.0 * mode.damping * mode.natural_frequency;
        b(at + 1, 0)      = mode.gain * wn2;
        c(0, at)          = 1.0;
    }
    return StateSpaceSystem(std::move(a), std::move(b), std::move(c), Matrix::Zero(1, 1),
                            std::move(name));
}

Matrix two_mass_psi() {
    Matrix psi(2, 2);
    psi << 1.0, 0.0, 1.0, 1.0;
    return psi;
}

namespace {

// SISO companion realization of 1 / (s^2 + a1 s + a0)
struct SecondOrderKernel {
    Matrix a;
    Matrix b;
    Matrix c;
};

SecondOrderKernel second_order_kernel(double a0, double a1) {
    SecondOrderKernel k;
    k.a.resize(2, 2);
    k.a << 0.0, 1.0, -a0, -a1;
    k.b.resize(2, 1);
    k.b << 0.0, 1.0;
    k.c.resize(1, 2);
    k.c << 1.0, 0.0;
    return k;
}

// rank-one congruence v * (g(s)/2) * v^T around a scalar kernel g(s)
StateSpaceSystem rank_one_congruence(const SecondOrderKernel& kernel, const Vector& v,
                                     std::string name) {
    const Matrix b = kernel.b * (0.5 * v.transpose());
    const Matrix c = v * kernel.c;
    return StateSpaceSystem(kernel.a, b, c, Matrix::Zero(2, 2), std::move(name));
}

}  // namespace

TwoMassPlant two_mass_plant(const TwoMassParams& params) {
    params.validate();
    const double k     = params.stiffness_k;
    const double alpha = params.damping_alpha;

    // P = Psi diag(p(s)/2, 0) Psi^T = (p(s)/2) (Psi e1)(Psi e1)^T, p = 1/(s^2+s+1)
    Vector psi_e1(2);
    psi_e1 << 1.0, 1.0;
    StateSpaceSystem nominal =
        rank_one_congruence(second_order_kernel(1.0, 1.0), psi_e1, "two-mass-P");

    // Delta = Psi^-1 diag(delta(s)/2, 0) Psi^-T, delta = 1/(s^2+(2a+1)s+(2k+1))
    Vector psi_inv_e1(2);
    psi_inv_e1 << 1.0, -1.0;
    StateSpaceSystem uncertainty = rank_one_congruence(
        second_order_kernel(2.0 * k + 1.0, 2.0 * alpha + 1.0), psi_inv_e1, "two-mass-Delta");

    StateSpaceSystem full = add(nominal, uncertainty);
    full.name             = "two-mass-P_Delta";
    return TwoMassPlant{std::move(full), std::move(nominal), std::move(uncertainty)};
}

StateSpaceSystem example_controller() {
    // diag entries: -2(s^2+s+1)/(2s^3+4s^2+4s+3) and -1/(s+1)
    Matrix a = Matrix::Zero(4, 4);
    a(0, 1) = 1.0;
    a(1, 2) = 1.0;
    a(2, 0) = -1.5;
    a(2, 1) = -2.0;
    a(2, 2) = -2.0;
    a(3, 3) = -1.0;

    Matrix b_diag = Matrix::Zero(4, 2);
    b_diag(2, 0) = 1.0;
    b_diag(3, 1) = 1.0;

    Matrix c_diag = Matrix::Zero(2, 4);
    c_diag(0, 0) = -1.0;
    c_diag(0, 1) = -1.0;
    c_diag(0, 2) = -1.0;
    c_diag(1, 3) = -1.0;

    const Matrix psi     = two_mass_psi();
    const Matrix psi_inv = solve_linear(psi, Matrix::Identity(2, 2));

    return StateSpaceSystem(std::move(a), b_diag * psi_inv, psi_inv.transpose() * c_diag,
                            Matrix::Zero(2, 2), "example-controller");
}

StateSpaceSystem closed_loop_m(const StateSpaceSystem& plant_nominal,
                               const StateSpaceSystem& controller) {
    const StateSpaceSystem& p = plant_nominal;
    const StateSpaceSystem& c = controller;
    if (p.inputs() != c.outputs() || c.inputs() != p.outputs()) {
        throw std::invalid_argument("closed_loop_m: incompatible plant/controller dimensions");
    }
    const Eigen::Index np  = p.order();
    const Eigen::Index nc  = c.order();
    const Eigen::Index dim = p.outputs();

    // z = -v where v = C e and e = w - P v; well-posed iff I + Dc Dp invertible
    const Matrix loop  = Matrix::Identity(dim, dim) + c.d * p.d;
    const double scale = 1e-12 * (1.0 + c.d.norm() * p.d.norm());
    if (std::abs(Eigen::PartialPivLU<Matrix>(loop).determinant()) <= scale) {
        throw IllPosedError("closed_loop_m: I + P(inf)C(inf) singular, loop ill posed");
    }
    const Matrix e_inv = solve_linear(loop, Matrix::Identity(dim, dim), 1e-14);

    Matrix a = Matrix::Zero(np + nc, np + nc);
    a.topLeftCorner(np, np)     = p.a - p.b * e_inv * c.d * p.c;
    a.topRightCorner(np, nc)    = p.b * e_inv * c.c;
    a.bottomLeftCorner(nc, np)  = c.b * (p.d * e_inv * c.d * p.c - p.c);
    a.bottomRightCorner(nc, nc) = c.a - c.b * p.d * e_inv * c.c;

    Matrix b(np + nc, dim);
    b.topRows(np)    = p.b * e_inv * c.d;
    b.bottomRows(nc) = c.b * (Matrix::Identity(dim, dim) - p.d * e_inv * c.d);

    Matrix cm(dim, np + nc);
    cm.leftCols(np)  = e_inv * c.d * p.c;
    cm.rightCols(nc) = -e_inv * c.c;

    return StateSpaceSystem(std::move(a), std::move(b), std::move(cm), Matrix(-e_inv * c.d),
                            "closed-loop-M");
}

StateSpaceSystem example_m() {
    const Matrix psi     = two_mass_psi();
    const Matrix psi_inv = solve_linear(psi, Matrix::Identity(2, 2));
    const Matrix g       = psi_inv.transpose() * psi_inv;  // [[2,-1],[-1,1]]
    return StateSpaceSystem(-Matrix::Identity(2, 2), Matrix::Identity(2, 2), g,
                            Matrix::Zero(2, 2), "example-M");
}

}  // namespace nitool
