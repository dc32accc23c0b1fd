#pragma once

#include "nitool/state_space.hpp"

#include <vector>

namespace nitool {

/// One lightly damped second-order mode k * wn^2 / (s^2 + 2 zeta wn s + wn^2).
struct Mode {
    double gain;               // k, > 0
    double damping;            // zeta, > 0
    double natural_frequency;  // wn in rad/s, > 0
};

/// Sum of second-order modes, the standard model of a flexible structure with
/// co-located force actuation and position sensing. Spillover dynamics are
/// simply the tail modes of such a sum.
struct ModalModel {
    std::vector<Mode> modes;

    void validate() const;
};

/// Block-diagonal realization, one companion-form block per mode with input
/// vector [0; k wn^2] and output [1, 0]. DC gain is the sum of the mode gains.
StateSpaceSystem modal_to_state_space(const ModalModel& model, std::string name = "modal");

/// Two unit masses on a frictionless table, each tied to a wall by a unit
/// spring and unit damper, coupled to each other by a spring of stiffness k
/// and a damper of resistance alpha. Forces in, displacements out.
struct TwoMassParams {
    double stiffness_k;    // N/m, > 0
    double damping_alpha;  // Ns/m, > 0

    void validate() const;
};

struct TwoMassPlant {
    StateSpaceSystem full;         // P_Delta = P + Delta, the physical plant
    StateSpaceSystem nominal;      // P = Psi diag(p(s)/2, 0) Psi^T
    StateSpaceSystem uncertainty;  // Delta = Psi^-1 diag(delta(s)/2, 0) Psi^-T
};

TwoMassPlant two_mass_plant(const TwoMassParams& params);

/// The congruence matrix [1 0; 1 1] that diagonalizes the two-mass dynamics.
Matrix two_mass_psi();

/// The worked controller
/// C(s) = Psi^-T diag(-2(s^2+s+1)/(2s^3+4s^2+4s+3), -1/(s+1)) Psi^-1.
StateSpaceSystem example_controller();

/// Disturbance-to-input map M(s) = -C(s) (I + P(s) C(s))^-1 built as the raw
/// interconnection (order = order(P) + order(C); pole-zero cancellations make
/// it non-minimal, which is deliberate: nothing is silently reduced). Use
/// example_m() for the exact-order form.
StateSpaceSystem closed_loop_m(const StateSpaceSystem& plant_nominal,
                               const StateSpaceSystem& controller);

/// Hand-built minimal realization of the closed form
/// M(s) = (1/(s+1)) Psi^-T Psi^-1 that closed_loop_m matches in frequency
/// response; this is the form the analysis operations run on.
StateSpaceSystem example_m();

}  // namespace nitool
