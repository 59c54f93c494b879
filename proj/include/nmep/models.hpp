#pragma once

#include <cstddef>
#include <vector>

#include "nmep/error.hpp"

namespace nmep {

// Scalar linear multi-delay evolution
//
//     da/dt = sum_m coeffs[m] * a(t - m*delay) * Theta(t - m*delay),
//
// the common form of every waveguide model in the library. Delay classes
// with a zero coefficient are kept so that the index is the delay multiple.
struct DelaySystem {
    double delay = 1.0;
    std::vector<cplx> coeffs;

    std::size_t classes() const noexcept { return coeffs.size(); }
    void validate() const;
};

// Emitter touching a 1D waveguide at N equally spaced points x_j = (j-1) d.
struct GiantAtomModel {
    std::vector<double> couplings;  // g_j
    double group_velocity = 1.0;    // v_g
    double spacing_delay = 1.0;     // tau = d / v_g
    double phase = 0.0;             // phi = omega_0 * tau

    void validate() const;
};

// Two point-like emitters separated by a delay tau in a common waveguide.
struct CollectiveModel {
    double gamma = 1.0;   // single-atom decay rate into the waveguide
    double beta = 1.0;    // waveguide-mediated fraction of the emission
    double phase = 0.0;   // propagation phase phi_p
    double delay = 1.0;   // tau

    double eta() const noexcept { return gamma * delay; }
    void validate() const;
};

// kappa_0 = (pi/v_g) sum_j g_j^2, kappa_m = (2 pi/v_g) sum_j g_j g_{j+m}.
std::vector<double> kappa_weights(const GiantAtomModel& model);

// Same map applied to bare couplings with v_g = pi, i.e. the dimensionless
// K_m = (v_g/pi) kappa_m used by the Hankel inversion.
std::vector<double> hankel_forward(const std::vector<double>& couplings);

// c_m = -kappa_m e^{i m phi}.
DelaySystem giant_atom_to_delay_system(const GiantAtomModel& model);

// Symmetric-sector reduction c_1 = c_2: c_0 = -gamma/2, c_1 = -(gamma/2) beta e^{i phi_p}.
// Passing symmetric = false is rejected; the asymmetric problem needs
// integrate_two_atom.
DelaySystem collective_to_delay_system(const CollectiveModel& model, bool symmetric = true);

}  // namespace nmep
