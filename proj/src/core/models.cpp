#include "nmep/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmep/special_functions.hpp"

namespace nmep {

namespace {

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

}  // namespace

void DelaySystem::validate() const {
    require(std::isfinite(delay) && delay > 0.0, "DelaySystem: delay must be positive");
    require(!coeffs.empty(), "DelaySystem: at least one coefficient is required");
    require(std::all_of(coeffs.begin(), coeffs.end(), finite), "DelaySystem: coefficients must be finite");
}

void GiantAtomModel::validate() const {
    require(couplings.size() >= 2, "GiantAtomModel: at least two coupling points are required");
    require(std::isfinite(group_velocity) && group_velocity > 0.0, "GiantAtomModel: v_g must be positive");
    require(std::isfinite(spacing_delay) && spacing_delay > 0.0, "GiantAtomModel: tau must be positive");
    require(std::isfinite(phase), "GiantAtomModel: phase must be finite");
    require(std::all_of(couplings.begin(), couplings.end(), [](double g) { return std::isfinite(g); }),
            "GiantAtomModel: couplings must be finite");
    require(std::any_of(couplings.begin(), couplings.end(), [](double g) { return g != 0.0; }),
            "GiantAtomModel: at least one coupling must be nonzero");
}

void CollectiveModel::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "CollectiveModel: gamma must be positive");
    require(beta >= 0.0 && beta <= 1.0, "CollectiveModel: beta must lie in [0, 1]");
    require(std::isfinite(delay) && delay > 0.0, "CollectiveModel: tau must be positive");
    require(std::isfinite(phase), "CollectiveModel: phase must be finite");
}

std::vector<double> hankel_forward(const std::vector<double>& g) {
    const std::size_t n = g.size();
    std::vector<double> k(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        // Terms j and L-1-j swap under reversal of g; adding them first makes
        // the sum bitwise invariant.
        const std::size_t terms = n - m;
        double acc = 0.0;
        for (std::size_t j = 0; 2 * j + 1 < terms; ++j) {
            acc += g[j] * g[j + m] + g[terms - 1 - j] * g[terms - 1 - j + m];
        }
        if (terms % 2 == 1) acc += g[terms / 2] * g[terms / 2 + m];
        k[m] = m == 0 ? acc : 2.0 * acc;
    }
    return k;
}

std::vector<double> kappa_weights(const GiantAtomModel& model) {
    model.validate();
    auto k = hankel_forward(model.couplings);
    const double scale = kPi / model.group_velocity;
    for (double& v : k) v *= scale;
    return k;
}

DelaySystem giant_atom_to_delay_system(const GiantAtomModel& model) {
    const auto kappa = kappa_weights(model);
    DelaySystem sys;
    sys.delay = model.spacing_delay;
    sys.coeffs.resize(kappa.size());
    for (std::size_t m = 0; m < kappa.size(); ++m) {
        sys.coeffs[m] = -kappa[m] * std::polar(1.0, static_cast<double>(m) * model.phase);
    }
    return sys;
}

DelaySystem collective_to_delay_system(const CollectiveModel& model, bool symmetric) {
    model.validate();
    if (!symmetric) {
        throw Error(ErrorKind::invalid_argument,
                    "collective_to_delay_system: the single-equation reduction needs c1(0) = c2(0); "
                    "use integrate_two_atom for asymmetric initial conditions");
    }
    DelaySystem sys;
    sys.delay = model.delay;
    sys.coeffs.push_back(-0.5 * model.gamma);
    if (model.beta > 0.0) sys.coeffs.push_back(-0.5 * model.gamma * model.beta * std::polar(1.0, model.phase));
    return sys;
}

}  // namespace nmep
