#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmep/models.hpp"

namespace nmep {

struct EPReport {
    int order = 2;
    bool found = false;     // false: structured no-EP / infeasible outcome
    bool physical = true;   // false: kappa-level design without real couplings
    cplx s_ep{};
    double tau_ep = 0.0;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<double> residuals;  // |D|, |D'|, ... at s_ep
    std::vector<std::string> notes;
    std::optional<DelaySystem> system;  // physical model the residuals refer to
    std::vector<std::pair<double, double>> scan;  // residual curve of a failed root search

    std::optional<double> parameter(const std::string& name) const;
};

// [|D(s)|, |D'(s)|, ..., |D^{(order-1)}(s)|], 2 <= order <= 6.
std::vector<double> ep_residuals(const DelaySystem& system, cplx s, int order);

// c = (-gamma, -gamma e^{i phi}); EP2 at gamma tau = W_0(1/e) when phi = 0 mod 2 pi.
EPReport find_ep2_single_delay(double gamma, double phi);

struct Ep3Root {
    double g3 = 0.0;
    double tau_ep = 0.0;
    cplx s_ep{};
};

// Three-point giant atom with g3 tuned so that D = D' = D'' = 0. All roots of
// the coupling constraint in g3/g1 in [-0.999, -1e-6] are listed in `roots`;
// the report describes the root with the smallest |g3|.
EPReport find_ep3_symmetric(double g1, double g2, double phi, double group_velocity = 1.0,
                            std::vector<Ep3Root>* roots = nullptr);

// Order-N EP placed at s_ep for delay tau: solves for kappa_0..kappa_{N-1},
// then recovers couplings through hankel_invert.
EPReport design_epN(int n, double s_ep, double tau, double phi = 0.0, double group_velocity = 1.0);

class HankelInversionError : public Error {
public:
    HankelInversionError(const std::string& what, std::vector<std::pair<double, double>> samples)
        : Error(ErrorKind::no_convergence, what), samples_(std::move(samples)) {}
    // (X, F(X) - K_0) samples of the scanned quartic, empty for the Newton path.
    const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

private:
    std::vector<std::pair<double, double>> samples_;
};

// Real g with hankel_forward(g) == K, gauge g_1 > 0.
std::vector<double> hankel_invert(const std::vector<double>& k);

// eta_c = 2 W_0(1/(e beta)).
double collective_critical_distance(double beta);

// EP2 of the symmetric two-emitter sector at gamma tau = eta_c.
EPReport find_ep2_collective(double gamma, double beta, double phi);

// Dense solve with partial pivoting; throws on a singular matrix.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b);

}  // namespace nmep
