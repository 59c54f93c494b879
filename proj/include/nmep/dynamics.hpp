#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmep/models.hpp"

namespace nmep {

// Uniformly sampled complex amplitude, samples[k] = a(t0 + k dt).
struct TimeSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<cplx> samples;

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    double abs2(std::size_t k) const { return std::norm(samples.at(k)); }
    std::vector<double> abs2() const;
};

// Method-of-steps solution of da/dt = sum_m c_m a(t - m tau) Theta(t - m tau)
// with a(t < 0) = 0 and a(0) = a0.
//
// The delay must be an integer multiple of dt so that delayed arguments fall
// on grid nodes. The instantaneous term is propagated exactly and the delayed
// history enters through a cubic Hermite representation of each past step,
// giving a fourth-order global error.
TimeSeries integrate(const DelaySystem& system, cplx a0, double t_max, double dt);

// Exact partial sum of the round-trip series for c = (-gamma, -gamma e^{i phi}):
// sum_{n <= t/tau} [-gamma e^{i phi} (t - n tau)]^n / n! e^{-gamma (t - n tau)}.
// More than 400 terms is rejected; use the residue expansion instead.
cplx series_amplitude(double gamma, double phi, double tau, double t);

// Coupled pair dc_1/dt = -(gamma/2)[c_1 + beta e^{i phi_p} c_2(t - tau)], and 1 <-> 2.
std::pair<TimeSeries, TimeSeries> integrate_two_atom(const CollectiveModel& model, cplx c1_0, cplx c2_0,
                                                     double t_max, double dt);

struct FieldOracleOptions {
    std::size_t modes = 4000;
    double omega0 = 0.0;  // 0: multiple of 2 pi / tau closest to 20 / tau, shifted by phi
    double k_max = 0.0;   // 0: 3 omega0 / v_g
};

struct FieldOracleResult {
    TimeSeries amplitude;
    double max_norm_drift = 0.0;
    double omega0 = 0.0;
    double k_max = 0.0;
    std::vector<std::string> warnings;
};

// Atom coupled to a discretized waveguide continuum (single excitation), the
// microscopic model behind the delay equation. The mode coupling is scaled so
// that the continuum limit reproduces kappa_weights(model) exactly.
FieldOracleResult field_oracle(const GiantAtomModel& model, cplx a0, double t_max, double dt,
                               const FieldOracleOptions& options = {});

// dx/dt = sum_i y_i, dy_i/dt = -lambda_i y_i + gamma_i x: the memoryless
// embedding of a sum-of-exponentials kernel K(t) = sum_i gamma_i e^{-lambda_i t}.
TimeSeries markovian_embedding(std::span<const cplx> kernel_rates, std::span<const cplx> kernel_weights,
                               cplx x0, double t_max, double dt);

// Solution of x'' - (s1 + s2) x' + s1 s2 x = 0 with x(0) = a0, x'(0) = initial_slope.
// s1 == s2 is allowed and yields the (a0 + c t) e^{s t} Jordan form.
TimeSeries pseudomode_two_pole(cplx s1, cplx s2, cplx a0, cplx initial_slope, double t_max, double dt);

struct OscillationMetrics {
    int zero_count = 0;
    std::vector<double> minima_times;
    std::optional<double> fitted_period;
};

// Sign changes of Re a, interpolated minima of |a|^2, and the period implied
// by the minima spacing (two minima per period when successive lobes of Re a
// alternate in sign, as for a real damped oscillation).
OscillationMetrics oscillation_metrics(const TimeSeries& ts);

}  // namespace nmep
