#include "nmep/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nmep/special_functions.hpp"

namespace nmep {

std::vector<double> TimeSeries::abs2() const {
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [](cplx a) { return std::norm(a); });
    return out;
}

namespace {

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

std::size_t step_count(double t_max, double dt) {
    require(std::isfinite(t_max) && t_max > 0.0, "t_max must be positive");
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
}

std::size_t steps_per_delay(double delay, double dt) {
    const double ratio = delay / dt;
    const double nearest = std::max(1.0, std::round(ratio));
    if (std::abs(ratio - nearest) > 1e-9 * nearest) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "delay/dt = " << ratio << " is not a positive integer; nearest valid dt is " << delay / nearest;
        throw Error(ErrorKind::invalid_argument, msg.str());
    }
    return static_cast<std::size_t>(nearest);
}

// phi_j(z) = sum_i z^i / (i + j)!, j = 0..4.
std::array<cplx, 5> phi_functions(cplx z) {
    std::array<cplx, 5> phi{};
    if (std::abs(z) < 0.5) {
        for (int j = 0; j < 5; ++j) {
            double fact = std::tgamma(j + 1.0);
            cplx term = 1.0 / fact;
            cplx acc = term;
            for (int i = 1; i < 30; ++i) {
                term *= z / static_cast<double>(i + j);
                acc += term;
            }
            phi[j] = acc;
        }
        return phi;
    }
    phi[0] = std::exp(z);
    double fact = 1.0;
    for (int j = 0; j < 4; ++j) {
        phi[j + 1] = (phi[j] - 1.0 / fact) / z;
        fact *= j + 1;
    }
    return phi;
}

// x_i' = rates_i x_i + sum_m (A_m x(t - m tau))_i, the common engine behind
// the scalar and two-emitter delay equations. `delayed[m - 1]` holds the
// row-major d x d matrix of delay class m.
struct DelayNetwork {
    std::vector<cplx> rates;
    std::vector<std::vector<cplx>> delayed;
    double delay = 1.0;
};

std::vector<TimeSeries> run_network(const DelayNetwork& net, const std::vector<cplx>& x0, double t_max,
                                    double dt) {
    const std::size_t d = net.rates.size();
    const std::size_t n = step_count(t_max, dt);
    const std::size_t k = steps_per_delay(net.delay, dt);
    const std::size_t classes = net.delayed.size();

    std::vector<cplx> decay(d);
    std::vector<std::array<cplx, 4>> weights(d);
    for (std::size_t r = 0; r < d; ++r) {
        const auto phi = phi_functions(net.rates[r] * dt);
        decay[r] = phi[0];
        double fact = 1.0;
        double hp = dt;
        for (int j = 0; j < 4; ++j) {
            weights[r][j] = fact * hp * phi[j + 1];
            fact *= j + 1;
            hp *= dt;
        }
    }

    // Node values with one-sided derivatives; every discontinuity of the
    // derivative sits on a node because tau = k dt.
    std::vector<cplx> x((n + 1) * d), dplus((n + 1) * d), dminus((n + 1) * d);
    for (std::size_t r = 0; r < d; ++r) {
        x[r] = x0[r];
        dplus[r] = net.rates[r] * x0[r];
    }

    std::vector<cplx> u0(d), u0d(d), u1(d), u1d(d), jump(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(u0.begin(), u0.end(), cplx{});
        std::fill(u0d.begin(), u0d.end(), cplx{});
        std::fill(u1.begin(), u1.end(), cplx{});
        std::fill(u1d.begin(), u1d.end(), cplx{});
        for (std::size_t m = 1; m <= classes; ++m) {
            if (i < m * k) break;
            const std::size_t q = i - m * k;
            const auto& a = net.delayed[m - 1];
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < d; ++c) {
                    const cplx coef = a[r * d + c];
                    if (coef == 0.0) continue;
                    u0[r] += coef * x[q * d + c];
                    u0d[r] += coef * dplus[q * d + c];
                    u1[r] += coef * x[(q + 1) * d + c];
                    u1d[r] += coef * dminus[(q + 1) * d + c];
                }
            }
        }
        for (std::size_t r = 0; r < d; ++r) {
            const cplx p0 = u0[r];
            const cplx p1 = u0d[r];
            const cplx p2 = (3.0 * (u1[r] - u0[r]) / dt - 2.0 * u0d[r] - u1d[r]) / dt;
            const cplx p3 = (2.0 * (u0[r] - u1[r]) / dt + u0d[r] + u1d[r]) / (dt * dt);
            const auto& w = weights[r];
            const cplx next =
                decay[r] * x[i * d + r] + p0 * w[0] + p1 * w[1] + p2 * w[2] + p3 * w[3];
            x[(i + 1) * d + r] = next;
            dminus[(i + 1) * d + r] = net.rates[r] * next + u1[r];
        }
        // Right derivative at the new node, including classes switching on there.
        std::fill(jump.begin(), jump.end(), cplx{});
        for (std::size_t m = 1; m <= classes; ++m) {
            if (i + 1 < m * k) break;
            const std::size_t q = i + 1 - m * k;
            const auto& a = net.delayed[m - 1];
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < d; ++c) jump[r] += a[r * d + c] * x[q * d + c];
            }
        }
        for (std::size_t r = 0; r < d; ++r) dplus[(i + 1) * d + r] = net.rates[r] * x[(i + 1) * d + r] + jump[r];
    }

    std::vector<TimeSeries> out(d);
    for (std::size_t r = 0; r < d; ++r) {
        out[r].t0 = 0.0;
        out[r].dt = dt;
        out[r].samples.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) out[r].samples[i] = x[i * d + r];
    }
    return out;
}

}  // namespace

TimeSeries integrate(const DelaySystem& system, cplx a0, double t_max, double dt) {
    system.validate();
    require(finite(a0), "integrate: initial amplitude must be finite");
    DelayNetwork net;
    net.delay = system.delay;
    net.rates = {system.coeffs[0]};
    for (std::size_t m = 1; m < system.classes(); ++m) net.delayed.push_back({system.coeffs[m]});
    return std::move(run_network(net, {a0}, t_max, dt).front());
}

cplx series_amplitude(double gamma, double phi, double tau, double t) {
    require(gamma > 0.0 && tau > 0.0, "series_amplitude: gamma and tau must be positive");
    require(std::isfinite(t) && t >= 0.0, "series_amplitude: t must be non-negative");
    const double terms = std::floor(t / tau) + 1.0;
    if (terms > 400.0) {
        throw Error(ErrorKind::overflow,
                    "series_amplitude: t/tau needs more than 400 terms; use the residue expansion");
    }
    const auto n_max = static_cast<int>(terms) - 1;
    cplx sum = std::exp(-gamma * t);
    for (int n = 1; n <= n_max; ++n) {
        const double lag = t - n * tau;
        if (lag <= 0.0) break;
        // |term| = (gamma lag)^n / n! e^{-gamma lag}, phase n (phi + pi).
        const double log_mag = n * std::log(gamma * lag) - std::lgamma(n + 1.0) - gamma * lag;
        sum += std::polar(std::exp(log_mag), n * (phi + kPi));
    }
    return sum;
}

std::pair<TimeSeries, TimeSeries> integrate_two_atom(const CollectiveModel& model, cplx c1_0, cplx c2_0,
                                                     double t_max, double dt) {
    model.validate();
    require(finite(c1_0) && finite(c2_0), "integrate_two_atom: initial amplitudes must be finite");
    DelayNetwork net;
    net.delay = model.delay;
    net.rates = {-0.5 * model.gamma, -0.5 * model.gamma};
    const cplx cross = -0.5 * model.gamma * model.beta * std::polar(1.0, model.phase);
    net.delayed.push_back({0.0, cross, cross, 0.0});
    auto out = run_network(net, {c1_0, c2_0}, t_max, dt);
    return {std::move(out[0]), std::move(out[1])};
}

FieldOracleResult field_oracle(const GiantAtomModel& model, cplx a0, double t_max, double dt,
                               const FieldOracleOptions& options) {
    model.validate();
    require(finite(a0), "field_oracle: initial amplitude must be finite");
    require(options.modes >= 1000, "field_oracle: at least 1000 modes are required");
    const std::size_t n_out = step_count(t_max, dt);
    const double tau = model.spacing_delay;
    const double vg = model.group_velocity;
    const double two_pi = 2.0 * kPi;

    const double phase = model.phase - two_pi * std::floor(model.phase / two_pi);
    double omega0 = options.omega0;
    if (omega0 == 0.0) {
        const double turns = std::max(1.0, std::round((20.0 - phase) / two_pi));
        omega0 = (two_pi * turns + phase) / tau;
    } else {
        const double mismatch = std::remainder(omega0 * tau - model.phase, two_pi);
        require(std::abs(mismatch) <= 1e-9 * std::max(1.0, omega0 * tau),
                "field_oracle: omega0 * tau must equal phi modulo 2 pi");
    }
    require(omega0 > 0.0, "field_oracle: omega0 must be positive");
    const double k_max = options.k_max == 0.0 ? 3.0 * omega0 / vg : options.k_max;
    require(k_max * vg >= 3.0 * omega0 * (1.0 - 1e-12), "field_oracle: k_max * v_g must be at least 3 omega0");

    // Midpoint grid on [-k_max, k_max]; frame rotating at omega0.
    const std::size_t m_modes = options.modes;
    const double dk = 2.0 * k_max / static_cast<double>(m_modes);
    std::vector<double> detuning(m_modes);
    std::vector<cplx> coupling(m_modes);
    double coupling_norm = 0.0;
    double max_detuning = 0.0;
    for (std::size_t i = 0; i < m_modes; ++i) {
        const double k = -k_max + dk * (static_cast<double>(i) + 0.5);
        detuning[i] = vg * std::abs(k) - omega0;
        cplx g{};
        for (std::size_t j = 0; j < model.couplings.size(); ++j) {
            g += model.couplings[j] * std::polar(1.0, k * static_cast<double>(j) * vg * tau);
        }
        coupling[i] = g * std::sqrt(0.5 * dk);
        coupling_norm += std::norm(coupling[i]);
        max_detuning = std::max(max_detuning, std::abs(detuning[i]));
    }

    const double spectral_bound = max_detuning + std::sqrt(coupling_norm);
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(spectral_bound * dt / 0.02)));
    const double h = dt / static_cast<double>(substeps);

    // psi[0] is the atom, psi[1 + i] mode i; d psi/dt = -i H psi.
    const std::size_t dim = m_modes + 1;
    std::vector<cplx> psi(dim, cplx{}), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    psi[0] = a0;
    const cplx minus_i{0.0, -1.0};
    auto rhs = [&](const std::vector<cplx>& y, std::vector<cplx>& out) {
        cplx acc{};
        const cplx atom = y[0];
        for (std::size_t i = 0; i < m_modes; ++i) {
            acc += coupling[i] * y[i + 1];
            out[i + 1] = minus_i * (detuning[i] * y[i + 1] + std::conj(coupling[i]) * atom);
        }
        out[0] = minus_i * acc;
    };
    auto norm_of = [&](const std::vector<cplx>& y) {
        return std::accumulate(y.begin(), y.end(), 0.0, [](double s, cplx c) { return s + std::norm(c); });
    };

    FieldOracleResult result;
    result.omega0 = omega0;
    result.k_max = k_max;
    result.amplitude.t0 = 0.0;
    result.amplitude.dt = dt;
    result.amplitude.samples.reserve(n_out + 1);
    result.amplitude.samples.push_back(a0);
    const double norm0 = norm_of(psi);
    for (std::size_t s = 0; s < n_out; ++s) {
        for (std::size_t sub = 0; sub < substeps; ++sub) {
            rhs(psi, k1);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
            rhs(tmp, k2);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
            rhs(tmp, k3);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + h * k3[i];
            rhs(tmp, k4);
            for (std::size_t i = 0; i < dim; ++i) psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        result.amplitude.samples.push_back(psi[0]);
        const double drift = norm0 > 0.0 ? std::abs(norm_of(psi) - norm0) / norm0 : 0.0;
        result.max_norm_drift = std::max(result.max_norm_drift, drift);
    }
    if (result.max_norm_drift > 1e-3) {
        std::ostringstream msg;
        msg << "norm drift " << result.max_norm_drift << " exceeds 1e-3; the mode grid is under-resolved";
        result.warnings.push_back(msg.str());
    }
    return result;
}

TimeSeries markovian_embedding(std::span<const cplx> kernel_rates, std::span<const cplx> kernel_weights,
                               cplx x0, double t_max, double dt) {
    require(!kernel_rates.empty(), "markovian_embedding: at least one kernel term is required");
    require(kernel_rates.size() == kernel_weights.size(),
            "markovian_embedding: rates and weights must have equal length");
    require(finite(x0), "markovian_embedding: initial value must be finite");
    const std::size_t n_out = step_count(t_max, dt);
    const std::size_t n_aux = kernel_rates.size();

    double bound = 0.0;
    for (std::size_t i = 0; i < n_aux; ++i) bound = std::max(bound, std::abs(kernel_rates[i]));
    double coupling = 0.0;
    for (std::size_t i = 0; i < n_aux; ++i) coupling += std::abs(kernel_weights[i]);
    bound += std::sqrt(coupling * static_cast<double>(n_aux)) + 1.0;
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(bound * dt / 0.05)));
    const double h = dt / static_cast<double>(substeps);

    std::vector<cplx> y(n_aux + 1, cplx{}), k1(n_aux + 1), k2(n_aux + 1), k3(n_aux + 1), k4(n_aux + 1),
        tmp(n_aux + 1);
    y[0] = x0;
    auto rhs = [&](const std::vector<cplx>& s, std::vector<cplx>& out) {
        cplx acc{};
        for (std::size_t i = 0; i < n_aux; ++i) {
            acc += s[i + 1];
            out[i + 1] = -kernel_rates[i] * s[i + 1] + kernel_weights[i] * s[0];
        }
        out[0] = acc;
    };

    TimeSeries ts;
    ts.dt = dt;
    ts.samples.reserve(n_out + 1);
    ts.samples.push_back(x0);
    for (std::size_t s = 0; s < n_out; ++s) {
        for (std::size_t sub = 0; sub < substeps; ++sub) {
            rhs(y, k1);
            for (std::size_t i = 0; i <= n_aux; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            rhs(tmp, k2);
            for (std::size_t i = 0; i <= n_aux; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            rhs(tmp, k3);
            for (std::size_t i = 0; i <= n_aux; ++i) tmp[i] = y[i] + h * k3[i];
            rhs(tmp, k4);
            for (std::size_t i = 0; i <= n_aux; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        ts.samples.push_back(y[0]);
    }
    return ts;
}

TimeSeries pseudomode_two_pole(cplx s1, cplx s2, cplx a0, cplx initial_slope, double t_max, double dt) {
    require(finite(s1) && finite(s2) && finite(a0) && finite(initial_slope),
            "pseudomode_two_pole: inputs must be finite");
    const std::size_t n = step_count(t_max, dt);
    // x = e^{m t} [a0 cosh(h t) + (x'(0) - m a0) sinh(h t) / h], m = (s1+s2)/2, h = (s1-s2)/2.
    const cplx mean = 0.5 * (s1 + s2);
    const cplx half_gap = 0.5 * (s1 - s2);
    const cplx slope = initial_slope - mean * a0;
    TimeSeries ts;
    ts.dt = dt;
    ts.samples.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const cplx ht = half_gap * t;
        cplx sinhc;
        if (std::abs(ht) < 1e-4) {
            const cplx h2 = ht * ht;
            sinhc = t * (1.0 + h2 / 6.0 + h2 * h2 / 120.0);
        } else {
            sinhc = std::sinh(ht) / half_gap;
        }
        ts.samples[i] = std::exp(mean * t) * (a0 * std::cosh(ht) + slope * sinhc);
    }
    return ts;
}

OscillationMetrics oscillation_metrics(const TimeSeries& ts) {
    require(!ts.samples.empty(), "oscillation_metrics: empty series");
    OscillationMetrics out;
    int last_sign = 0;
    for (const cplx& a : ts.samples) {
        const int sign = a.real() > 0.0 ? 1 : (a.real() < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++out.zero_count;
        last_sign = sign;
    }

    const auto p = ts.abs2();
    std::vector<std::size_t> minima_idx;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] < p[i - 1] && p[i] <= p[i + 1]) {
            minima_idx.push_back(i);
            const double curv = p[i - 1] - 2.0 * p[i] + p[i + 1];
            double offset = 0.0;
            if (curv > 0.0) offset = 0.5 * (p[i - 1] - p[i + 1]) / curv;
            out.minima_times.push_back(ts.time(i) + offset * ts.dt);
        }
    }
    if (out.minima_times.size() < 2) return out;

    const double spacing = (out.minima_times.back() - out.minima_times.front()) /
                           static_cast<double>(out.minima_times.size() - 1);
    // Sign of Re a on each lobe between consecutive minima.
    bool alternating = true;
    int prev_lobe = 0;
    for (std::size_t j = 0; j + 1 < minima_idx.size(); ++j) {
        double peak = 0.0;
        for (std::size_t i = minima_idx[j]; i <= minima_idx[j + 1]; ++i) {
            if (std::abs(ts.samples[i].real()) > std::abs(peak)) peak = ts.samples[i].real();
        }
        const int lobe = peak > 0.0 ? 1 : (peak < 0.0 ? -1 : 0);
        if (j > 0 && lobe == prev_lobe) alternating = false;
        prev_lobe = lobe;
    }
    out.fitted_period = alternating ? 2.0 * spacing : spacing;
    return out;
}

}  // namespace nmep
