#include "nmep/ep_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "nmep/special_functions.hpp"
#include "nmep/spectral.hpp"

namespace nmep {

namespace {

bool phase_is_zero(double phi) { return std::abs(std::remainder(phi, 2.0 * kPi)) <= 1e-12; }

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

double bracket_root(const auto& f, double lo, double hi) {
    std::uintmax_t iters = 200;
    boost::math::tools::eps_tolerance<double> tol(52);
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

std::optional<double> EPReport::parameter(const std::string& name) const {
    for (const auto& [key, value] : parameters) {
        if (key == name) return value;
    }
    return std::nullopt;
}

std::vector<double> ep_residuals(const DelaySystem& system, cplx s, int order) {
    require(order >= 2 && order <= 6, "ep_residuals: order must lie in [2, 6]");
    system.validate();
    std::vector<double> out;
    for (int k = 0; k < order; ++k) out.push_back(std::abs(char_function(system, s, k)));
    return out;
}

std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    require(a.size() == n * n, "solve_linear: matrix shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        }
        if (a[pivot * n + col] == 0.0) throw Error(ErrorKind::domain, "solve_linear: singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

EPReport find_ep2_single_delay(double gamma, double phi) {
    require(std::isfinite(gamma) && gamma > 0.0, "find_ep2_single_delay: gamma must be positive");
    require(std::isfinite(phi), "find_ep2_single_delay: phi must be finite");
    EPReport report;
    report.order = 2;
    report.parameters = {{"gamma", gamma}, {"phi", phi}};
    if (!phase_is_zero(phi)) {
        report.found = false;
        report.notes.push_back("no EP: the double root of D needs a real W argument at -1/e, i.e. phi = 0 (mod 2 pi)");
        if (phase_is_zero(phi - kPi)) {
            report.notes.push_back("phi = pi: s = 0 is an exact bound-state pole for every tau");
        }
        return report;
    }
    const double u = lambert_w(0, kInvE).real();
    report.found = true;
    report.tau_ep = u / gamma;
    report.s_ep = -gamma - 1.0 / report.tau_ep;
    report.system = DelaySystem{report.tau_ep, {-gamma, -gamma}};
    report.residuals = ep_residuals(*report.system, report.s_ep, 2);
    report.parameters.emplace_back("gamma_tau_ep", u);
    report.parameters.emplace_back("s_ep_tau", report.s_ep.real() * report.tau_ep);
    return report;
}

namespace {

// log-form residual of the g3 constraint: lhs - log(rhs).
double ep3_residual(double g1, double g2, double g3) {
    const double sum2 = g1 * g1 + g2 * g2 + g3 * g3;
    const double q = g2 * g2 * (g1 + g3) * (g1 + g3);
    const double arg = -g2 * (g1 + g3) / (4.0 * g1 * g3);
    if (q == 0.0 || !(arg > 0.0)) return std::nan("");
    return -4.0 * g1 * g3 * sum2 / q + 1.5 - std::log(arg);
}

}  // namespace

EPReport find_ep3_symmetric(double g1, double g2, double phi, double group_velocity, std::vector<Ep3Root>* roots) {
    require(std::isfinite(g1) && std::isfinite(g2) && g1 != 0.0 && g2 != 0.0,
            "find_ep3_symmetric: g1 and g2 must be finite and nonzero");
    require(std::isfinite(group_velocity) && group_velocity > 0.0, "find_ep3_symmetric: v_g must be positive");
    require(std::isfinite(phi), "find_ep3_symmetric: phi must be finite");
    const double v = group_velocity;
    EPReport report;
    report.order = 3;
    report.parameters = {{"g1", g1}, {"g2", g2}, {"phi", phi}, {"v_g", v}};
    if (!phase_is_zero(phi)) {
        report.notes.push_back("no EP: real kappa_m and a real s_ep need phi = 0 (mod 2 pi)");
        return report;
    }

    // Scan g3/g1 on a log grid of |g3/g1| in [1e-6, 0.999].
    constexpr int kScanPoints = 200;
    std::vector<double> ratios(kScanPoints), values(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        const double f = static_cast<double>(i) / (kScanPoints - 1);
        ratios[i] = -std::exp(std::log(1e-6) + f * (std::log(0.999) - std::log(1e-6)));
        values[i] = ep3_residual(g1, g2, ratios[i] * g1);
        report.scan.emplace_back(ratios[i], values[i]);
    }
    std::vector<Ep3Root> found;
    for (int i = 0; i + 1 < kScanPoints; ++i) {
        const double a = values[i], b = values[i + 1];
        if (!std::isfinite(a) || !std::isfinite(b) || (a > 0.0) == (b > 0.0)) continue;
        const auto f = [&](double r) { return ep3_residual(g1, g2, r * g1); };
        const double r = a == 0.0 ? ratios[i] : bracket_root(f, ratios[i + 1], ratios[i]);
        const double g3 = r * g1;
        const double tau = -(4.0 * v / kPi) * g1 * g3 / (g2 * g2 * (g1 + g3) * (g1 + g3));
        if (!(tau > 0.0)) continue;
        const double kappa0 = kPi / v * (g1 * g1 + g2 * g2 + g3 * g3);
        found.push_back({g3, tau, cplx(-kappa0 - 1.5 / tau, 0.0)});
    }
    if (roots) *roots = found;
    if (found.empty()) {
        report.notes.push_back("no EP: the g3 constraint has no sign change for g3/g1 in [-0.999, -1e-6]");
        return report;
    }
    report.scan.clear();
    const auto best = std::min_element(found.begin(), found.end(),
                                       [](const Ep3Root& a, const Ep3Root& b) { return std::abs(a.g3) < std::abs(b.g3); });

    const double g3 = best->g3;
    GiantAtomModel model{{g1, g2, g3}, v, best->tau_ep, 0.0};
    const auto kappa = kappa_weights(model);
    report.found = true;
    report.tau_ep = best->tau_ep;
    report.s_ep = best->s_ep;
    report.system = giant_atom_to_delay_system(model);
    report.residuals = ep_residuals(*report.system, report.s_ep, 3);

    const double gamma = kPi * g1 * g1 / v;
    const double tau = report.tau_ep;
    const double target = -kappa[1] / (4.0 * kappa[2]);
    report.parameters.emplace_back("g3", g3);
    report.parameters.emplace_back("g3_over_g1", g3 / g1);
    report.parameters.emplace_back("kappa_0", kappa[0]);
    report.parameters.emplace_back("kappa_1", kappa[1]);
    report.parameters.emplace_back("kappa_2", kappa[2]);
    report.parameters.emplace_back("gamma", gamma);
    report.parameters.emplace_back("gamma_tau_ep", gamma * tau);
    report.parameters.emplace_back("delay_condition_residual", std::abs(tau * kappa[1] * kappa[1] / (8.0 * kappa[2]) + 1.0));
    report.parameters.emplace_back("coupling_condition_residual", std::abs(std::exp(kappa[0] * tau + 1.5) - target) / std::abs(target));
    report.notes.push_back("gamma = pi g1^2 / v_g");
    if (found.size() > 1) {
        std::ostringstream msg;
        msg << found.size() << " roots of the g3 constraint; reporting the smallest |g3|. g3/g1 =";
        for (const auto& r : found) msg << ' ' << fmt(r.g3 / g1);
        report.notes.push_back(msg.str());
    }
    return report;
}

namespace {

std::vector<double> forward_residual(const std::vector<double>& g, const std::vector<double>& k) {
    auto f = hankel_forward(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= k[i];
    return f;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Damped Newton on the quadratic map g -> K.
bool newton_hankel(std::vector<double>& g, const std::vector<double>& k, double tol) {
    const std::size_t n = g.size();
    auto r = forward_residual(g, k);
    for (int it = 0; it < 100 && max_abs(r) > tol; ++it) {
        std::vector<double> jac(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) jac[j] = 2.0 * g[j];
        for (std::size_t m = 1; m < n; ++m) {
            for (std::size_t j = 0; j < n; ++j) {
                double d = 0.0;
                if (j + m < n) d += g[j + m];
                if (j >= m) d += g[j - m];
                jac[m * n + j] = 2.0 * d;
            }
        }
        std::vector<double> rhs(r);
        for (double& x : rhs) x = -x;
        std::vector<double> step;
        try {
            step = solve_linear(jac, rhs);
        } catch (const Error&) {
            return false;
        }
        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            std::vector<double> trial(g);
            for (std::size_t j = 0; j < n; ++j) trial[j] += lambda * step[j];
            auto tr = forward_residual(trial, k);
            if (max_abs(tr) < max_abs(r)) {
                g = std::move(trial);
                r = std::move(tr);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return max_abs(r) <= tol;
}

}  // namespace

std::vector<double> hankel_invert(const std::vector<double>& k) {
    require(!k.empty(), "hankel_invert: empty K");
    require(std::all_of(k.begin(), k.end(), [](double x) { return std::isfinite(x); }), "hankel_invert: K must be finite");
    require(k[0] > 0.0, "hankel_invert: K_0 must be positive");
    const std::size_t n = k.size();
    const double tol = 1e-10 * k[0];
    std::vector<double> g(n, 0.0);

    if (n == 1) {
        g[0] = std::sqrt(k[0]);
    } else if (n == 2) {
        if (std::abs(k[1]) > k[0]) {
            throw HankelInversionError("hankel_invert: |K_1| > K_0 admits no real couplings", {});
        }
        const double a = std::sqrt(k[0] + k[1]);
        const double b = std::sqrt(k[0] - k[1]);
        g = {0.5 * (a + b), 0.5 * (a - b)};
    } else if (n == 3) {
        // F(X) = X + K1^2 X / (2X + K2)^2 + K2^2 / (4X) = K0 with X = g1^2 <= K0.
        const double k0 = k[0], k1 = k[1], k2 = k[2];
        const auto f = [&](double x) {
            const double d = 2.0 * x + k2;
            return x + k1 * k1 * x / (d * d) + k2 * k2 / (4.0 * x) - k0;
        };
        constexpr int kSamples = 400;
        std::vector<std::pair<double, double>> samples;
        for (int i = 0; i < kSamples; ++i) {
            const double x = k0 * std::exp(std::log(1e-12) * (1.0 - static_cast<double>(i) / (kSamples - 1)));
            samples.emplace_back(x, f(x));
        }
        std::optional<double> root;
        for (int i = kSamples - 1; i > 0 && !root; --i) {
            const auto [xa, fa] = samples[i - 1];
            const auto [xb, fb] = samples[i];
            if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
            if (fb == 0.0) root = xb;
            else if ((fa > 0.0) != (fb > 0.0)) root = bracket_root(f, xa, xb);
        }
        if (!root) {
            throw HankelInversionError("hankel_invert: F(X) = K_0 has no real positive root in (0, K_0]",
                                       std::move(samples));
        }
        const double g1 = std::sqrt(*root);
        g = {g1, k1 * g1 / (2.0 * *root + k2), k2 / (2.0 * g1)};
    } else {
        g[0] = std::sqrt(k[0]);
        for (std::size_t m = 1; m < n; ++m) g[m] = k[m] / (2.0 * g[0]);
    }

    // Polish (and, for N > 3, solve) on the full map.
    if (max_abs(forward_residual(g, k)) > tol * 1e-3) newton_hankel(g, k, tol * 1e-3);
    if (g[0] < 0.0) {
        for (double& x : g) x = -x;
    }
    const double res = max_abs(forward_residual(g, k));
    if (!(res <= tol)) {
        throw HankelInversionError("hankel_invert: Newton did not reach a real solution (residual " + fmt(res) + ")",
                                   {});
    }
    return g;
}

EPReport design_epN(int n, double s_ep, double tau, double phi, double group_velocity) {
    require(n >= 2 && n <= 6, "design_epN: order must lie in [2, 6]");
    require(std::isfinite(s_ep) && s_ep < 0.0, "design_epN: s_ep must be negative");
    require(std::isfinite(tau) && tau > 0.0, "design_epN: tau must be positive");
    require(std::isfinite(group_velocity) && group_velocity > 0.0, "design_epN: v_g must be positive");
    require(phase_is_zero(phi), "design_epN: real couplings need phi = 0 (mod 2 pi)");

    // Unknowns x_m = kappa_m e^{-s m tau}; row r is D^{(r)}(s) = 0 divided by tau^r.
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> a(un * un), b(un, 0.0);
    for (std::size_t r = 0; r < un; ++r) {
        for (std::size_t m = 0; m < un; ++m) {
            a[r * un + m] = r == 0 ? 1.0 : std::pow(-static_cast<double>(m), static_cast<double>(r));
        }
    }
    b[0] = -s_ep;
    b[1] = -1.0 / tau;
    const auto x = solve_linear(a, b);
    std::vector<double> kappa(un);
    for (std::size_t m = 0; m < un; ++m) kappa[m] = x[m] * std::exp(s_ep * static_cast<double>(m) * tau);

    if (!(kappa[0] > 0.0)) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "design_epN: infeasible delay, kappa_0 = " << kappa[0] << " <= 0";
        if (n == 3) {
            msg << "; an order-3 EP needs tau > 3/(2|s_ep|) = " << 1.5 / std::abs(s_ep);
        } else {
            msg << "; increase tau |s_ep|";
        }
        throw Error(ErrorKind::infeasible, msg.str());
    }

    EPReport report;
    report.order = n;
    report.found = true;
    report.s_ep = s_ep;
    report.tau_ep = tau;
    report.parameters = {{"s_ep", s_ep}, {"tau", tau}, {"phi", phi}, {"v_g", group_velocity}};
    std::vector<double> k(un);
    for (std::size_t m = 0; m < un; ++m) {
        report.parameters.emplace_back("kappa_" + std::to_string(m), kappa[m]);
        k[m] = group_velocity / kPi * kappa[m];
    }
    for (std::size_t m = 0; m < un; ++m) report.parameters.emplace_back("K_" + std::to_string(m), k[m]);

    DelaySystem kappa_system{tau, {}};
    for (double km : kappa) kappa_system.coeffs.push_back(-km);
    try {
        const auto g = hankel_invert(k);
        GiantAtomModel model{g, group_velocity, tau, 0.0};
        const auto recon = kappa_weights(model);
        double roundtrip = 0.0;
        for (std::size_t m = 0; m < un; ++m) roundtrip = std::max(roundtrip, std::abs(recon[m] - kappa[m]));
        for (std::size_t j = 0; j < un; ++j) report.parameters.emplace_back("g" + std::to_string(j + 1), g[j]);
        report.parameters.emplace_back("kappa_roundtrip_residual", roundtrip);
        report.system = giant_atom_to_delay_system(model);
        report.physical = true;
    } catch (const HankelInversionError& e) {
        report.physical = false;
        report.system = kappa_system;
        report.notes.push_back(std::string("no physical couplings: ") + e.what());
    }
    report.residuals = ep_residuals(*report.system, report.s_ep, n);
    return report;
}

double collective_critical_distance(double beta) {
    if (!(beta > 0.0)) throw Error(ErrorKind::domain, "collective_critical_distance: beta must be positive");
    require(beta <= 1.0, "collective_critical_distance: beta must not exceed 1");
    return 2.0 * lambert_w(0, 1.0 / (kE * beta)).real();
}

EPReport find_ep2_collective(double gamma, double beta, double phi) {
    require(std::isfinite(gamma) && gamma > 0.0, "find_ep2_collective: gamma must be positive");
    require(std::isfinite(phi), "find_ep2_collective: phi must be finite");
    const double eta = collective_critical_distance(beta);
    EPReport report;
    report.order = 2;
    report.parameters = {{"gamma", gamma}, {"beta", beta}, {"phi_p", phi}, {"eta_c", eta}};
    if (!phase_is_zero(phi)) {
        report.notes.push_back("no EP: the W argument reaches -1/e only for phi_p = 0 (mod 2 pi)");
        return report;
    }
    report.found = true;
    report.tau_ep = eta / gamma;
    report.s_ep = -0.5 * gamma - 1.0 / report.tau_ep;
    report.system = collective_to_delay_system(CollectiveModel{gamma, beta, phi, report.tau_ep});
    report.residuals = ep_residuals(*report.system, report.s_ep, 2);
    const double half = 0.5 * beta * eta;
    report.parameters.emplace_back("w_argument", -half * std::exp(0.5 * eta));
    report.parameters.emplace_back("critical_condition_residual", std::abs(half * std::exp(0.5 * eta) - kInvE));
    report.notes.push_back("symmetric sector c1(0) = c2(0)");
    return report;
}

}  // namespace nmep
