#include <cmath>
#include <vector>

#include "doctest.h"
#include "nmep/dynamics.hpp"
#include "nmep/special_functions.hpp"

using namespace nmep;

namespace {

DelaySystem single_delay(double gamma, double phi, double tau) {
    return DelaySystem{tau, {cplx(-gamma), -gamma * std::polar(1.0, phi)}};
}

double max_error_against_series(double gamma_tau, double dt_per_tau) {
    const double tau = gamma_tau;  // gamma = 1
    const auto ts = integrate(single_delay(1.0, 0.0, tau), 1.0, 3.0 * tau, tau * dt_per_tau);
    double err = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        err = std::max(err, std::abs(ts.samples[k] - series_amplitude(1.0, 0.0, tau, ts.time(k))));
    }
    return err;
}

// Volterra form x(t) = x0 + int_0^t Q(t - u) x(u) du with the integrated
// kernel Q(t) = gamma (1 - e^{-lambda t}) / lambda, solved by the trapezoid rule.
std::vector<cplx> volterra_trapezoid(cplx gamma, cplx lambda, cplx x0, double t_max, std::size_t n) {
    const double h = t_max / static_cast<double>(n);
    auto q = [&](std::size_t k) { return gamma * (1.0 - std::exp(-lambda * (static_cast<double>(k) * h))) / lambda; };
    std::vector<cplx> x(n + 1);
    x[0] = x0;
    for (std::size_t i = 1; i <= n; ++i) {
        cplx acc = 0.5 * q(i) * x[0];
        for (std::size_t j = 1; j < i; ++j) acc += q(i - j) * x[j];
        x[i] = x0 + h * acc;  // Q(0) = 0, so the scheme is explicit
    }
    return x;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("pure exponential before the first return") {
    const auto ts = integrate(single_delay(1.0, 0.0, 1.0), 1.0, 1.0, 1.0 / 64.0);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CHECK(std::abs(ts.samples[k] - std::exp(-ts.time(k))) <= 1e-12);
    }
}

TEST_CASE("first return segment") {
    const double t = 1.5;
    const cplx expected = std::exp(-t) - (t - 1.0) * std::exp(-(t - 1.0));
    CHECK(std::abs(series_amplitude(1.0, 0.0, 1.0, t) - expected) < 1e-15);
    const auto ts = integrate(single_delay(1.0, 0.0, 1.0), 1.0, 2.0, 1.0 / 64.0);
    CHECK(std::abs(ts.samples[96] - expected) <= 1e-8);
}

TEST_CASE("delay must be a multiple of dt") {
    try {
        integrate(single_delay(1.0, 0.0, 1.0), 1.0, 2.0, 0.3);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_argument);
        CHECK(std::string(e.what()).find("nearest valid dt") != std::string::npos);
    }
    CHECK_THROWS_AS(integrate(single_delay(1.0, 0.0, 1.0), 1.0, 2.0, 0.0), Error);
    CHECK_THROWS_AS(integrate(single_delay(1.0, 0.0, 1.0), 1.0, -1.0, 0.125), Error);
}

TEST_CASE("causality and initial condition") {
    // Changing the feedback changes nothing before t = tau.
    const auto a = integrate(single_delay(1.0, 0.0, 0.5), 1.0, 0.5, 1.0 / 256.0);
    const auto b = integrate(single_delay(1.0, 2.0, 0.5), 1.0, 0.5, 1.0 / 256.0);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a.samples[k] - b.samples[k]) <= 1e-12);
    CHECK(a.samples[0] == cplx(1.0));
    CHECK(a.t0 == 0.0);
}

TEST_CASE("fourth-order convergence") {
    for (double gt : {0.1, 0.27846454276107380, 1.0}) {
        const double coarse = max_error_against_series(gt, 1.0 / 16.0);
        const double fine = max_error_against_series(gt, 1.0 / 32.0);
        CAPTURE(gt);
        CHECK(coarse / fine >= 8.0);
    }
}

TEST_CASE("bound-state plateau for phi = pi") {
    const double gt = 0.5;
    const auto ts = integrate(single_delay(1.0, kPi, gt), 1.0, 40.0, gt / 64.0);
    const double plateau = 1.0 / (1.0 + gt);
    CHECK(std::abs(ts.samples.back()) == doctest::Approx(plateau).epsilon(1e-6));
}

TEST_CASE("series matches the integrator with a phase") {
    const double tau = 0.4;
    const auto ts = integrate(single_delay(1.3, 0.7, tau), 1.0, 2.0, tau / 64.0);
    for (std::size_t k = 0; k < ts.size(); k += 7) {
        CHECK(std::abs(ts.samples[k] - series_amplitude(1.3, 0.7, tau, ts.time(k))) <= 1e-8);
    }
}

TEST_CASE("series overflow guard") {
    CHECK_NOTHROW(series_amplitude(1.0, 0.0, 0.1, 39.0));
    try {
        series_amplitude(1.0, 0.0, 0.01, 10.0);
        FAIL("expected an overflow error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::overflow);
    }
}

TEST_CASE("two emitters reduce to the symmetric sector") {
    const CollectiveModel m{1.0, 0.8, 0.3, 0.5};
    const auto [c1, c2] = integrate_two_atom(m, 1.0, 1.0, 3.0, 0.5 / 64.0);
    const auto sym = integrate(collective_to_delay_system(m), 1.0, 3.0, 0.5 / 64.0);
    REQUIRE(c1.size() == sym.size());
    for (std::size_t k = 0; k < sym.size(); ++k) {
        CHECK(std::abs(c1.samples[k] - sym.samples[k]) <= 1e-12);
        CHECK(std::abs(c2.samples[k] - sym.samples[k]) <= 1e-12);
    }
}

TEST_CASE("two emitters, one excited") {
    const CollectiveModel m{2.0, 1.0, 0.0, 0.5};
    const auto [c1, c2] = integrate_two_atom(m, 1.0, 0.0, 0.5, 0.5 / 64.0);
    for (std::size_t k = 0; k < c1.size(); ++k) {
        CHECK(std::abs(c1.samples[k] - std::exp(-c1.time(k))) <= 1e-12);
        CHECK(std::abs(c2.samples[k]) <= 1e-14);
    }
    // Antisymmetric sector at beta = 1, phi_p = 0 follows c = (-gamma/2, +gamma/2).
    const auto [a1, a2] = integrate_two_atom(m, 1.0, -1.0, 2.0, 0.5 / 64.0);
    const auto anti = integrate(DelaySystem{0.5, {cplx(-1.0), cplx(1.0)}}, 1.0, 2.0, 0.5 / 64.0);
    for (std::size_t k = 0; k < anti.size(); ++k) {
        CHECK(std::abs(a1.samples[k] - anti.samples[k]) <= 1e-12);
        CHECK(std::abs(a2.samples[k] + anti.samples[k]) <= 1e-12);
    }
}

TEST_CASE("field oracle preconditions") {
    const double g = std::sqrt(1.0 / (2.0 * kPi));
    const GiantAtomModel m{{g, g}, 1.0, 0.2, 0.0};
    CHECK_THROWS_AS(field_oracle(m, 1.0, 1.0, 0.01, FieldOracleOptions{1, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(field_oracle(m, 1.0, 1.0, 0.0), Error);
    CHECK_THROWS_AS(field_oracle(m, 1.0, 1.0, 0.01, FieldOracleOptions{100, -1.0, 0.0}), Error);
}

TEST_CASE("field oracle conserves the norm") {
    const double g = std::sqrt(1.0 / (2.0 * kPi));
    const GiantAtomModel m{{g, g}, 1.0, 0.2, 0.0};
    const auto r = field_oracle(m, 1.0, 0.5, 0.0125, FieldOracleOptions{1000, 0.0, 0.0});
    CHECK(r.max_norm_drift <= 1e-8);
    CHECK(r.omega0 > 0.0);
    CHECK(r.k_max == doctest::Approx(3.0 * r.omega0));
    CHECK(std::abs(r.amplitude.samples[0] - cplx(1.0)) < 1e-15);
    // Short-time decay is close to the Markovian rate kappa_0 = 1.
    CHECK(std::abs(r.amplitude.samples[8]) == doctest::Approx(std::exp(-0.1)).epsilon(0.02));
}

TEST_CASE("markovian embedding of a single exponential kernel") {
    // x'' + lambda x' - gamma x = 0 with x(0) = 1, x'(0) = 0.
    const cplx lambda = 2.0;
    const cplx gamma = -3.0;
    const auto ts = markovian_embedding(std::vector<cplx>{lambda}, std::vector<cplx>{gamma}, 1.0, 2.0, 1e-3);
    const cplx disc = std::sqrt(lambda * lambda + 4.0 * gamma);
    const cplx r1 = 0.5 * (-lambda + disc);
    const cplx r2 = 0.5 * (-lambda - disc);
    for (std::size_t k = 0; k < ts.size(); k += 100) {
        const double t = ts.time(k);
        const cplx exact = (r1 * std::exp(r2 * t) - r2 * std::exp(r1 * t)) / (r1 - r2);
        CHECK(std::abs(ts.samples[k] - exact) <= 1e-10);
    }
}

TEST_CASE("markovian embedding against Volterra quadrature") {
    const cplx lambda(1.5, 4.0);
    const cplx gamma(-2.0, 0.5);
    const double t_max = 1.0;
    const auto ts = markovian_embedding(std::vector<cplx>{lambda}, std::vector<cplx>{gamma}, 1.0, t_max, 1.0 / 400.0);
    const auto coarse = volterra_trapezoid(gamma, lambda, 1.0, t_max, 400);
    const auto fine = volterra_trapezoid(gamma, lambda, 1.0, t_max, 800);
    for (std::size_t k = 0; k <= 400; k += 40) {
        const cplx richardson = (4.0 * fine[2 * k] - coarse[k]) / 3.0;
        CHECK(std::abs(ts.samples[k] - richardson) <= 1e-7);
    }
}

TEST_CASE("pseudomode forms") {
    const cplx s1(-1.0, 2.0);
    const cplx s2(-1.0, -2.0);
    const auto ts = pseudomode_two_pole(s1, s2, 1.0, 0.0, 2.0, 0.01);
    for (std::size_t k = 0; k < ts.size(); k += 20) {
        const double t = ts.time(k);
        const cplx exact = (s1 * std::exp(s2 * t) - s2 * std::exp(s1 * t)) / (s1 - s2);
        CHECK(std::abs(ts.samples[k] - exact) <= 1e-13);
    }
    // Coincident poles give the Jordan form.
    const cplx s(-2.0);
    const auto jordan = pseudomode_two_pole(s, s, 1.0, 0.5, 1.0, 0.1);
    for (std::size_t k = 0; k < jordan.size(); ++k) {
        const double t = jordan.time(k);
        const cplx exact = (1.0 + (0.5 - s) * t) * std::exp(s * t);
        CHECK(std::abs(jordan.samples[k] - exact) <= 1e-14);
    }
    // Continuity through the coalescence.
    const auto near = pseudomode_two_pole(s + 1e-7, s - 1e-7, 1.0, 0.5, 1.0, 0.1);
    for (std::size_t k = 0; k < jordan.size(); ++k) CHECK(std::abs(near.samples[k] - jordan.samples[k]) <= 1e-9);
}

TEST_CASE("oscillation metrics") {
    TimeSeries ts{0.0, 1e-3, {}};
    for (int k = 0; k <= 4000; ++k) {
        const double t = k * 1e-3;
        ts.samples.push_back(std::exp(-t) * std::cos(2.0 * kPi * t));
    }
    const auto m = oscillation_metrics(ts);
    CHECK(m.zero_count == 8);
    REQUIRE(m.fitted_period.has_value());
    CHECK(*m.fitted_period == doctest::Approx(1.0).epsilon(1e-3));

    TimeSeries mono{0.0, 0.01, {}};
    for (int k = 0; k <= 100; ++k) mono.samples.push_back(std::exp(-0.01 * k));
    const auto n = oscillation_metrics(mono);
    CHECK(n.zero_count == 0);
    CHECK(n.minima_times.empty());
    CHECK_FALSE(n.fitted_period.has_value());
}

TEST_CASE("abs2 helper") {
    TimeSeries ts{0.0, 1.0, {cplx(3.0, 4.0), cplx(0.0, 1.0)}};
    const auto p = ts.abs2();
    CHECK(p[0] == 25.0);
    CHECK(p[1] == 1.0);
    CHECK(ts.time(1) == 1.0);
}

}  // TEST_SUITE
