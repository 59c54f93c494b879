#include <cmath>
#include <random>

#include "doctest.h"
#include "nmep/dynamics.hpp"
#include "nmep/models.hpp"
#include "nmep/spectral.hpp"
#include "nmep/special_functions.hpp"

using namespace nmep;

TEST_SUITE("properties") {

TEST_CASE("continuity from above on the cuts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(-50.0, 0.0);
    std::uniform_int_distribution<int> branch(-4, 4);
    for (int i = 0; i < 2000; ++i) {
        const double re = x(rng);
        const int n = branch(rng);
        if (n == 0 && re > -kInvE) continue;
        const cplx on = lambert_w(n, cplx(re, 0.0));
        const cplx above = lambert_w(n, cplx(re, 1e-10 * (1.0 + std::abs(re))));
        CHECK(std::abs(on - above) <= 1e-6);
    }
}

TEST_CASE("poles in the closed left half plane for passive atoms") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int i = 0; i < 20; ++i) {
        const auto sys = giant_atom_to_delay_system(GiantAtomModel{{1.0, u(rng)}, 1.0, 0.1 + 0.5 * (u(rng) + 1.0),
                                                                   phase(rng)});
        for (int n = -10; n <= 10; ++n) CHECK(closed_form_pole(sys, n).s.real() <= 1e-12);
    }
}

TEST_CASE("contour count equals search multiplicity on random atoms") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_int_distribution<int> points(2, 4);
    std::uniform_real_distribution<double> jitter(0.0, 0.01);
    int checked = 0;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> g(static_cast<std::size_t>(points(rng)));
        for (double& x : g) x = 0.3 * u(rng);
        g[0] = std::abs(g[0]) + 0.05;
        const double tau = 0.2 + 0.4 * (u(rng) + 1.0);
        const auto sys = giant_atom_to_delay_system(GiantAtomModel{g, 1.0, tau, phase(rng)});
        Rect rect{-12.0 / tau, 0.5, -25.0 / tau, 25.0 / tau};
        for (int attempt = 0; attempt < 4; ++attempt) {
            try {
                const int count = argument_principle_count(sys, rect);
                const auto found = poles_search(sys, rect, 256);
                CHECK(found.total_multiplicity() == count);
                ++checked;
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::contour) {
                    CAPTURE(e.what());
                    FAIL("unexpected error");
                }
                rect.re_min -= jitter(rng);
                rect.im_max += jitter(rng);
                rect.im_min -= jitter(rng);
            }
        }
    }
    CHECK(checked == 50);
}

TEST_CASE("real coefficients give conjugate pole pairs") {
    const DelaySystem sys{0.6, {cplx(-1.0), cplx(-0.7), cplx(0.2)}};
    const auto found = poles_search(sys, Rect{-20.0, 1.0, -40.0, 40.0}, 128);
    for (const Pole& p : found.poles) {
        double best = 1e300;
        for (const Pole& q : found.poles) best = std::min(best, std::abs(q.s - std::conj(p.s)));
        CHECK(best <= 1e-9 * (1.0 + std::abs(p.s)));
    }
}

TEST_CASE("coupling reversal leaves the dynamics unchanged") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        std::vector<double> g = {0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng)};
        g[0] += 0.5;
        const std::vector<double> r(g.rbegin(), g.rend());
        const double phi = 3.0 * (u(rng) + 1.0);
        const auto a = integrate(giant_atom_to_delay_system(GiantAtomModel{g, 1.0, 0.5, phi}), 1.0, 2.0, 0.5 / 32.0);
        const auto b = integrate(giant_atom_to_delay_system(GiantAtomModel{r, 1.0, 0.5, phi}), 1.0, 2.0, 0.5 / 32.0);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.samples[k] == b.samples[k]);
    }
}

TEST_CASE("passive dynamics never gains population") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const double tau = 0.1 + u(rng);
        const auto sys = giant_atom_to_delay_system(GiantAtomModel{{0.4, 0.4 * u(rng)}, 1.0, tau, 6.0 * u(rng)});
        const auto ts = integrate(sys, 1.0, 10.0 * tau, tau / 32.0);
        for (std::size_t k = 0; k < ts.size(); ++k) CHECK(std::norm(ts.samples[k]) <= 1.0 + 1e-9);
    }
}

}  // TEST_SUITE
