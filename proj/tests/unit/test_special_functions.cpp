#include <cmath>
#include <random>

#include "doctest.h"
#include "nmep/special_functions.hpp"

using nmep::cplx;
using nmep::lambert_w;

namespace {

double identity_error(int n, cplx z) {
    const cplx w = lambert_w(n, z);
    return std::abs(w * std::exp(w) - z) / (1.0 + std::abs(z));
}

}  // namespace

TEST_SUITE("special_functions") {

TEST_CASE("principal branch reference values") {
    CHECK(lambert_w(0, 0.0) == cplx(0.0));
    CHECK(std::abs(lambert_w(0, nmep::kE) - 1.0) < 1e-14);
    CHECK(std::abs(lambert_w(0, nmep::kInvE) - 0.2784645427610738) < 1e-15);
    CHECK(std::abs(lambert_w(0, 3.6788) - 1.1568692113814305) < 1e-13);
    CHECK(std::abs(lambert_w(0, 10.0 / nmep::kE) - 1.1568683966150044) < 1e-13);
}

TEST_CASE("branch point") {
    CHECK(std::abs(lambert_w(0, -nmep::kInvE) + 1.0) < 1e-8);
    CHECK(std::abs(lambert_w(-1, -nmep::kInvE) + 1.0) < 1e-8);
    // Both branches approach -1 like -1 +- p, p = sqrt(2 (e z + 1)).
    for (double delta : {1e-14, 1e-12, 4e-12, 1e-11, 1e-9}) {
        const cplx z = -nmep::kInvE + delta;
        const double gap = std::abs(lambert_w(0, z) - lambert_w(-1, z));
        CHECK(gap == doctest::Approx(2.0 * std::sqrt(2.0 * nmep::kE * delta)).epsilon(0.02));
        CHECK(lambert_w(0, z).real() > lambert_w(-1, z).real());
        if (delta <= 4e-12) CHECK(gap <= 1e-5);
    }
}

TEST_CASE("negative real axis follows the values from above") {
    CHECK(std::abs(lambert_w(-1, -0.2) - (-2.5426413577735265)) < 1e-13);
    CHECK(std::abs(lambert_w(0, -0.2) - (-0.2591711018190737)) < 1e-14);
    CHECK(std::abs(lambert_w(1, -0.2) - cplx(-3.722320484923165, 7.387230210574593)) < 1e-12);
    CHECK(std::abs(lambert_w(0, -0.5) - cplx(-0.7940236323446893, 0.7701117505103791)) < 1e-13);
    CHECK(std::abs(lambert_w(-1, -0.5) - cplx(-0.7940236323446893, -0.7701117505103791)) < 1e-13);
    CHECK(std::abs(lambert_w(1, -0.5) - cplx(-2.772069015153082, 7.4999430283418755)) < 1e-12);
    CHECK(std::abs(lambert_w(-1, cplx(-0.2, -1e-9)) - cplx(-3.7223204843272497, -7.387230205354988)) < 1e-9);
}

TEST_CASE("just off the branch point") {
    const cplx z(-0.3678, 1e-6);
    CHECK(std::abs(lambert_w(-1, z) - cplx(-1.020927650932094, -0.00013263637441230907)) < 1e-10);
    CHECK(std::abs(lambert_w(0, z) - cplx(-0.9793603034304427, 0.00012901125060738362)) < 1e-10);
}

TEST_CASE("real branches on the real axis") {
    double prev0 = -2.0;
    double prev1 = 0.0;
    for (int i = 1; i < 200; ++i) {
        const double x = -nmep::kInvE + i * (nmep::kInvE / 200.0);
        const cplx w0 = lambert_w(0, x);
        const cplx w1 = lambert_w(-1, x);
        CHECK(w0.imag() == 0.0);
        CHECK(w1.imag() == 0.0);
        CHECK(w0.real() > prev0);
        CHECK(w1.real() < prev1);
        prev0 = w0.real();
        prev1 = w1.real();
    }
    for (double x : {0.5, 1.0, 10.0, 1e3, 1e8}) CHECK(lambert_w(0, x).real() > lambert_w(0, x / 2).real());
}

TEST_CASE("conjugation symmetry of W0") {
    for (cplx z : {cplx(1.0, 2.0), cplx(-3.0, 0.5), cplx(0.1, -0.01), cplx(50.0, 80.0)}) {
        CHECK(std::abs(lambert_w(0, std::conj(z)) - std::conj(lambert_w(0, z))) < 1e-13 * (1.0 + std::abs(z)));
    }
}

TEST_CASE("large arguments and far branches") {
    for (int n : {-40, -5, 0, 3, 100}) {
        for (cplx z : {cplx(1e12, 0.0), cplx(-1e-12, 1e-13), cplx(1e250, -1e250), cplx(3.0, -7.0)}) {
            CHECK(identity_error(n, z) <= 1e-12);
            CHECK(nmep::detail::lambert_branch_of(lambert_w(n, z)) == n);
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(lambert_w(1, 0.0), nmep::Error);
    CHECK_THROWS_AS(lambert_w(-1, 0.0), nmep::Error);
    CHECK_THROWS_AS(lambert_w(0, cplx(std::nan(""), 0.0)), nmep::Error);
    try {
        lambert_w(-1, 0.0);
    } catch (const nmep::Error& e) {
        CHECK(e.kind() == nmep::ErrorKind::domain);
    }
}

TEST_CASE("identity on random arguments") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> branch(-5, 5);
    std::uniform_real_distribution<double> log_r(-6.0, 6.0);
    std::uniform_real_distribution<double> angle(-nmep::kPi, nmep::kPi);
    int failures = 0;
    int wrong_branch = 0;
    for (int i = 0; i < 10000; ++i) {
        const int n = branch(rng);
        const cplx z = std::polar(std::pow(10.0, log_r(rng)), angle(rng));
        const cplx w = lambert_w(n, z);
        if (std::abs(w * std::exp(w) - z) > 1e-12 * (1.0 + std::abs(z))) ++failures;
        if (nmep::detail::lambert_branch_of(w) != n) ++wrong_branch;
    }
    CHECK(failures == 0);
    CHECK(wrong_branch == 0);
}

}  // TEST_SUITE
