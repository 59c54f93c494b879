#include <cmath>

#include "doctest.h"
#include "nmep/models.hpp"
#include "nmep/special_functions.hpp"

using namespace nmep;

TEST_SUITE("models") {

TEST_CASE("kappa weights of simple couplings") {
    const double g = 0.7;
    auto k = kappa_weights(GiantAtomModel{{g, g}, 1.0, 1.0, 0.0});
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(2.0 * kPi * g * g).epsilon(1e-15));
    CHECK(k[1] == doctest::Approx(2.0 * kPi * g * g).epsilon(1e-15));

    k = kappa_weights(GiantAtomModel{{1.0, 0.0, 1.0}, 1.0, 1.0, 0.0});
    CHECK(k[0] == doctest::Approx(2.0 * kPi));
    CHECK(k[1] == 0.0);
    CHECK(k[2] == doctest::Approx(2.0 * kPi));
}

TEST_CASE("kappa weights of the three-point example") {
    const auto k = kappa_weights(GiantAtomModel{{1.0, 1.0, -0.03846}, 1.0, 1.0, 0.0});
    CHECK(k[0] == doctest::Approx(kPi * (2.0 + 0.03846 * 0.03846)).epsilon(1e-14));
    CHECK(k[0] / kPi == doctest::Approx(2.001479).epsilon(1e-6));
    CHECK(k[1] == doctest::Approx(2.0 * kPi * 0.96154).epsilon(1e-14));
    CHECK(k[2] == doctest::Approx(2.0 * kPi * -0.03846).epsilon(1e-14));
}

TEST_CASE("group velocity scales the weights") {
    const auto a = kappa_weights(GiantAtomModel{{1.0, 2.0}, 1.0, 1.0, 0.0});
    const auto b = kappa_weights(GiantAtomModel{{1.0, 2.0}, 4.0, 1.0, 0.0});
    CHECK(b[0] == doctest::Approx(a[0] / 4.0));
    CHECK(b[1] == doctest::Approx(a[1] / 4.0));
}

TEST_CASE("reversal and homogeneity") {
    const std::vector<double> g = {0.3, -1.2, 0.8, 0.05};
    const std::vector<double> r(g.rbegin(), g.rend());
    const auto a = kappa_weights(GiantAtomModel{g, 1.0, 1.0, 0.0});
    const auto b = kappa_weights(GiantAtomModel{r, 1.0, 1.0, 0.0});
    for (std::size_t m = 0; m < a.size(); ++m) CHECK(a[m] == b[m]);

    std::vector<double> scaled = g;
    for (double& x : scaled) x *= 2.0;
    const auto c = kappa_weights(GiantAtomModel{scaled, 1.0, 1.0, 0.0});
    for (std::size_t m = 0; m < a.size(); ++m) CHECK(c[m] == 4.0 * a[m]);
}

TEST_CASE("giant atom to delay system") {
    const double g = std::sqrt(1.0 / (2.0 * kPi));  // kappa_0 = kappa_1 = 1
    auto sys = giant_atom_to_delay_system(GiantAtomModel{{g, g}, 1.0, 0.5, 0.0});
    CHECK(sys.delay == 0.5);
    CHECK(std::abs(sys.coeffs[0] - cplx(-1.0)) < 1e-15);
    CHECK(std::abs(sys.coeffs[1] - cplx(-1.0)) < 1e-15);
    CHECK(sys.coeffs[0] == sys.coeffs[1]);

    sys = giant_atom_to_delay_system(GiantAtomModel{{g, g}, 1.0, 0.5, kPi});
    CHECK(std::abs(sys.coeffs[1] - cplx(1.0)) < 1e-15);
}

TEST_CASE("zero classes are kept") {
    const auto sys = giant_atom_to_delay_system(GiantAtomModel{{1.0, 0.0, 0.0}, 1.0, 1.0, 0.0});
    REQUIRE(sys.classes() == 3);
    CHECK(sys.coeffs[1] == 0.0);
    CHECK(sys.coeffs[2] == 0.0);
}

TEST_CASE("collective reduction") {
    auto sys = collective_to_delay_system(CollectiveModel{1.0, 1.0, 0.0, 2.0});
    REQUIRE(sys.classes() == 2);
    CHECK(sys.coeffs[0] == cplx(-0.5));
    CHECK(std::abs(sys.coeffs[1] - cplx(-0.5)) < 1e-16);

    sys = collective_to_delay_system(CollectiveModel{1.0, 0.0, 0.0, 2.0});
    CHECK(sys.classes() == 1);

    sys = collective_to_delay_system(CollectiveModel{1.0, 0.5, kPi, 2.0});
    CHECK(std::abs(sys.coeffs[1] - cplx(0.25)) < 1e-15);

    CHECK_THROWS_AS(collective_to_delay_system(CollectiveModel{1.0, 1.0, 0.0, 1.0}, false), Error);
}

TEST_CASE("invalid models") {
    CHECK_THROWS_AS(kappa_weights(GiantAtomModel{{1.0}, 1.0, 1.0, 0.0}), Error);
    CHECK_THROWS_AS(kappa_weights(GiantAtomModel{{0.0, 0.0}, 1.0, 1.0, 0.0}), Error);
    CHECK_THROWS_AS(kappa_weights(GiantAtomModel{{1.0, 1.0}, 0.0, 1.0, 0.0}), Error);
    CHECK_THROWS_AS(giant_atom_to_delay_system(GiantAtomModel{{1.0, 1.0}, 1.0, -1.0, 0.0}), Error);
    CHECK_THROWS_AS(CollectiveModel({1.0, 1.5, 0.0, 1.0}).validate(), Error);
    CHECK_THROWS_AS(CollectiveModel({-1.0, 0.5, 0.0, 1.0}).validate(), Error);
    CHECK_THROWS_AS(DelaySystem({1.0, {}}).validate(), Error);
}

}  // TEST_SUITE
