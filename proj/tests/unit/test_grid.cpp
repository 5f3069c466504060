#include "doctest.h"

#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/grid.hpp"

#include <cmath>

using namespace hp;

TEST_CASE("tangential grid frequencies and indexing") {
    const auto g = TangentialGrid::make(1, 8, 2.0 * pi);
    CHECK(g.size() == 8);
    CHECK(g.frequency_1d(3) == doctest::Approx(3.0));
    CHECK(g.frequency_1d(4) == doctest::Approx(-4.0));
    CHECK(g.index_of({-1}) == 7);
    CHECK(g.frequency(g.index_of({-3}))[0] == doctest::Approx(-3.0));
    const auto g2 = TangentialGrid::make(2, 4, 4.0 * pi);
    CHECK(g2.size() == 16);
    const auto xi = g2.frequency(g2.index_of({1, -2}));
    CHECK(xi[0] == doctest::Approx(0.5));
    CHECK(xi[1] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(TangentialGrid::make(1, 6, 1.0), Error);
    CHECK(TangentialGrid::make(0, 8, 1.0).size() == 1);
}

TEST_CASE("FFT round trip and mode placement") {
    const auto g = TangentialGrid::make(1, 16, 2.0 * pi);
    CMatrix c = CMatrix::Zero(16, 2);
    c(g.index_of({3}), 0) = 2.0;
    c(g.index_of({-5}), 1) = Complex(0.0, 1.0);
    CMatrix v = c;
    to_space(v, g);
    for (int j = 0; j < 16; ++j) {
        const double x = 2.0 * pi * j / 16;
        CHECK(std::abs(v(j, 0) - 2.0 * std::exp(I * 3.0 * x)) < 1e-13);
        CHECK(std::abs(v(j, 1) - I * std::exp(-I * 5.0 * x)) < 1e-13);
    }
    to_frequency(v, g);
    CHECK((v - c).norm() < 1e-14);
}

TEST_CASE("graded quadrature integrates weighted exponentials") {
    const auto g = NormalGrid::graded(1e-6, 1.1, 60.0);
    auto integrate = [&](double r, auto f) {
        const auto w = g.weights(r);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += w[i] * f(g.nodes[i]);
        return acc;
    };
    CHECK(integrate(0.0, [](double x) { return std::exp(-x); }) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integrate(0.5, [](double x) { return std::exp(-2.0 * x); }) ==
          doctest::Approx(std::tgamma(1.5) / std::pow(2.0, 1.5)).epsilon(1e-9));
    CHECK(integrate(-0.5, [](double x) { return std::exp(-x); }) ==
          doctest::Approx(std::tgamma(0.5)).epsilon(1e-7));
    CHECK(integrate(3.0, [](double x) { return x * std::exp(-x); }) == doctest::Approx(24.0).epsilon(1e-9));
    CHECK_THROWS_AS(g.weights(-1.0), Error);

    const auto z = NormalGrid::graded(1e-6, 1.1, 60.0, true);
    CHECK(z.nodes[0] == 0.0);
    CHECK(z.weights(0.0)[0] == 0.0);
}
