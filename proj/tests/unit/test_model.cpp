#include "doctest.h"
#include "test_support.hpp"

#include "hp/error.hpp"
#include "hp/model.hpp"

#include <random>

using namespace hp;
using hp::test::bundled;

namespace {

ModelProblem laplacian_with(BoundaryOperator op, double phi_prime = pi - 0.01, double phi = 2.9) {
    return ModelProblem::create(2, 1, {{{2, 0}, -1.0}, {{0, 2}, -1.0}}, {std::move(op)}, phi_prime, phi);
}

} // namespace

TEST_CASE("symbol of the Laplacian and bi-Laplacian") {
    const auto lap = hp::test::dirichlet();
    const std::vector<double> ones{1.0, 1.0};
    const std::vector<double> zero{0.0, 0.0};
    CHECK(lap.symbol(ones) == Complex(-2.0, 0.0));
    CHECK(lap.symbol(zero) == Complex(0.0, 0.0));

    const auto bil = hp::test::bilaplacian();
    const std::vector<double> xi{0.0, 2.0};
    CHECK(bil.symbol(xi) == Complex(-16.0, 0.0));
    // (xi1^2 + xi2^2)^2 expanded against the stored monomials
    const std::vector<double> mixed{1.5, -0.5};
    CHECK(std::abs(bil.symbol(mixed) + std::pow(1.5 * 1.5 + 0.25, 2)) < 1e-14);
}

TEST_CASE("symbol is homogeneous of degree 2m") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    for (const auto& name : {"dirichlet_laplacian", "clamped_bilaplacian"}) {
        const auto p = bundled(name);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> xi{nd(gen), nd(gen)};
            for (double t : {0.5, 2.0, 10.0}) {
                std::vector<double> txi{t * xi[0], t * xi[1]};
                const Complex lhs = p.symbol(txi);
                const Complex rhs = std::pow(t, p.order()) * p.symbol(xi);
                CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(rhs));
            }
        }
    }
}

TEST_CASE("ellipticity check") {
    const auto dirs = default_directions(2);
    auto rep = check_ellipticity(hp::test::dirichlet(), dirs);
    CHECK(rep.pass);
    CHECK(rep.worst_margin == doctest::Approx(0.01).epsilon(1e-12));

    const auto bil = check_ellipticity(hp::test::bilaplacian(), dirs);
    CHECK(bil.pass);
    CHECK(bil.worst_margin == doctest::Approx(pi / 4).epsilon(1e-12));

    BoundaryOperator trace{0, {{{0, 0}, 1.0}}};
    const auto positive =
        ModelProblem::create(2, 1, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}, {trace}, pi / 2, 1.0);
    const auto bad = check_ellipticity(positive, dirs);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.violating_direction.has_value());
    CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("k_max") {
    CHECK(hp::test::dirichlet().k_max() == 0);
    CHECK(hp::test::neumann().k_max() == 1);
    CHECK(hp::test::bilaplacian().k_max() == 0);
    const auto mixed = ModelProblem::create(
        2, 2, {{{4, 0}, -1.0}, {{2, 2}, -2.0}, {{0, 4}, -1.0}},
        {BoundaryOperator{0, {{{0, 0}, 1.0}}}, BoundaryOperator{3, {{{0, 3}, 1.0}}}}, 3 * pi / 4, 2.3);
    CHECK(mixed.k_max() == 0);
}

TEST_CASE("construction rejects malformed data") {
    BoundaryOperator trace{0, {{{0, 0}, 1.0}}};
    CHECK_THROWS_AS(ModelProblem::create(2, 1, {{{2, 1}, -1.0}, {{0, 2}, -1.0}}, {trace}, 3.0, 2.0),
                    Error);
    CHECK_THROWS_AS(ModelProblem::create(2, 1, {{{2, 0}, -1.0}}, {trace}, 3.0, 2.0), Error);
    CHECK_THROWS_AS(laplacian_with(BoundaryOperator{0, {{{0, 0}, 0.0}}}), Error);
    CHECK_THROWS_AS(laplacian_with(BoundaryOperator{1, {{{0, 0}, 1.0}}}), Error);
    CHECK_THROWS_AS(laplacian_with(BoundaryOperator{2, {{{0, 2}, 1.0}}}), Error);
    CHECK_THROWS_AS(laplacian_with(trace, 3.0, 3.0), Error);
    CHECK_THROWS_AS(ModelProblem::create(2, 1, {{{2, 0}, -1.0}, {{0, 2}, -1.0}}, {}, 3.0, 2.0), Error);
}

TEST_CASE("Lopatinskii-Shapiro on bundled problems") {
    const auto sample = SectorSample::make(2.9, 5, 24, 1.0, 6.0);
    const auto pts = default_tangential_points(2);
    for (const auto& name : {"dirichlet_laplacian", "neumann_laplacian"}) {
        const auto rep = check_lopatinskii_shapiro(bundled(name), sample, pts);
        CHECK(rep.pass);
        CHECK(rep.min_singular_value > 1e-3);
    }
    const auto bsample = SectorSample::make(2.3, 5, 24, 1.0, 6.0);
    CHECK(check_lopatinskii_shapiro(hp::test::bilaplacian(), bsample, pts).pass);
}

TEST_CASE("tangential-only boundary operator fails LS at xi' = 0") {
    const auto p = laplacian_with(BoundaryOperator{1, {{{1, 0}, 1.0}}});
    const auto sample = SectorSample::make(2.9, 3, 4, 1.0, 2.0);
    const auto rep = check_lopatinskii_shapiro(p, sample, {{0.0}});
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_singular_value == 0.0);
}

TEST_CASE("LS verdict is invariant under the parabolic scaling") {
    const auto p = hp::test::neumann();
    for (double t : {0.5, 3.0, 40.0}) {
        SectorSample s = SectorSample::make(2.9, 5, 6, 1.0, 3.0);
        SectorSample scaled = s;
        for (auto& mod : scaled.moduli) mod *= t * t;
        scaled.sigma_floor *= t * t;
        const auto a = check_lopatinskii_shapiro(p, s, {{0.7}});
        const auto b = check_lopatinskii_shapiro(p, scaled, {{0.7 * t}});
        CHECK(a.pass == b.pass);
    }
}

TEST_CASE("sector sample invariants") {
    const auto s = SectorSample::make(2.0, 5, 4, 0.5, 2.0);
    CHECK(s.rays.front() == doctest::Approx(-2.0));
    CHECK(s.rays.back() == doctest::Approx(2.0));
    CHECK(s.moduli.back() == doctest::Approx(50.0));
    CHECK_NOTHROW(s.validate(2.0));
    CHECK_THROWS_AS(s.validate(1.0), Error);
}
