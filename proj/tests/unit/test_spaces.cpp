#include "doctest.h"

#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/spaces.hpp"

#include <random>

using namespace hp;

namespace {

CVector random_band_limited(const TangentialGrid& g, double band, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    CVector f = CVector::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.frequency_norm(i) <= band) f(static_cast<Eigen::Index>(i)) = Complex(nd(gen), nd(gen));
    return f;
}

} // namespace

TEST_CASE("dyadic partition of unity") {
    const auto g = TangentialGrid::make(1, 512, 2.0 * pi);
    const auto part = DyadicPartition::for_grid(g);
    CHECK(std::ldexp(1.0, part.K) >= 256.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double n = g.frequency_norm(i);
        double sum = 0.0;
        for (int k = 0; k <= part.K; ++k) {
            const double v = part.phi(k, n);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            if (v != 0.0) {
                if (k == 0) CHECK(n <= 1.5);
                else CHECK((n >= std::ldexp(1.0, k - 1) && n <= 3.0 * std::ldexp(1.0, k - 1)));
            }
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    for (double t : {0.0, 0.5, 1.0}) CHECK(DyadicPartition::psi(t) == 1.0);
    for (double t : {1.5, 2.0}) CHECK(DyadicPartition::psi(t) == 0.0);
}

TEST_CASE("single-band Besov and Triebel collapse") {
    // phi_3 == 1 exactly for 6 <= |xi| <= 8 (psi(xi/8) = 1, psi(xi/4) = 0)
    const auto g = TangentialGrid::make(1, 64, 2.0 * pi);
    const auto part = DyadicPartition::for_grid(g);
    CVector f = CVector::Zero(64);
    f(g.index_of({6})) = 1.0;
    f(g.index_of({-7})) = Complex(0.5, -2.0);
    f(g.index_of({8})) = 0.25;
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        for (double s : {-1.0, 0.5, 2.0}) {
            const auto lp = SpaceSpec::make(Scale::Lp, 0.0, p);
            const double base = space_norm(f, lp, g);
            const auto bs = SpaceSpec::make(Scale::B, s, p, 1.7);
            const auto fs = SpaceSpec::make(Scale::F, s, p, 1.7);
            CHECK(besov_norm(f, bs, g, part) == doctest::Approx(std::pow(8.0, s) * base).epsilon(1e-12));
            CHECK(triebel_norm(f, fs, g, part) == doctest::Approx(std::pow(8.0, s) * base).epsilon(1e-12));
        }
    }
}

TEST_CASE("Besov equals Triebel when p = q") {
    std::mt19937_64 gen(1);
    const auto g = TangentialGrid::make(1, 128, 2.0 * pi);
    const auto part = DyadicPartition::for_grid(g);
    for (double p : {1.3, 2.0, 4.0}) {
        const CVector f = random_band_limited(g, 40.0, gen);
        const double b = besov_norm(f, SpaceSpec::make(Scale::B, 0.7, p, p), g, part);
        const double t = triebel_norm(f, SpaceSpec::make(Scale::F, 0.7, p, p), g, part);
        CHECK(b == doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("norms vanish on zero, are homogeneous and subadditive") {
    std::mt19937_64 gen(2);
    const auto g = TangentialGrid::make(2, 16, 2.0 * pi);
    const std::vector<SpaceSpec> specs{
        SpaceSpec::make(Scale::Lp, 0.0, 1.5), SpaceSpec::make(Scale::H, 1.2, 3.0),
        SpaceSpec::make(Scale::W, 2.0, 1.2), SpaceSpec::make(Scale::B, 0.5, 2.0, 1.0),
        SpaceSpec::make(Scale::F, -0.5, 1.5, 3.0), SpaceSpec::make(Scale::B, 1.0, 2.0, INFINITY)};
    const CVector zero = CVector::Zero(static_cast<Eigen::Index>(g.size()));
    for (const auto& spec : specs) {
        CHECK(space_norm(zero, spec, g) == 0.0);
        const CVector a = random_band_limited(g, 6.0, gen);
        const CVector b = random_band_limited(g, 6.0, gen);
        const Complex c(-2.0, 1.5);
        CHECK(space_norm(c * a, spec, g) == doctest::Approx(std::abs(c) * space_norm(a, spec, g)).epsilon(1e-12));
        CHECK(space_norm(a + b, spec, g) <= (1.0 + 1e-10) * (space_norm(a, spec, g) + space_norm(b, spec, g)));
    }
}

TEST_CASE("Bessel potential norm") {
    const auto g = TangentialGrid::make(1, 32, 4.0 * pi);
    CVector f = CVector::Zero(32);
    f(g.index_of({5})) = Complex(3.0, 4.0);
    // Plancherel on the torus: ||c e^{i xi x}||_2 = |c| L^{1/2}
    const double xi = 2.0 * pi * 5 / (4.0 * pi);
    const auto h = SpaceSpec::make(Scale::H, 1.5, 2.0);
    CHECK(bessel_norm(f, h, g) == doctest::Approx(std::pow(1 + xi * xi, 0.75) * 5.0 * std::sqrt(4.0 * pi)).epsilon(1e-12));
    CHECK(bessel_norm(f, SpaceSpec::make(Scale::H, 0.0, 3.0), g) ==
          doctest::Approx(space_norm(f, SpaceSpec::make(Scale::Lp, 0.0, 3.0), g)).epsilon(1e-14));

    std::mt19937_64 gen(4);
    CVector r = random_band_limited(g, 10.0, gen);
    CVector lifted = r;
    for (std::size_t i = 0; i < g.size(); ++i) lifted(static_cast<Eigen::Index>(i)) *= std::pow(bracket(std::pow(g.frequency_norm(i), 2)), 2.0);
    CHECK(bessel_norm(lifted, SpaceSpec::make(Scale::H, -2.0, 1.5), g) ==
          doctest::Approx(space_norm(r, SpaceSpec::make(Scale::Lp, 0.0, 1.5), g)).epsilon(1e-10));
}

TEST_CASE("Plancherel shortcut agrees with the FFT route") {
    std::mt19937_64 gen(8);
    const auto g = TangentialGrid::make(1, 256, 2.0 * pi);
    CMatrix cols(256, 3);
    for (int c = 0; c < 3; ++c) cols.col(c) = random_band_limited(g, 100.0, gen);
    for (const auto& spec : {SpaceSpec::make(Scale::H, 0.8, 2.0), SpaceSpec::make(Scale::B, -0.3, 2.0, 2.0),
                             SpaceSpec::make(Scale::W, 1.0, 2.0), SpaceSpec::make(Scale::Lp, 0.0, 2.0)}) {
        const auto fast = tangential_norms(cols, spec, g);
        for (int c = 0; c < 3; ++c) CHECK(fast[static_cast<std::size_t>(c)] == doctest::Approx(space_norm(cols.col(c), spec, g)).epsilon(1e-11));
    }
}

TEST_CASE("mode symbol equals the norm of one mode") {
    const auto g = TangentialGrid::make(1, 64, 2.0 * pi);
    for (const auto& spec : {SpaceSpec::make(Scale::H, 1.3, 1.5), SpaceSpec::make(Scale::B, 0.7, 3.0, 1.0),
                             SpaceSpec::make(Scale::F, 0.7, 1.2, 2.5), SpaceSpec::make(Scale::W, 2.0, 1.5)}) {
        for (int k : {0, 3, -11, 20}) {
            CVector f = CVector::Zero(64);
            f(g.index_of({k})) = 1.0;
            const std::vector<double> xi{static_cast<double>(k)};
            const double expect = mode_symbol(spec, xi) * std::pow(2.0 * pi, 1.0 / spec.p);
            CHECK(space_norm(f, spec, g) == doctest::Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("parameter-dependent norm") {
    std::mt19937_64 gen(12);
    const auto g = TangentialGrid::make(1, 128, 2.0 * pi);
    const auto base = SpaceSpec::make(Scale::H, 0.0, 2.0);
    const CVector f = random_band_limited(g, 30.0, gen);
    CHECK(param_norm(f, 0.4, 0.4, 0.0, base, g) == doctest::Approx(space_norm(f, base.with_s(0.4), g)).epsilon(1e-13));
    // s >= s0: two-sided equivalence with the sum of the two parts
    for (double mu : {1.0, 10.0, 100.0, 1e4}) {
        const double lhs = param_norm(f, 2.0, 0.5, mu, base, g);
        const double rhs = space_norm(f, base.with_s(2.0), g) + std::pow(bracket(mu * mu), 1.5) * space_norm(f, base.with_s(0.5), g);
        CHECK(lhs / rhs > 0.25);
        CHECK(lhs / rhs < 4.0);
        // s < s0: dominated by the A^s norm
        CHECK(param_norm(f, 0.0, 1.0, mu, base, g) <= 1.0000001 * space_norm(f, base.with_s(0.0), g));
    }
}

TEST_CASE("weighted half-line norm") {
    const auto grid = NormalGrid::graded(1e-6, 1.1, 60.0);
    std::vector<double> f(grid.size()), f2(grid.size()), zero(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f[i] = std::exp(-grid.nodes[i]);
        f2[i] = std::exp(-2.0 * grid.nodes[i]);
    }
    CHECK(std::abs(weighted_halfline_norm(f, 1.0, 0.0, grid) - 1.0) <= 1e-8);
    CHECK(weighted_halfline_norm(f2, 2.0, 0.5, grid) == doctest::Approx(std::sqrt(std::tgamma(1.5) / std::pow(4.0, 1.5))).epsilon(1e-8));
    CHECK(weighted_halfline_norm(zero, 2.0, 0.0, grid) == 0.0);
    CHECK_THROWS_AS(weighted_halfline_norm(f, 2.0, -1.0, grid), Error);
}

TEST_CASE("mixed Sobolev norm of a Dirichlet kernel") {
    const auto tg = TangentialGrid::make(1, 16, 2.0 * pi);
    const auto ng = NormalGrid::graded(1e-7, 1.08, 80.0);
    const double xi0 = 3.0;
    const Complex lam = std::polar(50.0, 1.0);
    const Complex kap = std::sqrt(lam + xi0 * xi0);
    std::vector<GridFunction> d(2);
    for (auto& gf : d) gf.values = CMatrix::Zero(16, static_cast<Eigen::Index>(ng.size()));
    const auto row = static_cast<Eigen::Index>(tg.index_of({3}));
    for (std::size_t i = 0; i < ng.size(); ++i) {
        d[0].values(row, static_cast<Eigen::Index>(i)) = std::exp(-kap * ng.nodes[i]);
        d[1].values(row, static_cast<Eigen::Index>(i)) = -kap * std::exp(-kap * ng.nodes[i]);
    }
    const auto spec = SpaceSpec::make(Scale::Lp, 0.0, 2.0);
    const double mode = std::sqrt(2.0 * pi);
    const double n0 = sobolev_mixed_norm(d, 0, 2.0, 0.0, spec, tg, ng);
    CHECK(n0 == doctest::Approx(mode / std::sqrt(2.0 * kap.real())).epsilon(1e-8));
    const double n1 = sobolev_mixed_norm(d, 1, 2.0, 0.0, spec, tg, ng);
    CHECK(n1 == doctest::Approx(n0 * std::sqrt(1.0 + std::norm(kap))).epsilon(1e-8));
    const double dn = d_space_norm(d, 0, 1, 2.0, 0.0, spec, tg, ng);
    CHECK(dn >= n1 * (1 - 1e-12));
}

TEST_CASE("Muckenhoupt characteristic of power weights") {
    const auto fam = shrinking_family(30);
    const auto one = ap_characteristic([](double) { return 1.0; }, 2.0, fam);
    CHECK(one.characteristic == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(one.diverging);

    const double p = 2.0;
    double prev = 0.0;
    for (double r : {0.0, 0.5, 0.9, 0.99}) {
        const auto rep = ap_characteristic([r](double x) { return std::pow(std::abs(x), r); }, p, fam);
        CHECK(std::isfinite(rep.characteristic));
        if (r <= 0.9) CHECK_FALSE(rep.diverging);
        CHECK(rep.characteristic > prev);
        prev = rep.characteristic;
    }
    CHECK(prev > 20.0);
    // interval [0, 1]: (1/(1+r)) (1/(1-r))
    const auto half = ap_characteristic([](double x) { return std::pow(x, 0.5); }, 2.0, {{0.0, 1.0}});
    CHECK(half.characteristic == doctest::Approx(1.0 / (1.5 * 0.5)).epsilon(1e-6));

    const auto endpoint = ap_characteristic([](double x) { return std::abs(x); }, 2.0, fam);
    CHECK(endpoint.diverging);
    CHECK_THROWS_AS(ap_characteristic([](double) { return -1.0; }, 2.0, fam), Error);
}

TEST_CASE("Hardy-type operator") {
    // nodes hit 1 and 2 exactly; midpoint values at the jumps
    const auto grid = NormalGrid::graded(std::ldexp(1.0, -30), std::pow(2.0, 1.0 / 256), 1e3);
    std::vector<double> f(grid.size(), 0.0);
    std::size_t at_one = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i];
        if (x > 1.0 + 1e-9 && x < 2.0 - 1e-9) f[i] = 1.0;
        if (std::abs(x - 1.0) < 1e-9 || std::abs(x - 2.0) < 1e-9) f[i] = 0.5;
        if (std::abs(x - 1.0) < 1e-9) at_one = i;
    }
    REQUIRE(std::abs(grid.nodes[at_one] - 1.0) < 1e-9);
    const auto tf = hardy_apply(f, grid);
    CHECK(tf[at_one] == doctest::Approx(std::log(1.5)).epsilon(1e-5));
}

TEST_CASE("Hardy norm near the classical constant") {
    const auto coarse = NormalGrid::graded(1e-8, 1.1, 1e8);
    const auto res = hardy_norm(2.0, 0.0, coarse);
    CHECK(res.converged);
    CHECK(res.norm < pi);
    CHECK(res.norm > 0.9 * pi);
    CHECK(hardy_reference(2.0, 0.0) == doctest::Approx(pi));
    CHECK(hardy_reference(1.5, 0.25) == doctest::Approx(pi / std::sin(pi * 1.25 / 1.5)));
}

TEST_CASE("mixed lifting") {
    const auto axis = TangentialGrid::make(1, 16, 2.0 * pi);
    CMatrix f = CMatrix::Zero(16, 16);
    f(axis.index_of({3}), axis.index_of({4})) = 1.0;
    const auto zero = mixed_lifting_check(f, 0.0, 2.0, axis);
    CHECK(zero.ratio == doctest::Approx(1.0));
    const double t = 1.7;
    const auto one = mixed_lifting_check(f, t, 2.0, axis);
    CHECK(one.ratio == doctest::Approx(std::pow(26.0, t / 2) / std::pow(17.0, t / 2)).epsilon(1e-12));
    CHECK(one.ratio >= 1.0);
    CHECK(one.ratio <= std::pow(2.0, t / 2));
}
