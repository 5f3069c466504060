#include "doctest.h"
#include "test_support.hpp"

#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/poisson.hpp"
#include "hp/resolvent.hpp"

#include <random>

using namespace hp;
using hp::test::rel_err;

namespace {

GridFunction mode_profile(const TangentialGrid& tg, const HalfLine& line, int mode,
                          const std::function<Complex(double)>& f) {
    GridFunction g{CMatrix::Zero(static_cast<Eigen::Index>(tg.size()), line.count), Layout::Frequency};
    const auto row = static_cast<Eigen::Index>(tg.index_of({mode}));
    for (int i = 0; i < line.count; ++i) g.values(row, i) = f(line.x(i));
    return g;
}

// One-sided derivative of order l at 0 from the samples at x = 0, s h, 2 s h, ...
Complex one_sided(const CVector& full, int zero, int side, double h, int l, int points) {
    std::vector<double> nodes;
    for (int i = 0; i < points; ++i) nodes.push_back(side * i * h);
    const auto w = fd_weights(0.0, nodes, l);
    Complex acc = 0.0;
    for (int i = 0; i < points; ++i) acc += w(l, i) * full(zero + side * i);
    return acc;
}

} // namespace

TEST_CASE("extension coefficients") {
    const auto e2 = ExtensionOperator::make(2);
    CHECK(e2.coefficients[0] == doctest::Approx(3.0));
    CHECK(e2.coefficients[1] == doctest::Approx(-2.0));
    for (int K = 1; K <= 8; ++K) {
        const auto e = ExtensionOperator::make(K);
        for (int l = 0; l < K; ++l) {
            double s = 0.0;
            for (int k = 1; k <= K; ++k) s += e.coefficients[static_cast<std::size_t>(k - 1)] * std::pow(-k, l);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-7));
        }
    }
    CHECK(ExtensionOperator::for_problem(hp::test::dirichlet()).K == 4);
    CHECK(ExtensionOperator::for_problem(hp::test::neumann()).K == 4);
    CHECK(ExtensionOperator::for_problem(hp::test::bilaplacian()).K == 5);
}

TEST_CASE("seeley extension") {
    const auto line = HalfLine::make(0.01, 1024);
    const auto e2 = ExtensionOperator::make(2);
    const int n = line.count;

    CVector one = CVector::Ones(n);
    CVector lin(n);
    for (int i = 0; i < n; ++i) lin(i) = line.x(i);
    const CVector ext_one = seeley_extend(one, line, e2);
    const CVector ext_lin = seeley_extend(lin, line, e2);
    CHECK((ext_one.tail(n) - one).norm() == 0.0);
    for (int i = 1; i < 100; ++i) {
        CHECK(std::abs(ext_one(n - i) - 1.0) < 1e-13);
        CHECK(std::abs(ext_lin(n - i) + line.x(i)) < 1e-13);
    }

    // e^{-x} with K = 2: jumps of orders 0 and 1 vanish, order 2 does not.
    auto jumps = [&](double h) {
        const auto l2 = HalfLine::make(h, 4096);
        CVector u(l2.count);
        for (int i = 0; i < l2.count; ++i) u(i) = std::exp(-l2.x(i));
        const CVector full = seeley_extend(u, l2, e2);
        std::vector<double> out;
        for (int l = 0; l <= 2; ++l)
            out.push_back(std::abs(one_sided(full, l2.count, 1, h, l, 8) - one_sided(full, l2.count, -1, h, l, 8)));
        return out;
    };
    const auto fine = jumps(5e-4);
    CHECK(fine[0] <= 1e-8);
    CHECK(fine[1] <= 1e-8);
    // (E u)''(0-) = 3 - 8 = -5 against u''(0+) = 1
    CHECK(fine[2] == doctest::Approx(6.0).epsilon(1e-4));
}

TEST_CASE("whole-space resolvent") {
    const auto lap = hp::test::dirichlet();
    const auto tg = TangentialGrid::make(1, 16, 2.0 * pi);
    const auto line = HalfLine::make(0.05, 64);
    const auto eta = line.frequencies();
    const Complex lambda = std::polar(3.0, 2.0);

    CMatrix f = CMatrix::Zero(16, 128);
    f(static_cast<Eigen::Index>(tg.index_of({3})), 5) = 1.0;
    const CMatrix u = whole_space_resolvent(lap, lambda, f, tg, line);
    CHECK(rel_err(u(static_cast<Eigen::Index>(tg.index_of({3})), 5), 1.0 / (lambda + 9.0 + eta[5] * eta[5])) < 1e-15);

    // real lambda = 1: |lambda u| <= |f| node by node
    CMatrix band = CMatrix::Ones(16, 128);
    const CMatrix ub = whole_space_resolvent(lap, 1.0, band, tg, line);
    CHECK((1.0 * ub).norm() <= band.norm());
    CHECK(ub.cwiseAbs().maxCoeff() <= 1.0);

    // exact inverse: (lambda - A(xi)) u = f
    std::mt19937_64 gen(2);
    std::normal_distribution<double> nd;
    CMatrix r(16, 128);
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = {nd(gen), nd(gen)};
    const CMatrix ur = whole_space_resolvent(lap, lambda, r, tg, line);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index k = 0; k < 128; ++k) {
            const double x1 = tg.frequency(static_cast<std::size_t>(i))[0];
            const double x2 = eta[static_cast<std::size_t>(k)];
            worst = std::max(worst, std::abs((lambda + x1 * x1 + x2 * x2) * ur(i, k) - r(i, k)));
        }
    CHECK(worst < 1e-14);

    // domain multiplier stays bounded along a ray
    for (double mod : {1.0, 10.0, 100.0, 1000.0, 1e4})
        CHECK(domain_multiplier_bound(lap, std::polar(mod, 2.8), tg, line) < 3.0 / std::sin(pi - 2.8));

    // lambda = 0 meets the symbol at xi = 0
    CHECK_THROWS_AS(whole_space_resolvent(lap, 0.0, f, tg, line), Error);
}

TEST_CASE("half-space resolvent against closed forms") {
    const auto tg = TangentialGrid::make(1, 8, 2.0 * pi);
    const int mode = 1;
    const auto row = static_cast<Eigen::Index>(tg.index_of({mode}));
    const Complex lambda = std::polar(4.0, 1.0);
    const Complex k2 = lambda + 1.0;
    const Complex kappa = std::sqrt(k2);

    SUBCASE("zero data") {
        const auto line = HalfLine::make(0.05, 1024);
        GridFunction z{CMatrix::Zero(8, line.count), Layout::Frequency};
        CHECK(halfspace_resolvent(hp::test::dirichlet(), lambda, z, tg, line).values.cwiseAbs().maxCoeff() == 0.0);
    }

    auto run = [&](const ModelProblem& prob, const std::function<Complex(double)>& exact, double h) {
        const auto line = HalfLine::make(h, static_cast<int>(std::lround(64.0 / h)));
        const auto f = mode_profile(tg, line, mode, [](double x) { return std::exp(-x); });
        const auto u = halfspace_resolvent(prob, lambda, f, tg, line);
        double err = 0.0;
        for (int i = 0; i < line.count / 2; ++i) err = std::max(err, std::abs(u.values(row, i) - exact(line.x(i))));
        const auto chk = resolvent_residual(prob, lambda, f, u, tg, line);
        return std::array<double, 3>{err, chk.interior, chk.boundary};
    };

    SUBCASE("dirichlet") {
        auto exact = [&](double x) { return (std::exp(-x) - std::exp(-kappa * x)) / (k2 - 1.0); };
        const auto a = run(hp::test::dirichlet(), exact, 1.0 / 16);
        const auto b = run(hp::test::dirichlet(), exact, 1.0 / 32);
        const auto c = run(hp::test::dirichlet(), exact, 1.0 / 64);
        CHECK(c[0] < 1e-6);
        CHECK(c[1] < 1e-4);
        CHECK(c[2] < 1e-12);
        CHECK(std::log2(b[1] / c[1]) >= 2.0);
        CHECK(std::log2(a[0] / b[0]) >= 2.0);
    }
    SUBCASE("neumann") {
        auto exact = [&](double x) { return std::exp(-x) / (k2 - 1.0) - std::exp(-kappa * x) / (kappa * (k2 - 1.0)); };
        const auto b = run(hp::test::neumann(), exact, 1.0 / 32);
        const auto c = run(hp::test::neumann(), exact, 1.0 / 64);
        CHECK(c[0] < 1e-6);
        CHECK(c[1] < 1e-4);
        CHECK(c[2] < 1e-4);
        CHECK(std::log2(b[2] / c[2]) >= 2.0);
    }
    SUBCASE("clamped bi-laplacian residuals") {
        const auto prob = hp::test::bilaplacian();
        const Complex lam = std::polar(9.0, 0.5);
        std::array<double, 2> interior{}, boundary{};
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? 1.0 / 32 : 1.0 / 64;
            const auto line = HalfLine::make(h, static_cast<int>(std::lround(64.0 / h)));
            const auto f = mode_profile(tg, line, mode, [](double x) { return x * std::exp(-x); });
            const auto u = halfspace_resolvent(prob, lam, f, tg, line);
            const auto chk = resolvent_residual(prob, lam, f, u, tg, line);
            interior[static_cast<std::size_t>(level)] = chk.interior;
            boundary[static_cast<std::size_t>(level)] = chk.boundary;
        }
        CHECK(interior[1] < 1e-4);
        CHECK(boundary[1] < 1e-4);
        CHECK(interior[1] < interior[0]);
    }
}

TEST_CASE("sectoriality shadow") {
    const auto line = HalfLine::make(1.0 / 128, 1 << 15);
    std::vector<double> moduli;
    for (int i = 0; i <= 6; ++i) moduli.push_back(10.0 * std::pow(10.0, 0.5 * i));
    const auto res = sectoriality_sweep(hp::test::dirichlet(), {-2.5, 0.0, 1.2}, moduli, {0.0},
                                        {0.25, 1.0, 4.0, 16.0}, line);
    CHECK(res.worst_spread < 2.0);
    CHECK(res.max_ratio < 1.0 / std::sin(pi - 2.5) + 0.5);
    CHECK(res.to_csv().rfind("ray_arg,lambda_mod,ratio", 0) == 0);
}

TEST_CASE("semigroup contour") {
    CHECK_THROWS_AS(semigroup_contour(1.5, 1.0), Error);
    CHECK_THROWS_AS(semigroup_contour(2.9, 0.0), Error);
    for (double phi : {2.3, 2.9})
        for (const auto& n : semigroup_contour(phi, 0.3, {48, 1.0}))
            CHECK(std::abs(std::arg(n.lambda)) < phi);

    // scalar check: (2 pi i)^{-1} int e^{lambda t} / (lambda - a) = e^{a t}
    for (double a : {-1.0, -50.0, 0.0}) {
        Complex acc = 0.0;
        for (const auto& n : semigroup_contour(2.9, 0.5)) acc += n.weight * std::exp(n.lambda * 0.5) / (n.lambda - a);
        CHECK(std::abs(acc - std::exp(a * 0.5)) < 1e-9);
    }
}

TEST_CASE("heat semigroup on the half-space") {
    const auto dir = hp::test::dirichlet();
    const auto tg = TangentialGrid::make(1, 4, 2.0 * pi);
    const int mode = 1;
    const auto row = static_cast<Eigen::Index>(tg.index_of({mode}));
    const auto line = HalfLine::make(1.0 / 64, 2048);
    auto profile = [](double x) { return Complex(x * std::exp(-x * x)); };
    const auto u0 = mode_profile(tg, line, mode, profile);

    auto images = [&](double t, double x) {
        return std::pow(1.0 + 4.0 * t, -1.5) * x * std::exp(-x * x / (1.0 + 4.0 * t)) * std::exp(-t);
    };
    const auto ut = semigroup_apply(dir, u0, 0.25, tg, line);
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < line.count; ++i) {
        err = std::max(err, std::abs(ut.values(row, i) - images(0.25, line.x(i))));
        ref = std::max(ref, std::abs(images(0.25, line.x(i))));
    }
    CHECK(err / ref <= 1e-3);

    const auto small = semigroup_apply(dir, u0, 1e-6, tg, line);
    CHECK((small.values - u0.values).norm() / u0.values.norm() <= 0.01);

    const auto a = semigroup_apply(dir, semigroup_apply(dir, u0, 0.1, tg, line), 0.2, tg, line);
    const auto b = semigroup_apply(dir, u0, 0.3, tg, line);
    CHECK((a.values - b.values).norm() / b.values.norm() <= 1e-4);
}
