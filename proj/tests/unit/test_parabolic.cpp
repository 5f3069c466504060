#include "doctest.h"
#include "test_support.hpp"

#include "hp/error.hpp"
#include "hp/parabolic.hpp"

#include <boost/math/quadrature/gauss.hpp>

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

// Dirichlet heat on the half-line for u0 = x e^{-x^2} on the mode xi0.
double images(double t, double x, double xi0) {
    return std::pow(1.0 + 4.0 * t, -1.5) * x * std::exp(-x * x / (1.0 + 4.0 * t)) * std::exp(-xi0 * xi0 * t);
}

} // namespace

TEST_CASE("time grid") {
    const auto tg = TimeGrid::make(8, 4.0);
    CHECK(tg.t(3) == doctest::Approx(1.5));
    const auto f = tg.frequencies();
    CHECK(f[1] == doctest::Approx(pi / 2));
    CHECK(f[7] == doctest::Approx(-pi / 2));
    CHECK_THROWS_AS(TimeGrid::make(6, 1.0), Error);
}

TEST_CASE("time-Fourier boundary solver") {
    const auto dir = hp::test::dirichlet();
    const auto tg = TangentialGrid::make(1, 8, 2.0 * pi);
    const auto time = TimeGrid::make(32, 2.0 * pi);
    const auto ng = NormalGrid::graded(1e-3, 1.2, 5.0, true);
    const double sigma = 0.5;

    SUBCASE("zero data") {
        const BoundarySeries g{CMatrix::Zero(32, 8)};
        const auto u = parabolic_boundary_solve(dir, g, sigma, time, tg, ng);
        for (const auto& s : u.slices) CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("single space-time mode") {
        const int mode = 2;
        const int tmode = 3;
        const double xi0 = 2.0, tau0 = 3.0;
        const auto row = static_cast<Eigen::Index>(tg.index_of({mode}));
        BoundarySeries g{CMatrix::Zero(32, 8)};
        for (int i = 0; i < 32; ++i) g[0](i, row) = std::exp(I * (tmode * time.t(i)));
        const auto u = parabolic_boundary_solve(dir, g, sigma, time, tg, ng);
        const Complex kappa = std::sqrt(Complex(sigma, tau0) + xi0 * xi0);
        double worst = 0.0;
        for (int i = 0; i < 32; ++i)
            for (std::size_t c = 0; c < ng.size(); ++c) {
                const Complex exact = std::exp(I * (tau0 * time.t(i))) * std::exp(-kappa * ng.nodes[c]);
                worst = std::max(worst, std::abs(u.slices[static_cast<std::size_t>(i)].values(row, static_cast<Eigen::Index>(c)) - exact));
            }
        CHECK(worst < 1e-8);

        // the trigonometric evaluator agrees off the sample points
        const auto e = parabolic_boundary_eval(dir, g, sigma, time, tg, ng, {0.3, 1.7});
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t c = 0; c < ng.size(); ++c) {
                const Complex exact = std::exp(I * (tau0 * e.times[a])) * std::exp(-kappa * ng.nodes[c]);
                CHECK(std::abs(e.slices[a].values(row, static_cast<Eigen::Index>(c)) - exact) < 1e-8);
            }
    }

    SUBCASE("time translation covariance") {
        const auto row = static_cast<Eigen::Index>(tg.index_of({1}));
        BoundarySeries g{CMatrix::Zero(32, 8)}, shifted{CMatrix::Zero(32, 8)};
        for (int i = 0; i < 32; ++i) {
            g[0](i, row) = std::exp(std::cos(time.t(i)));
            shifted[0](i, row) = std::exp(std::cos(time.t((i + 5) % 32)));
        }
        const auto a = parabolic_boundary_solve(dir, g, sigma, time, tg, ng);
        const auto b = parabolic_boundary_solve(dir, shifted, sigma, time, tg, ng);
        for (int i = 0; i < 32; ++i)
            CHECK((b.slices[static_cast<std::size_t>(i)].values - a.slices[static_cast<std::size_t>((i + 5) % 32)].values).norm() <
                  1e-12 * a.slices[0].values.norm());
    }

    SUBCASE("needs sigma > 0") {
        const BoundarySeries g{CMatrix::Zero(32, 8)};
        CHECK_THROWS_AS(parabolic_boundary_solve(dir, g, 0.0, time, tg, ng), Error);
    }
}

TEST_CASE("temporal band slope") {
    for (const auto& [prob, j, k] : {std::tuple{hp::test::dirichlet(), 0, 0}, std::tuple{hp::test::neumann(), 0, 0},
                                     std::tuple{hp::test::bilaplacian(), 0, 1}, std::tuple{hp::test::bilaplacian(), 1, 1}}) {
        const auto r = temporal_band_slope(prob, j, k, 1.0, 1.0, {1.0}, 0.0, 1e2, 1e6);
        CHECK(std::abs(r.slope - r.predicted) < 0.05);
    }
}

TEST_CASE("time extension") {
    const double T = 1.0;
    auto g = [](double t) { return Complex(std::cos(2.0 * t) + t * t); };
    auto max_second_difference = [&](int n) {
        const auto s = extend_time_series(g, T, n);
        const double dt = 3.0 * T / n;
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Complex prev = s[(i + s.size() - 1) % s.size()];
            const Complex next = s[(i + 1) % s.size()];
            worst = std::max(worst, std::abs(next - 2.0 * s[i] + prev) / (dt * dt));
        }
        return worst;
    };
    const auto s = extend_time_series(g, T, 4096);
    const double dt = 3.0 * T / 4096;
    for (int i = 0; i * dt <= T; i += 97) CHECK(s[static_cast<std::size_t>(i)] == g(i * dt));
    CHECK(std::abs(s[static_cast<std::size_t>(std::lround(1.5 * T / dt))]) == 0.0);
    // C^2 on the torus: second differences do not grow under refinement
    CHECK(max_second_difference(8192) < 1.05 * max_second_difference(4096));
}

TEST_CASE("initial-boundary splitting") {
    const auto dir = hp::test::dirichlet();
    const auto tg = TangentialGrid::make(1, 4, 2.0 * pi);
    const int mode = 1;
    const double xi0 = 1.0;
    const auto row = static_cast<Eigen::Index>(tg.index_of({mode}));
    const auto line = HalfLine::make(1.0 / 64, 2048);

    SUBCASE("pure semigroup decay") {
        IbvpData data;
        data.u0 = mode_profile(tg, line, mode, [](double x) { return Complex(x * std::exp(-x * x)); });
        IbvpOptions opt;
        opt.T = 0.5;
        opt.output_times = {0.1, 0.5};
        const auto res = ibvp_solve(dir, data, tg, line, opt);
        for (std::size_t a = 0; a < 2; ++a) {
            double err = 0.0, ref = 0.0;
            for (int i = 0; i < line.count; ++i) {
                const double ex = images(res.times[a], line.x(i), xi0);
                err = std::max(err, std::abs(res.u[a].values(row, i) - ex));
                ref = std::max(ref, std::abs(ex));
            }
            CHECK(err / ref <= 1e-3);
        }
        CHECK_FALSE(res.compatibility_warning);
    }

    SUBCASE("boundary data against the whole-line solution") {
        const auto tg2 = TangentialGrid::make(1, 8, 2.0 * pi);
        const int m2 = 2;
        const double xi2 = 2.0, tau0 = 3.0;
        const auto row2 = static_cast<Eigen::Index>(tg2.index_of({m2}));
        const auto line2 = HalfLine::make(1.0 / 32, 1024);
        IbvpData data;
        data.u0 = GridFunction{CMatrix::Zero(8, line2.count), Layout::Frequency};
        data.boundary = [&](double t) {
            CVector v = CVector::Zero(8);
            v(row2) = std::exp(I * (tau0 * t));
            return std::vector<CVector>{v};
        };
        IbvpOptions opt;
        opt.T = 3.0;
        opt.sigma = 0.5;
        opt.time_samples = 512;
        opt.output_times = {2.5, 2.75, 3.0};
        const auto res = ibvp_solve(dir, data, tg2, line2, opt);
        CHECK(res.compatibility_warning);
        const Complex kappa = std::sqrt(Complex(0.0, tau0) + xi2 * xi2);
        for (std::size_t a = 0; a < res.times.size(); ++a) {
            double err = 0.0, ref = 0.0;
            for (int i = 0; i < line2.count / 4; ++i) {
                const Complex ex = std::exp(I * (tau0 * res.times[a])) * std::exp(-kappa * line2.x(i));
                err = std::max(err, std::abs(res.u[a].values(row2, i) - ex));
                ref = std::max(ref, std::abs(ex));
            }
            CHECK(err / ref <= 1e-3);
        }
    }

    SUBCASE("duhamel against the scalar oracle") {
        IbvpData data;
        data.u0 = GridFunction{CMatrix::Zero(4, line.count), Layout::Frequency};
        const auto f = mode_profile(tg, line, mode, [](double x) { return Complex(x * std::exp(-x * x)); });
        data.forcing = [&](double) { return f; };
        IbvpOptions opt;
        opt.T = 0.5;
        opt.output_times = {0.5};
        const auto res = ibvp_solve(dir, data, tg, line, opt);
        using G = boost::math::quadrature::gauss<double, 30>;
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < line.count; i += 7) {
            const double x = line.x(i);
            const double ex = G::integrate([&](double s) { return images(s, x, xi0); }, 0.0, 0.5);
            err = std::max(err, std::abs(res.u[0].values(row, i) - ex));
            ref = std::max(ref, std::abs(ex));
        }
        CHECK(err / ref <= 1e-6);
    }
}
