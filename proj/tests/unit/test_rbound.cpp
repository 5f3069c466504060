#include "doctest.h"
#include "test_support.hpp"

#include "hp/error.hpp"
#include "hp/parallel.hpp"
#include "hp/rbound.hpp"

#include <cmath>

using namespace hp;

namespace {

CMatrix scalar(double v) { return CMatrix::Constant(1, 1, Complex(v)); }

Operator times(double c) {
    return [c](const CMatrix& x) -> CMatrix { return c * x; };
}

const NormFn abs_norm = [](const CMatrix& m) { return m.norm(); };

RademacherTrial scalar_trial(const std::vector<double>& c, const std::vector<double>& x, int trials = 512) {
    RademacherTrial t;
    t.trials = trials;
    t.seed = 7;
    for (std::size_t l = 0; l < c.size(); ++l) {
        t.operators.push_back(times(c[l]));
        t.inputs.push_back(scalar(x[l]));
    }
    return t;
}

} // namespace

TEST_CASE("rademacher ratio on scalar families") {
    SUBCASE("single operator") {
        const auto est = rademacher_ratio(scalar_trial({-3.0}, {0.5}), abs_norm, abs_norm);
        CHECK(est.estimate == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(est.stderr_ == doctest::Approx(0.0));
    }

    SUBCASE("equal operators act linearly") {
        const auto est = rademacher_ratio(scalar_trial({2.0, 2.0, 2.0}, {1.0, 0.3, -2.0}), abs_norm, abs_norm);
        CHECK(est.estimate == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("contractions") {
        const std::vector<double> c{1.0, -0.5, 0.9, 0.1, -1.0, 0.7};
        const std::vector<double> x{1.0, 2.0, -0.5, 3.0, 0.25, 1.5};
        const auto est = rademacher_ratio(scalar_trial(c, x), abs_norm, abs_norm);
        CHECK(est.stderr_ > 0.0);
        CHECK(est.estimate <= 1.0 + 3.0 * est.stderr_);
        // second moments are sums of squares for scalars
        double num = 0.0, den = 0.0;
        for (std::size_t l = 0; l < c.size(); ++l) {
            num += c[l] * c[l] * x[l] * x[l];
            den += x[l] * x[l];
        }
        CHECK(std::abs(est.estimate - std::sqrt(num / den)) < 4.0 * est.stderr_);
    }

    SUBCASE("global sign flip") {
        auto t = scalar_trial({1.0, -0.2, 0.4, 3.0}, {0.5, 1.0, -1.0, 0.1}, 64);
        const auto a = rademacher_ratio(t, abs_norm, abs_norm);
        t.flip_signs = true;
        const auto b = rademacher_ratio(t, abs_norm, abs_norm);
        CHECK(a.estimate == b.estimate);
        CHECK(a.stderr_ == b.stderr_);
    }

    SUBCASE("reproducible across seeds and thread counts") {
        auto t = scalar_trial({1.0, -0.2, 0.4, 3.0}, {0.5, 1.0, -1.0, 0.1}, 200);
        const int before = thread_count();
        set_thread_count(1);
        const auto a = rademacher_ratio(t, abs_norm, abs_norm);
        set_thread_count(3);
        const auto b = rademacher_ratio(t, abs_norm, abs_norm);
        set_thread_count(before);
        CHECK(a.estimate == b.estimate);
        t.seed = 8;
        CHECK(rademacher_ratio(t, abs_norm, abs_norm).estimate != a.estimate);
    }

    SUBCASE("rejects degenerate trials") {
        CHECK_THROWS_AS(rademacher_ratio(scalar_trial({1.0, 2.0}, {0.0, 0.0}), abs_norm, abs_norm), Error);
        auto t = scalar_trial({1.0}, {1.0});
        t.trials = 0;
        CHECK_THROWS_AS(rademacher_ratio(t, abs_norm, abs_norm), Error);
        t.trials = 4;
        t.inputs.push_back(scalar(1.0));
        CHECK_THROWS_AS(rademacher_ratio(t, abs_norm, abs_norm), Error);
    }
}

TEST_CASE("dirichlet poisson family growth") {
    const auto dir = hp::test::dirichlet();
    const std::vector<int> Ns{4, 8, 16, 32, 64};

    const auto t12 = dirichlet_nonrbound_experiment(dir, 1.2, 0.0, Ns);
    const auto t15 = dirichlet_nonrbound_experiment(dir, 1.5, 0.0, Ns);
    const auto t2 = dirichlet_nonrbound_experiment(dir, 2.0, 0.0, Ns);
    CHECK(t12.growth >= 1.5);
    CHECK(t2.growth <= 1.3);
    CHECK(t2.growth >= 1.0 / 1.3);
    CHECK(t15.growth > t2.growth);
    CHECK(t12.growth > t15.growth);
    for (const auto* t : {&t12, &t15, &t2})
        for (const auto& row : t->rows) CHECK(row.stderr_ <= 0.03 * row.ratio);
    for (std::size_t i = 1; i < t12.rows.size(); ++i) CHECK(t12.rows[i].ratio > t12.rows[i - 1].ratio);

    CHECK(t12.to_csv().rfind("p,r,N,ratio,stderr\r\n", 0) == 0);
    MESSAGE("growth p=1.2: " << t12.growth << ", p=1.5: " << t15.growth << ", p=2: " << t2.growth);
}

TEST_CASE("dirichlet poisson family edge cases") {
    const auto dir = hp::test::dirichlet();
    const std::vector<int> Ns{4, 8, 16, 32, 64};

    SUBCASE("single member equals the operator ratio") {
        const auto one = dirichlet_nonrbound_experiment(dir, 1.2, 0.5, {1});
        // |lambda|^{(1+r)/2p} ||e^{-kappa x}||_{L_p(x^r)} with kappa = 2 on the zero mode
        const double kappa = 2.0, p = 1.2, r = 0.5;
        const double kernel = std::pow(std::tgamma(1.0 + r) / std::pow(p * kappa, 1.0 + r), 1.0 / p);
        const double expected = std::pow(kappa * kappa, (1.0 + r) / (2.0 * p)) * kernel;
        CHECK(one.rows[0].ratio == doctest::Approx(expected).epsilon(1e-3));
        CHECK(one.rows[0].stderr_ == doctest::Approx(0.0));
    }

    SUBCASE("rejects bad parameters") {
        CHECK_THROWS_AS(dirichlet_nonrbound_experiment(dir, 0.9, 0.0, Ns), Error);
        CHECK_THROWS_AS(dirichlet_nonrbound_experiment(dir, 1.2, 0.0, {0}), Error);
    }
}
