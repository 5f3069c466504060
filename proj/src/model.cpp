#include "hp/model.hpp"

#include "hp/companion.hpp"
#include "hp/error.hpp"
#include "hp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace hp {

namespace {

std::string index_string(const MultiIndex& a) {
    std::ostringstream os;
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    return os.str();
}

int order_of(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

} // namespace

ModelProblem ModelProblem::create(int n, int m, std::map<MultiIndex, Complex> interior,
                                  std::vector<BoundaryOperator> boundary, double phi_prime,
                                  double phi) {
    require(n >= 1, "dimension n must be >= 1");
    require(m >= 1, "half order m must be >= 1");
    require(phi_prime > 0.0 && phi_prime <= pi, "phi_prime must lie in (0, pi]");
    require(phi > 0.0 && phi < phi_prime, "phi must lie in (0, phi_prime)");
    require(static_cast<int>(boundary.size()) == m, "expected exactly m boundary operators");

    ModelProblem p;
    p.n_ = n;
    p.m_ = m;
    p.phi_prime_ = phi_prime;
    p.phi_ = phi;

    auto split = [n](const MultiIndex& a, Complex c) {
        Term t;
        t.tangential.assign(a.begin(), a.begin() + (n - 1));
        t.normal = a[static_cast<std::size_t>(n - 1)];
        t.coeff = c;
        return t;
    };

    for (const auto& [alpha, c] : interior) {
        require(static_cast<int>(alpha.size()) == n,
                "interior multi-index '" + index_string(alpha) + "' has wrong length");
        require(std::all_of(alpha.begin(), alpha.end(), [](int v) { return v >= 0; }),
                "negative entry in interior multi-index '" + index_string(alpha) + "'");
        require(order_of(alpha) == 2 * m,
                "interior multi-index '" + index_string(alpha) + "' is not of order 2m");
        if (c != Complex(0.0, 0.0)) p.interior_terms_.push_back(split(alpha, c));
    }
    p.interior_ = std::move(interior);

    MultiIndex leading(static_cast<std::size_t>(n), 0);
    leading.back() = 2 * m;
    auto it = p.interior_.find(leading);
    require(it != p.interior_.end() && std::abs(it->second) > 0.0,
            "pure normal coefficient a_(0,...,0,2m) must be nonzero");

    for (std::size_t j = 0; j < boundary.size(); ++j) {
        const auto& op = boundary[j];
        require(op.order >= 0 && op.order < 2 * m,
                "boundary operator " + std::to_string(j) + " order must lie in [0, 2m)");
        std::vector<Term> terms;
        for (const auto& [beta, c] : op.coeffs) {
            require(static_cast<int>(beta.size()) == n,
                    "boundary multi-index '" + index_string(beta) + "' has wrong length");
            require(std::all_of(beta.begin(), beta.end(), [](int v) { return v >= 0; }),
                    "negative entry in boundary multi-index '" + index_string(beta) + "'");
            require(order_of(beta) == op.order, "boundary multi-index '" + index_string(beta) +
                                                    "' does not match order m_j");
            if (c != Complex(0.0, 0.0)) terms.push_back(split(beta, c));
        }
        require(!terms.empty(),
                "boundary operator " + std::to_string(j) + " has no nonzero coefficient");
        p.boundary_terms_.push_back(std::move(terms));
    }
    p.boundary_ = std::move(boundary);
    return p;
}

Complex ModelProblem::tangential_monomial(const std::vector<int>& alpha,
                                          std::span<const double> xi) {
    double v = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] != 0) v *= std::pow(xi[i], alpha[i]);
    return {v, 0.0};
}

Complex ModelProblem::symbol(std::span<const double> xi) const {
    require(static_cast<int>(xi.size()) == n_, "symbol: xi must have length n");
    Complex acc{0.0, 0.0};
    for (const auto& t : interior_terms_) {
        Complex mono = tangential_monomial(t.tangential, xi);
        acc += t.coeff * mono * std::pow(xi[static_cast<std::size_t>(n_ - 1)], t.normal);
    }
    return acc;
}

std::vector<Complex> ModelProblem::normal_coefficients(std::span<const double> xi_prime) const {
    require(static_cast<int>(xi_prime.size()) == n_ - 1, "xi' must have length n-1");
    std::vector<Complex> c(static_cast<std::size_t>(2 * m_ + 1), Complex(0.0, 0.0));
    for (const auto& t : interior_terms_)
        c[static_cast<std::size_t>(t.normal)] += t.coeff * tangential_monomial(t.tangential, xi_prime);
    return c;
}

std::vector<Complex> ModelProblem::boundary_coefficients(int j,
                                                         std::span<const double> xi_prime) const {
    require(j >= 0 && j < m_, "boundary index out of range");
    require(static_cast<int>(xi_prime.size()) == n_ - 1, "xi' must have length n-1");
    const auto& op = boundary_[static_cast<std::size_t>(j)];
    std::vector<Complex> e(static_cast<std::size_t>(op.order + 1), Complex(0.0, 0.0));
    for (const auto& t : boundary_terms_[static_cast<std::size_t>(j)])
        e[static_cast<std::size_t>(t.normal)] += t.coeff * tangential_monomial(t.tangential, xi_prime);
    return e;
}

Complex ModelProblem::boundary_symbol(int j, std::span<const double> xi_prime, Complex tau) const {
    const auto e = boundary_coefficients(j, xi_prime);
    Complex acc{0.0, 0.0};
    for (std::size_t k = e.size(); k-- > 0;) acc = acc * tau + e[k];
    return acc;
}

int ModelProblem::k_max() const {
    int k = std::numeric_limits<int>::max();
    for (const auto& terms : boundary_terms_)
        for (const auto& t : terms) k = std::min(k, t.normal);
    return k;
}

Complex ModelProblem::normal_leading() const {
    MultiIndex leading(static_cast<std::size_t>(n_), 0);
    leading.back() = 2 * m_;
    return interior_.at(leading);
}

std::vector<std::vector<double>> default_directions(int n, int count) {
    require(n >= 1, "default_directions: n >= 1");
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < n; ++i) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        dirs.push_back(e);
        e[static_cast<std::size_t>(i)] = -1.0;
        dirs.push_back(e);
    }
    if (n == 1) return dirs;
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * pi * (i + 0.5) / count;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    if (n == 3) {
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            dirs.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
        }
        return dirs;
    }
    std::mt19937_64 gen(0x5eedULL + static_cast<unsigned>(n));
    std::normal_distribution<double> normal;
    for (int i = 0; i < count; ++i) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double s = 0.0;
        for (auto& x : v) {
            x = normal(gen);
            s += x * x;
        }
        for (auto& x : v) x /= std::sqrt(s);
        dirs.push_back(v);
    }
    return dirs;
}

EllipticityReport check_ellipticity(const ModelProblem& problem,
                                    const std::vector<std::vector<double>>& directions) {
    require(!directions.empty(), "check_ellipticity: empty direction sample");
    EllipticityReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& xi : directions) {
        double nrm = 0.0;
        for (double v : xi) nrm += v * v;
        require(std::abs(std::sqrt(nrm) - 1.0) < 1e-10, "check_ellipticity: directions must be unit vectors");
        const Complex a = problem.symbol(xi);
        const double margin = std::abs(a) > 0.0 ? std::abs(std::arg(a)) - problem.phi_prime() : 0.0;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_direction = xi;
        }
        if (margin <= 0.0 && !rep.violating_direction) rep.violating_direction = xi;
    }
    rep.pass = !rep.violating_direction.has_value();
    return rep;
}

SectorSample SectorSample::make(double phi, int rays, int moduli, double sigma_floor,
                                double decades) {
    require(rays >= 1 && moduli >= 1, "sector sample needs at least one ray and modulus");
    SectorSample s;
    s.sigma_floor = sigma_floor;
    for (int i = 0; i < rays; ++i)
        s.rays.push_back(rays == 1 ? 0.0 : -phi + 2.0 * phi * i / (rays - 1));
    for (int i = 0; i < moduli; ++i)
        s.moduli.push_back(sigma_floor *
                           std::pow(10.0, moduli == 1 ? 0.0 : decades * i / (moduli - 1)));
    return s;
}

void SectorSample::validate(double phi) const {
    require(sigma_floor > 0.0, "sector sample: sigma_floor must be positive");
    for (double r : rays) require(std::abs(r) <= phi + 1e-12, "sector sample: ray outside [-phi, phi]");
    for (double mod : moduli)
        require(mod >= sigma_floor * (1.0 - 1e-12), "sector sample: modulus below sigma_floor");
}

std::vector<Complex> SectorSample::points() const {
    std::vector<Complex> pts;
    for (double r : rays)
        for (double mod : moduli) pts.push_back(std::polar(mod, r));
    return pts;
}

std::vector<std::vector<double>> default_tangential_points(int n, int count) {
    std::vector<std::vector<double>> pts;
    pts.emplace_back(static_cast<std::size_t>(n - 1), 0.0);
    if (n == 1) return pts;
    for (auto& d : default_directions(n - 1, count)) pts.push_back(std::move(d));
    return pts;
}

LsReport check_lopatinskii_shapiro(const ModelProblem& problem, const SectorSample& sample,
                                   const std::vector<std::vector<double>>& tangential_points,
                                   double threshold) {
    sample.validate(problem.phi());
    const auto lambdas = sample.points();
    struct Item {
        double smin = std::numeric_limits<double>::infinity();
        double cond = 0.0;
        std::string failure;
    };
    const std::size_t total = tangential_points.size() * lambdas.size();
    std::vector<Item> items(total);
    CompanionOptions opts;
    opts.ls_threshold = 0.0; // measure, do not throw on small singular values
    parallel_for(total, [&](std::size_t idx) {
        const auto& xi = tangential_points[idx / lambdas.size()];
        const Complex lam = lambdas[idx % lambdas.size()];
        try {
            const auto fp = make_frequency_point(xi, lam, problem.half_order());
            const auto cs = build_companion(problem, fp, opts);
            items[idx].smin = cs.min_singular_value;
            items[idx].cond = cs.condition;
        } catch (const Error& e) {
            items[idx].smin = 0.0;
            items[idx].cond = std::numeric_limits<double>::infinity();
            items[idx].failure = e.what();
        }
    });

    LsReport rep;
    rep.points_checked = total;
    rep.min_singular_value = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (items[idx].smin < rep.min_singular_value) {
            rep.min_singular_value = items[idx].smin;
            rep.worst_condition = items[idx].cond;
            rep.worst_xi_prime = tangential_points[idx / lambdas.size()];
            rep.worst_lambda = lambdas[idx % lambdas.size()];
            rep.failure = items[idx].failure;
        }
    }
    rep.pass = rep.min_singular_value > threshold;
    if (!rep.pass && rep.failure.empty()) {
        std::ostringstream os;
        os << "boundary map near-singular: condition number " << rep.worst_condition;
        rep.failure = os.str();
    }
    return rep;
}

} // namespace hp
