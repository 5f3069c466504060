#include "hp/poisson.hpp"

#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/parallel.hpp"
#include "hp/table.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace hp {

ExponentQuery ExponentQuery::make(int k, double p, double r, double t, double s, int j, int m_j) {
    require(k >= 0, "exponent query: k must be >= 0");
    require(p >= 1.0 && std::isfinite(p), "exponent query: p must lie in [1, inf)");
    require(j >= 0, "exponent query: j must be >= 0");
    if (!admissible(k, p, r, t, s, m_j)) {
        std::ostringstream os;
        os << "inadmissible query: r - p[t + k - m_j - s]_+ = " << r - p * positive_part(t + k - m_j - s)
           << " must exceed -1";
        fail(ErrorCode::InvalidArgument, os.str());
    }
    return ExponentQuery{k, p, r, t, s, j, m_j};
}

bool ExponentQuery::admissible(int k, double p, double r, double t, double s, int m_j) {
    return r - p * positive_part(t + k - m_j - s) > -1.0;
}

double predicted_decay_exponent(const ExponentQuery& q, int m) {
    require(m >= 1, "predicted exponent: m must be >= 1");
    return (-1.0 - q.r + q.p * (q.k - q.m_j) + q.p * positive_part(q.t - q.s)) / (2.0 * m * q.p);
}

double predicted_singularity_exponent(double t, double s) { return -positive_part(t - s); }

namespace {

CompanionSystem node_companion(const ModelProblem& problem, std::span<const double> xi, Complex lambda) {
    try {
        return build_companion(problem, make_frequency_point(xi, lambda, problem.half_order()));
    } catch (const Error& e) {
        std::ostringstream os;
        os << "at tangential node xi' = (";
        for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << xi[i];
        os << "): " << e.what();
        throw Error(e.code(), os.str());
    }
}

void check_j(const ModelProblem& problem, int j) {
    require(j >= 0 && j < problem.half_order(), "boundary index j out of range");
}

} // namespace

GridFunction poisson_apply(const ModelProblem& problem, Complex lambda, int j, const CVector& g_hat,
                           const TangentialGrid& tgrid, const NormalGrid& ngrid, int k, Layout layout) {
    check_j(problem, j);
    require(static_cast<std::size_t>(g_hat.size()) == tgrid.size(), "poisson_apply: g_hat does not match the grid");
    require(tgrid.axes == problem.dim() - 1, "poisson_apply: grid has the wrong number of tangential axes");
    GridFunction out;
    out.values = CMatrix::Zero(g_hat.size(), static_cast<Eigen::Index>(ngrid.size()));
    out.layout = Layout::Frequency;
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const Complex g = g_hat(static_cast<Eigen::Index>(i));
        if (g == Complex(0.0, 0.0)) return;
        const auto cs = node_companion(problem, tgrid.frequency(i), lambda);
        for (std::size_t c = 0; c < ngrid.size(); ++c)
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = g * cs.kernel(j, ngrid.nodes[c], k);
    });
    if (layout == Layout::Space) return to_space(out, tgrid);
    return out;
}

CVector boundary_trace(const ModelProblem& problem, Complex lambda, int j, int k_op, const CVector& g_hat,
                       const TangentialGrid& tgrid) {
    check_j(problem, j);
    check_j(problem, k_op);
    CVector out = CVector::Zero(g_hat.size());
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const Complex g = g_hat(static_cast<Eigen::Index>(i));
        if (g == Complex(0.0, 0.0)) return;
        const auto xi = tgrid.frequency(i);
        const auto cs = node_companion(problem, xi, lambda);
        const auto e = problem.boundary_coefficients(k_op, xi);
        Complex acc = 0.0;
        for (std::size_t l = 0; l < e.size(); ++l)
            if (e[l] != Complex(0.0, 0.0)) acc += e[l] * cs.kernel(j, 0.0, static_cast<int>(l));
        out(static_cast<Eigen::Index>(i)) = acc * g;
    });
    return out;
}

double interior_residual(const ModelProblem& problem, Complex lambda, int j, const CVector& g_hat,
                         const TangentialGrid& tgrid, const NormalGrid& ngrid) {
    check_j(problem, j);
    std::vector<double> worst(tgrid.size(), 0.0);
    parallel_for(tgrid.size(), [&](std::size_t i) {
        if (g_hat(static_cast<Eigen::Index>(i)) == Complex(0.0, 0.0)) return;
        const auto xi = tgrid.frequency(i);
        const auto cs = node_companion(problem, xi, lambda);
        const auto c = problem.normal_coefficients(xi);
        for (double x : ngrid.nodes) {
            Complex res = lambda * cs.kernel(j, x, 0);
            double scale = std::abs(res);
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (c[k] == Complex(0.0, 0.0)) continue;
                const Complex term = c[k] * cs.kernel(j, x, static_cast<int>(k));
                res -= term;
                scale += std::abs(term);
            }
            if (scale > 0.0) worst[i] = std::max(worst[i], std::abs(res) / scale);
        }
    });
    return *std::max_element(worst.begin(), worst.end());
}

NormalGrid mode_grid(const CompanionSystem& cs, double x_min, double ratio, double tail) {
    const double gamma = cs.decay_rate();
    require(gamma > 0.0, "mode grid: kernel does not decay");
    return NormalGrid::graded(x_min / cs.rho, ratio, tail / gamma);
}

double kernel_profile_norm(const CompanionSystem& cs, int j, int k, double p, double r, const NormalGrid& grid) {
    const auto w = grid.weights(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (w[i] == 0.0) continue;
        const auto row_x = grid.nodes[i];
        for (int l = 0; l <= k; ++l) acc += w[i] * std::pow(std::abs(cs.kernel(j, row_x, l)), p);
    }
    return std::pow(acc, 1.0 / p);
}

double middle_slope(const std::vector<double>& x, const std::vector<double>& y, double fraction, std::size_t* used) {
    require(x.size() == y.size(), "slope fit: size mismatch");
    std::vector<double> lx, ly;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        lo = std::min(lo, std::log(x[i]));
        hi = std::max(hi, std::log(x[i]));
    }
    const double margin = 0.5 * (1.0 - fraction) * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        const double l = std::log(x[i]);
        if (l < lo + margin - 1e-12 || l > hi - margin + 1e-12) continue;
        lx.push_back(l);
        ly.push_back(std::log(y[i]));
    }
    if (used) *used = lx.size();
    require(lx.size() >= 2, "slope fit: fewer than two usable points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

const RayFit& SweepResult::fit_for(double ray_arg) const {
    for (const auto& f : fits)
        if (f.ray_arg == ray_arg) return f;
    fail(ErrorCode::InvalidArgument, "no fit for the requested ray");
}

std::string SweepResult::to_csv() const {
    Table t({"ray_arg", "lambda_mod", "norm", "predicted", "fitted_slope"});
    for (const auto& p : points)
        t.add_row({p.ray_arg, p.lambda_mod, p.flagged ? std::numeric_limits<double>::quiet_NaN() : p.norm,
                   predicted, fit_for(p.ray_arg).slope});
    return t.to_csv();
}

std::string SweepResult::to_json() const {
    nlohmann::json j;
    j["predicted"] = predicted;
    j["max_deviation"] = max_deviation;
    j["fits"] = nlohmann::json::array();
    for (const auto& f : fits) j["fits"].push_back({{"ray_arg", f.ray_arg}, {"slope", f.slope}, {"points_used", f.used}});
    std::size_t flagged = 0;
    for (const auto& p : points) flagged += p.flagged ? 1 : 0;
    j["points"] = points.size();
    j["flagged"] = flagged;
    return j.dump(2);
}

namespace {

std::vector<std::vector<double>> mode_candidates(int axes, double lambda_mod, int m, int per_decade) {
    std::vector<std::vector<double>> out;
    out.emplace_back(static_cast<std::size_t>(axes), 0.0);
    if (axes == 0) return out;
    const double lo = 0.1;
    const double hi = 100.0 * std::max(1.0, std::pow(lambda_mod, 1.0 / (2.0 * m)));
    const int count = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1;
    for (int a = 0; a < axes; ++a) {
        for (double sign : {1.0, -1.0}) {
            for (int i = 0; i < count; ++i) {
                std::vector<double> xi(static_cast<std::size_t>(axes), 0.0);
                xi[static_cast<std::size_t>(a)] = sign * lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
                out.push_back(std::move(xi));
            }
        }
    }
    return out;
}

double mode_sup_norm(const ModelProblem& problem, const ExponentQuery& q, Complex lambda,
                     const DecaySweepOptions& opt, const SpaceSpec& target, const SpaceSpec& source) {
    double best = 0.0;
    for (const auto& xi : mode_candidates(problem.dim() - 1, std::abs(lambda), problem.half_order(), opt.modes_per_decade)) {
        const auto cs = node_companion(problem, xi, lambda);
        const auto grid = mode_grid(cs, opt.x_min, opt.ratio, opt.tail);
        const double n = kernel_profile_norm(cs, q.j, q.k, q.p, q.r, grid) * mode_symbol(target, xi) / mode_symbol(source, xi);
        if (std::isfinite(n)) best = std::max(best, n);
    }
    return best;
}

double fixed_data_norm(const ModelProblem& problem, const ExponentQuery& q, Complex lambda,
                       const DecaySweepOptions& opt, const SpaceSpec& target) {
    const auto& tg = opt.grid;
    double rho_max = 1.0, gamma_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tg.size(); ++i) {
        if (opt.g_hat(static_cast<Eigen::Index>(i)) == Complex(0.0, 0.0)) continue;
        const auto cs = node_companion(problem, tg.frequency(i), lambda);
        rho_max = std::max(rho_max, cs.rho);
        gamma_min = std::min(gamma_min, cs.decay_rate());
    }
    const auto ngrid = NormalGrid::graded(opt.x_min / rho_max, opt.ratio, opt.tail / gamma_min);
    std::vector<GridFunction> derivs;
    for (int l = 0; l <= q.k; ++l) derivs.push_back(poisson_apply(problem, lambda, q.j, opt.g_hat, tg, ngrid, l));
    return sobolev_mixed_norm(derivs, q.k, q.p, q.r, target, tg, ngrid);
}

} // namespace

SweepResult decay_sweep(const ModelProblem& problem, const ExponentQuery& q, const SectorSample& sample,
                        const DecaySweepOptions& opt) {
    check_j(problem, q.j);
    require(q.m_j == problem.boundary_order(q.j), "decay sweep: query m_j does not match the problem");
    sample.validate(problem.phi());
    const SpaceSpec target = SpaceSpec::make(opt.tangential_scale, q.t, q.p, opt.micro_q);
    const SpaceSpec source = SpaceSpec::make(opt.tangential_scale, q.s, q.p, opt.micro_q);
    if (opt.mode == SweepMode::FixedData) {
        require(static_cast<std::size_t>(opt.g_hat.size()) == opt.grid.size() && opt.g_hat.size() > 0,
                "decay sweep: fixed data does not match its grid");
    }

    SweepResult res;
    res.predicted = predicted_decay_exponent(q, problem.half_order());
    for (double ray : sample.rays)
        for (double mod : sample.moduli) res.points.push_back({ray, mod, 0.0, false});

    // The fixed-data route parallelizes internally over tangential modes.
    auto eval = [&](std::size_t idx) {
        auto& pt = res.points[idx];
        const Complex lambda = std::polar(pt.lambda_mod, pt.ray_arg);
        double n = 0.0;
        try {
            n = opt.mode == SweepMode::ModeSup ? mode_sup_norm(problem, q, lambda, opt, target, source)
                                               : fixed_data_norm(problem, q, lambda, opt, target);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Numerical) throw;
            n = std::numeric_limits<double>::quiet_NaN();
        }
        pt.norm = n;
        pt.flagged = !(n > 1e-300) || !std::isfinite(n);
    };
    if (opt.mode == SweepMode::ModeSup) parallel_for(res.points.size(), eval);
    else
        for (std::size_t i = 0; i < res.points.size(); ++i) eval(i);

    for (double ray : sample.rays) {
        std::vector<double> xs, ys;
        for (const auto& p : res.points)
            if (p.ray_arg == ray && !p.flagged) {
                xs.push_back(p.lambda_mod);
                ys.push_back(p.norm);
            }
        RayFit f;
        f.ray_arg = ray;
        f.slope = middle_slope(xs, ys, opt.fit_fraction, &f.used);
        res.fits.push_back(f);
        res.max_deviation = std::max(res.max_deviation, std::abs(f.slope - res.predicted));
    }
    return res;
}

std::string SingularityResult::to_csv() const {
    Table t({"x_n", "norm", "predicted", "fitted_slope"});
    for (std::size_t i = 0; i < x.size(); ++i) t.add_row({x[i], norm[i], predicted, slope});
    return t.to_csv();
}

std::string SingularityResult::to_json() const {
    nlohmann::json j;
    j["slope"] = slope;
    j["predicted"] = predicted;
    j["deviation"] = std::abs(slope - predicted);
    j["points"] = x.size();
    return j.dump(2);
}

CVector broadband_data(const TangentialGrid& grid, double s, double eps) {
    CVector g(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double n = grid.frequency_norm(i);
        g(static_cast<Eigen::Index>(i)) = std::pow(bracket(n * n), -s - 0.5 * grid.axes - eps);
    }
    return g;
}

SingularityResult singularity_sweep(const ModelProblem& problem, int j, Complex lambda, const CVector& g_hat,
                                    const TangentialGrid& tgrid, const SpaceSpec& target, double s, double x_lo,
                                    double x_hi, int points) {
    check_j(problem, j);
    require(x_lo > 0.0 && x_hi > x_lo && points >= 2, "singularity sweep: invalid x range");
    require(static_cast<std::size_t>(g_hat.size()) == tgrid.size(), "singularity sweep: g_hat does not match the grid");
    SingularityResult res;
    for (int i = 0; i < points; ++i) res.x.push_back(x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (points - 1)));
    // the Poisson operator of B_j gains m_j derivatives
    res.predicted = predicted_singularity_exponent(target.s - problem.boundary_order(j), s);
    const auto n_x = res.x.size();

    if (target.hilbertian()) {
        const std::size_t chunks = std::min<std::size_t>(256, tgrid.size());
        std::vector<std::vector<double>> partial(chunks, std::vector<double>(n_x, 0.0));
        parallel_for(chunks, [&](std::size_t c) {
            for (std::size_t i = c; i < tgrid.size(); i += chunks) {
                const Complex g = g_hat(static_cast<Eigen::Index>(i));
                if (g == Complex(0.0, 0.0)) continue;
                const auto xi = tgrid.frequency(i);
                const auto cs = node_companion(problem, xi, lambda);
                const double ms = mode_symbol(target, xi);
                const double w = ms * ms * std::norm(g);
                for (std::size_t a = 0; a < n_x; ++a) partial[c][a] += w * std::norm(cs.kernel(j, res.x[a], 0));
            }
        });
        for (std::size_t a = 0; a < n_x; ++a) {
            double acc = 0.0;
            for (const auto& p : partial) acc += p[a];
            res.norm.push_back(std::sqrt(acc * tgrid.volume()));
        }
    } else {
        const std::size_t block = 4;
        for (std::size_t start = 0; start < n_x; start += block) {
            const std::size_t cnt = std::min(block, n_x - start);
            const auto ng = NormalGrid::points(std::vector<double>(res.x.begin() + static_cast<std::ptrdiff_t>(start),
                                                                   res.x.begin() + static_cast<std::ptrdiff_t>(start + cnt)));
            const auto u = poisson_apply(problem, lambda, j, g_hat, tgrid, ng, 0);
            for (double v : tangential_norms(u.values, target, tgrid)) res.norm.push_back(v);
        }
    }
    res.slope = middle_slope(res.x, res.norm, 1.0);
    return res;
}

RMatrix fd_weights(double x0, std::span<const double> nodes, int max_deriv) {
    const int n = static_cast<int>(nodes.size());
    require(n > max_deriv, "finite differences: stencil too small for the derivative order");
    RMatrix c = RMatrix::Zero(max_deriv + 1, n);
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_deriv);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - x0;
        for (int jj = 0; jj < i; ++jj) {
            const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(jj)];
            c2 *= c3;
            if (jj == i - 1) {
                for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
                c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k) c(k, jj) = (c4 * c(k, jj) - k * c(k - 1, jj)) / c3;
            c(0, jj) = c4 * c(0, jj) / c3;
        }
        c1 = c2;
    }
    return c;
}

CVector grid_derivative(const CVector& samples, const NormalGrid& grid, int l, int stencil) {
    const auto n = static_cast<int>(grid.size());
    require(samples.size() == n, "grid derivative: sample count does not match grid");
    require(stencil > l && stencil <= n, "grid derivative: invalid stencil");
    if (l == 0) return samples;
    CVector out(n);
    for (int i = 0; i < n; ++i) {
        const int start = std::clamp(i - stencil / 2, 0, n - stencil);
        const std::span<const double> nodes(grid.nodes.data() + start, static_cast<std::size_t>(stencil));
        const RMatrix w = fd_weights(grid.nodes[static_cast<std::size_t>(i)], nodes, l);
        Complex acc = 0.0;
        for (int s = 0; s < stencil; ++s) acc += w(l, s) * samples(start + s);
        out(i) = acc;
    }
    return out;
}

VolevichResult volevich_apply(const ModelProblem& problem, Complex lambda, int j, const GridFunction& u,
                              const TangentialGrid& tgrid, const NormalGrid& ngrid, int theta) {
    check_j(problem, j);
    require(theta == 0 || theta == 1, "volevich: theta must be 0 or 1");
    const auto uf = to_frequency(u, tgrid);
    require(static_cast<std::size_t>(uf.values.rows()) == tgrid.size() &&
                static_cast<std::size_t>(uf.values.cols()) == ngrid.size(),
            "volevich: u does not match the grids");
    const auto w = ngrid.weights(0.0);
    const Complex factor = theta == 1 ? lambda : Complex(1.0, 0.0);
    const int m_j = problem.boundary_order(j);

    VolevichResult res;
    res.u.values = CMatrix::Zero(uf.values.rows(), uf.values.cols());
    res.u.layout = Layout::Frequency;
    std::vector<char> tail(tgrid.size(), 0);
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const CVector row = uf.values.row(static_cast<Eigen::Index>(i)).transpose();
        if (row.cwiseAbs().maxCoeff() == 0.0) return;
        const auto xi = tgrid.frequency(i);
        const auto cs = node_companion(problem, xi, lambda);
        if (std::exp(-cs.decay_rate() * ngrid.x_max()) > 1e-12) tail[i] = 1;
        const auto e = problem.boundary_coefficients(j, xi);
        // w(y) = B_j(xi', D) u, D = -i d/dy
        CVector bu = CVector::Zero(row.size());
        Complex di = 1.0;
        for (int l = 0; l <= m_j; ++l) {
            if (e[static_cast<std::size_t>(l)] != Complex(0.0, 0.0))
                bu += e[static_cast<std::size_t>(l)] * di * grid_derivative(row, ngrid, l);
            di *= -I;
        }
        const CVector dbu = grid_derivative(bu, ngrid, 1);
        for (std::size_t a = 0; a < ngrid.size(); ++a) {
            Complex acc = 0.0;
            for (std::size_t b = 0; b < ngrid.size(); ++b) {
                if (w[b] == 0.0) continue;
                const double z = ngrid.nodes[a] + ngrid.nodes[b];
                const Complex K = cs.kernel(j, z, 0);
                const Complex dK = I * cs.kernel(j, z, 1);
                acc += w[b] * (dK * bu(static_cast<Eigen::Index>(b)) + K * dbu(static_cast<Eigen::Index>(b)));
            }
            res.u.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = -factor * acc;
        }
    });
    res.tail_warning = std::any_of(tail.begin(), tail.end(), [](char c) { return c != 0; });
    return res;
}

} // namespace hp
