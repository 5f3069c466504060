#include "hp/parabolic.hpp"

#include "hp/companion.hpp"
#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/parallel.hpp"
#include "hp/poisson.hpp"
#include "hp/table.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hp {

TimeGrid TimeGrid::make(int samples, double period) {
    require(samples >= 2 && (samples & (samples - 1)) == 0, "time grid: samples must be a power of two");
    require(period > 0.0 && std::isfinite(period), "time grid: period must be positive");
    return TimeGrid{samples, period};
}

std::vector<double> TimeGrid::frequencies() const {
    std::vector<double> tau(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k)
        tau[static_cast<std::size_t>(k)] = 2.0 * pi * (k < samples / 2 ? k : k - samples) / period;
    return tau;
}

namespace {

void check_series(const ModelProblem& problem, const BoundarySeries& g, const TimeGrid& time,
                  const TangentialGrid& tgrid, double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "parabolic solve: sigma must be positive");
    require(static_cast<int>(g.size()) == problem.half_order(), "parabolic solve: need one series per boundary operator");
    for (const auto& s : g)
        require(s.rows() == time.samples && static_cast<std::size_t>(s.cols()) == tgrid.size(),
                "parabolic solve: boundary series does not match the grids");
    require(problem.phi() > pi / 2, "parabolic solve: requires phi > pi/2");
}

// Temporal Fourier coefficients of every series (same shape as the input).
BoundarySeries time_coefficients(const BoundarySeries& g, const TimeGrid& time) {
    BoundarySeries out = g;
    for (auto& s : out) {
        fft_forward(s.data(), {time.samples}, static_cast<int>(s.cols()));
        s /= static_cast<double>(time.samples);
    }
    return out;
}

// u_hat(tau_k, xi'_i, x) for one tangential node: rows tau, columns normal nodes.
CMatrix node_spectrum(const ModelProblem& problem, const BoundarySeries& ghat, double sigma, const TimeGrid& time,
                      const std::vector<double>& xi, Eigen::Index node, const NormalGrid& ngrid) {
    const auto tau = time.frequencies();
    CMatrix out = CMatrix::Zero(time.samples, static_cast<Eigen::Index>(ngrid.size()));
    for (int k = 0; k < time.samples; ++k) {
        bool any = false;
        for (const auto& s : ghat) any = any || s(k, node) != Complex(0.0, 0.0);
        if (!any) continue;
        const Complex lambda(sigma, tau[static_cast<std::size_t>(k)]);
        const auto cs = build_companion(problem, make_frequency_point(xi, lambda, problem.half_order()));
        for (std::size_t j = 0; j < ghat.size(); ++j) {
            const Complex c = ghat[j](k, node);
            if (c == Complex(0.0, 0.0)) continue;
            for (std::size_t x = 0; x < ngrid.size(); ++x)
                out(k, static_cast<Eigen::Index>(x)) += c * cs.kernel(static_cast<int>(j), ngrid.nodes[x], 0);
        }
    }
    return out;
}

bool node_active(const BoundarySeries& g, Eigen::Index node) {
    for (const auto& s : g)
        if (s.col(node).cwiseAbs().maxCoeff() > 0.0) return true;
    return false;
}

} // namespace

SpaceTime parabolic_boundary_solve(const ModelProblem& problem, const BoundarySeries& g, double sigma,
                                   const TimeGrid& time, const TangentialGrid& tgrid, const NormalGrid& ngrid) {
    check_series(problem, g, time, tgrid, sigma);
    const auto ghat = time_coefficients(g, time);
    SpaceTime st;
    for (int i = 0; i < time.samples; ++i) {
        st.times.push_back(time.t(i));
        st.slices.push_back({CMatrix::Zero(static_cast<Eigen::Index>(tgrid.size()), static_cast<Eigen::Index>(ngrid.size())),
                             Layout::Frequency});
    }
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto node = static_cast<Eigen::Index>(i);
        if (!node_active(g, node)) return;
        CMatrix spec = node_spectrum(problem, ghat, sigma, time, tgrid.frequency(i), node, ngrid);
        fft_backward(spec.data(), {time.samples}, static_cast<int>(spec.cols()));
        for (int t = 0; t < time.samples; ++t) st.slices[static_cast<std::size_t>(t)].values.row(node) = spec.row(t);
    });
    return st;
}

SpaceTime parabolic_boundary_eval(const ModelProblem& problem, const BoundarySeries& g, double sigma,
                                  const TimeGrid& time, const TangentialGrid& tgrid, const NormalGrid& ngrid,
                                  const std::vector<double>& times) {
    check_series(problem, g, time, tgrid, sigma);
    const auto ghat = time_coefficients(g, time);
    const auto tau = time.frequencies();
    SpaceTime st;
    st.times = times;
    for (std::size_t i = 0; i < times.size(); ++i)
        st.slices.push_back({CMatrix::Zero(static_cast<Eigen::Index>(tgrid.size()), static_cast<Eigen::Index>(ngrid.size())),
                             Layout::Frequency});
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto node = static_cast<Eigen::Index>(i);
        if (!node_active(g, node)) return;
        const CMatrix spec = node_spectrum(problem, ghat, sigma, time, tgrid.frequency(i), node, ngrid);
        for (std::size_t a = 0; a < times.size(); ++a) {
            CVector phase(time.samples);
            for (int k = 0; k < time.samples; ++k) phase(k) = std::exp(I * tau[static_cast<std::size_t>(k)] * times[a]);
            st.slices[a].values.row(node) = phase.transpose() * spec;
        }
    });
    return st;
}

TemporalSlope temporal_band_slope(const ModelProblem& problem, int j, int k, double sigma, double l,
                                  const std::vector<double>& xi_prime, double x_n, double tau_lo, double tau_hi,
                                  int points) {
    require(j >= 0 && j < problem.half_order(), "temporal slope: boundary index out of range");
    require(k >= 0 && sigma > 0.0 && x_n >= 0.0, "temporal slope: invalid arguments");
    require(tau_lo > 0.0 && tau_hi > tau_lo && points >= 2, "temporal slope: invalid tau range");
    TemporalSlope out;
    out.predicted = -l - 0.5 + (k - problem.boundary_order(j)) / static_cast<double>(problem.order());
    for (int i = 0; i < points; ++i) {
        const double tau = tau_lo * std::pow(tau_hi / tau_lo, static_cast<double>(i) / (points - 1));
        const auto cs = build_companion(problem, make_frequency_point(xi_prime, Complex(sigma, tau), problem.half_order()));
        out.tau.push_back(tau);
        out.magnitude.push_back(std::pow(bracket(tau * tau), -l - 0.5) * std::abs(cs.kernel(j, x_n, k)));
    }
    out.slope = middle_slope(out.tau, out.magnitude, 0.8);
    return out;
}

namespace {

// Torus samples of a vector-valued function on [0, T], period 3T.
template <typename Value, typename Fn, typename Axpy>
std::vector<Value> extend_samples(Fn&& g, double T, int samples, const Value& zero, Axpy&& axpy) {
    require(T > 0.0 && samples >= 8, "time extension: invalid arguments");
    const auto ext = ExtensionOperator::make(3);
    const double support = T / ext.K;
    const double dt = 3.0 * T / samples;
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double t = i * dt;
        Value v = zero;
        if (t <= T) {
            v = g(t);
        } else {
            const bool right = t < 2.0 * T;
            const double s = right ? t - T : 3.0 * T - t;
            const double chi = ext.cutoff(s, support);
            if (chi > 0.0)
                for (int k = 1; k <= ext.K; ++k)
                    axpy(v, chi * ext.coefficients[static_cast<std::size_t>(k - 1)], g(right ? T - k * s : k * s));
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

std::vector<Complex> extend_time_series(const std::function<Complex(double)>& g, double T, int samples) {
    return extend_samples<Complex>(g, T, samples, Complex(0.0, 0.0),
                                   [](Complex& acc, double a, Complex x) { acc += a * x; });
}

std::string IbvpResult::to_csv(const HalfLine& line) const {
    Table tab({"t", "x_n", "mode", "re", "im"});
    for (std::size_t a = 0; a < times.size(); ++a) {
        const auto& v = u[a].values;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            if (v.row(r).cwiseAbs().maxCoeff() == 0.0) continue;
            for (Eigen::Index c = 0; c < v.cols(); ++c)
                tab.add_row({times[a], line.x(static_cast<int>(c)), static_cast<long long>(r), v(r, c).real(), v(r, c).imag()});
        }
    }
    return tab.to_csv();
}

IbvpResult ibvp_solve(const ModelProblem& problem, const IbvpData& data, const TangentialGrid& tgrid,
                      const HalfLine& line, const IbvpOptions& opt) {
    require(opt.T > 0.0 && opt.sigma > 0.0, "ibvp: T and sigma must be positive");
    require(opt.gauss_per_unit >= 1, "ibvp: gauss_per_unit must be >= 1");
    require(!opt.output_times.empty(), "ibvp: no output times");
    for (double t : opt.output_times) require(t > 0.0 && t <= opt.T * (1.0 + 1e-12), "ibvp: output times must lie in (0, T]");
    require(static_cast<std::size_t>(data.u0.values.rows()) == tgrid.size() && data.u0.values.cols() == line.count,
            "ibvp: u0 does not match the grids");
    const int m = problem.half_order();
    const auto rows = static_cast<Eigen::Index>(tgrid.size());
    auto zero_slice = [&] { return GridFunction{CMatrix::Zero(rows, line.count), Layout::Frequency}; };

    IbvpResult res;
    res.times = opt.output_times;
    for (std::size_t a = 0; a < res.times.size(); ++a) res.u.push_back(zero_slice());

    // v1: torus solution for e^{-sigma t} g, evaluated at 0 and the output times.
    GridFunction v1_at_zero = zero_slice();
    if (data.boundary) {
        const auto g0 = data.boundary(0.0);
        require(static_cast<int>(g0.size()) == m, "ibvp: boundary data needs one vector per operator");
        const auto bu0 = boundary_values(problem, data.u0, tgrid, line);
        for (int j = 0; j < m; ++j)
            res.compatibility_defect = std::max(
                res.compatibility_defect, (bu0[static_cast<std::size_t>(j)] - g0[static_cast<std::size_t>(j)]).cwiseAbs().maxCoeff());
        res.compatibility_warning = res.compatibility_defect > 1e-6 * std::max(1.0, data.u0.values.cwiseAbs().maxCoeff());

        const std::vector<CVector> zero(static_cast<std::size_t>(m), CVector::Zero(rows));
        auto damped = [&](double t) {
            auto v = data.boundary(t);
            for (auto& c : v) c *= std::exp(-opt.sigma * t);
            return v;
        };
        using Vec = std::vector<CVector>;
        const auto samples = extend_samples<Vec>(damped, opt.T, opt.time_samples, zero, [](Vec& acc, double a, const Vec& x) {
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * x[i];
        });
        const auto time = TimeGrid::make(opt.time_samples, 3.0 * opt.T);
        BoundarySeries series(static_cast<std::size_t>(m), CMatrix::Zero(opt.time_samples, rows));
        for (int i = 0; i < opt.time_samples; ++i)
            for (int j = 0; j < m; ++j)
                series[static_cast<std::size_t>(j)].row(i) = samples[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].transpose();

        std::vector<double> nodes(static_cast<std::size_t>(line.count));
        for (int i = 0; i < line.count; ++i) nodes[static_cast<std::size_t>(i)] = line.x(i);
        const auto ngrid = NormalGrid::points(nodes);
        std::vector<double> times{0.0};
        times.insert(times.end(), res.times.begin(), res.times.end());
        const auto v1 = parabolic_boundary_eval(problem, series, opt.sigma, time, tgrid, ngrid, times);
        v1_at_zero = v1.slices[0];
        for (std::size_t a = 0; a < res.times.size(); ++a)
            res.u[a].values += std::exp(opt.sigma * res.times[a]) * v1.slices[a + 1].values;
    }

    // v2: semigroup on the corrected initial value plus the Duhamel integral.
    GridFunction w0{data.u0.values - v1_at_zero.values, Layout::Frequency};
    const bool has_initial = w0.values.cwiseAbs().maxCoeff() > 0.0;
    using Gauss = boost::math::quadrature::gauss<double, 16>;
    for (std::size_t a = 0; a < res.times.size(); ++a) {
        const double t = res.times[a];
        if (has_initial) res.u[a].values += semigroup_apply(problem, w0, t, tgrid, line, opt.contour).values;
        if (!data.forcing) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(t * opt.gauss_per_unit / 16.0)));
        const double width = t / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * width;
            const auto& xs = Gauss::abscissa();
            const auto& ws = Gauss::weights();
            for (std::size_t q = 0; q < xs.size(); ++q) {
                for (double sign : {-1.0, 1.0}) {
                    if (xs[q] == 0.0 && sign < 0.0) continue;
                    const double s = mid + sign * 0.5 * width * xs[q];
                    const auto f = data.forcing(s);
                    if (f.values.cwiseAbs().maxCoeff() == 0.0) continue;
                    res.u[a].values += (0.5 * width * ws[q]) * semigroup_apply(problem, f, t - s, tgrid, line, opt.contour).values;
                }
            }
        }
    }
    return res;
}

} // namespace hp
