#include "hp/resolvent.hpp"

#include "hp/companion.hpp"
#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/parallel.hpp"
#include "hp/poisson.hpp"
#include "hp/spaces.hpp"
#include "hp/table.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hp {

HalfLine HalfLine::make(double h, int count) {
    require(h > 0.0 && std::isfinite(h), "half line: h must be positive");
    require(count >= 16 && (count & (count - 1)) == 0, "half line: count must be a power of two >= 16");
    return HalfLine{h, count};
}

std::vector<double> HalfLine::frequencies() const {
    const int n = 2 * count;
    const double base = 2.0 * pi / (n * h);
    std::vector<double> eta(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) eta[static_cast<std::size_t>(k)] = base * (k < count ? k : k - n);
    return eta;
}

double HalfLine::l2_norm(const CVector& profile) const {
    require(profile.size() == count, "half line: profile size mismatch");
    double acc = 0.5 * std::norm(profile(0));
    for (int i = 1; i < count; ++i) acc += std::norm(profile(i));
    return std::sqrt(acc * h);
}

ExtensionOperator ExtensionOperator::make(int K) {
    require(K >= 1 && K <= 12, "extension order must lie in [1, 12]");
    RMatrix V(K, K);
    for (int l = 0; l < K; ++l)
        for (int k = 0; k < K; ++k) V(l, k) = std::pow(-(k + 1.0), l);
    const RVector c = V.fullPivLu().solve(RVector::Ones(K));
    ExtensionOperator e;
    e.K = K;
    e.coefficients.assign(c.data(), c.data() + K);
    return e;
}

ExtensionOperator ExtensionOperator::for_problem(const ModelProblem& problem) {
    return make(std::max(4, problem.k_max() + problem.order() + 1));
}

double ExtensionOperator::cutoff(double x, double support) const {
    return DyadicPartition::psi(1.5 * x / support);
}

namespace {

// Extended profile in FFT order: index j <-> x = j h (j < count), (j - 2 count) h otherwise.
CVector extend_fft_order(const CVector& u, const HalfLine& line, const ExtensionOperator& ext) {
    const int n = line.count;
    CVector out = CVector::Zero(2 * n);
    out.head(n) = u;
    const double support = line.length() / ext.K;
    for (int i = 1; i <= n; ++i) {
        const double chi = ext.cutoff(i * line.h, support);
        if (chi == 0.0) continue;
        Complex acc = 0.0;
        for (int k = 1; k <= ext.K; ++k)
            if (k * i < n) acc += ext.coefficients[static_cast<std::size_t>(k - 1)] * u(k * i);
        out(2 * n - i) = chi * acc;
    }
    return out;
}

Complex checked_denominator(const ModelProblem& problem, Complex lambda, std::span<const double> xi) {
    const Complex d = lambda - problem.symbol(xi);
    double n2 = 0.0;
    for (double v : xi) n2 += v * v;
    const double scale = std::abs(lambda) + std::pow(bracket(n2), problem.half_order());
    if (!(std::abs(d) >= 1e-14 * scale)) {
        std::ostringstream os;
        os << "lambda - A(xi) is numerically zero at |xi| = " << std::sqrt(n2);
        fail(ErrorCode::Conditioning, os.str());
    }
    return d;
}

std::vector<double> full_frequency(const std::vector<double>& xi_prime, double eta) {
    std::vector<double> xi = xi_prime;
    xi.push_back(eta);
    return xi;
}

CVector resolve_mode(const ModelProblem& problem, Complex lambda, const std::vector<double>& xi_prime,
                     const CVector& f, const HalfLine& line, const ExtensionOperator& ext) {
    const int n = line.count;
    const int total = 2 * n;
    CVector w = extend_fft_order(f, line, ext);
    fft_forward(w.data(), {total});
    w /= static_cast<double>(total);
    const auto eta = line.frequencies();
    for (int k = 0; k < total; ++k)
        w(k) /= checked_denominator(problem, lambda, full_frequency(xi_prime, eta[static_cast<std::size_t>(k)]));

    // Spectral traces of B_j(D) w; the Nyquist coefficient is split evenly
    // between +eta and -eta.
    const int m = problem.half_order();
    std::vector<Complex> traces(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const auto e = problem.boundary_coefficients(j, xi_prime);
        Complex acc = 0.0;
        for (int k = 0; k < total; ++k) {
            const double et = eta[static_cast<std::size_t>(k)];
            Complex b = 0.0;
            for (std::size_t l = 0; l < e.size(); ++l) {
                if (e[l] == Complex(0.0, 0.0)) continue;
                const double pw = k == n ? 0.5 * (std::pow(et, static_cast<double>(l)) + std::pow(-et, static_cast<double>(l)))
                                         : std::pow(et, static_cast<double>(l));
                b += e[l] * pw;
            }
            acc += b * w(k);
        }
        traces[static_cast<std::size_t>(j)] = acc;
    }
    fft_backward(w.data(), {total});
    CVector u = w.head(n);

    const auto cs = build_companion(problem, make_frequency_point(xi_prime, lambda, m));
    for (int j = 0; j < m; ++j) {
        const Complex t = traces[static_cast<std::size_t>(j)];
        if (t == Complex(0.0, 0.0)) continue;
        for (int i = 0; i < n; ++i) u(i) -= t * cs.kernel(j, line.x(i), 0);
    }
    return u;
}

void check_shape(const GridFunction& f, const TangentialGrid& tgrid, const HalfLine& line, const char* what) {
    if (static_cast<std::size_t>(f.values.rows()) != tgrid.size() || f.values.cols() != line.count) {
        std::ostringstream os;
        os << what << ": expected " << tgrid.size() << " x " << line.count << " samples";
        fail(ErrorCode::InvalidArgument, os.str());
    }
    require(f.layout == Layout::Frequency, std::string(what) + ": expected tangential frequency layout");
}

} // namespace

CVector seeley_extend(const CVector& u, const HalfLine& line, const ExtensionOperator& ext) {
    require(u.size() == line.count, "extension: profile size mismatch");
    const CVector f = extend_fft_order(u, line, ext);
    const int n = line.count;
    CVector out(2 * n);
    out.head(n) = f.tail(n);
    out.tail(n) = f.head(n);
    return out;
}

CMatrix whole_space_resolvent(const ModelProblem& problem, Complex lambda, const CMatrix& f_hat,
                              const TangentialGrid& tgrid, const HalfLine& line) {
    require(static_cast<std::size_t>(f_hat.rows()) == tgrid.size() && f_hat.cols() == 2 * line.count,
            "whole-space resolvent: f_hat does not match the grids");
    require(tgrid.axes == problem.dim() - 1, "whole-space resolvent: wrong number of tangential axes");
    const auto eta = line.frequencies();
    CMatrix out(f_hat.rows(), f_hat.cols());
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto xi = tgrid.frequency(i);
        for (Eigen::Index k = 0; k < f_hat.cols(); ++k)
            out(static_cast<Eigen::Index>(i), k) =
                f_hat(static_cast<Eigen::Index>(i), k) /
                checked_denominator(problem, lambda, full_frequency(xi, eta[static_cast<std::size_t>(k)]));
    });
    return out;
}

double domain_multiplier_bound(const ModelProblem& problem, Complex lambda, const TangentialGrid& tgrid,
                               const HalfLine& line) {
    const auto eta = line.frequencies();
    std::vector<double> worst(tgrid.size(), 0.0);
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto xi_p = tgrid.frequency(i);
        for (double et : eta) {
            const auto xi = full_frequency(xi_p, et);
            double n2 = 0.0;
            for (double v : xi) n2 += v * v;
            const double num = std::abs(lambda) + std::pow(bracket(n2), problem.half_order());
            worst[i] = std::max(worst[i], num / std::abs(checked_denominator(problem, lambda, xi)));
        }
    });
    return *std::max_element(worst.begin(), worst.end());
}

GridFunction halfspace_resolvent(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                 const TangentialGrid& tgrid, const HalfLine& line, const ExtensionOperator& ext) {
    check_shape(f, tgrid, line, "half-space resolvent");
    require(tgrid.axes == problem.dim() - 1, "half-space resolvent: wrong number of tangential axes");
    GridFunction u;
    u.layout = Layout::Frequency;
    u.values = CMatrix::Zero(f.values.rows(), f.values.cols());
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        const CVector row = f.values.row(r).transpose();
        if (row.cwiseAbs().maxCoeff() == 0.0) return;
        u.values.row(r) = resolve_mode(problem, lambda, tgrid.frequency(i), row, line, ext).transpose();
    });
    return u;
}

GridFunction halfspace_resolvent(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                 const TangentialGrid& tgrid, const HalfLine& line) {
    return halfspace_resolvent(problem, lambda, f, tgrid, line, ExtensionOperator::for_problem(problem));
}

namespace {

// Finite differences on the uniform half-line: `stencil` points, centred
// where possible and one-sided near the ends.
class NormalStencil {
public:
    NormalStencil(const HalfLine& line, int max_deriv) : n_(line.count), stencil_(max_deriv + 5) {
        require(n_ >= stencil_, "finite differences: half line too short");
        std::vector<double> nodes(static_cast<std::size_t>(stencil_));
        for (int s = 0; s < stencil_; ++s) nodes[static_cast<std::size_t>(s)] = s * line.h;
        for (int o = 0; o < stencil_; ++o) weights_.push_back(fd_weights(o * line.h, nodes, max_deriv));
    }

    Complex operator()(const CVector& v, int i, int l) const {
        const int start = std::clamp(i - stencil_ / 2, 0, n_ - stencil_);
        const RMatrix& w = weights_[static_cast<std::size_t>(i - start)];
        Complex acc = 0.0;
        for (int s = 0; s < stencil_; ++s) acc += w(l, s) * v(start + s);
        return acc;
    }

private:
    int n_;
    int stencil_;
    std::vector<RMatrix> weights_;
};

Complex fd_boundary_value(const ModelProblem& problem, int j, std::span<const double> xi, const CVector& v,
                          const NormalStencil& d) {
    const auto e = problem.boundary_coefficients(j, xi);
    Complex acc = 0.0;
    Complex di = 1.0;
    for (std::size_t l = 0; l < e.size(); ++l) {
        if (e[l] != Complex(0.0, 0.0)) acc += e[l] * di * d(v, 0, static_cast<int>(l));
        di *= -I;
    }
    return acc;
}

} // namespace

std::vector<CVector> boundary_values(const ModelProblem& problem, const GridFunction& u, const TangentialGrid& tgrid,
                                     const HalfLine& line) {
    check_shape(u, tgrid, line, "boundary values");
    const NormalStencil d(line, problem.order());
    std::vector<CVector> out(static_cast<std::size_t>(problem.half_order()), CVector::Zero(u.values.rows()));
    parallel_for(tgrid.size(), [&](std::size_t row) {
        const auto r = static_cast<Eigen::Index>(row);
        const CVector uv = u.values.row(r).transpose();
        if (uv.cwiseAbs().maxCoeff() == 0.0) return;
        const auto xi = tgrid.frequency(row);
        for (int j = 0; j < problem.half_order(); ++j) out[static_cast<std::size_t>(j)](r) = fd_boundary_value(problem, j, xi, uv, d);
    });
    return out;
}

ResolventCheck resolvent_residual(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                  const GridFunction& u, const TangentialGrid& tgrid, const HalfLine& line,
                                  double skip_tail) {
    check_shape(f, tgrid, line, "resolvent residual");
    check_shape(u, tgrid, line, "resolvent residual");
    const int order = problem.order();
    const int last = std::max(1, static_cast<int>(line.count * (1.0 - skip_tail)));
    const NormalStencil d(line, order);

    const double fmax = std::max(f.values.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<ResolventCheck> per(tgrid.size());
    parallel_for(tgrid.size(), [&](std::size_t row) {
        const auto r = static_cast<Eigen::Index>(row);
        const CVector uv = u.values.row(r).transpose();
        const CVector fv = f.values.row(r).transpose();
        if (uv.cwiseAbs().maxCoeff() == 0.0 && fv.cwiseAbs().maxCoeff() == 0.0) return;
        const auto xi = tgrid.frequency(row);
        const auto c = problem.normal_coefficients(xi);
        for (int i = 0; i < last; ++i) {
            Complex au = 0.0;
            Complex di = 1.0;
            for (int k = 0; k <= order; ++k) {
                if (c[static_cast<std::size_t>(k)] != Complex(0.0, 0.0)) au += c[static_cast<std::size_t>(k)] * di * d(uv, i, k);
                di *= -I;
            }
            per[row].interior = std::max(per[row].interior, std::abs(lambda * uv(i) - au - fv(i)) / fmax);
        }
        for (int j = 0; j < problem.half_order(); ++j)
            per[row].boundary = std::max(per[row].boundary, std::abs(fd_boundary_value(problem, j, xi, uv, d)) / fmax);
    });
    ResolventCheck out;
    for (const auto& p : per) {
        out.interior = std::max(out.interior, p.interior);
        out.boundary = std::max(out.boundary, p.boundary);
    }
    return out;
}

std::string SectorialityResult::to_csv() const {
    Table t({"ray_arg", "lambda_mod", "ratio"});
    for (const auto& p : points) t.add_row({p.ray_arg, p.lambda_mod, p.ratio});
    return t.to_csv();
}

SectorialityResult sectoriality_sweep(const ModelProblem& problem, const std::vector<double>& rays,
                                      const std::vector<double>& moduli, const std::vector<double>& xi_prime,
                                      const std::vector<double>& rates, const HalfLine& line) {
    require(!rays.empty() && !moduli.empty() && !rates.empty(), "sectoriality sweep: empty sample");
    require(static_cast<int>(xi_prime.size()) == problem.dim() - 1, "sectoriality sweep: xi' has the wrong size");
    for (double r : rays) require(std::abs(r) <= problem.phi() + 1e-12, "sectoriality sweep: ray outside the sector");
    for (double a : rates) require(a > 0.0, "sectoriality sweep: decay rates must be positive");
    const auto ext = ExtensionOperator::for_problem(problem);
    std::vector<CVector> data;
    std::vector<double> data_norm;
    for (double a : rates) {
        CVector f(line.count);
        for (int i = 0; i < line.count; ++i) f(i) = std::exp(-a * line.x(i));
        data_norm.push_back(line.l2_norm(f));
        data.push_back(std::move(f));
    }

    SectorialityResult res;
    for (double ray : rays)
        for (double mod : moduli) res.points.push_back({ray, mod, 0.0});
    parallel_for(res.points.size(), [&](std::size_t idx) {
        auto& pt = res.points[idx];
        const Complex lambda = std::polar(pt.lambda_mod, pt.ray_arg);
        for (std::size_t a = 0; a < data.size(); ++a) {
            const CVector u = resolve_mode(problem, lambda, xi_prime, data[a], line, ext);
            pt.ratio = std::max(pt.ratio, pt.lambda_mod * line.l2_norm(u) / data_norm[a]);
        }
    });
    for (double ray : rays) {
        std::vector<double> r;
        for (const auto& p : res.points)
            if (p.ray_arg == ray) r.push_back(p.ratio);
        std::vector<double> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t h = sorted.size() / 2;
        const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        for (double v : r) {
            res.worst_spread = std::max(res.worst_spread, std::max(v / median, median / v));
            res.max_ratio = std::max(res.max_ratio, v);
        }
    }
    return res;
}

std::vector<ContourNode> semigroup_contour(double phi, double t, const ContourOptions& options) {
    require(phi > pi / 2 && phi < pi, "semigroup contour needs pi/2 < phi < pi");
    require(t > 0.0 && std::isfinite(t), "semigroup contour needs t > 0");
    require(options.nodes >= 4 && options.nodes % 2 == 0, "semigroup contour needs an even node count >= 4");
    require(options.omega >= 0.0, "semigroup contour: omega must be >= 0");
    const double beta = phi - pi / 2;
    const double alpha = 0.5 * beta;
    const double d = 0.45 * beta;
    const double half = 0.5 * options.nodes;
    const double sa = std::sin(alpha);

    // Error model: exp(-(2 pi d n / L)(1 - 1/(sin(alpha) cosh L))) for
    // discretization plus truncation, and eps * exp(q (1 - sin alpha)) for
    // cancellation, with q = mu t. Scan the truncation length L.
    double best_err = std::numeric_limits<double>::infinity(), best_L = 1.0, best_q = 1.0;
    for (double L = 0.2; L <= 8.0; L += 0.005) {
        const double a = 2.0 * pi * d * half / L;
        const double q = a / (sa * std::cosh(L));
        const double err = std::exp(-a * (1.0 - 1.0 / (sa * std::cosh(L)))) + 1e-16 * std::exp(q * (1.0 - sa));
        if (err < best_err) {
            best_err = err;
            best_L = L;
            best_q = q;
        }
    }
    const double mu = best_q / t;
    const double h = best_L / half;
    std::vector<ContourNode> nodes;
    for (int k = 0; k < options.nodes; ++k) {
        const double theta = (k - 0.5 * (options.nodes - 1)) * h;
        const Complex arg(-alpha, theta);
        nodes.push_back({options.omega + mu * (1.0 + std::sin(arg)), h * mu * std::cos(arg) / (2.0 * pi)});
    }
    return nodes;
}

GridFunction semigroup_apply(const ModelProblem& problem, const GridFunction& u0, double t,
                             const TangentialGrid& tgrid, const HalfLine& line, const ContourOptions& options) {
    check_shape(u0, tgrid, line, "semigroup");
    const auto nodes = semigroup_contour(problem.phi(), t, options);
    const auto ext = ExtensionOperator::for_problem(problem);
    GridFunction out;
    out.layout = Layout::Frequency;
    out.values = CMatrix::Zero(u0.values.rows(), u0.values.cols());
    parallel_for(tgrid.size(), [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        const CVector row = u0.values.row(r).transpose();
        if (row.cwiseAbs().maxCoeff() == 0.0) return;
        const auto xi = tgrid.frequency(i);
        CVector acc = CVector::Zero(line.count);
        for (const auto& node : nodes)
            acc += node.weight * std::exp(node.lambda * t) * resolve_mode(problem, node.lambda, xi, row, line, ext);
        out.values.row(r) = acc.transpose();
    });
    return out;
}

} // namespace hp
