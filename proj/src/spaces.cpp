#include "hp/spaces.hpp"

#include "hp/error.hpp"
#include "hp/fft.hpp"
#include "hp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hp {

Scale parse_scale(const std::string& name) {
    if (name == "Lp" || name == "L") return Scale::Lp;
    if (name == "W") return Scale::W;
    if (name == "H") return Scale::H;
    if (name == "B") return Scale::B;
    if (name == "F") return Scale::F;
    fail(ErrorCode::InvalidArgument, "unknown scale '" + name + "' (expected Lp, W, H, B or F)");
}

std::string scale_name(Scale s) {
    switch (s) {
    case Scale::Lp: return "Lp";
    case Scale::W: return "W";
    case Scale::H: return "H";
    case Scale::B: return "B";
    case Scale::F: return "F";
    }
    return "?";
}

SpaceSpec SpaceSpec::make(Scale scale, double s, double p, double q, double r) {
    SpaceSpec spec;
    spec.scale = scale;
    spec.s = s;
    spec.p = p;
    spec.q = q;
    spec.r = r;
    spec.validate();
    return spec;
}

void SpaceSpec::validate() const {
    require(p >= 1.0 && std::isfinite(p), "space: p must lie in [1, inf)");
    require(q >= 1.0, "space: q must lie in [1, inf]");
    require(r > -1.0, "space: weight exponent r must exceed -1");
    if (scale == Scale::W)
        require(s >= 0.0 && s == std::floor(s), "space: W^s needs a non-negative integer s");
    if (weight)
        for (double w : *weight) require(w > 0.0, "space: tabulated weight must be positive");
}

bool SpaceSpec::hilbertian() const {
    if (weight || p != 2.0) return false;
    return (scale != Scale::B && scale != Scale::F) || q == 2.0;
}

SpaceSpec SpaceSpec::with_s(double s_new) const {
    SpaceSpec out = *this;
    out.s = s_new;
    return out;
}

DyadicPartition DyadicPartition::covering(double max_frequency) {
    DyadicPartition d;
    d.K = 0;
    while (std::ldexp(1.0, d.K) < max_frequency) ++d.K;
    return d;
}

DyadicPartition DyadicPartition::for_grid(const TangentialGrid& grid) {
    double mx = 0.0;
    if (grid.axes > 0) mx = std::sqrt(static_cast<double>(grid.axes)) * (2.0 * pi / grid.length) * (grid.modes / 2);
    return covering(mx);
}

namespace {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double weighted_sum_p(const CVector& v, double p, const std::optional<std::vector<double>>& weight) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        const double w = weight ? (*weight)[static_cast<std::size_t>(i)] : 1.0;
        acc += (p == 2.0 ? a * a : std::pow(a, p)) * w;
    }
    return acc;
}

std::vector<std::vector<int>> multi_indices(int dims, int max_order) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(dims), 0);
    std::function<void(int, int)> rec = [&](int axis, int left) {
        if (axis == dims) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[static_cast<std::size_t>(axis)] = v;
            rec(axis + 1, left - v);
        }
    };
    rec(0, max_order);
    return out;
}

double monomial_abs(const std::vector<int>& alpha, std::span<const double> xi) {
    double v = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) v *= std::pow(std::abs(xi[i]), alpha[i]);
    return v;
}

double bracket_of(std::span<const double> xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return bracket(s);
}

double lq_sum(const std::vector<double>& terms, double q) {
    if (std::isinf(q)) return terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::pow(t, q);
    return std::pow(acc, 1.0 / q);
}

// |multiplier|^2 per frequency row: the Plancherel form of a Hilbertian norm.
std::vector<double> plancherel_weights(const SpaceSpec& spec, const TangentialGrid& grid) {
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ms = mode_symbol(spec, grid.frequency(i));
        w[i] = ms * ms;
    }
    return w;
}

} // namespace

double DyadicPartition::psi(double t) { return smooth_step(3.0 - 2.0 * t); }

double DyadicPartition::phi(int k, double abs_xi) const {
    if (k < 0 || k > K) return 0.0;
    if (k == 0) return psi(abs_xi);
    return psi(std::ldexp(abs_xi, -k)) - psi(std::ldexp(abs_xi, -k + 1));
}

double lp_norm_space(const CVector& samples, const TangentialGrid& grid, double p,
                     const std::optional<std::vector<double>>& weight) {
    require(static_cast<std::size_t>(samples.size()) == grid.size(), "Lp norm: sample count does not match grid");
    if (weight) require(weight->size() == grid.size(), "Lp norm: weight size does not match grid");
    return std::pow(weighted_sum_p(samples, p, weight) * grid.cell_volume(), 1.0 / p);
}

double bessel_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid) {
    require(static_cast<std::size_t>(f_hat.size()) == grid.size(), "Bessel norm: size does not match grid");
    CMatrix g = f_hat;
    for (std::size_t i = 0; i < grid.size(); ++i)
        g(static_cast<Eigen::Index>(i), 0) *= std::pow(bracket_of(grid.frequency(i)), spec.s);
    to_space(g, grid);
    return lp_norm_space(g.col(0), grid, spec.p, spec.weight);
}

namespace {

std::vector<CVector> band_pieces(const CVector& f_hat, const TangentialGrid& grid, const DyadicPartition& part) {
    std::vector<CVector> bands(static_cast<std::size_t>(part.K + 1));
    std::vector<double> norms(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) norms[i] = grid.frequency_norm(i);
    parallel_for(bands.size(), [&](std::size_t k) {
        CMatrix b(f_hat.size(), 1);
        for (std::size_t i = 0; i < grid.size(); ++i)
            b(static_cast<Eigen::Index>(i), 0) = f_hat(static_cast<Eigen::Index>(i)) * part.phi(static_cast<int>(k), norms[i]);
        to_space(b, grid);
        bands[k] = b.col(0);
    });
    return bands;
}

} // namespace

double besov_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid,
                  const DyadicPartition& part) {
    require(static_cast<std::size_t>(f_hat.size()) == grid.size(), "Besov norm: size does not match grid");
    const auto bands = band_pieces(f_hat, grid, part);
    std::vector<double> terms;
    for (std::size_t k = 0; k < bands.size(); ++k)
        terms.push_back(std::pow(2.0, spec.s * static_cast<double>(k)) *
                        lp_norm_space(bands[k], grid, spec.p, spec.weight));
    return lq_sum(terms, spec.q);
}

double triebel_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid,
                    const DyadicPartition& part) {
    require(static_cast<std::size_t>(f_hat.size()) == grid.size(), "Triebel norm: size does not match grid");
    const auto bands = band_pieces(f_hat, grid, part);
    CVector pointwise(f_hat.size());
    std::vector<double> terms(bands.size());
    for (Eigen::Index i = 0; i < f_hat.size(); ++i) {
        for (std::size_t k = 0; k < bands.size(); ++k)
            terms[k] = std::pow(2.0, spec.s * static_cast<double>(k)) * std::abs(bands[k](i));
        pointwise(i) = lq_sum(terms, spec.q);
    }
    return lp_norm_space(pointwise, grid, spec.p, spec.weight);
}

double sobolev_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid) {
    require(static_cast<std::size_t>(f_hat.size()) == grid.size(), "Sobolev norm: size does not match grid");
    double acc = 0.0;
    for (const auto& alpha : multi_indices(grid.axes, static_cast<int>(spec.s))) {
        CMatrix g = f_hat;
        for (std::size_t i = 0; i < grid.size(); ++i)
            g(static_cast<Eigen::Index>(i), 0) *= monomial_abs(alpha, grid.frequency(i));
        to_space(g, grid);
        acc += std::pow(lp_norm_space(g.col(0), grid, spec.p, spec.weight), spec.p);
    }
    return std::pow(acc, 1.0 / spec.p);
}

double space_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid) {
    spec.validate();
    switch (spec.scale) {
    case Scale::Lp: return bessel_norm(f_hat, spec.with_s(0.0), grid);
    case Scale::H: return bessel_norm(f_hat, spec, grid);
    case Scale::W: return sobolev_norm(f_hat, spec, grid);
    case Scale::B: return besov_norm(f_hat, spec, grid, DyadicPartition::for_grid(grid));
    case Scale::F: return triebel_norm(f_hat, spec, grid, DyadicPartition::for_grid(grid));
    }
    return 0.0;
}

std::vector<double> tangential_norms(const CMatrix& f_hat, const SpaceSpec& spec, const TangentialGrid& grid) {
    spec.validate();
    require(static_cast<std::size_t>(f_hat.rows()) == grid.size(), "tangential norms: row count does not match grid");
    std::vector<double> out(static_cast<std::size_t>(f_hat.cols()));
    if (spec.hilbertian()) {
        const auto w = plancherel_weights(spec, grid);
        const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
        const Eigen::RowVectorXd sums = wv.transpose() * f_hat.cwiseAbs2();
        for (Eigen::Index c = 0; c < f_hat.cols(); ++c)
            out[static_cast<std::size_t>(c)] = std::sqrt(sums(c) * grid.volume());
        return out;
    }
    parallel_for(out.size(), [&](std::size_t c) {
        out[c] = space_norm(f_hat.col(static_cast<Eigen::Index>(c)), spec, grid);
    });
    return out;
}

double mode_symbol(const SpaceSpec& spec, std::span<const double> xi) {
    switch (spec.scale) {
    case Scale::Lp: return 1.0;
    case Scale::H: return std::pow(bracket_of(xi), spec.s);
    case Scale::W: {
        double acc = 0.0;
        for (const auto& alpha : multi_indices(static_cast<int>(xi.size()), static_cast<int>(spec.s)))
            acc += std::pow(monomial_abs(alpha, xi), spec.p);
        return std::pow(acc, 1.0 / spec.p);
    }
    case Scale::B:
    case Scale::F: {
        double nrm = 0.0;
        for (double v : xi) nrm += v * v;
        nrm = std::sqrt(nrm);
        const auto part = DyadicPartition::covering(nrm);
        std::vector<double> terms;
        for (int k = 0; k <= part.K; ++k) terms.push_back(std::pow(2.0, spec.s * k) * part.phi(k, nrm));
        return lq_sum(terms, spec.q);
    }
    }
    return 1.0;
}

double param_norm(const CVector& f_hat, double s, double s0, Complex mu, const SpaceSpec& base,
                  const TangentialGrid& grid) {
    CVector g = f_hat;
    const double mu2 = std::norm(mu);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double n = grid.frequency_norm(i);
        g(static_cast<Eigen::Index>(i)) *= std::pow(1.0 + n * n + mu2, 0.5 * (s - s0));
    }
    return space_norm(g, base.with_s(s0), grid);
}

double weighted_halfline_norm(std::span<const Complex> f, double p, double r, const NormalGrid& grid) {
    require(r > -1.0, "weighted half-line norm: r must exceed -1");
    require(f.size() == grid.size(), "weighted half-line norm: sample count does not match grid");
    const auto w = grid.weights(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * std::pow(std::abs(f[i]), p);
    return std::pow(acc, 1.0 / p);
}

double weighted_halfline_norm(std::span<const double> f, double p, double r, const NormalGrid& grid) {
    std::vector<Complex> c(f.begin(), f.end());
    return weighted_halfline_norm(std::span<const Complex>(c), p, r, grid);
}

double sobolev_mixed_norm(const std::vector<GridFunction>& derivs, int k, double p, double r,
                          const SpaceSpec& tangential, const TangentialGrid& tgrid, const NormalGrid& ngrid) {
    require(k >= 0 && static_cast<int>(derivs.size()) > k, "mixed norm: missing normal derivatives");
    require(r > -1.0, "mixed norm: r must exceed -1");
    const auto w = ngrid.weights(r);
    double acc = 0.0;
    for (int l = 0; l <= k; ++l) {
        const auto f = to_frequency(derivs[static_cast<std::size_t>(l)], tgrid);
        require(static_cast<std::size_t>(f.values.cols()) == ngrid.size(), "mixed norm: column count does not match normal grid");
        const auto n = tangential_norms(f.values, tangential, tgrid);
        for (std::size_t i = 0; i < n.size(); ++i) acc += w[i] * std::pow(n[i], p);
    }
    return std::pow(acc, 1.0 / p);
}

double d_space_norm(const std::vector<GridFunction>& derivs, int k, int k2, double p, double r,
                    const SpaceSpec& tangential, const TangentialGrid& tgrid, const NormalGrid& ngrid) {
    const double a = sobolev_mixed_norm(derivs, k, p, r, tangential.with_s(tangential.s + k2), tgrid, ngrid);
    const double b = sobolev_mixed_norm(derivs, k + k2, p, r, tangential, tgrid, ngrid);
    return std::max(a, b);
}

std::vector<Interval> shrinking_family(int levels) {
    std::vector<Interval> fam;
    for (int j = 1; j <= levels; ++j) {
        const double d = std::pow(10.0, -j);
        fam.emplace_back(d, 1.0);
        fam.emplace_back(-d, d);
    }
    return fam;
}

namespace {

// Tanh-sinh quadrature on [a, b]; abscissae are formed from the nearer
// endpoint so that integrable endpoint singularities are resolved.
double tanh_sinh(const std::function<double(double)>& g, double a, double b) {
    if (a < 0.0 && b > 0.0) return tanh_sinh(g, a, 0.0) + tanh_sinh(g, 0.0, b);
    const double h = 1.0 / 32.0;
    const double len = b - a;
    double acc = 0.0;
    for (int k = -192; k <= 192; ++k) {
        const double t = k * h;
        const double u = 0.5 * pi * std::sinh(t);
        const double s = 1.0 / (1.0 + std::exp(-2.0 * u));
        const double s1 = 1.0 / (1.0 + std::exp(2.0 * u));
        const double dxdt = len * 2.0 * s * s1 * 0.5 * pi * std::cosh(t);
        if (dxdt == 0.0) continue;
        const double x = s < 0.5 ? a + len * s : b - len * s1;
        if (x == a || x == b) continue;
        const double v = g(x);
        if (!(v > 0.0) || !std::isfinite(v)) {
            if (std::isinf(v)) continue;
            fail(ErrorCode::InvalidArgument, "A_p characteristic: weight must be positive on the interval");
        }
        acc += v * dxdt * h;
    }
    return acc;
}

} // namespace

ApReport ap_characteristic(const std::function<double(double)>& weight, double p,
                           const std::vector<Interval>& family) {
    require(p > 1.0, "A_p characteristic needs p > 1");
    require(!family.empty(), "A_p characteristic: empty interval family");
    ApReport rep;
    const double e = -1.0 / (p - 1.0);
    for (const auto& [a, b] : family) {
        require(b > a, "A_p characteristic: empty interval");
        const double len = b - a;
        const double avg_w = tanh_sinh(weight, a, b) / len;
        const double avg_v = tanh_sinh([&](double x) { return std::pow(weight(x), e); }, a, b) / len;
        rep.per_interval.push_back(avg_w * std::pow(avg_v, p - 1.0));
    }
    rep.characteristic = *std::max_element(rep.per_interval.begin(), rep.per_interval.end());
    const auto n = rep.per_interval.size();
    for (std::size_t back = 1; back <= 2 && back + 2 <= n; ++back)
        if (rep.per_interval[n - back] > 1.01 * rep.per_interval[n - back - 2]) rep.diverging = true;
    if (!std::isfinite(rep.characteristic)) rep.diverging = true;
    return rep;
}

std::vector<double> hardy_apply(std::span<const double> f, const NormalGrid& grid) {
    require(f.size() == grid.size(), "Hardy operator: sample count does not match grid");
    const auto w = grid.weights(0.0);
    std::vector<double> out(f.size(), 0.0);
    parallel_for(f.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j)
            if (w[j] != 0.0) acc += w[j] * f[j] / (grid.nodes[i] + grid.nodes[j]);
        out[i] = acc;
    });
    return out;
}

double hardy_reference(double p, double r) {
    require(p > 1.0 && r > -1.0 && r < p - 1.0, "Hardy reference needs r in (-1, p-1)");
    return pi / std::sin(pi * (1.0 + r) / p);
}

HardyNormResult hardy_norm(double p, double r, const NormalGrid& grid, int max_iter, double tol) {
    require(p > 1.0, "Hardy norm needs p > 1");
    require(r > -1.0, "Hardy norm needs r > -1");
    require(!grid.has_zero, "Hardy norm: use a grid without the x = 0 node");
    const auto W = grid.weights(r);
    const auto v = grid.weights(0.0);
    const auto n = static_cast<Eigen::Index>(grid.size());
    RMatrix B(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            B(i, j) = std::pow(W[static_cast<std::size_t>(i)], 1.0 / p) * v[static_cast<std::size_t>(j)] *
                      std::pow(W[static_cast<std::size_t>(j)], -1.0 / p) / (grid.nodes[static_cast<std::size_t>(i)] + grid.nodes[static_cast<std::size_t>(j)]);

    HardyNormResult res;
    res.in_range = r < p - 1.0;
    RVector x = RVector::Ones(n);
    auto lp = [p](const RVector& z) { return std::pow(z.array().abs().pow(p).sum(), 1.0 / p); };
    x /= lp(x);
    double prev = 0.0;
    const double pc = p / (p - 1.0);
    for (int it = 1; it <= max_iter; ++it) {
        const RVector y = B * x;
        const double est = lp(y);
        RVector z;
        if (p == 2.0) {
            z = B.transpose() * y;
        } else {
            const RVector py = y.array().abs().pow(p - 1.0) * y.array().sign();
            const RVector t = B.transpose() * py;
            z = t.array().abs().pow(pc - 1.0) * t.array().sign();
        }
        x = z / lp(z);
        res.norm = est;
        res.iterations = it;
        if (it > 1 && std::abs(est - prev) <= tol * est) {
            res.converged = true;
            break;
        }
        prev = est;
    }
    return res;
}

LiftingReport mixed_lifting_check(const CMatrix& f_hat, double t, double p, const TangentialGrid& axis) {
    require(axis.axes == 1, "mixed lifting: axis grid must be one-dimensional");
    require(f_hat.rows() == axis.modes && f_hat.cols() == axis.modes, "mixed lifting: data must be N x N");
    require(t >= 0.0, "mixed lifting: t must be >= 0");
    const int N = axis.modes;
    const double cell = std::pow(axis.length / N, 2);
    auto norm_with = [&](auto multiplier) {
        CMatrix g = f_hat;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) g(i, j) *= multiplier(axis.frequency_1d(i), axis.frequency_1d(j));
        fft_backward(g.data(), {N, N});
        return std::pow(g.cwiseAbs().array().pow(p).sum() * cell, 1.0 / p);
    };
    LiftingReport rep;
    rep.lhs = norm_with([t](double a, double b) { return std::pow(1.0 + a * a + b * b, 0.5 * t); });
    const double tang = norm_with([t](double a, double) { return std::pow(1.0 + a * a, 0.5 * t); });
    const double norm = norm_with([t](double, double b) { return std::pow(1.0 + b * b, 0.5 * t); });
    rep.rhs = std::max(tang, norm);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 1.0;
    return rep;
}

} // namespace hp
