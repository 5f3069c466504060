#pragma once

#include "hp/grid.hpp"
#include "hp/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hp {

enum class Scale { Lp, W, H, B, F };

Scale parse_scale(const std::string& name);
std::string scale_name(Scale s);

/// Tangential function space: scale, smoothness s, integrability p,
/// microscopic q (B and F only), half-line weight exponent r and an optional
/// tabulated weight on the tangential space grid.
struct SpaceSpec {
    Scale scale = Scale::H;
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;
    double r = 0.0;
    std::optional<std::vector<double>> weight;

    static SpaceSpec make(Scale scale, double s, double p, double q = 2.0, double r = 0.0);
    void validate() const;
    /// Norm computable by Plancherel (L2-based with no tangential weight).
    bool hilbertian() const;
    SpaceSpec with_s(double s_new) const;
};

/// Smooth dyadic resolution of unity phi_0..phi_K on |xi|.
struct DyadicPartition {
    int K = 0;

    /// Smallest K with 2^K >= max_frequency, so the partition sums to one on
    /// the whole grid.
    static DyadicPartition covering(double max_frequency);
    static DyadicPartition for_grid(const TangentialGrid& grid);

    /// psi(t) = 1 for t <= 1, 0 for t >= 3/2, C-infinity in between.
    static double psi(double t);
    double phi(int k, double abs_xi) const;
};

double lp_norm_space(const CVector& samples, const TangentialGrid& grid, double p,
                     const std::optional<std::vector<double>>& weight = std::nullopt);

double bessel_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid);
double besov_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid,
                  const DyadicPartition& part);
double triebel_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid,
                    const DyadicPartition& part);
/// W^s_p for integer s >= 0: (sum_{|alpha| <= s} ||D^alpha f||_p^p)^{1/p}.
double sobolev_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid);

/// Dispatches on spec.scale; the partition is derived from the grid.
double space_norm(const CVector& f_hat, const SpaceSpec& spec, const TangentialGrid& grid);

/// Norm of every column of a frequency-layout grid function.
std::vector<double> tangential_norms(const CMatrix& f_hat, const SpaceSpec& spec,
                                     const TangentialGrid& grid);

/// Norm of exp(i xi.x') relative to its L_p norm (the torus volume factor cancels).
double mode_symbol(const SpaceSpec& spec, std::span<const double> xi);

/// ||<D, mu>^{s - s0} f||_{A^{s0}} with <xi, mu> = (1 + |xi|^2 + |mu|^2)^{1/2}.
double param_norm(const CVector& f_hat, double s, double s0, Complex mu, const SpaceSpec& base,
                  const TangentialGrid& grid);

/// (int_0^inf |f|^p x^r dx)^{1/p} by the grid quadrature.
double weighted_halfline_norm(std::span<const Complex> f, double p, double r, const NormalGrid& grid);
double weighted_halfline_norm(std::span<const double> f, double p, double r, const NormalGrid& grid);

/// (sum_{l <= k} int_0^inf ||d^l u(., x)||_{A^t}^p x^r dx)^{1/p}; derivs[l]
/// holds the l-th normal derivative in frequency layout.
double sobolev_mixed_norm(const std::vector<GridFunction>& derivs, int k, double p, double r,
                          const SpaceSpec& tangential, const TangentialGrid& tgrid,
                          const NormalGrid& ngrid);

/// max{ W^k_p(x^r; A^{s + k2}), W^{k + k2}_p(x^r; A^s) }.
double d_space_norm(const std::vector<GridFunction>& derivs, int k, int k2, double p, double r,
                    const SpaceSpec& tangential, const TangentialGrid& tgrid,
                    const NormalGrid& ngrid);

struct ApReport {
    double characteristic = 0.0;
    std::vector<double> per_interval;
    bool diverging = false;
};

using Interval = std::pair<double, double>;

/// [delta_j, 1] and [-delta_j, delta_j] with delta_j = 10^{-j}, j = 1..levels.
std::vector<Interval> shrinking_family(int levels);

/// sup over the family of (avg w)(avg w^{-1/(p-1)})^{p-1}, integrals by
/// tanh-sinh quadrature (weights may be singular at interval endpoints and at 0).
/// `diverging` is set when either of the last two entries exceeds the entry
/// two places earlier (same interval shape, one level coarser) by over 1%.
ApReport ap_characteristic(const std::function<double(double)>& weight, double p,
                           const std::vector<Interval>& family);

/// Discretized (Tf)(x_i) = sum_j w_j f(x_j) / (x_i + x_j).
std::vector<double> hardy_apply(std::span<const double> f, const NormalGrid& grid);

struct HardyNormResult {
    double norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool in_range = true; // r in (-1, p-1)
};

/// Operator norm of T on L_p(R_+, x^r) restricted to the grid: power
/// iteration for p = 2, Boyd's nonlinear power method otherwise.
HardyNormResult hardy_norm(double p, double r, const NormalGrid& grid, int max_iter = 2000,
                           double tol = 1e-12);

/// pi / sin(pi (1 + r) / p): the exact norm on the continuous half-line.
double hardy_reference(double p, double r);

struct LiftingReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 1.0;
};

/// ||<D>^t f||_p against max(||<D_n>^t f||_p, ||<D'>^t f||_p) for 2-D periodic
/// data f_hat (rows: first axis, cols: normal axis).
LiftingReport mixed_lifting_check(const CMatrix& f_hat, double t, double p, const TangentialGrid& axis);

} // namespace hp
