#pragma once

#include "hp/companion.hpp"
#include "hp/grid.hpp"
#include "hp/model.hpp"
#include "hp/spaces.hpp"

#include <string>
#include <vector>

namespace hp {

/// (k, p, r, t, s, j) of the decay estimate together with m_j. `make`
/// rejects queries with r - p[t + k - m_j - s]_+ <= -1.
struct ExponentQuery {
    int k = 0;
    double p = 2.0;
    double r = 0.0;
    double t = 0.0;
    double s = 0.0;
    int j = 0;
    int m_j = 0;

    static ExponentQuery make(int k, double p, double r, double t, double s, int j, int m_j);
    static bool admissible(int k, double p, double r, double t, double s, int m_j);
};

/// theta = (-1 - r + p(k - m_j) + p[t - s]_+) / (2mp)
double predicted_decay_exponent(const ExponentQuery& q, int m);

/// -[t - s]_+
double predicted_singularity_exponent(double t, double s);

/// D_n^k pr_1 Poi_j(lambda) g sampled on the grid. g_hat holds the Fourier
/// coefficients of g_j on the tangential grid; rows with g_hat = 0 are skipped.
GridFunction poisson_apply(const ModelProblem& problem, Complex lambda, int j, const CVector& g_hat,
                           const TangentialGrid& tgrid, const NormalGrid& ngrid, int k = 0,
                           Layout layout = Layout::Frequency);

/// tr_{x_n = 0} B_k(D) pr_1 Poi_j(lambda) g in frequency layout.
CVector boundary_trace(const ModelProblem& problem, Complex lambda, int j, int k_op,
                       const CVector& g_hat, const TangentialGrid& tgrid);

/// Largest relative pointwise value of (lambda - A(xi', D_n)) applied to the
/// kernels of every nonzero mode, normalized by the sum of the term sizes.
double interior_residual(const ModelProblem& problem, Complex lambda, int j, const CVector& g_hat,
                         const TangentialGrid& tgrid, const NormalGrid& ngrid);

/// Per-mode normal grid: x_min / rho up to tail / gamma (gamma the slowest decay rate).
NormalGrid mode_grid(const CompanionSystem& cs, double x_min = 1e-6, double ratio = 1.1, double tail = 45.0);

/// (sum_{l <= k} int_0^inf |D^l K_j(x)|^p x^r dx)^{1/p} for the kernel of one mode.
double kernel_profile_norm(const CompanionSystem& cs, int j, int k, double p, double r,
                           const NormalGrid& grid);

struct SweepPoint {
    double ray_arg = 0.0;
    double lambda_mod = 0.0;
    double norm = 0.0;
    bool flagged = false;
};

struct RayFit {
    double ray_arg = 0.0;
    double slope = 0.0;
    std::size_t used = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<RayFit> fits;
    double predicted = 0.0;
    double max_deviation = 0.0;

    const RayFit& fit_for(double ray_arg) const;
    /// Columns: ray_arg, lambda_mod, norm, predicted, fitted_slope.
    std::string to_csv() const;
    std::string to_json() const;
};

/// OLS slope of log y against log x on points whose log x lies in the middle
/// `fraction` of the sampled range.
double middle_slope(const std::vector<double>& x, const std::vector<double>& y, double fraction,
                    std::size_t* used = nullptr);

enum class SweepMode {
    ModeSup,   // operator-norm estimate: supremum over single-mode data
    FixedData, // norm of Poi_j(lambda) g for the given g
};

struct DecaySweepOptions {
    SweepMode mode = SweepMode::ModeSup;
    Scale tangential_scale = Scale::H;
    double micro_q = 2.0;
    int modes_per_decade = 10;
    double fit_fraction = 0.8;
    double x_min = 1e-6;
    double ratio = 1.1;
    double tail = 45.0;
    // FixedData only
    CVector g_hat;
    TangentialGrid grid;
};

SweepResult decay_sweep(const ModelProblem& problem, const ExponentQuery& q, const SectorSample& sample,
                        const DecaySweepOptions& options = {});

struct SingularityResult {
    std::vector<double> x;
    std::vector<double> norm;
    double slope = 0.0;
    double predicted = 0.0;

    std::string to_csv() const;
    std::string to_json() const;
};

/// g_hat(xi') = <xi'>^{-s - d/2 - eps}: just fails to lie in A^{s + eps}.
CVector broadband_data(const TangentialGrid& grid, double s, double eps);

/// log-log slope of x_n -> ||[Poi_j(lambda) g](., x_n)||_{A^t} over `points`
/// log-spaced x_n in [x_lo, x_hi]; compares with -[t - m_j - s]_+ where
/// t = target.s.
SingularityResult singularity_sweep(const ModelProblem& problem, int j, Complex lambda, const CVector& g_hat,
                                    const TangentialGrid& tgrid, const SpaceSpec& target, double s,
                                    double x_lo = 1e-4, double x_hi = 1e-1, int points = 25);

struct VolevichResult {
    GridFunction u;
    bool tail_warning = false;
};

/// lambda^theta Poi_j(lambda) tr B_j(D) u computed as
/// -lambda^theta int_0^inf d/dy [K_j(x + y) (B_j u)(y)] dy with the product
/// rule split across the two factors. u is given on `ngrid` in frequency
/// layout; normal derivatives of u come from finite differences on the grid.
VolevichResult volevich_apply(const ModelProblem& problem, Complex lambda, int j, const GridFunction& u,
                              const TangentialGrid& tgrid, const NormalGrid& ngrid, int theta);

/// Finite-difference weights for derivatives 0..max_deriv at x0 on arbitrary
/// nodes (Fornberg's recursion). Result is (max_deriv + 1) x nodes.size().
RMatrix fd_weights(double x0, std::span<const double> nodes, int max_deriv);

/// d^l/dx^l of samples on a graded grid by local `stencil`-point differences.
CVector grid_derivative(const CVector& samples, const NormalGrid& grid, int l, int stencil = 7);

} // namespace hp
