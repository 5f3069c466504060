#pragma once

#include "hp/grid.hpp"
#include "hp/model.hpp"
#include "hp/types.hpp"

#include <string>
#include <vector>

namespace hp {

/// Uniform half-line grid x_i = i h, i = 0..count-1. The resolvent mirrors
/// it to the periodic line [-count h, count h) for the normal FFT.
struct HalfLine {
    double h = 0.01;
    int count = 4096;

    static HalfLine make(double h, int count);
    double x(int i) const { return i * h; }
    double length() const { return count * h; }
    /// Angular frequencies of the mirrored line in FFT order (2 count entries).
    std::vector<double> frequencies() const;
    /// Trapezoid L2 norm of one profile on [0, length).
    double l2_norm(const CVector& profile) const;
};

/// Reflection across x = 0: (E u)(-x) = chi(x) sum_k c_k u(k x) for x > 0,
/// with sum_k c_k (-k)^l = 1 for l = 0..K-1 so that derivatives up to order
/// K-1 match at 0. chi is a smooth cutoff equal to 1 on [0, support/1.5] and 0
/// beyond `support`, chosen so k x stays inside the sampled half-line.
struct ExtensionOperator {
    int K = 4;
    std::vector<double> coefficients;

    static ExtensionOperator make(int K);
    /// K = max(4, k_max + 2m + 1).
    static ExtensionOperator for_problem(const ModelProblem& problem);

    double cutoff(double x, double support) const;
};

/// Extends a half-line profile to the full line. The result is ordered from
/// x = -count h up to (count - 1) h; the second half equals `u`.
CVector seeley_extend(const CVector& u, const HalfLine& line, const ExtensionOperator& ext);

/// (lambda - A(xi', eta))^{-1} applied node by node. f_hat has one row per
/// tangential node and one column per normal frequency of `line` (FFT order).
CMatrix whole_space_resolvent(const ModelProblem& problem, Complex lambda, const CMatrix& f_hat,
                              const TangentialGrid& tgrid, const HalfLine& line);

/// max over the grid of (|lambda| + <xi>^{2m}) / |lambda - A(xi)|: the
/// multiplier bound behind the uniform domain estimate.
double domain_multiplier_bound(const ModelProblem& problem, Complex lambda, const TangentialGrid& tgrid,
                               const HalfLine& line);

/// u = r_+ (lambda - A)^{-1} E f - sum_j Poi_j(lambda) tr B_j (lambda - A)^{-1} E f.
/// f is in tangential frequency layout with columns on `line`; the result has
/// the same shape. Traces of the whole-space part are taken spectrally.
GridFunction halfspace_resolvent(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                 const TangentialGrid& tgrid, const HalfLine& line,
                                 const ExtensionOperator& ext);
GridFunction halfspace_resolvent(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                 const TangentialGrid& tgrid, const HalfLine& line);

struct ResolventCheck {
    double interior = 0.0;  // max |(lambda - A(D)) u - f| / max |f|
    double boundary = 0.0;  // max_j |tr B_j(D) u| / max |f|
};

/// Residuals of a computed u measured with finite differences in the normal
/// variable (stencil of 2m + 5 points, one-sided near x = 0). Nodes within
/// `skip_tail` of the far end are ignored.
ResolventCheck resolvent_residual(const ModelProblem& problem, Complex lambda, const GridFunction& f,
                                  const GridFunction& u, const TangentialGrid& tgrid, const HalfLine& line,
                                  double skip_tail = 0.25);

/// tr B_j(D) u for every j and tangential node, normal derivatives by the
/// same one-sided differences as `resolvent_residual`.
std::vector<CVector> boundary_values(const ModelProblem& problem, const GridFunction& u, const TangentialGrid& tgrid,
                                     const HalfLine& line);

struct SectorialityPoint {
    double ray_arg = 0.0;
    double lambda_mod = 0.0;
    double ratio = 0.0; // max over the data family of |lambda| ||u|| / ||f||
};

struct SectorialityResult {
    std::vector<SectorialityPoint> points;
    /// Largest max(ratio / median, median / ratio) over each ray.
    double worst_spread = 0.0;
    double max_ratio = 0.0;

    std::string to_csv() const;
};

/// |lambda| ||R(lambda) f|| / ||f|| for f = exp(-a x_n) on the tangential mode
/// xi', maximized over the decay rates `rates`, across the sample.
SectorialityResult sectoriality_sweep(const ModelProblem& problem, const std::vector<double>& rays,
                                      const std::vector<double>& moduli, const std::vector<double>& xi_prime,
                                      const std::vector<double>& rates, const HalfLine& line);

/// Hyperbolic contour lambda(theta) = omega + mu (1 + sin(i theta - alpha)).
/// alpha, mu and the node spacing are picked from phi and t to balance the
/// discretization and truncation errors; the contour stays inside the sector.
struct ContourOptions {
    int nodes = 48;
    double omega = 0.0;
};

struct ContourNode {
    Complex lambda;
    Complex weight; // includes d lambda / d theta, the step and 1 / (2 pi i)
};

std::vector<ContourNode> semigroup_contour(double phi, double t, const ContourOptions& options = {});

/// T(t) u0 = (2 pi i)^{-1} int e^{lambda t} R(lambda) u0 d lambda on the contour.
GridFunction semigroup_apply(const ModelProblem& problem, const GridFunction& u0, double t,
                             const TangentialGrid& tgrid, const HalfLine& line,
                             const ContourOptions& options = {});

} // namespace hp
