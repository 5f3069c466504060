#pragma once

#include "hp/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hp {

using MultiIndex = std::vector<int>;

struct BoundaryOperator {
    int order = 0;
    std::map<MultiIndex, Complex> coeffs;
};

/// Homogeneous constant-coefficient boundary value problem on the half-space
/// {x_n > 0}: interior operator A(D) = sum a_alpha D^alpha of order 2m and m
/// boundary operators B_j(D) of orders m_j < 2m, with D = -i d/dx.
///
/// Immutable after construction; `create` validates homogeneity, the
/// pure-normal leading coefficient and non-degenerate boundary operators.
class ModelProblem {
public:
    static ModelProblem create(int n, int m, std::map<MultiIndex, Complex> interior,
                               std::vector<BoundaryOperator> boundary, double phi_prime,
                               double phi);

    int dim() const { return n_; }
    int half_order() const { return m_; }
    int order() const { return 2 * m_; }
    double phi_prime() const { return phi_prime_; }
    double phi() const { return phi_; }
    const std::map<MultiIndex, Complex>& interior() const { return interior_; }
    const std::vector<BoundaryOperator>& boundary() const { return boundary_; }
    int boundary_order(int j) const { return boundary_.at(static_cast<std::size_t>(j)).order; }

    /// A(xi) for xi in R^n.
    Complex symbol(std::span<const double> xi) const;

    /// Coefficients c_0..c_{2m} of A(xi', tau) = sum_k c_k tau^k.
    std::vector<Complex> normal_coefficients(std::span<const double> xi_prime) const;

    /// Coefficients e_0..e_{m_j} of B_j(xi', tau) = sum_k e_k tau^k.
    std::vector<Complex> boundary_coefficients(int j, std::span<const double> xi_prime) const;

    Complex boundary_symbol(int j, std::span<const double> xi_prime, Complex tau) const;

    /// Minimal normal order over all nonzero boundary coefficients.
    int k_max() const;

    /// Leading coefficient a_{(0,...,0,2m)}.
    Complex normal_leading() const;

private:
    struct Term {
        std::vector<int> tangential;
        int normal = 0;
        Complex coeff;
    };

    ModelProblem() = default;

    static Complex tangential_monomial(const std::vector<int>& alpha, std::span<const double> xi);

    int n_ = 0;
    int m_ = 0;
    double phi_prime_ = 0.0;
    double phi_ = 0.0;
    std::map<MultiIndex, Complex> interior_;
    std::vector<BoundaryOperator> boundary_;
    std::vector<Term> interior_terms_;
    std::vector<std::vector<Term>> boundary_terms_;
};

struct EllipticityReport {
    bool pass = false;
    double worst_margin = 0.0;
    std::vector<double> worst_direction;
    std::optional<std::vector<double>> violating_direction;
};

/// Unit directions on S^{n-1}: uniform angles for n = 2, a Fibonacci lattice
/// for n = 3, seeded Gaussian samples otherwise. Axis directions are always
/// included.
std::vector<std::vector<double>> default_directions(int n, int count = 64);

/// Checks that A(xi) stays outside the closed sector of angle phi' on the
/// sampled unit directions. The margin is |arg A(xi)| - phi' (radians).
EllipticityReport check_ellipticity(const ModelProblem& problem,
                                    const std::vector<std::vector<double>>& directions);

struct SectorSample {
    std::vector<double> rays;
    std::vector<double> moduli;
    double sigma_floor = 1.0;

    /// `rays` equally spaced arguments in [-phi, phi] and `moduli` log-spaced
    /// values in [sigma_floor, sigma_floor * 10^decades].
    static SectorSample make(double phi, int rays, int moduli, double sigma_floor, double decades);
    void validate(double phi) const;
    std::vector<Complex> points() const;
};

struct LsReport {
    bool pass = false;
    double min_singular_value = 0.0;
    double worst_condition = 0.0;
    std::vector<double> worst_xi_prime;
    Complex worst_lambda;
    std::size_t points_checked = 0;
    std::string failure;
};

/// Tangential sample for the Lopatinskii-Shapiro check: xi' = 0 plus unit
/// directions in R^{n-1} (both signs when n = 2).
std::vector<std::vector<double>> default_tangential_points(int n, int count = 64);

/// Builds the boundary map on the stable subspace at every sample point and
/// reports its smallest singular value (relative to the boundary matrix norm).
LsReport check_lopatinskii_shapiro(const ModelProblem& problem, const SectorSample& sample,
                                   const std::vector<std::vector<double>>& tangential_points,
                                   double threshold = 1e-8);

} // namespace hp
