#pragma once

#include "hp/model.hpp"
#include "hp/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hp {

/// (xi', lambda) together with the rescaled variables
/// rho = <xi', |lambda|^{1/2m}>, b = xi'/rho, sigma = lambda/rho^{2m}, mu = lambda^{1/2m}.
struct FrequencyPoint {
    std::vector<double> xi_prime;
    Complex lambda;
    int m = 1;
    double rho = 1.0;
    std::vector<double> b;
    Complex sigma;
    Complex mu;
};

FrequencyPoint make_frequency_point(std::span<const double> xi_prime, Complex lambda, int m);

/// First-order reduction of lambda - A(xi', D_n) at one frequency point.
///
/// The state vector is V = (u, D_n u / rho, ..., D_n^{2m-1} u / rho^{2m-1}) so
/// that D_n V = rho A0 V and V(x_n) = exp(i rho A0 x_n) V(0). The spectrum of A0
/// is {tau_l / rho}; eigenvalues above the real line give decaying modes.
struct CompanionSystem {
    CMatrix A0;
    CMatrix Pminus;
    CMatrix M;                      // 2m x m, P- M = M, Bmat M = I
    CMatrix boundary_matrix;        // m x 2m, row j acts on V(0) and yields B_j u(0) / rho^{m_j}
    std::vector<Complex> stable_roots;
    std::optional<CMatrix> boundary_map; // L_{jl} = B_j(xi', tau_l), simple roots only
    double min_singular_value = 0.0; // of boundary_matrix * Q
    double condition = 0.0;

    // Stable-block factorization: A0 Q = Q T11, Q orthonormal 2m x m.
    CMatrix Q;
    CMatrix T11;
    CMatrix BQinv;
    std::vector<double> column_scale; // rho^{-m_j}
    double rho = 1.0;

    /// D_n^k exp(i rho A0 x_n) M_rho (2m x m); never forms the full exponential.
    CMatrix propagate(double x_n, int k = 0) const;

    /// First row of `propagate`: D_n^k of the scalar Poisson kernels, one per j.
    Eigen::RowVectorXcd kernel_row(double x_n, int k = 0) const;

    /// Kernel of boundary operator j only.
    Complex kernel(int j, double x_n, int k = 0) const;

    /// Smallest Im(tau_l); the kernels decay at least like exp(-decay_rate x_n).
    double decay_rate() const;
};

/// The m roots of lambda - A(xi', tau) with Im tau > 0, sorted by imaginary part.
std::vector<Complex> stable_roots(const ModelProblem& problem, const FrequencyPoint& fp);

struct CompanionOptions {
    double ls_threshold = 1e-8;
    double gap_tolerance = 1e-10;
    double simple_root_tolerance = 1e-6;
};

CompanionSystem build_companion(const ModelProblem& problem, const FrequencyPoint& fp,
                                const CompanionOptions& options = {});

/// Root-basis solution u = sum_l c_l exp(i tau_l x_n), c = L^{-1} e_j; defined
/// only when the stable roots are simple. Used to cross-check the Schur route.
Complex root_basis_kernel(const ModelProblem& problem, const CompanionSystem& cs, int j,
                          double x_n, int k = 0);

/// Exponential of an upper-triangular matrix (closed forms for m <= 2).
CMatrix triangular_expm(const CMatrix& T);

/// Reorders a complex Schur form A = U T U^* in place so that the eigenvalues
/// selected by `first` lead the diagonal.
template <typename Pred>
void reorder_schur(CMatrix& U, CMatrix& T, Pred first);

} // namespace hp

#include "hp/detail/schur_reorder.hpp"
