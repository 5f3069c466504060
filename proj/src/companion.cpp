#include "hp/companion.hpp"

#include "hp/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hp {

FrequencyPoint make_frequency_point(std::span<const double> xi_prime, Complex lambda, int m) {
    require(m >= 1, "frequency point: m must be >= 1");
    double xi_sq = 0.0;
    for (double v : xi_prime) {
        require(std::isfinite(v), "frequency point: non-finite xi'");
        xi_sq += v * v;
    }
    require(std::isfinite(lambda.real()) && std::isfinite(lambda.imag()),
            "frequency point: non-finite lambda");
    require(xi_sq > 0.0 || std::abs(lambda) > 0.0,
            "frequency point: (xi', lambda) = (0, 0) is degenerate");

    FrequencyPoint fp;
    fp.xi_prime.assign(xi_prime.begin(), xi_prime.end());
    fp.lambda = lambda;
    fp.m = m;
    fp.rho = std::sqrt(1.0 + xi_sq + std::pow(std::abs(lambda), 1.0 / m));
    fp.b.resize(fp.xi_prime.size());
    for (std::size_t i = 0; i < fp.b.size(); ++i) fp.b[i] = fp.xi_prime[i] / fp.rho;
    fp.sigma = lambda / std::pow(fp.rho, 2 * m);
    fp.mu = std::abs(lambda) > 0.0 ? std::pow(lambda, 1.0 / (2 * m)) : Complex(0.0, 0.0);
    return fp;
}

namespace {

CMatrix companion_matrix(const ModelProblem& problem, const FrequencyPoint& fp) {
    const int two_m = problem.order();
    const auto c = problem.normal_coefficients(fp.b);
    const Complex lead = c[static_cast<std::size_t>(two_m)];
    CMatrix A0 = CMatrix::Zero(two_m, two_m);
    for (int k = 0; k + 1 < two_m; ++k) A0(k, k + 1) = 1.0;
    A0(two_m - 1, 0) = (fp.sigma - c[0]) / lead;
    for (int k = 1; k < two_m; ++k) A0(two_m - 1, k) = -c[static_cast<std::size_t>(k)] / lead;
    return A0;
}

void check_spectrum(const std::vector<Complex>& eig, int m, double gap_tolerance) {
    double scale = 1.0;
    for (const auto& z : eig) scale = std::max(scale, std::abs(z));
    int above = 0;
    for (const auto& z : eig) {
        if (std::abs(z.imag()) < gap_tolerance * scale) {
            std::ostringstream os;
            os << "companion eigenvalue " << z.real() << (z.imag() < 0 ? "-" : "+")
               << std::abs(z.imag()) << "i lies on the real axis (ellipticity margin lost)";
            fail(ErrorCode::Ellipticity, os.str());
        }
        if (z.imag() > 0.0) ++above;
    }
    if (above != m) {
        std::ostringstream os;
        os << "expected " << m << " stable roots, found " << above;
        fail(ErrorCode::Ellipticity, os.str());
    }
}

// Solves T11 Z - Z T22 = T12 for upper-triangular T11, T22 with disjoint spectra.
CMatrix triangular_sylvester(const CMatrix& T11, const CMatrix& T22, const CMatrix& T12) {
    const Eigen::Index p = T11.rows();
    const Eigen::Index q = T22.rows();
    CMatrix Z(p, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        CVector rhs = T12.col(j);
        for (Eigen::Index i = 0; i < j; ++i) rhs += Z.col(i) * T22(i, j);
        CMatrix shifted = T11;
        shifted.diagonal().array() -= T22(j, j);
        Z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    return Z;
}

Complex divided_exp(Complex a, Complex b) {
    const Complex d = 0.5 * (b - a);
    if (std::abs(d) < 1e-3) {
        const Complex d2 = d * d;
        const Complex sinhc = 1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0;
        return std::exp(0.5 * (a + b)) * sinhc;
    }
    return (std::exp(b) - std::exp(a)) / (b - a);
}

} // namespace

CMatrix triangular_expm(const CMatrix& T) {
    const Eigen::Index n = T.rows();
    CMatrix E = CMatrix::Zero(n, n);
    if (n == 1) {
        E(0, 0) = std::exp(T(0, 0));
        return E;
    }
    if (n == 2) {
        E(0, 0) = std::exp(T(0, 0));
        E(1, 1) = std::exp(T(1, 1));
        E(0, 1) = T(0, 1) * divided_exp(T(0, 0), T(1, 1));
        return E;
    }
    CMatrix upper = T.triangularView<Eigen::Upper>();
    return upper.exp();
}

std::vector<Complex> stable_roots(const ModelProblem& problem, const FrequencyPoint& fp) {
    require(fp.m == problem.half_order(), "frequency point built for a different order");
    Eigen::ComplexEigenSolver<CMatrix> solver(companion_matrix(problem, fp), false);
    require(solver.info() == Eigen::Success, "companion eigenvalue solver failed");
    std::vector<Complex> eig(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
    check_spectrum(eig, problem.half_order(), CompanionOptions{}.gap_tolerance);
    std::vector<Complex> roots;
    for (const auto& z : eig)
        if (z.imag() > 0.0) roots.push_back(fp.rho * z);
    std::sort(roots.begin(), roots.end(),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });
    return roots;
}

CompanionSystem build_companion(const ModelProblem& problem, const FrequencyPoint& fp,
                                const CompanionOptions& options) {
    require(fp.m == problem.half_order(), "frequency point built for a different order");
    const int m = problem.half_order();
    const int two_m = 2 * m;

    CompanionSystem cs;
    cs.rho = fp.rho;
    cs.A0 = companion_matrix(problem, fp);

    Eigen::ComplexSchur<CMatrix> schur(cs.A0);
    require(schur.info() == Eigen::Success, "complex Schur decomposition failed");
    CMatrix U = schur.matrixU();
    CMatrix T = schur.matrixT();
    std::vector<Complex> eig(static_cast<std::size_t>(two_m));
    for (int i = 0; i < two_m; ++i) eig[static_cast<std::size_t>(i)] = T(i, i);
    check_spectrum(eig, m, options.gap_tolerance);
    reorder_schur(U, T, [](Complex z) { return z.imag() > 0.0; });

    cs.Q = U.leftCols(m);
    cs.T11 = T.topLeftCorner(m, m).triangularView<Eigen::Upper>();
    const CMatrix T22 = T.bottomRightCorner(m, m).triangularView<Eigen::Upper>();
    const CMatrix Z = triangular_sylvester(cs.T11, T22, T.topRightCorner(m, m));
    CMatrix block = CMatrix::Zero(two_m, two_m);
    block.topLeftCorner(m, m).setIdentity();
    block.topRightCorner(m, m) = Z;
    cs.Pminus = U * block * U.adjoint();

    for (int i = 0; i < m; ++i) cs.stable_roots.push_back(fp.rho * cs.T11(i, i));
    std::sort(cs.stable_roots.begin(), cs.stable_roots.end(),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });

    cs.boundary_matrix = CMatrix::Zero(m, two_m);
    for (int j = 0; j < m; ++j) {
        const auto e = problem.boundary_coefficients(j, fp.b);
        for (std::size_t k = 0; k < e.size(); ++k) cs.boundary_matrix(j, static_cast<Eigen::Index>(k)) = e[k];
        cs.column_scale.push_back(std::pow(fp.rho, -problem.boundary_order(j)));
    }

    const CMatrix BQ = cs.boundary_matrix * cs.Q;
    Eigen::JacobiSVD<CMatrix> svd(BQ);
    const auto& sv = svd.singularValues();
    Eigen::JacobiSVD<CMatrix> bsvd(cs.boundary_matrix);
    const double bnorm = std::max(bsvd.singularValues()(0), 1e-300);
    cs.min_singular_value = sv(sv.size() - 1) / bnorm;
    cs.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                           : std::numeric_limits<double>::infinity();
    if (options.ls_threshold > 0.0 && !(cs.min_singular_value > options.ls_threshold)) {
        std::ostringstream os;
        os << "Lopatinskii-Shapiro failure at xi' = (";
        for (std::size_t i = 0; i < fp.xi_prime.size(); ++i) os << (i ? ", " : "") << fp.xi_prime[i];
        os << "), lambda = " << fp.lambda.real() << (fp.lambda.imag() < 0 ? "-" : "+")
           << std::abs(fp.lambda.imag()) << "i: boundary map condition number " << cs.condition;
        fail(ErrorCode::Lopatinskii, os.str());
    }
    if (sv(sv.size() - 1) > 0.0) {
        cs.BQinv = BQ.partialPivLu().inverse();
        cs.M = cs.Q * cs.BQinv;
    }

    double scale = 1.0;
    for (const auto& z : cs.stable_roots) scale = std::max(scale, std::abs(z));
    bool simple = true;
    for (int a = 0; a < m && simple; ++a)
        for (int b = a + 1; b < m; ++b)
            if (std::abs(cs.stable_roots[static_cast<std::size_t>(a)] -
                         cs.stable_roots[static_cast<std::size_t>(b)]) <
                options.simple_root_tolerance * scale) {
                simple = false;
                break;
            }
    if (simple) {
        CMatrix L(m, m);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l)
                L(j, l) = problem.boundary_symbol(j, fp.xi_prime, cs.stable_roots[static_cast<std::size_t>(l)]);
        cs.boundary_map = L;
    }
    return cs;
}

CMatrix CompanionSystem::propagate(double x_n, int k) const {
    require(x_n >= 0.0, "propagate: x_n must be >= 0");
    require(k >= 0, "propagate: derivative order must be >= 0");
    require(BQinv.size() > 0, "propagate: boundary map is singular");
    CMatrix inner = triangular_expm((I * rho * x_n) * T11);
    if (k > 0) {
        const CMatrix rT = rho * T11;
        for (int i = 0; i < k; ++i) inner = rT * inner;
    }
    CMatrix out = Q * (inner * BQinv);
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) *= column_scale[static_cast<std::size_t>(j)];
    return out;
}

Eigen::RowVectorXcd CompanionSystem::kernel_row(double x_n, int k) const {
    require(x_n >= 0.0, "propagate: x_n must be >= 0");
    require(BQinv.size() > 0, "propagate: boundary map is singular");
    CMatrix inner = triangular_expm((I * rho * x_n) * T11);
    if (k > 0) {
        const CMatrix rT = rho * T11;
        for (int i = 0; i < k; ++i) inner = rT * inner;
    }
    Eigen::RowVectorXcd row = Q.row(0) * inner * BQinv;
    for (Eigen::Index j = 0; j < row.size(); ++j) row(j) *= column_scale[static_cast<std::size_t>(j)];
    return row;
}

Complex CompanionSystem::kernel(int j, double x_n, int k) const {
    require(j >= 0 && j < static_cast<int>(column_scale.size()), "kernel: boundary index out of range");
    return kernel_row(x_n, k)(j);
}

double CompanionSystem::decay_rate() const {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& z : stable_roots) g = std::min(g, z.imag());
    return g;
}

Complex root_basis_kernel(const ModelProblem& problem, const CompanionSystem& cs, int j,
                          double x_n, int k) {
    require(cs.boundary_map.has_value(), "root-basis route needs simple stable roots");
    require(j >= 0 && j < problem.half_order(), "root-basis: boundary index out of range");
    require(x_n >= 0.0, "root-basis: x_n must be >= 0");
    const int m = problem.half_order();
    CVector e = CVector::Zero(m);
    e(j) = 1.0;
    const CVector c = cs.boundary_map->partialPivLu().solve(e);
    Complex acc{0.0, 0.0};
    for (int l = 0; l < m; ++l) {
        const Complex tau = cs.stable_roots[static_cast<std::size_t>(l)];
        acc += c(l) * std::pow(tau, k) * std::exp(I * tau * x_n);
    }
    return acc;
}

} // namespace hp
