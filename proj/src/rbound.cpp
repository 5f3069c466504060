#include "hp/rbound.hpp"

#include "hp/error.hpp"
#include "hp/parallel.hpp"
#include "hp/poisson.hpp"
#include "hp/table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace hp {

namespace {

// Rows of m with a nonzero entry; sums over signed families only touch these.
std::vector<Eigen::Index> support_rows(const CMatrix& m) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
    return rows;
}

struct SparseFamily {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<const CMatrix*> members;
    std::vector<std::vector<Eigen::Index>> support;

    explicit SparseFamily(const std::vector<CMatrix>& ms) {
        rows = ms.front().rows();
        cols = ms.front().cols();
        for (const auto& m : ms) {
            require(m.rows() == rows && m.cols() == cols, "rademacher family members differ in shape");
            members.push_back(&m);
            support.push_back(support_rows(m));
        }
    }

    // Writes into `out`, reusing its storage across trials.
    void signed_sum(const std::vector<int>& eps, CMatrix& out) const {
        out.setZero(rows, cols);
        for (std::size_t l = 0; l < members.size(); ++l)
            for (const auto i : support[l]) out.row(i) += static_cast<double>(eps[l]) * members[l]->row(i);
    }
};

std::vector<int> draw_signs(std::uint64_t seed, std::size_t trial, std::size_t n, bool flip) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 gen(seq);
    std::vector<int> eps(n);
    std::uint64_t bits = 0;
    for (std::size_t l = 0; l < n; ++l) {
        if (l % 64 == 0) bits = gen();
        eps[l] = (bits >> (l % 64)) & 1u ? 1 : -1;
        if (flip) eps[l] = -eps[l];
    }
    return eps;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double covariance(const std::vector<double>& a, const std::vector<double>& b, double ma, double mb) {
    if (a.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

} // namespace

void RademacherTrial::validate() const {
    require(!operators.empty(), "rademacher trial needs at least one operator");
    require(operators.size() == inputs.size(), "rademacher trial: operators and inputs differ in count");
    require(lambdas.empty() || lambdas.size() == operators.size(), "rademacher trial: lambda labels differ in count");
    require(trials >= 1, "rademacher trial: trials must be >= 1");
}

RademacherEstimate rademacher_ratio(const RademacherTrial& trial, const NormFn& norm_out, const NormFn& norm_in) {
    trial.validate();
    const bool any_input = std::any_of(trial.inputs.begin(), trial.inputs.end(),
                                       [](const CMatrix& x) { return x.size() > 0 && x.cwiseAbs().maxCoeff() > 0.0; });
    if (!any_input) fail(ErrorCode::InvalidArgument, "rademacher ratio: zero denominator (all inputs vanish)");

    std::vector<CMatrix> outputs(trial.inputs.size());
    parallel_for(outputs.size(), [&](std::size_t l) { outputs[l] = trial.operators[l](trial.inputs[l]); });
    const SparseFamily out_family(outputs);
    const SparseFamily in_family(trial.inputs);

    const auto n = static_cast<std::size_t>(trial.trials);
    std::vector<double> a(n), b(n);
    parallel_for(n, [&](std::size_t i) {
        const auto eps = draw_signs(trial.seed, i, outputs.size(), trial.flip_signs);
        thread_local CMatrix out_sum, in_sum;
        out_family.signed_sum(eps, out_sum);
        in_family.signed_sum(eps, in_sum);
        const double no = norm_out(out_sum);
        const double ni = norm_in(in_sum);
        a[i] = no * no;
        b[i] = ni * ni;
    });

    const double ma = mean(a), mb = mean(b);
    if (!(mb > 0.0)) fail(ErrorCode::Numerical, "rademacher ratio: zero denominator in every trial");
    RademacherEstimate est;
    est.estimate = std::sqrt(ma / mb);
    // delta method on log sqrt(ma / mb)
    const double va = covariance(a, a, ma, ma), vb = covariance(b, b, mb, mb), cab = covariance(a, b, ma, mb);
    double rel_var = 0.0;
    if (ma > 0.0) rel_var = (va / (ma * ma) + vb / (mb * mb) - 2.0 * cab / (ma * mb)) / (4.0 * static_cast<double>(n));
    est.stderr_ = est.estimate * std::sqrt(std::max(0.0, rel_var));
    return est;
}

std::string GrowthTable::to_csv() const {
    Table t({"p", "r", "N", "ratio", "stderr"});
    for (const auto& row : rows) t.add_row({row.p, row.r, static_cast<long long>(row.N), row.ratio, row.stderr_});
    return t.to_csv();
}

GrowthTable dirichlet_nonrbound_experiment(const ModelProblem& problem, double p, double r,
                                           const std::vector<int>& N_list, const NonRboundOptions& options) {
    require(problem.dim() == 2, "non-R-boundedness experiment runs on a 2-D half-plane problem");
    require(p >= 1.0 && p <= 2.0, "non-R-boundedness experiment needs p in [1, 2]");
    require(r > -1.0, "non-R-boundedness experiment needs r > -1");
    require(options.sigma > 0.0, "non-R-boundedness experiment needs sigma > 0");
    require(!N_list.empty(), "non-R-boundedness experiment needs at least one N");
    for (int N : N_list) require(N >= 1 && N <= 128, "family size N must lie in [1, 128]");

    const int n_max = *std::max_element(N_list.begin(), N_list.end());
    // modes k = 0..n_max-1 with xi' = k / n_max inside the unit ball
    const int modes = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * n_max)));
    const auto tg = TangentialGrid::make(1, modes, 2.0 * pi * n_max);
    const double kappa_max = options.sigma * std::ldexp(1.0, n_max);
    const double x_min = std::min(options.x_min, 0.02 / kappa_max);
    const auto ng = NormalGrid::graded(x_min, options.ratio, options.x_max);
    const auto target = SpaceSpec::make(Scale::H, options.s, 2.0);

    const NormFn norm_out = [&](const CMatrix& u) {
        return weighted_halfline_norm(tangential_norms(u, target, tg), p, r, ng);
    };
    const NormFn norm_in = [&](const CMatrix& g) { return space_norm(g.col(0), target, tg); };

    // undo the predicted decay |lambda|^{-(1 + r + p m_j) / (2 m p)} of the Poisson operator
    const double m = problem.half_order();
    const double exponent = (1.0 + r) / (2.0 * m * p) + problem.boundary_order(0) / (2.0 * m);

    GrowthTable table;
    for (int N : N_list) {
        RademacherTrial trial;
        trial.seed = options.seed;
        trial.trials = options.trials;
        for (int l = 1; l <= N; ++l) {
            const double kappa = options.sigma * std::ldexp(1.0, l);
            const Complex lambda = kappa * kappa;
            const double scale = std::pow(std::abs(lambda), exponent);
            CMatrix g = CMatrix::Zero(static_cast<Eigen::Index>(tg.size()), 1);
            g(static_cast<Eigen::Index>(tg.index_of({l - 1})), 0) = 1.0;
            trial.inputs.push_back(std::move(g));
            trial.lambdas.push_back(lambda);
            trial.operators.push_back([&problem, &tg, &ng, lambda, scale](const CMatrix& x) -> CMatrix {
                return scale * poisson_apply(problem, lambda, 0, x.col(0), tg, ng).values;
            });
        }
        const auto est = rademacher_ratio(trial, norm_out, norm_in);
        table.rows.push_back({p, r, N, est.estimate, est.stderr_});
    }

    const auto by_n = [](const GrowthRow& a, const GrowthRow& b) { return a.N < b.N; };
    const auto first = std::min_element(table.rows.begin(), table.rows.end(), by_n);
    const auto last = std::max_element(table.rows.begin(), table.rows.end(), by_n);
    table.growth = last->ratio / first->ratio;
    if (table.rows.size() >= 2) {
        std::vector<double> ns, ratios;
        for (const auto& row : table.rows) {
            ns.push_back(row.N);
            ratios.push_back(row.ratio);
        }
        table.exponent = middle_slope(ns, ratios, 1.0);
    }
    return table;
}

} // namespace hp
