#pragma once

#include "hp/model.hpp"
#include "hp/spaces.hpp"
#include "hp/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hp {

using Operator = std::function<CMatrix(const CMatrix&)>;
using NormFn = std::function<double(const CMatrix&)>;

/// Operators T_1..T_N with inputs x_1..x_N for the Rademacher averages
/// E||sum eps_l T_l x_l|| and E||sum eps_l x_l||.
struct RademacherTrial {
    std::vector<Operator> operators;
    std::vector<CMatrix> inputs;
    std::vector<Complex> lambdas; // optional labels
    std::uint64_t seed = 1;
    int trials = 512;
    /// Multiplies every sign draw by -1; the estimate must not change.
    bool flip_signs = false;

    void validate() const;
};

struct RademacherEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0; // absolute standard error (delta method)
    double relative_stderr() const { return estimate > 0.0 ? stderr_ / estimate : 0.0; }
};

/// (E||sum eps_l T_l x_l||^2)^{1/2} / (E||sum eps_l x_l||^2)^{1/2} by Monte Carlo.
/// Trial i draws its signs from a generator seeded with (seed, i), so results
/// do not depend on the thread count.
RademacherEstimate rademacher_ratio(const RademacherTrial& trial, const NormFn& norm_out, const NormFn& norm_in);

struct GrowthRow {
    double p = 0.0;
    double r = 0.0;
    int N = 0;
    double ratio = 0.0;
    double stderr_ = 0.0;
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    /// ratio(N_max) / ratio(N_min)
    double growth = 0.0;
    /// log-log slope of ratio against N
    double exponent = 0.0;

    /// Columns: p, r, N, ratio, stderr.
    std::string to_csv() const;
};

struct NonRboundOptions {
    double sigma = 1.0;
    double s = 0.0;           // tangential smoothness of the H^s_2 target
    int trials = 512;
    std::uint64_t seed = 1;
    double x_min = 1e-21;
    double x_max = 10.0;
    double ratio = 1.1;
};

/// Family |lambda_l|^{(1+r+p m_0)/(2mp)} Poi_0(lambda_l), lambda_l = (sigma 2^l)^2,
/// acting on distinct tangential modes g_l with |xi'| < 1, measured in
/// L_p(R_+, x^r; H^s_2) against H^s_2. For the Dirichlet Laplacian the exponent
/// is (1+r)/(2p).
GrowthTable dirichlet_nonrbound_experiment(const ModelProblem& problem, double p, double r,
                                           const std::vector<int>& N_list, const NonRboundOptions& options = {});

} // namespace hp
