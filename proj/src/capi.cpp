#include "halfspace.h"

#include "hp/companion.hpp"
#include "hp/error.hpp"
#include "hp/harness.hpp"
#include "hp/parallel.hpp"
#include "hp/poisson.hpp"
#include "hp/problem_io.hpp"

#include <cmath>
#include <limits>
#include <new>
#include <string>

struct hp_problem {
    hp::ModelProblem problem;
};

struct hp_result {
    hp::ExperimentResult result;
    std::string csv;
    std::string summary;
};

namespace {

thread_local std::string last_error;

hp_status to_status(hp::ErrorCode code) {
    switch (code) {
    case hp::ErrorCode::InvalidArgument: return HP_ERR_INVALID_ARGUMENT;
    case hp::ErrorCode::Parse: return HP_ERR_PARSE;
    case hp::ErrorCode::Ellipticity: return HP_ERR_ELLIPTICITY;
    case hp::ErrorCode::Lopatinskii: return HP_ERR_LOPATINSKII;
    case hp::ErrorCode::Conditioning: return HP_ERR_CONDITIONING;
    case hp::ErrorCode::Numerical: return HP_ERR_NUMERICAL;
    case hp::ErrorCode::Io: return HP_ERR_IO;
    }
    return HP_ERR_INTERNAL;
}

template <class F>
hp_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return HP_OK;
    } catch (const hp::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const nlohmann::json::exception& e) {
        last_error = e.what();
        return HP_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HP_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return HP_ERR_INTERNAL;
    }
}

hp_status null_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    return HP_ERR_INVALID_ARGUMENT;
}

nlohmann::json plot_json(const hp::PlotSpec& p) {
    return {{"title", p.title}, {"x", p.x}, {"y", p.y}, {"log_x", p.log_x}, {"log_y", p.log_y}, {"group", p.group}};
}

} // namespace

extern "C" {

const char* hp_version(void) { return "1.0.0"; }

const char* hp_last_error(void) { return last_error.c_str(); }

void hp_set_threads(int n) { hp::set_thread_count(n); }

int hp_threads(void) { return hp::thread_count(); }

hp_status hp_problem_load(const char* path, hp_problem** out) {
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new hp_problem{hp::load_problem(path)}; });
}

hp_status hp_problem_parse(const char* json, hp_problem** out) {
    if (!json) return null_argument("json");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new hp_problem{hp::parse_problem(json)}; });
}

void hp_problem_free(hp_problem* problem) { delete problem; }

int hp_problem_dim(const hp_problem* problem) { return problem ? problem->problem.dim() : -1; }

int hp_problem_half_order(const hp_problem* problem) { return problem ? problem->problem.half_order() : -1; }

int hp_problem_boundary_order(const hp_problem* problem, int j) {
    if (!problem || j < 0 || j >= problem->problem.half_order()) return -1;
    return problem->problem.boundary_order(j);
}

int hp_problem_k_max(const hp_problem* problem) { return problem ? problem->problem.k_max() : -1; }

hp_status hp_symbol(const hp_problem* problem, const double* xi, size_t len, double* re, double* im) {
    if (!problem) return null_argument("problem");
    if (!xi && len > 0) return null_argument("xi");
    if (!re || !im) return null_argument("re/im");
    return guarded([&] {
        hp::require(static_cast<int>(len) == problem->problem.dim(), "xi must have dim entries");
        const auto v = problem->problem.symbol(std::span<const double>(xi, len));
        *re = v.real();
        *im = v.imag();
    });
}

hp_status hp_poisson_kernel(const hp_problem* problem, const double* xi_prime, size_t len, double lambda_re,
                            double lambda_im, int j, int k, double x_n, double* re, double* im) {
    if (!problem) return null_argument("problem");
    if (!xi_prime && len > 0) return null_argument("xi_prime");
    if (!re || !im) return null_argument("re/im");
    return guarded([&] {
        const auto& p = problem->problem;
        hp::require(static_cast<int>(len) == p.dim() - 1, "xi_prime must have dim - 1 entries");
        hp::require(j >= 0 && j < p.half_order(), "boundary index j out of range");
        hp::require(k >= 0, "derivative order k must be >= 0");
        hp::require(x_n >= 0.0, "x_n must be >= 0");
        const auto fp = hp::make_frequency_point(std::span<const double>(xi_prime, len), {lambda_re, lambda_im},
                                                 p.half_order());
        const auto v = hp::build_companion(p, fp).kernel(j, x_n, k);
        *re = v.real();
        *im = v.imag();
    });
}

hp_status hp_predicted_decay_exponent(int k, double p, double r, double t, double s, int m_j, int m, double* out) {
    if (!out) return null_argument("out");
    return guarded([&] {
        hp::require(m >= 1, "m must be >= 1");
        *out = hp::predicted_decay_exponent(hp::ExponentQuery::make(k, p, r, t, s, 0, m_j), m);
    });
}

size_t hp_experiment_count(void) { return hp::experiment_names().size(); }

const char* hp_experiment_name(size_t index) {
    const auto& names = hp::experiment_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

hp_status hp_run(const hp_problem* problem, const char* experiment, const char* config_json, const char* config_source,
                 hp_result** out) {
    if (!problem) return null_argument("problem");
    if (!experiment) return null_argument("experiment");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        const std::string source = config_source ? config_source : "<config>";
        nlohmann::json cfg = nlohmann::json::object();
        if (config_json && *config_json) {
            try {
                cfg = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::parse_error& e) {
                hp::fail(hp::ErrorCode::Parse, source + ": " + e.what());
            }
        }
        auto* r = new hp_result{hp::run_experiment(experiment, problem->problem, cfg, source), {}, {}};
        r->csv = r->result.table.to_csv();
        auto summary = r->result.summary;
        if (r->result.plot) summary["plot"] = plot_json(*r->result.plot);
        r->summary = summary.dump(2);
        *out = r;
    });
}

void hp_result_free(hp_result* result) { delete result; }

int hp_result_passed(const hp_result* result) { return result && result->result.pass ? 1 : 0; }

const char* hp_result_csv(const hp_result* result) { return result ? result->csv.c_str() : ""; }

const char* hp_result_summary(const hp_result* result) { return result ? result->summary.c_str() : ""; }

size_t hp_result_rows(const hp_result* result) { return result ? result->result.table.size() : 0; }

size_t hp_result_columns(const hp_result* result) { return result ? result->result.table.columns().size() : 0; }

const char* hp_result_column_name(const hp_result* result, size_t column) {
    if (!result || column >= result->result.table.columns().size()) return nullptr;
    return result->result.table.columns()[column].c_str();
}

hp_status hp_result_value(const hp_result* result, size_t row, size_t column, double* out) {
    if (!result) return null_argument("result");
    if (!out) return null_argument("out");
    const auto& t = result->result.table;
    if (row >= t.size() || column >= t.columns().size()) {
        last_error = "cell index out of range";
        return HP_ERR_INVALID_ARGUMENT;
    }
    const auto& cell = t.rows()[row][column];
    if (const auto* d = std::get_if<double>(&cell)) *out = *d;
    else if (const auto* n = std::get_if<long long>(&cell)) *out = static_cast<double>(*n);
    else *out = std::numeric_limits<double>::quiet_NaN();
    last_error.clear();
    return HP_OK;
}

} // extern "C"
