#pragma once

#include "hp/model.hpp"
#include "hp/table.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace hp {

/// Which table columns to draw; y columns share the x column.
struct PlotSpec {
    std::string title;
    std::string x;
    std::vector<std::string> y;
    bool log_x = true;
    bool log_y = true;
    /// Optional column whose distinct values split the rows into series.
    std::string group;
};

/// One experiment run: the data table, a JSON summary holding the
/// effective configuration and every tolerance check, and the verdict.
struct ExperimentResult {
    std::string name;
    Table table;
    nlohmann::json summary;
    bool pass = false;
    std::optional<PlotSpec> plot;
};

/// check-ls, poisson-eval, decay-sweep, singularity-sweep, hardy-norm,
/// norm-check, resolvent-test, semigroup-test, parabolic-solve, ibvp-solve,
/// rbound-sim.
const std::vector<std::string>& experiment_names();

/// Runs one experiment. Unknown names and malformed configuration raise
/// Error(InvalidArgument | Parse) naming `config_source` and the field.
ExperimentResult run_experiment(const std::string& name, const ModelProblem& problem, const nlohmann::json& config,
                                const std::string& config_source = "<config>");

} // namespace hp
