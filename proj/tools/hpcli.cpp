// Command-line front end over the halfspace C API.

#include "halfspace.h"
#include "svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_input = 1;
constexpr int exit_tolerance = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemDeleter {
    void operator()(hp_problem* p) const { hp_problem_free(p); }
};
struct ResultDeleter {
    void operator()(hp_result* r) const { hp_result_free(r); }
};

// Shortcut flags per subcommand; each maps to the config key of the same name.
const std::map<std::string, std::vector<std::string>> shortcuts{
    {"decay-sweep", {"k", "p", "r", "t", "s", "j"}},
    {"singularity-sweep", {"t", "s", "j"}},
    {"hardy-norm", {"p"}},
    {"poisson-eval", {"j", "k"}},
    {"rbound-sim", {"p", "r", "sigma", "trials"}},
    {"ibvp-solve", {"T", "sigma"}},
    {"parabolic-solve", {"sigma", "j"}},
};

const std::map<std::string, std::string> descriptions{
    {"check-ls", "parameter-ellipticity and Lopatinskii-Shapiro check on a sector sample"},
    {"poisson-eval", "evaluate Poisson kernels; boundary reproduction and ODE residual"},
    {"decay-sweep", "fitted decay exponent of the Poisson operator norm in |lambda|"},
    {"singularity-sweep", "boundary singularity exponent for broadband data"},
    {"hardy-norm", "weighted Hilbert-type operator norm under grid refinement"},
    {"norm-check", "parameter-dependent norm equivalence and mixed lifting"},
    {"resolvent-test", "half-space resolvent residuals, convergence order and sectoriality"},
    {"semigroup-test", "contour semigroup against closed forms and the semigroup law"},
    {"parabolic-solve", "time-periodic boundary problem on a single space-time mode"},
    {"ibvp-solve", "initial-boundary value problem by splitting"},
    {"rbound-sim", "Rademacher ratio growth for the scaled Dirichlet Poisson family"},
};

const std::vector<std::string> seeded{"norm-check", "rbound-sim"};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> column(const hp_result* r, std::size_t c) {
    std::vector<double> v(hp_result_rows(r));
    for (std::size_t i = 0; i < v.size(); ++i) hp_result_value(r, i, c, &v[i]);
    return v;
}

std::optional<std::size_t> column_index(const hp_result* r, const std::string& name) {
    for (std::size_t c = 0; c < hp_result_columns(r); ++c)
        if (name == hp_result_column_name(r, c)) return c;
    return std::nullopt;
}

std::string group_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string make_plot(const hp_result* r, const json& spec) {
    hpcli::Figure fig;
    fig.title = spec.value("title", "");
    fig.x_label = spec.at("x").get<std::string>();
    fig.log_x = spec.value("log_x", false);
    fig.log_y = spec.value("log_y", false);
    const auto xi = column_index(r, fig.x_label);
    if (!xi) throw std::runtime_error("plot column '" + fig.x_label + "' missing");
    const auto x = column(r, *xi);
    const std::string group = spec.value("group", "");
    const auto gi = group.empty() ? std::nullopt : column_index(r, group);
    const auto g = gi ? column(r, *gi) : std::vector<double>(x.size(), 0.0);
    std::vector<std::string> ys = spec.at("y").get<std::vector<std::string>>();
    fig.y_label = ys.size() == 1 ? ys[0] : "value";
    for (const auto& yname : ys) {
        const auto yi = column_index(r, yname);
        if (!yi) throw std::runtime_error("plot column '" + yname + "' missing");
        const auto y = column(r, *yi);
        std::vector<double> keys;
        for (double v : g)
            if (std::find(keys.begin(), keys.end(), v) == keys.end()) keys.push_back(v);
        for (double key : keys) {
            hpcli::Series s;
            s.label = ys.size() > 1 ? yname : "";
            if (gi) s.label += (s.label.empty() ? "" : " ") + group + "=" + group_label(key);
            if (s.label.empty()) s.label = yname;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (g[i] == key) {
                    s.x.push_back(x[i]);
                    s.y.push_back(y[i]);
                }
            fig.series.push_back(std::move(s));
        }
    }
    return hpcli::render_svg(fig);
}

struct Common {
    std::string problem;
    std::string config;
    std::string out = ".";
    bool plot = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> sets;
    std::map<std::string, double> values;
};

int run(const std::string& name, const Common& opt, const std::vector<std::string>& argv) {
    const auto start = std::chrono::steady_clock::now();
    if (opt.threads) hp_set_threads(*opt.threads);

    json cfg = opt.config.empty() ? json::object() : read_json_file(opt.config);
    if (!cfg.is_object()) throw InputError(opt.config + ": configuration must be a JSON object");
    for (const auto& s : opt.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got '" + s + "'");
        cfg[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
    }
    for (const auto& [key, v] : opt.values) {
        const bool integral = key == "k" || key == "j" || key == "trials";
        cfg[key] = integral ? json(static_cast<long long>(std::llround(v))) : json(v);
    }
    const bool uses_seed = std::find(seeded.begin(), seeded.end(), name) != seeded.end();
    if (opt.seed && uses_seed) cfg["seed"] = *opt.seed;

    hp_problem* raw = nullptr;
    if (hp_problem_load(opt.problem.c_str(), &raw) != HP_OK) throw InputError(hp_last_error());
    std::unique_ptr<hp_problem, ProblemDeleter> problem(raw);

    const std::string source = opt.config.empty() ? std::string("<command line>") : opt.config;
    hp_result* rraw = nullptr;
    const hp_status st = hp_run(problem.get(), name.c_str(), cfg.dump().c_str(), source.c_str(), &rraw);
    if (st != HP_OK) throw InputError(hp_last_error());
    std::unique_ptr<hp_result, ResultDeleter> result(rraw);

    const fs::path dir(opt.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + opt.out + "': " + ec.message());
    write_file(dir / (name + ".csv"), hp_result_csv(result.get()));
    const json summary = json::parse(hp_result_summary(result.get()));
    write_file(dir / (name + ".json"), summary.dump(2) + "\n");

    bool plotted = false;
    if (opt.plot && summary.contains("plot")) {
        try {
            write_file(dir / (name + ".svg"), make_plot(result.get(), summary["plot"]));
            plotted = true;
        } catch (const std::exception& e) {
            std::cerr << "warning: plot not written: " << e.what() << "\n";
        }
    }

    const bool pass = hp_result_passed(result.get()) != 0;
    for (const auto& c : summary["checks"]) {
        std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
                  << (c["value"].is_null() ? std::string("nan") : c["value"].dump()) << " " << c["op"].get<std::string>()
                  << " " << c["tolerance"].dump() << "\n";
    }
    if (summary.contains("violating_direction"))
        std::cout << "violating direction: " << summary["violating_direction"].dump() << "\n";
    std::cout << name << ": " << (pass ? "pass" : "tolerance failure") << " (" << (dir / (name + ".csv")).string() << ")\n";

    json meta = {{"experiment", name},
                 {"library_version", hp_version()},
                 {"timestamp_utc", utc_now()},
                 {"problem", opt.problem},
                 {"config_file", opt.config},
                 {"seed", opt.seed ? json(*opt.seed) : json(nullptr)},
                 {"threads", hp_threads()},
                 {"plot_written", plotted},
                 {"pass", pass},
                 {"runtime_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                 {"argv", argv}};
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
    return pass ? exit_pass : exit_tolerance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-space parameter-elliptic boundary problems: experiments and checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hp_version()));

    Common opt;
    opt.problem = std::string(HP_PROBLEM_DIR) + "/dirichlet_laplacian.json";
    std::map<std::string, std::map<std::string, double>> shortcut_values;
    std::string chosen;
    for (const auto& name : {"check-ls", "poisson-eval", "decay-sweep", "singularity-sweep", "hardy-norm", "norm-check",
                             "resolvent-test", "semigroup-test", "parabolic-solve", "ibvp-solve", "rbound-sim"}) {
        auto* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--problem", opt.problem, "problem JSON file")->capture_default_str();
        sub->add_option("--config", opt.config, "JSON object with experiment parameters");
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_flag("--plot", opt.plot, "also write an SVG plot");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--threads", opt.threads, "worker threads (default: HP_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--set", opt.sets, "override one parameter, key=value (value parsed as JSON)");
        if (const auto it = shortcuts.find(name); it != shortcuts.end())
            for (const auto& key : it->second)
                sub->add_option_function<double>("--" + key, [&shortcut_values, name, key](double v) {
                    shortcut_values[name][key] = v;
                }, "parameter " + key);
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : exit_input;
    }

    opt.values = shortcut_values[chosen];
    const std::vector<std::string> args(argv, argv + argc);
    try {
        return run(chosen, opt, args);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
}
