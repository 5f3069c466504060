#include "hp/harness.hpp"

#include "hp/companion.hpp"
#include "hp/error.hpp"
#include "hp/parabolic.hpp"
#include "hp/poisson.hpp"
#include "hp/rbound.hpp"
#include "hp/resolvent.hpp"
#include "hp/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace hp {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Typed access to one experiment's configuration block. Every value read is
// echoed into `effective`; keys never read are rejected by finish().
class Config {
public:
    Config(const json& j, std::string source) : j_(j), source_(std::move(source)) {
        if (j_.is_null()) j_ = json::object();
        if (!j_.is_object()) fail(ErrorCode::Parse, source_ + ": configuration must be a JSON object");
    }

    double num(const std::string& key, double def) {
        const double v = has(key) ? as_number(j_[key], key) : def;
        effective[key] = v;
        return v;
    }

    int integer(const std::string& key, int def) {
        int v = def;
        if (has(key)) {
            const auto& e = j_[key];
            if (!e.is_number_integer()) bad(key, "an integer");
            v = e.get<int>();
        }
        effective[key] = v;
        return v;
    }

    std::uint64_t seed(const std::string& key, std::uint64_t def) {
        std::uint64_t v = def;
        if (has(key)) {
            const auto& e = j_[key];
            if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) bad(key, "a non-negative integer");
            v = e.get<std::uint64_t>();
        }
        effective[key] = v;
        return v;
    }

    bool flag(const std::string& key, bool def) {
        bool v = def;
        if (has(key)) {
            if (!j_[key].is_boolean()) bad(key, "true or false");
            v = j_[key].get<bool>();
        }
        effective[key] = v;
        return v;
    }

    std::string str(const std::string& key, const std::string& def) {
        std::string v = def;
        if (has(key)) {
            if (!j_[key].is_string()) bad(key, "a string");
            v = j_[key].get<std::string>();
        }
        effective[key] = v;
        return v;
    }

    std::vector<double> nums(const std::string& key, const std::vector<double>& def) {
        std::vector<double> v = def;
        if (has(key)) {
            const auto& e = j_[key];
            if (!e.is_array()) bad(key, "an array of numbers");
            v.clear();
            for (std::size_t i = 0; i < e.size(); ++i) v.push_back(as_number(e[i], key + "[" + std::to_string(i) + "]"));
        }
        effective[key] = v;
        return v;
    }

    std::vector<int> ints(const std::string& key, const std::vector<int>& def) {
        std::vector<int> v = def;
        if (has(key)) {
            const auto& e = j_[key];
            if (!e.is_array()) bad(key, "an array of integers");
            v.clear();
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i].is_number_integer()) bad(key + "[" + std::to_string(i) + "]", "an integer");
                v.push_back(e[i].get<int>());
            }
        }
        effective[key] = v;
        return v;
    }

    /// [re, im] or a real number.
    Complex complex(const std::string& key, Complex def) {
        Complex v = def;
        if (has(key)) {
            const auto& e = j_[key];
            if (e.is_number()) v = e.get<double>();
            else if (e.is_array() && e.size() == 2) v = {as_number(e[0], key + "[0]"), as_number(e[1], key + "[1]")};
            else bad(key, "a number or [re, im]");
        }
        effective[key] = {v.real(), v.imag()};
        return v;
    }

    /// List of tangential frequency vectors of length `axes`; plain numbers
    /// are accepted when axes = 1.
    std::vector<std::vector<double>> points(const std::string& key, int axes, const std::vector<double>& def) {
        std::vector<std::vector<double>> out;
        if (!has(key)) {
            for (double d : def) {
                std::vector<double> xi(static_cast<std::size_t>(std::max(axes, 0)), 0.0);
                if (axes > 0) xi[0] = d;
                out.push_back(std::move(xi));
            }
        } else {
            const auto& e = j_[key];
            if (!e.is_array()) bad(key, "an array");
            for (std::size_t i = 0; i < e.size(); ++i) {
                const std::string field = key + "[" + std::to_string(i) + "]";
                std::vector<double> xi;
                if (e[i].is_number() && axes == 1) xi = {e[i].get<double>()};
                else if (e[i].is_array() && static_cast<int>(e[i].size()) == axes)
                    for (std::size_t a = 0; a < e[i].size(); ++a) xi.push_back(as_number(e[i][a], field));
                else bad(field, "a tangential frequency with " + std::to_string(axes) + " components");
                out.push_back(std::move(xi));
            }
        }
        effective[key] = out;
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!effective.contains(key)) fail(ErrorCode::Parse, source_ + ": unknown field '" + key + "'");
    }

    json effective = json::object();

private:
    bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

    [[noreturn]] void bad(const std::string& field, const std::string& expected) const {
        fail(ErrorCode::Parse, source_ + ": field '" + field + "': expected " + expected);
    }

    double as_number(const json& e, const std::string& field) const {
        if (!e.is_number()) bad(field, "a number");
        return e.get<double>();
    }

    json j_;
    std::string source_;
};

class Checks {
public:
    void at_most(const std::string& name, double value, double tol) { add(name, value, "<=", tol, value <= tol); }
    void at_least(const std::string& name, double value, double tol) { add(name, value, ">=", tol, value >= tol); }
    void holds(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, "==", 1.0, ok); }

    bool pass() const { return pass_; }
    const json& list() const { return list_; }

private:
    void add(const std::string& name, double value, const std::string& op, double tol, bool ok) {
        ok = ok && std::isfinite(value);
        pass_ = pass_ && ok;
        list_.push_back({{"name", name}, {"value", std::isfinite(value) ? json(value) : json(nullptr)},
                         {"op", op}, {"tolerance", tol}, {"pass", ok}});
    }

    json list_ = json::array();
    bool pass_ = true;
};

ExperimentResult finish(const std::string& name, Table table, const Config& cfg, const Checks& checks,
                        json extra = json::object(), std::optional<PlotSpec> plot = std::nullopt) {
    ExperimentResult res;
    res.name = name;
    res.table = std::move(table);
    res.pass = checks.pass();
    res.summary = {{"experiment", name}, {"config", cfg.effective}, {"checks", checks.list()}, {"pass", res.pass}};
    for (auto& [k, v] : extra.items()) res.summary[k] = v;
    res.plot = std::move(plot);
    return res;
}

PlotSpec make_plot(std::string title, std::string x, std::vector<std::string> y, bool log_x, bool log_y) {
    PlotSpec p;
    p.title = std::move(title);
    p.x = std::move(x);
    p.y = std::move(y);
    p.log_x = log_x;
    p.log_y = log_y;
    return p;
}

std::vector<double> logspace(double lo, double hi, int points) {
    std::vector<double> v;
    for (int i = 0; i < points; ++i)
        v.push_back(points == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
    return v;
}

std::string format_vector(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + ")";
}

// Mode vector (mode, 0, ..., 0) on a tangential grid with `axes` axes.
std::vector<int> mode_vector(int axes, int mode) {
    std::vector<int> v(static_cast<std::size_t>(axes), 0);
    if (axes > 0) v[0] = mode;
    return v;
}

enum class Laplacian { None, Dirichlet, Neumann };

// Recognizes the scalar Laplacian with a pure trace or pure normal-derivative
// condition, the two cases with a method-of-images solution.
Laplacian classify(const ModelProblem& pb) {
    if (pb.half_order() != 1 || pb.boundary().size() != 1) return Laplacian::None;
    const int n = pb.dim();
    if (static_cast<int>(pb.interior().size()) != n) return Laplacian::None;
    for (int a = 0; a < n; ++a) {
        MultiIndex alpha(static_cast<std::size_t>(n), 0);
        alpha[static_cast<std::size_t>(a)] = 2;
        const auto it = pb.interior().find(alpha);
        if (it == pb.interior().end() || std::abs(it->second + 1.0) > 1e-14) return Laplacian::None;
    }
    const auto& b = pb.boundary().front();
    if (b.coeffs.size() != 1) return Laplacian::None;
    MultiIndex normal(static_cast<std::size_t>(n), 0);
    if (b.order == 0) return Laplacian::Dirichlet;
    normal.back() = 1;
    if (b.order == 1 && b.coeffs.begin()->first == normal) return Laplacian::Neumann;
    return Laplacian::None;
}

GridFunction mode_profile(const TangentialGrid& tg, const HalfLine& line, Eigen::Index row,
                          const std::function<Complex(double)>& f) {
    GridFunction g{CMatrix::Zero(static_cast<Eigen::Index>(tg.size()), line.count), Layout::Frequency};
    for (int i = 0; i < line.count; ++i) g.values(row, i) = f(line.x(i));
    return g;
}

// ---------------------------------------------------------------------------

ExperimentResult run_check_ls(const ModelProblem& pb, Config& c) {
    const int rays = c.integer("rays", 7);
    const int moduli = c.integer("moduli", 9);
    const double floor = c.num("sigma_floor", 1.0);
    const double decades = c.num("decades", 4.0);
    const int dirs = c.integer("directions", 64);
    const int tpoints = c.integer("tangential_points", 64);
    const double threshold = c.num("threshold", 1e-8);
    c.finish();

    Checks checks;
    Table t({"check", "pass", "value", "detail"});
    json extra;
    const auto ell = check_ellipticity(pb, default_directions(pb.dim(), dirs));
    checks.holds("ellipticity", ell.pass);
    extra["worst_margin"] = ell.worst_margin;
    if (ell.violating_direction) {
        extra["violating_direction"] = *ell.violating_direction;
        t.add_row({std::string("ellipticity"), 0LL, ell.worst_margin, "violating direction " + format_vector(*ell.violating_direction)});
    } else {
        t.add_row({std::string("ellipticity"), 1LL, ell.worst_margin, "worst direction " + format_vector(ell.worst_direction)});
    }

    if (ell.pass) {
        auto sample = SectorSample::make(pb.phi(), rays, moduli, floor, decades);
        const auto ls = check_lopatinskii_shapiro(pb, sample, default_tangential_points(pb.dim(), tpoints), threshold);
        checks.holds("lopatinskii_shapiro", ls.pass);
        extra["min_singular_value"] = ls.min_singular_value;
        extra["points_checked"] = ls.points_checked;
        std::string detail = "worst xi' " + format_vector(ls.worst_xi_prime) + " lambda " + format_double(ls.worst_lambda.real()) +
                             (ls.worst_lambda.imag() < 0 ? "" : "+") + format_double(ls.worst_lambda.imag()) + "i";
        if (!ls.failure.empty()) detail += "; " + ls.failure;
        t.add_row({std::string("lopatinskii_shapiro"), static_cast<long long>(ls.pass), ls.min_singular_value, detail});
    } else {
        t.add_row({std::string("lopatinskii_shapiro"), 0LL, nan, std::string("skipped: ellipticity fails")});
    }
    return finish("check-ls", std::move(t), c, checks, extra);
}

ExperimentResult run_poisson_eval(const ModelProblem& pb, Config& c) {
    const Complex lambda = c.complex("lambda", 1.0);
    const int j = c.integer("j", 0);
    const int k = c.integer("k", 0);
    const auto xis = c.points("xi_prime", pb.dim() - 1, {0.0, 1.0, 5.0});
    const double x_min = c.num("x_min", 1e-4);
    const double ratio = c.num("ratio", 1.2);
    const double x_max = c.num("x_max", 10.0);
    const double tol = c.num("tolerance", 1e-8);
    c.finish();
    const int m = pb.half_order();
    require(j >= 0 && j < m, "poisson-eval: j out of range");
    require(k >= 0, "poisson-eval: k must be >= 0");
    const auto grid = NormalGrid::graded(x_min, ratio, x_max, true);

    Table t({"xi_prime", "x_n", "re", "im", "abs"});
    double boundary = 0.0, interior = 0.0;
    for (const auto& xi : xis) {
        const auto cs = build_companion(pb, make_frequency_point(xi, lambda, m));
        for (double x : grid.nodes) {
            const Complex v = cs.kernel(j, x, k);
            t.add_row({xi.empty() ? 0.0 : xi[0], x, v.real(), v.imag(), std::abs(v)});
        }
        for (int kk = 0; kk < m; ++kk) {
            const auto e = pb.boundary_coefficients(kk, xi);
            for (int jj = 0; jj < m; ++jj) {
                Complex acc = 0.0;
                for (std::size_t l = 0; l < e.size(); ++l) acc += e[l] * cs.kernel(jj, 0.0, static_cast<int>(l));
                boundary = std::max(boundary, std::abs(acc - (kk == jj ? 1.0 : 0.0)));
            }
        }
        const auto a = pb.normal_coefficients(xi);
        for (double x : grid.nodes) {
            Complex res = lambda * cs.kernel(j, x, 0);
            double scale = std::abs(res);
            for (std::size_t l = 0; l < a.size(); ++l) {
                const Complex term = a[l] * cs.kernel(j, x, static_cast<int>(l));
                res -= term;
                scale += std::abs(term);
            }
            if (scale > 0.0) interior = std::max(interior, std::abs(res) / scale);
        }
    }
    Checks checks;
    checks.at_most("boundary reproduction", boundary, tol);
    checks.at_most("interior residual", interior, tol);
    auto plot = make_plot("Poisson kernel profile", "x_n", {"abs"}, true, true);
    plot.group = "xi_prime";
    return finish("poisson-eval", std::move(t), c, checks, {{"boundary_defect", boundary}, {"interior_residual", interior}}, plot);
}

ExperimentResult run_decay_sweep(const ModelProblem& pb, Config& c) {
    const int k = c.integer("k", 0);
    const double p = c.num("p", 2.0);
    const double r = c.num("r", 0.0);
    const double tt = c.num("t", 0.0);
    const double s = c.num("s", 0.0);
    const int j = c.integer("j", 0);
    const double phi = pb.phi();
    SectorSample sample;
    sample.rays = c.nums("rays", {-0.86 * phi, 0.0, 0.52 * phi});
    const double lo = c.num("modulus_lo", 1e2);
    const double hi = c.num("modulus_hi", 1e6);
    sample.moduli = logspace(lo, hi, c.integer("moduli", 17));
    sample.sigma_floor = lo;
    DecaySweepOptions o;
    const auto mode = c.str("mode", "mode_sup");
    o.tangential_scale = parse_scale(c.str("scale", "H"));
    o.micro_q = c.num("q", 2.0);
    o.modes_per_decade = c.integer("modes_per_decade", 10);
    o.fit_fraction = c.num("fit_fraction", 0.8);
    o.x_min = c.num("x_min", 1e-6);
    o.ratio = c.num("ratio", 1.1);
    const int data_mode = c.integer("data_mode", 1);
    const int data_modes = c.integer("tangential_modes", 8);
    const double tol = c.num("tolerance", 0.05);
    c.finish();
    require(j >= 0 && j < pb.half_order(), "decay-sweep: j out of range");
    sample.validate(phi);
    if (mode == "fixed") {
        o.mode = SweepMode::FixedData;
        o.grid = TangentialGrid::make(pb.dim() - 1, data_modes, 2.0 * pi);
        o.g_hat = CVector::Zero(static_cast<Eigen::Index>(o.grid.size()));
        o.g_hat(static_cast<Eigen::Index>(o.grid.index_of(mode_vector(pb.dim() - 1, data_mode)))) = 1.0;
    } else {
        require(mode == "mode_sup", "decay-sweep: mode must be 'mode_sup' or 'fixed'");
    }
    const auto q = ExponentQuery::make(k, p, r, tt, s, j, pb.boundary_order(j));
    const auto res = decay_sweep(pb, q, sample, o);

    Table t({"ray_arg", "lambda_mod", "norm", "predicted", "fitted_slope"});
    json fits = json::array();
    for (const auto& f : res.fits) fits.push_back({{"ray_arg", f.ray_arg}, {"slope", f.slope}, {"points", f.used}});
    for (const auto& pt : res.points)
        t.add_row({pt.ray_arg, pt.lambda_mod, pt.flagged ? nan : pt.norm, res.predicted, res.fit_for(pt.ray_arg).slope});
    Checks checks;
    checks.at_most("max |fitted slope - predicted|", res.max_deviation, tol);
    auto plot = make_plot("Decay in |lambda|", "lambda_mod", {"norm"}, true, true);
    plot.group = "ray_arg";
    return finish("decay-sweep", std::move(t), c, checks, {{"predicted", res.predicted}, {"fits", fits}}, plot);
}

ExperimentResult run_singularity_sweep(const ModelProblem& pb, Config& c) {
    const int axes = pb.dim() - 1;
    require(axes >= 1, "singularity-sweep needs at least one tangential direction");
    const int j = c.integer("j", 0);
    const Complex lambda = c.complex("lambda", 1.0);
    const double s = c.num("s", 0.0);
    const double tt = c.num("t", 1.0);
    const auto scale = parse_scale(c.str("scale", "H"));
    const double p = c.num("p", 2.0);
    const double q = c.num("q", 2.0);
    const double eps = c.num("eps", 0.02);
    const int modes = c.integer("modes", axes == 1 ? 1 << 18 : 64);
    const double length = c.num("length", 2.0 * pi);
    const double x_lo = c.num("x_lo", 1e-4);
    const double x_hi = c.num("x_hi", 1e-1);
    const int points = c.integer("points", 25);
    const double tol = c.num("tolerance", 0.1);
    c.finish();
    require(j >= 0 && j < pb.half_order(), "singularity-sweep: j out of range");
    const auto tg = TangentialGrid::make(axes, modes, length);
    const auto g = broadband_data(tg, s, eps);
    // measured in A^{t + m_j}, the smoothness the Poisson operator of B_j reaches
    const auto target = SpaceSpec::make(scale, tt + pb.boundary_order(j), p, q);
    const auto res = singularity_sweep(pb, j, lambda, g, tg, target, s, x_lo, x_hi, points);

    Table t({"x_n", "norm", "predicted", "fitted_slope"});
    for (std::size_t i = 0; i < res.x.size(); ++i) t.add_row({res.x[i], res.norm[i], res.predicted, res.slope});
    Checks checks;
    checks.at_most("|fitted slope - predicted|", std::abs(res.slope - res.predicted), tol);
    return finish("singularity-sweep", std::move(t), c, checks, {{"predicted", res.predicted}, {"slope", res.slope}},
                  make_plot("Boundary singularity", "x_n", {"norm"}, true, true));
}

ExperimentResult run_hardy_norm(const ModelProblem&, Config& c) {
    const double p = c.num("p", 2.0);
    const auto rs = c.nums("r", {0.0, 0.4 * (p - 1.0), 0.8 * (p - 1.0)});
    const auto decades = c.nums("decades", {8.0, 12.0, 16.0});
    const auto ratios = c.nums("ratios", {1.1, 1.05, 1.025});
    const int max_iter = c.integer("max_iter", 2000);
    const double iter_tol = c.num("iteration_tolerance", 1e-12);
    const double ref_tol = c.num("reference_tolerance", 0.02);
    const double stable_tol = c.num("stability_tolerance", 0.05);
    c.finish();
    require(p > 1.0, "hardy-norm: p must exceed 1");
    require(!rs.empty(), "hardy-norm: r list is empty");
    require(!decades.empty() && decades.size() == ratios.size(), "hardy-norm: decades and ratios differ in length");

    Table t({"p", "r", "level", "decades", "ratio", "nodes", "norm", "reference", "iterations", "converged"});
    Checks checks;
    json per_r = json::array();
    std::vector<std::pair<double, double>> finest; // (r, norm) for in-range r
    for (double r : rs) {
        const bool in_range = r > -1.0 && r < p - 1.0;
        std::vector<double> norms;
        for (std::size_t lvl = 0; lvl < decades.size(); ++lvl) {
            const double d = decades[lvl];
            const auto grid = NormalGrid::graded(std::pow(10.0, -d), ratios[lvl], std::pow(10.0, d));
            const auto res = hardy_norm(p, r, grid, max_iter, iter_tol);
            norms.push_back(res.norm);
            t.add_row({p, r, static_cast<long long>(lvl), d, ratios[lvl], static_cast<long long>(grid.size()), res.norm,
                       in_range ? hardy_reference(p, r) : nan, static_cast<long long>(res.iterations),
                       static_cast<long long>(res.converged)});
            if (in_range) checks.holds("power method converged (r = " + format_double(r) + ", level " + std::to_string(lvl) + ")", res.converged);
        }
        json entry = {{"r", r}, {"in_range", in_range}, {"norms", norms}};
        if (in_range) {
            entry["reference"] = hardy_reference(p, r);
            if (norms.size() >= 2) {
                const double change = std::abs(norms.back() - norms[norms.size() - 2]) / norms.back();
                entry["last_change"] = change;
                checks.at_most("grid stability (r = " + format_double(r) + ")", change, stable_tol);
            }
            if (p == 2.0 && r == 0.0)
                checks.at_most("relative distance to pi (p = 2, r = 0)", std::abs(norms.back() - pi) / pi, ref_tol);
            if (r >= p / 2.0 - 1.0) finest.emplace_back(r, norms.back());
        } else {
            // outside the admissible range the estimate keeps growing under refinement
            entry["divergent_trend"] = norms.size() >= 2 && norms.back() > norms.front();
        }
        per_r.push_back(entry);
    }
    std::sort(finest.begin(), finest.end());
    bool monotone = true;
    for (std::size_t i = 1; i < finest.size(); ++i) monotone = monotone && finest[i].second > finest[i - 1].second;
    if (finest.size() >= 2) checks.holds("monotone increasing in r toward p - 1", monotone);
    auto plot = make_plot("Weighted Hilbert operator norm", "nodes", {"norm"}, true, false);
    plot.group = "r";
    return finish("hardy-norm", std::move(t), c, checks, {{"per_r", per_r}}, plot);
}

CVector random_band_limited(const TangentialGrid& g, double band, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    CVector f = CVector::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.frequency_norm(i) <= band) f(static_cast<Eigen::Index>(i)) = Complex(nd(gen), nd(gen));
    return f;
}

ExperimentResult run_norm_check(const ModelProblem&, Config& c) {
    const int trials = c.integer("trials", 100);
    const int modes = c.integer("modes", 128);
    const double band = c.num("band", 30.0);
    const double s = c.num("s", 2.0);
    const double s0 = c.num("s0", 0.5);
    const auto mus = c.nums("mu", logspace(1.0, 1e4, 9));
    const auto scale = parse_scale(c.str("scale", "H"));
    const double p = c.num("p", 2.0);
    const double lift_t = c.num("lifting_t", 1.5);
    const int lift_modes = c.integer("lifting_modes", 32);
    const double C = c.num("C", 4.0);
    const auto seed = c.seed("seed", 1);
    c.finish();
    require(trials >= 1, "norm-check: trials must be >= 1");
    require(s >= s0, "norm-check: needs s >= s0");

    const auto g = TangentialGrid::make(1, modes, 2.0 * pi);
    const auto base = SpaceSpec::make(scale, 0.0, p);
    std::mt19937_64 gen(seed);
    std::vector<CVector> fs;
    for (int i = 0; i < trials; ++i) fs.push_back(random_band_limited(g, band, gen));

    Table t({"mu", "min_ratio", "max_ratio", "max_lower_ratio"});
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, lower = 0.0;
    for (double mu : mus) {
        double mlo = std::numeric_limits<double>::infinity(), mhi = 0.0, mlower = 0.0;
        for (const auto& f : fs) {
            const double lhs = param_norm(f, s, s0, mu, base, g);
            const double rhs = space_norm(f, base.with_s(s), g) + std::pow(bracket(mu * mu), s - s0) * space_norm(f, base.with_s(s0), g);
            mlo = std::min(mlo, lhs / rhs);
            mhi = std::max(mhi, lhs / rhs);
            // s < s0 direction: the parameter norm is dominated by the plain norm
            mlower = std::max(mlower, param_norm(f, s0, s, mu, base, g) / space_norm(f, base.with_s(s0), g));
        }
        t.add_row({mu, mlo, mhi, mlower});
        lo = std::min(lo, mlo);
        hi = std::max(hi, mhi);
        lower = std::max(lower, mlower);
    }

    const auto axis = TangentialGrid::make(1, lift_modes, 2.0 * pi);
    double llo = std::numeric_limits<double>::infinity(), lhi = 0.0;
    for (int i = 0; i < trials; ++i) {
        CMatrix f = CMatrix::Zero(lift_modes, lift_modes);
        std::normal_distribution<double> nd;
        for (int a = 0; a < lift_modes; ++a)
            for (int b = 0; b < lift_modes; ++b)
                if (std::hypot(axis.frequency_1d(a), axis.frequency_1d(b)) <= lift_modes / 4.0) f(a, b) = Complex(nd(gen), nd(gen));
        const auto rep = mixed_lifting_check(f, lift_t, p, axis);
        llo = std::min(llo, rep.ratio);
        lhi = std::max(lhi, rep.ratio);
    }

    Checks checks;
    checks.at_most("equivalence upper ratio", hi, C);
    checks.at_least("equivalence lower ratio", lo, 1.0 / C);
    checks.at_most("s < s0 domination ratio", lower, C);
    checks.at_most("mixed lifting upper ratio", lhi, C);
    checks.at_least("mixed lifting lower ratio", llo, 1.0 / C);
    return finish("norm-check", std::move(t), c, checks,
                  {{"equivalence", {{"min", lo}, {"max", hi}}}, {"lower_domination", lower},
                   {"mixed_lifting", {{"min", llo}, {"max", lhi}}}},
                  make_plot("Parameter-dependent norm ratios", "mu", {"min_ratio", "max_ratio"}, true, true));
}

ExperimentResult run_resolvent_test(const ModelProblem& pb, Config& c) {
    const int axes = pb.dim() - 1;
    const Complex lambda = c.complex("lambda", std::polar(4.0, 1.0));
    const int mode = c.integer("mode", 1);
    const int tmodes = c.integer("tangential_modes", 8);
    const auto hs = c.nums("h", {1.0 / 16, 1.0 / 32, 1.0 / 64});
    const double length = c.num("length", 64.0);
    const double tol = c.num("tolerance", 1e-4);
    const double min_order = c.num("min_order", 2.0);
    const auto rays = c.nums("rays", {-0.86 * pb.phi(), 0.0, 0.41 * pb.phi()});
    const double mod_lo = c.num("modulus_lo", 10.0);
    const double mod_decades = c.num("modulus_decades", 3.0);
    const int mod_points = c.integer("moduli", 7);
    const auto rates = c.nums("rates", {0.25, 1.0, 4.0, 16.0});
    const double sect_h = c.num("sectoriality_h", 1.0 / 128);
    const int sect_count = c.integer("sectoriality_count", 1 << 15);
    const double spread_tol = c.num("spread_tolerance", 2.0);
    c.finish();
    require(hs.size() >= 3, "resolvent-test needs at least three grid spacings");

    const auto tg = TangentialGrid::make(axes, tmodes, 2.0 * pi);
    const auto row = static_cast<Eigen::Index>(tg.index_of(mode_vector(axes, mode)));
    std::vector<double> interior, boundary, self_diff;
    std::vector<CVector> profiles;
    std::vector<double> spacing;
    for (double h : hs) {
        const auto line = HalfLine::make(h, static_cast<int>(std::lround(length / h)));
        const auto f = mode_profile(tg, line, row, [](double x) { return Complex(x * std::exp(-x)); });
        const auto u = halfspace_resolvent(pb, lambda, f, tg, line);
        const auto chk = resolvent_residual(pb, lambda, f, u, tg, line);
        interior.push_back(chk.interior);
        boundary.push_back(chk.boundary);
        profiles.push_back(u.values.row(row).transpose());
        spacing.push_back(h);
    }
    // self-convergence between consecutive grids on the common nodes of the first half
    for (std::size_t i = 1; i < profiles.size(); ++i) {
        const long stride = std::lround(spacing[i - 1] / spacing[i]);
        double d = 0.0;
        for (Eigen::Index a = 0; a < profiles[i - 1].size() / 2; ++a)
            d = std::max(d, std::abs(profiles[i - 1](a) - profiles[i](a * stride)));
        self_diff.push_back(d);
    }
    const double order = std::log2(interior[interior.size() - 2] / interior.back());
    const double self_order = self_diff.size() >= 2 ? std::log2(self_diff[self_diff.size() - 2] / self_diff.back()) : nan;

    const auto sline = HalfLine::make(sect_h, sect_count);
    const auto sect = sectoriality_sweep(pb, rays, logspace(mod_lo, mod_lo * std::pow(10.0, mod_decades), mod_points),
                                         std::vector<double>(static_cast<std::size_t>(axes), 0.0), rates, sline);

    Table t({"ray_arg", "lambda_mod", "ratio"});
    for (const auto& pt : sect.points) t.add_row({pt.ray_arg, pt.lambda_mod, pt.ratio});
    Checks checks;
    checks.at_most("interior residual (finest grid)", interior.back(), tol);
    checks.at_most("boundary trace residual (finest grid)", boundary.back(), tol);
    checks.at_least("observed order of the interior residual", order, min_order);
    checks.at_most("sectoriality spread across each ray", sect.worst_spread, spread_tol);
    auto plot = make_plot("|lambda| ||R(lambda) f|| / ||f||", "lambda_mod", {"ratio"}, true, true);
    plot.group = "ray_arg";
    return finish("resolvent-test", std::move(t), c, checks,
                  {{"refinement", {{"h", hs}, {"interior", interior}, {"boundary", boundary}, {"self_difference", self_diff}}},
                   {"observed_order", order}, {"self_convergence_order", self_order},
                   {"worst_spread", sect.worst_spread}, {"max_ratio", sect.max_ratio}},
                  plot);
}

// Initial profile and closed-form heat solution for the recognized Laplacians.
struct HeatOracle {
    std::function<Complex(double)> u0;
    std::function<double(double, double)> exact; // (t, x); empty when unknown
};

HeatOracle heat_oracle(Laplacian kind, double xi0) {
    HeatOracle o;
    switch (kind) {
    case Laplacian::Dirichlet:
        o.u0 = [](double x) { return Complex(x * std::exp(-x * x)); };
        o.exact = [xi0](double t, double x) {
            return std::pow(1.0 + 4.0 * t, -1.5) * x * std::exp(-x * x / (1.0 + 4.0 * t)) * std::exp(-xi0 * xi0 * t);
        };
        break;
    case Laplacian::Neumann:
        o.u0 = [](double x) { return Complex(std::exp(-x * x)); };
        o.exact = [xi0](double t, double x) {
            return std::pow(1.0 + 4.0 * t, -0.5) * std::exp(-x * x / (1.0 + 4.0 * t)) * std::exp(-xi0 * xi0 * t);
        };
        break;
    case Laplacian::None:
        o.u0 = [](double x) { return Complex(x * x * std::exp(-x * x)); };
        break;
    }
    return o;
}

Laplacian oracle_kind(const ModelProblem& pb, const std::string& oracle) {
    if (oracle == "auto") return classify(pb);
    if (oracle == "none") return Laplacian::None;
    if (oracle == "dirichlet_images") return Laplacian::Dirichlet;
    if (oracle == "neumann_images") return Laplacian::Neumann;
    fail(ErrorCode::InvalidArgument, "oracle must be auto, none, dirichlet_images or neumann_images");
}

double rel_max_diff(const CMatrix& a, const CMatrix& b) {
    const double ref = b.cwiseAbs().maxCoeff();
    return ref > 0.0 ? (a - b).cwiseAbs().maxCoeff() / ref : (a - b).cwiseAbs().maxCoeff();
}

ExperimentResult run_semigroup_test(const ModelProblem& pb, Config& c) {
    const int axes = pb.dim() - 1;
    const auto times = c.nums("times", {0.1, 0.25, 0.5});
    const double h = c.num("h", 1.0 / 64);
    const int count = c.integer("count", 2048);
    const int mode = c.integer("mode", 1);
    const int tmodes = c.integer("tangential_modes", 4);
    const double length = c.num("length", 2.0 * pi);
    ContourOptions copt;
    copt.nodes = c.integer("nodes", 48);
    const double tol = c.num("tolerance", 1e-3);
    const auto kind = oracle_kind(pb, c.str("oracle", "auto"));
    const int stride = c.integer("output_stride", 4);
    c.finish();
    require(times.size() >= 2, "semigroup-test needs at least two times");
    require(stride >= 1, "semigroup-test: output_stride must be >= 1");

    const auto tg = TangentialGrid::make(axes, tmodes, length);
    const auto line = HalfLine::make(h, count);
    const auto row = static_cast<Eigen::Index>(tg.index_of(mode_vector(axes, mode)));
    const double xi0 = tg.frequency_norm(static_cast<std::size_t>(row));
    const auto oracle = heat_oracle(kind, xi0);
    const auto u0 = mode_profile(tg, line, row, oracle.u0);

    Checks checks;
    Table t({"t", "x_n", "re", "im", "exact"});
    json errors = json::array();
    std::vector<GridFunction> sol;
    for (double tm : times) {
        for (const auto& n : semigroup_contour(pb.phi(), tm, copt))
            if (std::abs(std::arg(n.lambda - copt.omega)) >= pb.phi()) checks.holds("contour inside the sector", false);
        sol.push_back(semigroup_apply(pb, u0, tm, tg, line, copt));
        const auto& u = sol.back();
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < line.count; ++i) {
            const double ex = oracle.exact ? oracle.exact(tm, line.x(i)) : nan;
            if (oracle.exact) {
                err = std::max(err, std::abs(u.values(row, i) - ex));
                ref = std::max(ref, std::abs(ex));
            }
            if (i % stride == 0 && i < line.count / 2)
                t.add_row({tm, line.x(i), u.values(row, i).real(), u.values(row, i).imag(), ex});
        }
        if (oracle.exact) {
            errors.push_back(err / ref);
            checks.at_most("images oracle, t = " + format_double(tm), err / ref, tol);
        }
    }
    const auto composed = semigroup_apply(pb, sol[0], times[1], tg, line, copt);
    const auto direct = semigroup_apply(pb, u0, times[0] + times[1], tg, line, copt);
    const double semigroup_defect = rel_max_diff(composed.values, direct.values);
    checks.at_most("T(t1) T(t2) = T(t1 + t2)", semigroup_defect, tol);
    auto plot = make_plot("Semigroup profiles", "x_n", {"re"}, false, false);
    plot.group = "t";
    return finish("semigroup-test", std::move(t), c, checks,
                  {{"oracle", oracle.exact ? "images" : "none"}, {"oracle_errors", errors}, {"semigroup_defect", semigroup_defect}},
                  plot);
}

ExperimentResult run_parabolic_solve(const ModelProblem& pb, Config& c) {
    const int axes = pb.dim() - 1;
    const double sigma = c.num("sigma", 0.5);
    const int samples = c.integer("time_samples", 32);
    const double period = c.num("period", 2.0 * pi);
    const int mode = c.integer("mode", 2);
    const int tmode = c.integer("time_mode", 3);
    const int j = c.integer("j", 0);
    const int tmodes = c.integer("tangential_modes", 8);
    const double length = c.num("length", 2.0 * pi);
    const double x_min = c.num("x_min", 1e-3);
    const double ratio = c.num("ratio", 1.2);
    const double x_max = c.num("x_max", 5.0);
    const double tol = c.num("tolerance", 1e-8);
    c.finish();
    const int m = pb.half_order();
    require(j >= 0 && j < m, "parabolic-solve: j out of range");

    const auto tg = TangentialGrid::make(axes, tmodes, length);
    const auto time = TimeGrid::make(samples, period);
    const auto ng = NormalGrid::graded(x_min, ratio, x_max, true);
    const auto row = static_cast<Eigen::Index>(tg.index_of(mode_vector(axes, mode)));
    const double tau = time.frequencies()[static_cast<std::size_t>((tmode % samples + samples) % samples)];
    BoundarySeries g(static_cast<std::size_t>(m), CMatrix::Zero(samples, static_cast<Eigen::Index>(tg.size())));
    for (int i = 0; i < samples; ++i) g[static_cast<std::size_t>(j)](i, row) = std::exp(I * (tau * time.t(i)));
    const auto u = parabolic_boundary_solve(pb, g, sigma, time, tg, ng);

    const auto cs = build_companion(pb, make_frequency_point(tg.frequency(static_cast<std::size_t>(row)), Complex(sigma, tau), m));
    Table t({"t", "x_n", "re", "im", "exact"});
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < samples; ++i)
        for (std::size_t a = 0; a < ng.size(); ++a) {
            const Complex ex = std::exp(I * (tau * time.t(i))) * cs.kernel(j, ng.nodes[a]);
            const Complex v = u.slices[static_cast<std::size_t>(i)].values(row, static_cast<Eigen::Index>(a));
            err = std::max(err, std::abs(v - ex));
            ref = std::max(ref, std::abs(ex));
            t.add_row({time.t(i), ng.nodes[a], v.real(), v.imag(), ex.real()});
        }

    // shifting the data in time shifts the solution
    const int shift = samples / 4;
    BoundarySeries shifted = g;
    for (int i = 0; i < samples; ++i)
        shifted[static_cast<std::size_t>(j)].row(i) = g[static_cast<std::size_t>(j)].row((i + shift) % samples);
    const auto us = parabolic_boundary_solve(pb, shifted, sigma, time, tg, ng);
    double cov = 0.0;
    for (int i = 0; i < samples; ++i)
        cov = std::max(cov, rel_max_diff(us.slices[static_cast<std::size_t>(i)].values,
                                         u.slices[static_cast<std::size_t>((i + shift) % samples)].values));

    Checks checks;
    checks.at_most("single space-time mode vs kernel", err / ref, tol);
    checks.at_most("time-translation covariance", cov, 1e-10);
    auto plot = make_plot("Space-time mode (real part)", "x_n", {"re"}, true, false);
    plot.group = "t";
    return finish("parabolic-solve", std::move(t), c, checks, {{"mode_error", err / ref}, {"translation_defect", cov}}, plot);
}

ExperimentResult run_ibvp_solve(const ModelProblem& pb, Config& c) {
    const int axes = pb.dim() - 1;
    IbvpOptions opt;
    opt.T = c.num("T", 0.5);
    opt.sigma = c.num("sigma", 1.0);
    opt.time_samples = c.integer("time_samples", 256);
    opt.gauss_per_unit = c.integer("gauss_per_unit", 16);
    opt.contour.nodes = c.integer("nodes", 48);
    opt.output_times = c.nums("output_times", {0.1, 0.25, 0.5});
    const double h = c.num("h", 1.0 / 64);
    const int count = c.integer("count", 2048);
    const int mode = c.integer("mode", 1);
    const int tmodes = c.integer("tangential_modes", 4);
    const double length = c.num("length", 2.0 * pi);
    const double tol = c.num("tolerance", 1e-3);
    const auto kind = oracle_kind(pb, c.str("oracle", "auto"));
    const int stride = c.integer("output_stride", 4);
    c.finish();
    require(opt.output_times.size() >= 2, "ibvp-solve needs at least two output times");
    require(stride >= 1, "ibvp-solve: output_stride must be >= 1");

    const auto tg = TangentialGrid::make(axes, tmodes, length);
    const auto line = HalfLine::make(h, count);
    const auto row = static_cast<Eigen::Index>(tg.index_of(mode_vector(axes, mode)));
    const double xi0 = tg.frequency_norm(static_cast<std::size_t>(row));
    const auto oracle = heat_oracle(kind, xi0);
    IbvpData data;
    data.u0 = mode_profile(tg, line, row, oracle.u0);
    const auto res = ibvp_solve(pb, data, tg, line, opt);

    Checks checks;
    Table t({"t", "x_n", "re", "im", "exact"});
    json errors = json::array();
    for (std::size_t a = 0; a < res.times.size(); ++a) {
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < line.count; ++i) {
            const double ex = oracle.exact ? oracle.exact(res.times[a], line.x(i)) : nan;
            const Complex v = res.u[a].values(row, i);
            if (oracle.exact) {
                err = std::max(err, std::abs(v - ex));
                ref = std::max(ref, std::abs(ex));
            }
            if (i % stride == 0 && i < line.count / 2) t.add_row({res.times[a], line.x(i), v.real(), v.imag(), ex});
        }
        if (oracle.exact) {
            errors.push_back(err / ref);
            checks.at_most("images oracle, t = " + format_double(res.times[a]), err / ref, tol);
        }
    }

    // restarting from the first output reproduces the last one
    IbvpData restart;
    restart.u0 = res.u.front();
    IbvpOptions ropt = opt;
    ropt.T = res.times.back() - res.times.front();
    ropt.output_times = {ropt.T};
    const auto again = ibvp_solve(pb, restart, tg, line, ropt);
    const double restart_defect = rel_max_diff(again.u.front().values, res.u.back().values);
    checks.at_most("restart self-consistency", restart_defect, tol);
    auto plot = make_plot("IBVP profiles", "x_n", {"re"}, false, false);
    plot.group = "t";
    return finish("ibvp-solve", std::move(t), c, checks,
                  {{"oracle", oracle.exact ? "images" : "none"}, {"oracle_errors", errors}, {"restart_defect", restart_defect},
                   {"compatibility_defect", res.compatibility_defect}},
                  plot);
}

ExperimentResult run_rbound_sim(const ModelProblem& pb, Config& c) {
    const double p = c.num("p", 1.2);
    const double r = c.num("r", 0.0);
    NonRboundOptions o;
    o.sigma = c.num("sigma", 1.0);
    o.s = c.num("s", 0.0);
    o.trials = c.integer("trials", 512);
    o.seed = c.seed("seed", 1);
    const auto Ns = c.ints("N", {4, 8, 16, 32, 64});
    const double growth_min = c.num("growth_min", 1.5);
    const double plateau = c.num("plateau_factor", 1.3);
    const double stderr_max = c.num("stderr_max", 0.03);
    c.finish();
    const auto table = dirichlet_nonrbound_experiment(pb, p, r, Ns, o);

    Table t({"p", "r", "N", "ratio", "stderr"});
    double worst_rel = 0.0;
    for (const auto& row : table.rows) {
        t.add_row({row.p, row.r, static_cast<long long>(row.N), row.ratio, row.stderr_});
        worst_rel = std::max(worst_rel, row.stderr_ / row.ratio);
    }
    Checks checks;
    if (p < 2.0) {
        checks.at_least("growth ratio(N_max) / ratio(N_min)", table.growth, growth_min);
    } else {
        checks.at_most("plateau: growth", table.growth, plateau);
        checks.at_least("plateau: growth", table.growth, 1.0 / plateau);
    }
    checks.at_most("relative Monte-Carlo stderr", worst_rel, stderr_max);
    return finish("rbound-sim", std::move(t), c, checks,
                  {{"growth", table.growth}, {"fitted_exponent", table.exponent}, {"reference_exponent", 1.0 / p - 0.5}},
                  make_plot("Rademacher ratio against family size", "N", {"ratio"}, true, true));
}

using Runner = ExperimentResult (*)(const ModelProblem&, Config&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{
        {"check-ls", run_check_ls},
        {"poisson-eval", run_poisson_eval},
        {"decay-sweep", run_decay_sweep},
        {"singularity-sweep", run_singularity_sweep},
        {"hardy-norm", run_hardy_norm},
        {"norm-check", run_norm_check},
        {"resolvent-test", run_resolvent_test},
        {"semigroup-test", run_semigroup_test},
        {"parabolic-solve", run_parabolic_solve},
        {"ibvp-solve", run_ibvp_solve},
        {"rbound-sim", run_rbound_sim},
    };
    return m;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"check-ls",       "poisson-eval",   "decay-sweep",     "singularity-sweep",
                                                "hardy-norm",     "norm-check",     "resolvent-test",  "semigroup-test",
                                                "parabolic-solve", "ibvp-solve",    "rbound-sim"};
    return names;
}

ExperimentResult run_experiment(const std::string& name, const ModelProblem& problem, const json& config,
                                const std::string& config_source) {
    const auto it = runners().find(name);
    if (it == runners().end()) fail(ErrorCode::InvalidArgument, "unknown experiment '" + name + "'");
    Config cfg(config, config_source);
    return it->second(problem, cfg);
}

} // namespace hp
