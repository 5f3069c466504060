#include "hp/problem_io.hpp"

#include "hp/error.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace hp {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& source, const std::string& field,
                             const std::string& what) {
    fail(ErrorCode::Parse, source + ": field '" + field + "': " + what);
}

const json& member(const json& obj, const char* key, const std::string& source,
                   const std::string& path) {
    if (!obj.is_object()) parse_fail(source, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(source, path.empty() ? key : path + "." + key, "missing");
    return *it;
}

int as_int(const json& v, const std::string& source, const std::string& field) {
    if (!v.is_number_integer()) parse_fail(source, field, "expected an integer");
    return v.get<int>();
}

double as_double(const json& v, const std::string& source, const std::string& field) {
    if (!v.is_number()) parse_fail(source, field, "expected a number");
    return v.get<double>();
}

Complex as_complex(const json& v, const std::string& source, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        parse_fail(source, field, "expected [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::map<MultiIndex, Complex> coefficient_map(const json& obj, const std::string& source,
                                              const std::string& path) {
    if (!obj.is_object()) parse_fail(source, path, "expected an object of coefficients");
    std::map<MultiIndex, Complex> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string field = path + "." + it.key();
        MultiIndex alpha;
        try {
            alpha = parse_multi_index(it.key());
        } catch (const Error& e) {
            parse_fail(source, field, e.what());
        }
        out[alpha] = as_complex(it.value(), source, field);
    }
    return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

} // namespace

MultiIndex parse_multi_index(const std::string& key) {
    MultiIndex alpha;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "malformed multi-index '" + key + "'");
        }
        if (used != part.size() || v < 0) fail(ErrorCode::Parse, "malformed multi-index '" + key + "'");
        alpha.push_back(v);
    }
    if (alpha.empty()) fail(ErrorCode::Parse, "empty multi-index");
    return alpha;
}

std::string format_multi_index(const MultiIndex& alpha) {
    std::string s;
    for (std::size_t i = 0; i < alpha.size(); ++i) s += (i ? "," : "") + std::to_string(alpha[i]);
    return s;
}

ModelProblem parse_problem(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Parse, source + ": " + e.what());
    }
    const int n = as_int(member(doc, "n", source, ""), source, "n");
    const int m = as_int(member(doc, "m", source, ""), source, "m");
    auto interior = coefficient_map(member(doc, "interior", source, ""), source, "interior");
    const json& bjson = member(doc, "boundary", source, "");
    if (!bjson.is_array()) parse_fail(source, "boundary", "expected an array");
    std::vector<BoundaryOperator> boundary;
    for (std::size_t j = 0; j < bjson.size(); ++j) {
        const std::string path = "boundary[" + std::to_string(j) + "]";
        BoundaryOperator op;
        op.order = as_int(member(bjson[j], "order", source, path), source, path + ".order");
        op.coeffs = coefficient_map(member(bjson[j], "coeffs", source, path), source, path + ".coeffs");
        boundary.push_back(std::move(op));
    }
    const double phi_prime = as_double(member(doc, "phi_prime", source, ""), source, "phi_prime");
    const double phi = as_double(member(doc, "phi", source, ""), source, "phi");
    try {
        return ModelProblem::create(n, m, std::move(interior), std::move(boundary), phi_prime, phi);
    } catch (const Error& e) {
        fail(ErrorCode::Parse, source + ": " + e.what());
    }
}

ModelProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open problem file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str(), path);
}

std::string problem_to_json(const ModelProblem& problem) {
    json doc;
    doc["n"] = problem.dim();
    doc["m"] = problem.half_order();
    json interior = json::object();
    for (const auto& [alpha, c] : problem.interior()) interior[format_multi_index(alpha)] = complex_json(c);
    doc["interior"] = interior;
    json boundary = json::array();
    for (const auto& op : problem.boundary()) {
        json coeffs = json::object();
        for (const auto& [beta, c] : op.coeffs) coeffs[format_multi_index(beta)] = complex_json(c);
        boundary.push_back({{"order", op.order}, {"coeffs", coeffs}});
    }
    doc["boundary"] = boundary;
    doc["phi_prime"] = problem.phi_prime();
    doc["phi"] = problem.phi();
    return doc.dump(2);
}

} // namespace hp
