#pragma once

#include "hp/problem_io.hpp"

#include <string>

namespace hp::test {

inline ModelProblem bundled(const std::string& name) {
    return load_problem(std::string(HP_PROBLEM_DIR) + "/" + name + ".json");
}

inline ModelProblem dirichlet() { return bundled("dirichlet_laplacian"); }
inline ModelProblem neumann() { return bundled("neumann_laplacian"); }
inline ModelProblem bilaplacian() { return bundled("clamped_bilaplacian"); }

inline double rel_err(Complex a, Complex b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

} // namespace hp::test
