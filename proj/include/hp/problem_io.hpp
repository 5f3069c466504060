#pragma once

#include "hp/model.hpp"

#include <string>

namespace hp {

/// Parses the JSON problem format. Errors carry the offending field path.
ModelProblem parse_problem(const std::string& text, const std::string& source = "<string>");
ModelProblem load_problem(const std::string& path);
std::string problem_to_json(const ModelProblem& problem);

/// "0,2" <-> {0, 2}
MultiIndex parse_multi_index(const std::string& key);
std::string format_multi_index(const MultiIndex& alpha);

} // namespace hp
