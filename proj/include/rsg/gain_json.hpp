#pragma once

#include <json.hpp>

#include "rsg/comparison_function.hpp"

namespace rsg {

using Json = nlohmann::json;

// Numbers may be JSON numbers or decimal strings ("0.236", "inf").
double number_from_json(const Json& j);
Json number_to_json(double v);

ComparisonFunction function_from_json(const Json& j);
Json function_to_json(const ComparisonFunction& f);

// Accepts every function kind plus {"kind": "piecewise", "branches": [...]}.
Gain gain_from_json(const Json& j);
Json gain_to_json(const Gain& g);

}  // namespace rsg
