#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "chainrec/curve.hpp"
#include "chainrec/geometry.hpp"

namespace chainrec {

// All emitted JSON is built by hand so field order and number formatting are
// byte-stable across runs: doubles printed with 17 significant digits.
std::string fmt_double(double v);
std::string fmt_point(const Point& p);

// {"samples":[[t,[x...]],...],"jumps":[i,...]}
std::string curve_to_json(const Curve& c);
Curve curve_from_json(const nlohmann::json& j, const Metric& metric, double h_max,
                      double continuity_budget);

// {"points":[[x...],...],"times":[t,...]}
std::string chain_to_json(const ConleyChain& c);
ConleyChain chain_from_json(const nlohmann::json& j);

// Strict object parsing: any key outside `allowed` is an error.
void expect_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                 const std::string& where);

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace chainrec
