#pragma once

// Internal helpers shared by the JSON readers/writers.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnn/error.hpp"
#include "wnn/norm.hpp"

namespace wnn::detail {

using nlohmann::json;

json parse_json(const std::string& text);

const json& require(const json& obj, const char* key);

double as_real(const json& v, const char* what);
std::size_t as_count(const json& v, const char* what);
std::vector<double> as_real_vector(const json& v, const char* what);
NormIndex as_norm_index(const json& v, const char* what);

void check_version(const json& obj);

/// Appends a JSON number with 17 significant digits.
void write_real(std::string& out, double v);
void write_real_array(std::string& out, const std::vector<double>& v);
void write_norm_index(std::string& out, const NormIndex& ix);

}  // namespace wnn::detail
