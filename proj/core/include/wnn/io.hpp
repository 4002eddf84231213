#pragma once

#include <filesystem>
#include <string>

#include "wnn/network.hpp"

namespace wnn {

// Network file format (JSON, version 1):
//   { "version": 1, "input_dim": m1,
//     "layers": [ { "in_dim": d, "out_dim": e, "bias": [e], "weights": [e][d] } ... ],
//     "certificate": { "p": x|"inf", "q": x|"inf", "c": x, "c_out": x } }
// weights[j][i] is the coefficient from input unit i to output unit j. Numbers
// are written with 17 significant digits so a save/load cycle is bit-exact.

std::string network_to_json(const WnNetwork& net);
WnNetwork network_from_json(const std::string& text);

void save_network(const WnNetwork& net, const std::filesystem::path& path);
WnNetwork load_network(const std::filesystem::path& path);

// ClassSpec JSON: { "p": x, "q": x|"inf", "c": x, "c_out": x, "k": k, "dims": [...] }
std::string class_spec_to_json(const ClassSpec& spec);
ClassSpec class_spec_from_json(const std::string& text);

/// Reads a whole text file; throws FormatError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest-safe decimal rendering with the given number of significant
/// digits, locale independent ("inf"/"-inf"/"nan" for non-finite values).
std::string format_number(double v, int significant_digits = 12);

}  // namespace wnn
