#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnn/network.hpp"

namespace wnn {

struct ShallowUnit {
    double coef = 0.0;
    std::vector<double> weights;
    double bias = 0.0;
};

/// g(x) = sum_i coef_i * relu(weights_i . x + bias_i)
struct ShallowNet {
    std::size_t input_dim = 0;
    std::vector<ShallowUnit> units;

    /// Throws DimensionError / NonFiniteError on malformed units.
    void validate() const;

    double operator()(std::span<const double> x) const;

    /// sum_i |coef_i|
    double coefficient_mass() const;
};

/// Rescales each unit so ||(b_i, 2 w_i)||_1 == 1, absorbing the factor into
/// coef_i. The function is unchanged. Units with zero coefficient are left
/// alone; a zero unit with nonzero coefficient throws DegenerateUnit.
ShallowNet unit_normalize(const ShallowNet& s);

struct SignSplit {
    ShallowNet positive;  // coefficients divided by s_plus (sum to 1)
    ShallowNet negative;  // |coefficients| divided by s_minus (sum to 1)
    double s_plus = 0.0;
    double s_minus = 0.0;
};

/// g = s_plus * g_plus - s_minus * g_minus. Zero-coefficient units are dropped.
SignSplit split_signs(const ShallowNet& s);

/// Where each construction unit lives inside the compiled network.
struct LayerLayout {
    std::size_t width = 0;
    std::size_t block_plus_begin = 0, block_plus_count = 0;
    std::size_t block_minus_begin = 0, block_minus_count = 0;
    /// relu(x) at [pass_begin, pass_begin + m1), relu(-x) right after;
    /// absent on the last hidden layer.
    std::optional<std::size_t> pass_begin;
    /// Normalized cumulative sums of the previous blocks (layers >= 2).
    std::optional<std::size_t> s_plus_unit, s_minus_unit;
};

struct CompilePlan {
    std::size_t k = 0;
    std::size_t r = 0;       // units after dropping zero coefficients
    std::size_t r_plus = 0;  // r_1
    std::size_t r_minus = 0; // r_2
    /// Block sizes per layer for each sign group; earlier blocks take the
    /// remainder.
    std::vector<std::size_t> plus_blocks, minus_blocks;
    /// C_j: total normalized coefficient mass of blocks 1..j (j = 1..k).
    std::vector<double> plus_cumulative, minus_cumulative;
    std::vector<LayerLayout> layers;
    std::size_t wid_k = 0;           // ceil(r/k) + 2 m1 + 3
    std::size_t construction_bound = 0;  // ceil(r_1/k) + ceil(r_2/k) + 2 m1 + 3
    double hidden_budget = 1.0;      // 1 for q = inf, wid_k^{1/q} otherwise
    double output_budget = 0.0;      // 2 * c_out
};

struct CompileResult {
    /// Certified network in N^{k,d}_{p,q,hidden_budget,2 c_out}.
    WnNetwork net;
    /// Raw L_{1,inf} construction before re-certification; unit layout
    /// matches `plan.layers`.
    WnNetwork construction;
    CompilePlan plan;
};

/// Exact re-expression of a one-hidden-layer network as a depth-k network
/// whose hidden layers carry one block of units each, relu(x) / relu(-x)
/// pass-throughs, and the normalized cumulative sums of earlier blocks.
///
/// Requires 1 <= k <= r and sum_i |c_i| * ||(b_i, w_i)||_1 <= c_out.
CompileResult compile_to_depth(const ShallowNet& s, std::size_t k, const NormSpec& ns, double c_out);

std::string shallow_to_json(const ShallowNet& s);
ShallowNet shallow_from_json(const std::string& text);
void save_shallow(const ShallowNet& s, const std::filesystem::path& path);
ShallowNet load_shallow(const std::filesystem::path& path);

}  // namespace wnn
