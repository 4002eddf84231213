#include "wnn/compile.hpp"

#include <cmath>
#include <limits>

#include "json_util.hpp"
#include "wnn/error.hpp"
#include "wnn/io.hpp"
#include "wnn/transform.hpp"

namespace wnn {

using detail::json;

void ShallowNet::validate() const {
    if (input_dim == 0) throw DimensionError("shallow net input_dim must be positive");
    for (std::size_t i = 0; i < units.size(); ++i) {
        const auto& u = units[i];
        if (u.weights.size() != input_dim) {
            throw DimensionError("unit " + std::to_string(i) + " has " + std::to_string(u.weights.size()) +
                                 " weights, expected " + std::to_string(input_dim));
        }
        if (!std::isfinite(u.coef) || !std::isfinite(u.bias)) {
            throw NonFiniteError("unit " + std::to_string(i) + " has a non-finite value");
        }
        for (double w : u.weights) {
            if (!std::isfinite(w)) throw NonFiniteError("unit " + std::to_string(i) + " has a non-finite weight");
        }
    }
}

double ShallowNet::operator()(std::span<const double> x) const {
    if (x.size() != input_dim) throw DimensionError("input has wrong dimension");
    double sum = 0.0;
    for (const auto& u : units) {
        double pre = u.bias;
        for (std::size_t i = 0; i < input_dim; ++i) pre += u.weights[i] * x[i];
        sum += u.coef * relu(pre);
    }
    return sum;
}

double ShallowNet::coefficient_mass() const {
    double m = 0.0;
    for (const auto& u : units) m += std::abs(u.coef);
    return m;
}

ShallowNet unit_normalize(const ShallowNet& s) {
    s.validate();
    ShallowNet out = s;
    for (std::size_t i = 0; i < out.units.size(); ++i) {
        auto& u = out.units[i];
        double n = std::abs(u.bias);
        for (double w : u.weights) n += 2.0 * std::abs(w);
        if (n == 0.0) {
            if (u.coef != 0.0) throw DegenerateUnit(i);
            continue;
        }
        if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) continue;
        u.bias /= n;
        for (double& w : u.weights) w /= n;
        u.coef *= n;
    }
    return out;
}

SignSplit split_signs(const ShallowNet& s) {
    s.validate();
    SignSplit out;
    out.positive.input_dim = s.input_dim;
    out.negative.input_dim = s.input_dim;
    for (const auto& u : s.units) {
        if (u.coef > 0.0) {
            out.s_plus += u.coef;
            out.positive.units.push_back(u);
        } else if (u.coef < 0.0) {
            out.s_minus += -u.coef;
            out.negative.units.push_back(u);
            out.negative.units.back().coef = -u.coef;
        }
    }
    for (auto& u : out.positive.units) u.coef /= out.s_plus;
    for (auto& u : out.negative.units) u.coef /= out.s_minus;
    return out;
}

namespace {

struct Group {
    std::vector<ShallowUnit> units;  // positive magnitudes
    std::vector<std::size_t> block_sizes;
    std::vector<std::size_t> block_begin;
    std::vector<double> cumulative;  // C_j over blocks 1..j
};

// Earlier blocks take the extra unit; units keep input order.
Group partition(std::vector<ShallowUnit> units, std::size_t k) {
    Group g;
    g.units = std::move(units);
    const std::size_t n = g.units.size();
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t size = base + (j < extra ? 1 : 0);
        g.block_begin.push_back(pos);
        g.block_sizes.push_back(size);
        for (std::size_t t = 0; t < size; ++t) acc += g.units[pos + t].coef;
        g.cumulative.push_back(acc);
        pos += size;
    }
    return g;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

CompileResult compile_to_depth(const ShallowNet& s, std::size_t k, const NormSpec& ns, double c_out) {
    s.validate();
    if (!(c_out > 0.0) || !std::isfinite(c_out)) throw PreconditionError("c_out must be positive");

    double mass = 0.0;
    for (const auto& u : s.units) {
        double n = std::abs(u.bias);
        for (double w : u.weights) n += std::abs(w);
        mass += std::abs(u.coef) * n;
    }

    const ShallowNet normalized = unit_normalize(s);
    std::vector<ShallowUnit> plus, minus;
    for (const auto& u : normalized.units) {
        if (u.coef > 0.0) plus.push_back(u);
        if (u.coef < 0.0) {
            minus.push_back(u);
            minus.back().coef = -u.coef;
        }
    }
    const std::size_t m1 = s.input_dim;
    const std::size_t r = plus.size() + minus.size();
    if (k < 1 || k > r) {
        throw PreconditionError("depth k = " + std::to_string(k) + " outside [1, " + std::to_string(r) + "]");
    }
    if (mass > c_out * (1.0 + 1e-9)) throw BudgetExceeded(k, mass, c_out);

    const Group gp = partition(std::move(plus), k);
    const Group gm = partition(std::move(minus), k);
    const bool has_plus = !gp.units.empty();
    const bool has_minus = !gm.units.empty();

    CompilePlan plan;
    plan.k = k;
    plan.r = r;
    plan.r_plus = gp.units.size();
    plan.r_minus = gm.units.size();
    plan.plus_blocks = gp.block_sizes;
    plan.minus_blocks = gm.block_sizes;
    plan.plus_cumulative = gp.cumulative;
    plan.minus_cumulative = gm.cumulative;
    plan.wid_k = ceil_div(r, k) + 2 * m1 + 3;
    plan.construction_bound = ceil_div(plan.r_plus, k) + ceil_div(plan.r_minus, k) + 2 * m1 + 3;
    plan.hidden_budget = ns.q.is_inf() ? 1.0 : std::pow(static_cast<double>(plan.wid_k), ns.q.reciprocal());
    plan.output_budget = 2.0 * c_out;

    for (std::size_t j = 0; j < k; ++j) {
        LayerLayout L;
        std::size_t pos = 0;
        L.block_plus_begin = pos;
        L.block_plus_count = gp.block_sizes[j];
        pos += L.block_plus_count;
        L.block_minus_begin = pos;
        L.block_minus_count = gm.block_sizes[j];
        pos += L.block_minus_count;
        if (j + 1 < k) {
            L.pass_begin = pos;
            pos += 2 * m1;
        }
        if (j >= 1 && has_plus) L.s_plus_unit = pos++;
        if (j >= 1 && has_minus) L.s_minus_unit = pos++;
        L.width = pos;
        plan.layers.push_back(L);
    }

    std::vector<AffineMap> layers;
    for (std::size_t j = 0; j < k; ++j) {
        const LayerLayout& L = plan.layers[j];
        const std::size_t in = j == 0 ? m1 : plan.layers[j - 1].width;
        DenseMatrix m(in + 1, L.width);

        auto put_unit = [&](const ShallowUnit& u, std::size_t col) {
            m.set(0, col, u.bias);
            if (j == 0) {
                for (std::size_t i = 0; i < m1; ++i) m.set(1 + i, col, u.weights[i]);
            } else {
                // w.x = w.relu(x) - w.relu(-x)
                const std::size_t pb = *plan.layers[j - 1].pass_begin;
                for (std::size_t i = 0; i < m1; ++i) {
                    m.set(1 + pb + i, col, u.weights[i]);
                    m.set(1 + pb + m1 + i, col, -u.weights[i]);
                }
            }
        };
        for (std::size_t t = 0; t < L.block_plus_count; ++t) {
            put_unit(gp.units[gp.block_begin[j] + t], L.block_plus_begin + t);
        }
        for (std::size_t t = 0; t < L.block_minus_count; ++t) {
            put_unit(gm.units[gm.block_begin[j] + t], L.block_minus_begin + t);
        }

        if (L.pass_begin) {
            const std::size_t pb = *L.pass_begin;
            for (std::size_t i = 0; i < m1; ++i) {
                if (j == 0) {
                    m.set(1 + i, pb + i, 1.0);
                    m.set(1 + i, pb + m1 + i, -1.0);
                } else {
                    const std::size_t prev = *plan.layers[j - 1].pass_begin;
                    m.set(1 + prev + i, pb + i, 1.0);
                    m.set(1 + prev + m1 + i, pb + m1 + i, 1.0);
                }
            }
        }

        // S_j = (C_{j-1} / C_j) relu(S_{j-1}) + sum over block j of (c_u / C_j) relu(pre_u)
        auto put_sum = [&](const Group& g, std::size_t col, std::optional<std::size_t> prev_s,
                           std::size_t prev_block_begin) {
            const double total = g.cumulative[j - 1];
            if (prev_s) m.set(1 + *prev_s, col, g.cumulative[j - 2] / total);
            for (std::size_t t = 0; t < g.block_sizes[j - 1]; ++t) {
                m.set(1 + prev_block_begin + t, col, g.units[g.block_begin[j - 1] + t].coef / total);
            }
        };
        if (L.s_plus_unit) {
            const LayerLayout& P = plan.layers[j - 1];
            put_sum(gp, *L.s_plus_unit, P.s_plus_unit, P.block_plus_begin);
        }
        if (L.s_minus_unit) {
            const LayerLayout& P = plan.layers[j - 1];
            put_sum(gm, *L.s_minus_unit, P.s_minus_unit, P.block_minus_begin);
        }
        layers.emplace_back(std::move(m));
    }

    const LayerLayout& last = plan.layers.back();
    DenseMatrix out(last.width + 1, 1);
    for (std::size_t t = 0; t < last.block_plus_count; ++t) {
        out.set(1 + last.block_plus_begin + t, 0, gp.units[gp.block_begin[k - 1] + t].coef);
    }
    for (std::size_t t = 0; t < last.block_minus_count; ++t) {
        out.set(1 + last.block_minus_begin + t, 0, -gm.units[gm.block_begin[k - 1] + t].coef);
    }
    if (last.s_plus_unit) out.set(1 + *last.s_plus_unit, 0, gp.cumulative[k - 2]);
    if (last.s_minus_unit) out.set(1 + *last.s_minus_unit, 0, -gm.cumulative[k - 2]);
    layers.emplace_back(std::move(out));

    WnNetwork construction(m1, std::move(layers));
    WnNetwork net = canonicalize(construction, ns, plan.hidden_budget, plan.output_budget).net;
    return {std::move(net), std::move(construction), std::move(plan)};
}

std::string shallow_to_json(const ShallowNet& s) {
    std::string out = "{\n  \"version\": 1,\n  \"input_dim\": " + std::to_string(s.input_dim) + ",\n  \"units\": [";
    for (std::size_t i = 0; i < s.units.size(); ++i) {
        const auto& u = s.units[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"coef\": ";
        detail::write_real(out, u.coef);
        out += ", \"weights\": ";
        detail::write_real_array(out, u.weights);
        out += ", \"bias\": ";
        detail::write_real(out, u.bias);
        out += "}";
    }
    out += s.units.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

ShallowNet shallow_from_json(const std::string& text) {
    const json doc = detail::parse_json(text);
    detail::check_version(doc);
    ShallowNet s;
    s.input_dim = detail::as_count(detail::require(doc, "input_dim"), "input_dim");
    const json& units = detail::require(doc, "units");
    if (!units.is_array()) throw FormatError("'units' must be an array");
    for (const auto& uj : units) {
        ShallowUnit u;
        u.coef = detail::as_real(detail::require(uj, "coef"), "coef");
        u.weights = detail::as_real_vector(detail::require(uj, "weights"), "weights");
        u.bias = detail::as_real(detail::require(uj, "bias"), "bias");
        s.units.push_back(std::move(u));
    }
    s.validate();
    return s;
}

void save_shallow(const ShallowNet& s, const std::filesystem::path& path) { write_text_file(path, shallow_to_json(s)); }

ShallowNet load_shallow(const std::filesystem::path& path) { return shallow_from_json(read_text_file(path)); }

}  // namespace wnn
