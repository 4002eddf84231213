#include "wnn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "wnn/error.hpp"

namespace wnn {

using detail::json;

std::string format_number(double v, int significant_digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant_digits);
    return std::string(buf, res.ptr);
}

std::string network_to_json(const WnNetwork& net) {
    std::string out = "{\n  \"version\": 1,\n  \"input_dim\": " + std::to_string(net.input_dim()) + ",\n  \"layers\": [";
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        const auto& l = net.layer(li);
        out += li ? ",\n    {" : "\n    {";
        out += "\"in_dim\": " + std::to_string(l.in_dim()) + ", \"out_dim\": " + std::to_string(l.out_dim());
        out += ",\n     \"bias\": ";
        std::vector<double> bias(l.params().row(0).begin(), l.params().row(0).end());
        detail::write_real_array(out, bias);
        out += ",\n     \"weights\": [";
        for (std::size_t j = 0; j < l.out_dim(); ++j) {
            std::vector<double> row(l.in_dim());
            for (std::size_t i = 0; i < l.in_dim(); ++i) row[i] = l.weight(i, j);
            out += j ? ",\n       " : "\n       ";
            detail::write_real_array(out, row);
        }
        out += "]}";
    }
    out += "\n  ]";
    if (const auto& cert = net.certificate()) {
        out += ",\n  \"certificate\": {\"p\": ";
        detail::write_norm_index(out, cert->norm.p);
        out += ", \"q\": ";
        detail::write_norm_index(out, cert->norm.q);
        out += ", \"c\": ";
        detail::write_real(out, cert->c);
        out += ", \"c_out\": ";
        detail::write_real(out, cert->c_out);
        out += "}";
    }
    out += "\n}\n";
    return out;
}

WnNetwork network_from_json(const std::string& text) {
    const json doc = detail::parse_json(text);
    detail::check_version(doc);
    const std::size_t input_dim = detail::as_count(detail::require(doc, "input_dim"), "input_dim");
    const json& layers_json = detail::require(doc, "layers");
    if (!layers_json.is_array() || layers_json.empty()) throw FormatError("'layers' must be a nonempty array");

    std::vector<AffineMap> layers;
    for (std::size_t li = 0; li < layers_json.size(); ++li) {
        const json& lj = layers_json[li];
        const std::string where = "layer " + std::to_string(li + 1);
        const std::size_t in = detail::as_count(detail::require(lj, "in_dim"), "in_dim");
        const std::size_t out = detail::as_count(detail::require(lj, "out_dim"), "out_dim");
        if (in == 0 || out == 0) throw DimensionError(where + ": in_dim and out_dim must be positive");
        std::vector<double> bias = detail::as_real_vector(detail::require(lj, "bias"), "bias");
        const json& wj = detail::require(lj, "weights");
        if (!wj.is_array()) throw FormatError(where + ": weights must be an array");
        if (bias.size() != out || wj.size() != out) {
            throw DimensionError(where + ": expected " + std::to_string(out) + " bias entries and weight rows");
        }
        std::vector<std::vector<double>> weights;
        for (const auto& row : wj) {
            weights.push_back(detail::as_real_vector(row, "weights"));
            if (weights.back().size() != in) {
                throw DimensionError(where + ": weight row has " + std::to_string(weights.back().size()) +
                                     " entries, expected in_dim " + std::to_string(in));
            }
        }
        layers.push_back(AffineMap::from_bias_weights(bias, weights));
    }

    std::optional<NormCertificate> cert;
    if (auto it = doc.find("certificate"); it != doc.end() && !it->is_null()) {
        NormCertificate nc;
        nc.norm.p = detail::as_norm_index(detail::require(*it, "p"), "p");
        if (nc.norm.p.is_inf()) throw FormatError("certificate p must be finite");
        nc.norm.q = detail::as_norm_index(detail::require(*it, "q"), "q");
        nc.c = detail::as_real(detail::require(*it, "c"), "c");
        nc.c_out = detail::as_real(detail::require(*it, "c_out"), "c_out");
        cert = nc;
    }
    return WnNetwork(input_dim, std::move(layers), cert);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

void save_network(const WnNetwork& net, const std::filesystem::path& path) {
    write_text_file(path, network_to_json(net));
}

WnNetwork load_network(const std::filesystem::path& path) { return network_from_json(read_text_file(path)); }

std::string class_spec_to_json(const ClassSpec& spec) {
    std::string out = "{\"p\": ";
    detail::write_norm_index(out, spec.norm.p);
    out += ", \"q\": ";
    detail::write_norm_index(out, spec.norm.q);
    out += ", \"c\": ";
    detail::write_real(out, spec.c);
    out += ", \"c_out\": ";
    detail::write_real(out, spec.c_out);
    out += ", \"k\": " + std::to_string(spec.k) + ", \"dims\": [";
    for (std::size_t i = 0; i < spec.dims.size(); ++i) out += (i ? ", " : "") + std::to_string(spec.dims[i]);
    out += "]}";
    return out;
}

ClassSpec class_spec_from_json(const std::string& text) {
    const json doc = detail::parse_json(text);
    ClassSpec spec;
    spec.norm.p = detail::as_norm_index(detail::require(doc, "p"), "p");
    if (spec.norm.p.is_inf()) throw FormatError("p must be finite");
    spec.norm.q = detail::as_norm_index(detail::require(doc, "q"), "q");
    spec.c = detail::as_real(detail::require(doc, "c"), "c");
    spec.c_out = detail::as_real(detail::require(doc, "c_out"), "c_out");
    spec.k = detail::as_count(detail::require(doc, "k"), "k");
    const json& dj = detail::require(doc, "dims");
    if (!dj.is_array()) throw FormatError("dims must be an array");
    for (const auto& d : dj) spec.dims.push_back(detail::as_count(d, "dims"));
    try {
        spec.validate();
    } catch (const PreconditionError& e) {
        throw FormatError(std::string("invalid class spec: ") + e.what());
    }
    return spec;
}

}  // namespace wnn
