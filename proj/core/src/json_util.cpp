#include "json_util.hpp"

#include <charconv>
#include <regex>

namespace wnn::detail {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Bare NaN / Infinity literals are not JSON; report them as what they are.
        static const std::regex non_finite(R"((^|[\s,\[:])-?(NaN|nan|Infinity|inf)\b)");
        if (std::regex_search(text, non_finite)) throw NonFiniteError("file contains a non-finite number");
        throw FormatError(std::string("malformed JSON: ") + e.what());
    } catch (const json::out_of_range& e) {
        throw NonFiniteError(std::string("number out of double range: ") + e.what());
    }
}

const json& require(const json& obj, const char* key) {
    if (!obj.is_object()) throw FormatError("expected a JSON object");
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string("missing field '") + key + "'");
    return *it;
}

double as_real(const json& v, const char* what) {
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s == "NaN" || s == "nan" || s == "inf" || s == "-inf" || s == "Infinity" || s == "-Infinity") {
            throw NonFiniteError(std::string(what) + " is non-finite");
        }
    }
    if (!v.is_number()) throw FormatError(std::string(what) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw NonFiniteError(std::string(what) + " is non-finite");
    return d;
}

std::size_t as_count(const json& v, const char* what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw FormatError(std::string(what) + " must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> as_real_vector(const json& v, const char* what) {
    if (!v.is_array()) throw FormatError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_real(e, what));
    return out;
}

NormIndex as_norm_index(const json& v, const char* what) {
    if (v.is_string()) return NormIndex::parse(v.get<std::string>());
    return NormIndex::finite(as_real(v, what));
}

void check_version(const json& obj) {
    const auto& v = require(obj, "version");
    if (!v.is_number_integer() || v.get<int>() != 1) throw FormatError("unsupported version (expected 1)");
}

void write_real(std::string& out, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

void write_real_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        write_real(out, v[i]);
    }
    out += ']';
}

void write_norm_index(std::string& out, const NormIndex& ix) {
    if (ix.is_inf()) {
        out += "\"inf\"";
    } else {
        write_real(out, ix.value());
    }
}

}  // namespace wnn::detail
