#include "wnn/norm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "wnn/error.hpp"
#include "wnn/io.hpp"

namespace wnn {

NormIndex NormIndex::finite(double value) {
    if (!std::isfinite(value) || value < 1.0) {
        throw PreconditionError("norm exponent must be >= 1, got " + format_number(value));
    }
    NormIndex ix;
    ix.inf_ = false;
    ix.value_ = value;
    return ix;
}

NormIndex NormIndex::parse(const std::string& text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "inf" || lower == "infinity") return infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("cannot parse norm exponent '" + text + "'");
    }
    return finite(v);
}

double NormIndex::value() const {
    if (inf_) throw PreconditionError("exponent is infinite");
    return value_;
}

NormIndex NormIndex::conjugate() const {
    if (inf_) return finite(1.0);
    if (value_ == 1.0) return infinity();
    return finite(value_ / (value_ - 1.0));
}

std::string NormIndex::to_string() const { return inf_ ? "inf" : format_number(value_); }

NormSpec::NormSpec(double p_value, NormIndex q_index) : p(NormIndex::finite(p_value)), q(q_index) {}

std::string NormSpec::to_string() const { return "(" + p.to_string() + "," + q.to_string() + ")"; }

}  // namespace wnn
