#include <charconv>

#include "wnn/cli.hpp"
#include "wnn/error.hpp"

namespace wnn::cli {

WnNetwork motivating_network() {
    std::vector<AffineMap> layers;
    layers.push_back(AffineMap::from_bias_weights(std::vector<double>{1.0, -1.0}, {{-1.0}, {-1.0}}));
    layers.push_back(AffineMap::from_bias_weights(std::vector<double>{1.0}, {{-1.0, -1.0}}));
    return WnNetwork(1, std::move(layers));
}

WnNetwork motivating_rescaled(double t) {
    const WnNetwork f = motivating_network();
    std::vector<AffineMap> layers;
    layers.emplace_back(f.layer(0).params().scaled(1.0 / t));
    layers.emplace_back(f.layer(1).params().scaled(t));
    return WnNetwork(1, std::move(layers));
}

std::vector<MotivatingRow> motivating_table(std::size_t points) {
    if (points < 2) throw PreconditionError("grid needs at least two points");
    const WnNetwork f = motivating_network();
    const WnNetwork g = motivating_rescaled(100.0);
    std::vector<MotivatingRow> rows;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        const double in[1] = {x};
        const double fx = eval_scalar(f, in);
        const double gx = eval_scalar(g, in);
        rows.push_back({x, fx, gx, gx - fx});
    }
    return rows;
}

namespace {

std::size_t parse_count(std::string_view s, const std::string& whole) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw FormatError("--sweep: cannot parse '" + whole + "', expected k=A..B[,step]");
    }
    return v;
}

}  // namespace

SweepRange parse_sweep(const std::string& text) {
    std::string_view s = text;
    if (s.substr(0, 2) != "k=") throw FormatError("--sweep: expected k=A..B[,step], got '" + text + "'");
    s.remove_prefix(2);
    const auto dots = s.find("..");
    if (dots == std::string_view::npos) throw FormatError("--sweep: missing '..' in '" + text + "'");
    SweepRange r;
    r.first = parse_count(s.substr(0, dots), text);
    std::string_view rest = s.substr(dots + 2);
    if (const auto comma = rest.find(','); comma != std::string_view::npos) {
        r.step = parse_count(rest.substr(comma + 1), text);
        rest = rest.substr(0, comma);
    }
    r.last = parse_count(rest, text);
    if (r.step == 0) throw FormatError("--sweep: step must be positive");
    if (r.last < r.first) throw FormatError("--sweep: empty range in '" + text + "'");
    return r;
}

}  // namespace wnn::cli
