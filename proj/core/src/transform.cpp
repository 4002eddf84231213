#include "wnn/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wnn/error.hpp"

namespace wnn {

namespace {

// Copy of m with rows [first_row, rows) multiplied by factor.
DenseMatrix scale_rows_from(const DenseMatrix& m, std::size_t first_row, double factor) {
    std::vector<double> e(m.entries().begin(), m.entries().end());
    for (std::size_t i = first_row * m.cols(); i < e.size(); ++i) e[i] *= factor;
    return DenseMatrix(m.rows(), m.cols(), std::move(e));
}

DenseMatrix single_bias_entry(std::size_t in_dim, std::size_t out_dim, double value) {
    DenseMatrix m(in_dim + 1, out_dim);
    m.set(0, 0, value);
    return m;
}

ClassSpec spec_of(const WnNetwork& net, const NormSpec& ns, double c, double c_out) {
    return ClassSpec{ns, c, c_out, net.depth(), net.dims()};
}

CanonicalizeResult collapse_to_constant(const WnNetwork& net, const NormSpec& ns, double c, double c_out, double tol,
                                        RewriteReport report) {
    const std::vector<double> zero(net.input_dim(), 0.0);
    const std::vector<double> v = eval(net, zero);
    const auto dims = net.dims();
    const std::size_t k = net.depth();

    // every hidden layer becomes the constant c on its first unit; the output
    // reads v from the bias or, cheaper when c > 1, as (v / c) times that unit
    DenseMatrix out(dims[k] + 1, dims[k + 1]);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (c > 1.0) {
            out.set(1, j, v[j] / c);
        } else {
            out.set(0, j, v[j]);
        }
    }
    const double out_norm = lpq_norm(out, ns);
    if (out_norm > c_out * (1.0 + tol) + 1e-12) {
        throw ConstantNotRepresentable("network is constant with output norm " + std::to_string(out_norm) +
                                       " above c_out " + std::to_string(c_out));
    }
    std::vector<AffineMap> layers;
    for (std::size_t i = 0; i < k; ++i) layers.emplace_back(single_bias_entry(dims[i], dims[i + 1], c));
    layers.emplace_back(std::move(out));

    report.constant_collapse = true;
    report.scale_factors.clear();
    WnNetwork result(net.input_dim(), std::move(layers), NormCertificate{ns, c, c_out});
    report.output_spec = spec_of(result, ns, c, c_out);
    return {std::move(result), std::move(report)};
}

}  // namespace

CanonicalizeResult canonicalize(const WnNetwork& net, const NormSpec& ns, double c, double c_out, double tol) {
    if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("c must be positive");
    if (!(c_out >= 0.0) || !std::isfinite(c_out)) throw PreconditionError("c_out must be nonnegative");
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");

    const std::size_t k = net.depth();
    const std::vector<double> norms = layer_norms(net, ns);
    for (std::size_t i = 0; i < k; ++i) {
        if (norms[i] > c * (1.0 + tol)) throw BudgetExceeded(i, norms[i], c);
    }
    if (norms[k] > c_out * (1.0 + tol) + 1e-12) throw BudgetExceeded(k, norms[k], c_out);

    RewriteReport report;
    report.input_spec = spec_of(net, ns, c, c_out);

    std::vector<DenseMatrix> params;
    for (const auto& l : net.layers()) params.push_back(l.params());

    // Layer 1 first: each step only shrinks the next layer's weight rows
    // (s >= 1), so downstream budgets stay valid.
    for (std::size_t i = 0; i < k; ++i) {
        const double n = lpq_norm(params[i], ns);
        if (n == 0.0) return collapse_to_constant(net, ns, c, c_out, tol, std::move(report));
        double s = c / n;
        // already at the budget up to rounding: keep entries bit-identical
        if (std::abs(n - c) <= 4.0 * std::numeric_limits<double>::epsilon() * c) s = 1.0;
        if (s != 1.0) {
            params[i] = params[i].scaled(s);
            params[i + 1] = scale_rows_from(params[i + 1], 1, 1.0 / s);
        }
        report.scale_factors.push_back(s);
    }

    std::vector<AffineMap> layers;
    for (auto& p : params) layers.emplace_back(std::move(p));
    WnNetwork result(net.input_dim(), std::move(layers), NormCertificate{ns, c, c_out});
    report.output_spec = spec_of(result, ns, c, c_out);
    return {std::move(result), std::move(report)};
}

WnNetwork scale_output(const WnNetwork& net, double a) {
    if (!std::isfinite(a)) throw NonFiniteError("scale factor must be finite");
    std::vector<AffineMap> layers = net.layers();
    layers.back() = AffineMap(layers.back().params().scaled(a));
    auto cert = net.certificate();
    if (cert) cert->c_out *= std::abs(a);
    return WnNetwork(net.input_dim(), std::move(layers), cert);
}

ClassSpec convert_norm_budget(const ClassSpec& spec, const NormSpec& target) {
    spec.validate();
    if (!spec.norm.q.is_inf()) throw PreconditionError("source class must use q = inf");
    if (!(target.p == spec.norm.p)) throw PreconditionError("target p must equal source p");
    if (target.q.is_inf()) throw PreconditionError("target q must be finite");
    const double inv_q = target.q.reciprocal();
    ClassSpec out = spec;
    out.norm = target;
    out.c = spec.c * std::pow(static_cast<double>(spec.max_hidden_width()), inv_q);
    const std::size_t d_out = spec.dims.back();
    out.c_out = d_out == 1 ? spec.c_out : std::pow(static_cast<double>(d_out), inv_q) * spec.c_out;
    return out;
}

WnNetwork widen(const WnNetwork& net, const std::vector<std::size_t>& target_dims) {
    const auto dims = net.dims();
    const std::size_t k = net.depth();
    if (target_dims.size() != dims.size()) throw PreconditionError("widen cannot change depth");
    if (target_dims.front() != dims.front() || target_dims.back() != dims.back()) {
        throw PreconditionError("widen cannot change input or output dimension");
    }
    for (std::size_t i = 1; i <= k; ++i) {
        if (target_dims[i] < dims[i]) {
            throw PreconditionError("widen cannot shrink hidden layer " + std::to_string(i) + " from " +
                                    std::to_string(dims[i]) + " to " + std::to_string(target_dims[i]));
        }
    }
    std::vector<AffineMap> layers;
    for (std::size_t li = 0; li <= k; ++li) {
        const DenseMatrix& old = net.layer(li).params();
        DenseMatrix m(target_dims[li] + 1, target_dims[li + 1]);
        for (std::size_t r = 0; r < old.rows(); ++r) {
            for (std::size_t c = 0; c < old.cols(); ++c) m.set(r, c, old(r, c));
        }
        layers.emplace_back(std::move(m));
    }
    return WnNetwork(net.input_dim(), std::move(layers), net.certificate());
}

WnNetwork deepen(const WnNetwork& net, std::size_t target_depth, const NormSpec& ns) {
    const std::size_t k = net.depth();
    if (target_depth < k) {
        throw PreconditionError("target depth " + std::to_string(target_depth) + " is below current depth " +
                                std::to_string(k));
    }
    if (net.output_dim() != 1) throw PreconditionError("deepen requires a scalar-output network");
    if (target_depth == k) return net;

    const AffineMap& last = net.layers().back();
    const std::vector<double> col = last.params().column(0);
    const double alpha = lp_norm(col, ns.p);

    std::vector<AffineMap> layers(net.layers().begin(), net.layers().end() - 1);

    // old output y as the hidden pair (y, -y) / alpha
    DenseMatrix pair(last.in_dim() + 1, 2);
    for (std::size_t r = 0; r < col.size(); ++r) {
        const double v = alpha > 0.0 ? col[r] / alpha : (r == 0 ? 1.0 : 0.0);
        pair.set(r, 0, v);
        pair.set(r, 1, -v);
    }
    layers.emplace_back(std::move(pair));

    for (std::size_t i = k + 1; i < target_depth; ++i) {
        DenseMatrix id(3, 2);
        id.set(1, 0, 1.0);
        id.set(2, 1, 1.0);
        layers.emplace_back(std::move(id));
    }

    DenseMatrix out(3, 1);
    out.set(1, 0, alpha);
    out.set(2, 0, -alpha);
    layers.emplace_back(std::move(out));

    WnNetwork raw(net.input_dim(), std::move(layers));
    const auto& cert = net.certificate();
    if (!cert || !(cert->norm == ns)) return raw;

    const double c_new = std::max(cert->c, std::pow(2.0, ns.q.reciprocal()));
    const double c_out_new = std::pow(2.0, 1.0 / ns.p.value()) * cert->c_out;
    return canonicalize(raw, ns, c_new, c_out_new).net;
}

WnNetwork constant_network(double C0, double gamma0, std::size_t k, const std::vector<std::size_t>& dims,
                           const NormSpec& ns) {
    if (!(C0 > 0.0) || !std::isfinite(C0)) throw PreconditionError("C0 must be positive");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw PreconditionError("gamma0 must be positive");
    if (k < 1) throw PreconditionError("constant network needs k >= 1");
    if (dims.size() != k + 2) throw PreconditionError("dims must have k + 2 entries");
    if (std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; })) {
        throw PreconditionError("all dims must be >= 1");
    }
    if (dims.back() != 1) throw PreconditionError("constant network has scalar output");

    // a0 = ||(1, 0, ..., 0)||
    const double a0 = lpq_norm(single_bias_entry(dims[0], 1, 1.0), ns);
    double first = gamma0 / (a0 * C0);

    auto build = [&](double first_entry) {
        std::vector<AffineMap> layers;
        layers.emplace_back(single_bias_entry(dims[0], dims[1], first_entry));
        for (std::size_t i = 1; i < k; ++i) layers.emplace_back(single_bias_entry(dims[i], dims[i + 1], 1.0));
        layers.emplace_back(single_bias_entry(dims[k], 1, C0));
        return WnNetwork(dims[0], std::move(layers));
    };
    auto product = [&](const WnNetwork& n) {
        double p = 1.0;
        for (double v : layer_norms(n, ns)) p *= v;
        return p;
    };

    WnNetwork net = build(first);
    // rounding in gamma0 / (a0 C0) can leave the product an ulp above gamma0
    while (product(net) > gamma0) {
        first = std::nextafter(first, 0.0);
        net = build(first);
    }
    return net;
}

}  // namespace wnn
