#include "wnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wnn/error.hpp"
#include "wnn/io.hpp"

namespace wnn {

AffineMap::AffineMap(DenseMatrix params) : params_(std::move(params)) {
    if (params_.rows() < 2) throw DimensionError("affine map needs at least one input unit");
}

AffineMap AffineMap::from_bias_weights(std::span<const double> bias, const std::vector<std::vector<double>>& weights) {
    const std::size_t out = bias.size();
    if (out == 0 || weights.size() != out) {
        throw DimensionError("bias has " + std::to_string(out) + " entries but weights has " +
                             std::to_string(weights.size()) + " rows");
    }
    const std::size_t in = weights.front().size();
    if (in == 0) throw DimensionError("weights rows must be nonempty");
    std::vector<double> e((in + 1) * out);
    for (std::size_t j = 0; j < out; ++j) {
        if (weights[j].size() != in) throw DimensionError("ragged weight rows");
        e[j] = bias[j];
        for (std::size_t i = 0; i < in; ++i) e[(i + 1) * out + j] = weights[j][i];
    }
    return AffineMap(DenseMatrix(in + 1, out, std::move(e)));
}

std::vector<double> AffineMap::apply(std::span<const double> u) const {
    if (u.size() != in_dim()) {
        throw DimensionError("layer expects " + std::to_string(in_dim()) + " inputs, got " + std::to_string(u.size()));
    }
    const std::size_t out = out_dim();
    auto b = params_.row(0);
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        auto w = params_.row(i + 1);
        for (std::size_t j = 0; j < out; ++j) y[j] += w[j] * ui;
    }
    return y;
}

WnNetwork::WnNetwork(std::size_t input_dim, std::vector<AffineMap> layers, std::optional<NormCertificate> certificate)
    : input_dim_(input_dim), layers_(std::move(layers)), certificate_(std::move(certificate)) {
    if (input_dim_ == 0) throw DimensionError("input_dim must be positive");
    if (layers_.empty()) throw DimensionError("network needs at least one layer");
    if (layers_[0].in_dim() != input_dim_) {
        throw DimensionError("layer 1 in_dim " + std::to_string(layers_[0].in_dim()) + " != input_dim " +
                             std::to_string(input_dim_));
    }
    for (std::size_t i = 1; i < layers_.size(); ++i) {
        if (layers_[i].in_dim() != layers_[i - 1].out_dim()) {
            throw DimensionError("layer " + std::to_string(i + 1) + " in_dim " + std::to_string(layers_[i].in_dim()) +
                                 " != layer " + std::to_string(i) + " out_dim " +
                                 std::to_string(layers_[i - 1].out_dim()));
        }
    }
    if (certificate_ && (!(certificate_->c > 0.0) || !(certificate_->c_out >= 0.0) || !std::isfinite(certificate_->c) ||
                         !std::isfinite(certificate_->c_out))) {
        throw FormatError("certificate budgets must be finite with c > 0, c_out >= 0");
    }
}

std::vector<std::size_t> WnNetwork::dims() const {
    std::vector<std::size_t> d{input_dim_};
    for (const auto& l : layers_) d.push_back(l.out_dim());
    return d;
}

WnNetwork WnNetwork::with_certificate(std::optional<NormCertificate> cert) const {
    return WnNetwork(input_dim_, layers_, std::move(cert));
}

void ClassSpec::validate() const {
    if (dims.size() != k + 2) {
        throw PreconditionError("dims has " + std::to_string(dims.size()) + " entries, expected k + 2 = " +
                                std::to_string(k + 2));
    }
    if (std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; })) {
        throw PreconditionError("all dims must be >= 1");
    }
    if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("c must be positive");
    if (!(c_out >= 0.0) || !std::isfinite(c_out)) throw PreconditionError("c_out must be nonnegative");
}

std::size_t ClassSpec::max_hidden_width() const {
    std::size_t w = 1;
    for (std::size_t i = 1; i <= k; ++i) w = std::max(w, dims.at(i));
    return w;
}

std::vector<double> eval(const WnNetwork& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) {
        throw DimensionError("input has " + std::to_string(x.size()) + " entries, network expects " +
                             std::to_string(net.input_dim()));
    }
    const auto& layers = net.layers();
    std::vector<double> h = layers[0].apply(x);
    for (std::size_t i = 1; i < layers.size(); ++i) {
        for (double& v : h) v = relu(v);
        h = layers[i].apply(h);
    }
    return h;
}

double eval_scalar(const WnNetwork& net, std::span<const double> x) {
    if (net.output_dim() != 1) throw DimensionError("network output is not scalar");
    return eval(net, x)[0];
}

std::vector<std::vector<double>> hidden_activations(const WnNetwork& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) throw DimensionError("input dimension mismatch");
    std::vector<std::vector<double>> acts;
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t i = 0; i + 1 < net.layers().size(); ++i) {
        h = net.layer(i).apply(h);
        for (double& v : h) v = relu(v);
        acts.push_back(h);
    }
    return acts;
}

std::vector<double> layer_norms(const WnNetwork& net, const NormSpec& ns) {
    std::vector<double> out;
    out.reserve(net.layers().size());
    for (const auto& l : net.layers()) out.push_back(lpq_norm(l.params(), ns));
    return out;
}

bool norm_matches(double value, double target, double tol) {
    const double diff = std::abs(value - target);
    return diff <= tol * std::abs(target) || diff <= 1e-12;
}

std::string MembershipReport::summary() const {
    std::ostringstream os;
    os << "dims_match=" << (dims_match ? "true" : "false") << "\n";
    os << "depth_match=" << (depth_match ? "true" : "false") << "\n";
    os << "hidden_norms_ok=" << (hidden_norms_ok ? "true" : "false") << "\n";
    os << "output_norm_ok=" << (output_norm_ok ? "true" : "false") << "\n";
    os << "norms=";
    for (std::size_t i = 0; i < norms.size(); ++i) os << (i ? "," : "") << format_number(norms[i]);
    os << "\n";
    if (offending_layer) os << "offending_layer=" << *offending_layer + 1 << "\n";
    os << "pass=" << (pass() ? "true" : "false") << "\n";
    return os.str();
}

MembershipReport class_check(const WnNetwork& net, const ClassSpec& spec, double tol, HiddenNormRule rule) {
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
    MembershipReport rep;
    rep.depth_match = net.depth() == spec.k;
    rep.dims_match = net.dims() == spec.dims;
    rep.norms = layer_norms(net, spec.norm);

    rep.hidden_norms_ok = true;
    for (std::size_t i = 0; i + 1 < rep.norms.size(); ++i) {
        const double n = rep.norms[i];
        const bool ok = rule == HiddenNormRule::Exact ? norm_matches(n, spec.c, tol)
                                                      : n <= spec.c * (1.0 + tol) + 1e-12;
        if (!ok) {
            rep.hidden_norms_ok = false;
            if (!rep.offending_layer) rep.offending_layer = i;
        }
    }
    const double out = rep.norms.back();
    rep.output_norm_ok = out <= spec.c_out * (1.0 + tol) + 1e-12;
    if (!rep.output_norm_ok && !rep.offending_layer) rep.offending_layer = rep.norms.size() - 1;
    return rep;
}

}  // namespace wnn
