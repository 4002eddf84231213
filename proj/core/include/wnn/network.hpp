#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnn/matrix.hpp"
#include "wnn/norm.hpp"

namespace wnn {

inline double relu(double u) noexcept { return u > 0.0 ? u : 0.0; }

/// One affine layer stored as the combined bias+weight matrix of shape
/// (in_dim + 1) x out_dim. Row 0 holds the bias, row i+1 the coefficients of
/// input unit i; column j fully determines output unit j.
class AffineMap {
public:
    explicit AffineMap(DenseMatrix params);

    /// Builds from a bias vector and weights[j][i] (output j, input i).
    static AffineMap from_bias_weights(std::span<const double> bias,
                                       const std::vector<std::vector<double>>& weights);

    std::size_t in_dim() const noexcept { return params_.rows() - 1; }
    std::size_t out_dim() const noexcept { return params_.cols(); }

    const DenseMatrix& params() const noexcept { return params_; }

    double bias(std::size_t j) const noexcept { return params_(0, j); }
    /// Coefficient from input unit i to output unit j.
    double weight(std::size_t i, std::size_t j) const noexcept { return params_(i + 1, j); }

    /// output_j(u) = bias_j + sum_i weight(i, j) * u_i
    std::vector<double> apply(std::span<const double> u) const;

    friend bool operator==(const AffineMap&, const AffineMap&) = default;

private:
    DenseMatrix params_;
};

/// Optional statement that a network belongs to a normalized class:
/// every hidden layer has norm c and the output layer norm is at most c_out.
struct NormCertificate {
    NormSpec norm;
    double c = 1.0;
    double c_out = 1.0;

    friend bool operator==(const NormCertificate&, const NormCertificate&) = default;
};

/// A ReLU network x -> T_{k+1} o relu o T_k o ... o relu o T_1 (x).
class WnNetwork {
public:
    WnNetwork(std::size_t input_dim, std::vector<AffineMap> layers,
              std::optional<NormCertificate> certificate = std::nullopt);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return layers_.back().out_dim(); }
    /// Number of hidden layers k.
    std::size_t depth() const noexcept { return layers_.size() - 1; }

    const std::vector<AffineMap>& layers() const noexcept { return layers_; }
    const AffineMap& layer(std::size_t i) const { return layers_.at(i); }
    const std::optional<NormCertificate>& certificate() const noexcept { return certificate_; }

    /// (d_0, d_1, ..., d_{k+1})
    std::vector<std::size_t> dims() const;

    WnNetwork with_certificate(std::optional<NormCertificate> cert) const;

    friend bool operator==(const WnNetwork&, const WnNetwork&) = default;

private:
    std::size_t input_dim_;
    std::vector<AffineMap> layers_;
    std::optional<NormCertificate> certificate_;
};

/// The class N^{k,d}_{p,q,c,c_out}.
struct ClassSpec {
    NormSpec norm;
    double c = 1.0;
    double c_out = 1.0;
    std::size_t k = 0;
    std::vector<std::size_t> dims;  // length k + 2

    /// Throws PreconditionError when dims/k/budgets are inconsistent.
    void validate() const;

    std::size_t input_dim() const { return dims.front(); }
    std::size_t max_hidden_width() const;

    friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

/// Forward pass. The bias of every layer rides on an implicit constant-1
/// input unit; no activation after the final layer.
std::vector<double> eval(const WnNetwork& net, std::span<const double> x);

/// Scalar-output convenience; throws DimensionError when output_dim != 1.
double eval_scalar(const WnNetwork& net, std::span<const double> x);

/// Post-ReLU activations of every hidden layer, in order.
std::vector<std::vector<double>> hidden_activations(const WnNetwork& net, std::span<const double> x);

/// ||T_i||_{p,q} of every layer's combined bias+weight matrix.
std::vector<double> layer_norms(const WnNetwork& net, const NormSpec& ns);

/// True when `value` equals `target` up to relative tol (absolute 1e-12 near zero).
bool norm_matches(double value, double target, double tol);

enum class HiddenNormRule {
    Exact,   // every hidden norm == c (class definition)
    AtMost,  // every hidden norm <= c (feasible set before re-canonicalization)
};

struct MembershipReport {
    bool dims_match = false;
    bool depth_match = false;
    bool hidden_norms_ok = false;
    bool output_norm_ok = false;
    std::vector<double> norms;
    std::optional<std::size_t> offending_layer;

    bool pass() const noexcept { return dims_match && depth_match && hidden_norms_ok && output_norm_ok; }
    std::string summary() const;
};

MembershipReport class_check(const WnNetwork& net, const ClassSpec& spec, double tol,
                             HiddenNormRule rule = HiddenNormRule::Exact);

}  // namespace wnn
