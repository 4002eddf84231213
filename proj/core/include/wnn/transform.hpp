#pragma once

#include <cstddef>
#include <vector>

#include "wnn/network.hpp"

namespace wnn {

struct RewriteReport {
    ClassSpec input_spec;
    ClassSpec output_spec;
    /// Per hidden layer, the factor s_i applied to layer i (and divided out
    /// of layer i+1's weight rows). Empty when the network collapsed to a
    /// constant.
    std::vector<double> scale_factors;
    bool constant_collapse = false;
    bool function_preserving = true;
};

struct CanonicalizeResult {
    WnNetwork net;
    RewriteReport report;
};

/// Rescales hidden layers so that every hidden norm is exactly `c` without
/// changing the represented function, and attaches the certificate
/// (ns, c, c_out). Requires hidden norms <= c and output norm <= c_out (up to
/// relative `tol`); throws BudgetExceeded otherwise.
///
/// A hidden layer of norm zero makes the network constant; the constant is
/// re-expressed with a norm-c hidden stack and a bias-only output layer, or
/// ConstantNotRepresentable is thrown if it does not fit in c_out.
CanonicalizeResult canonicalize(const WnNetwork& net, const NormSpec& ns, double c, double c_out,
                                double tol = 1e-9);

/// Multiplies the output layer by `a`; a certificate's c_out scales by |a|.
WnNetwork scale_output(const WnNetwork& net, double a);

/// Budgets (c~, c~_out) of the (p, q) class that contains the given (p, inf)
/// class: c~ = c * max_i d_i^{1/q}, c~_out = d_{k+1}^{1/q} * c_out.
ClassSpec convert_norm_budget(const ClassSpec& spec, const NormSpec& target);

/// Appends dead units (zero in- and out-coefficients) after the existing
/// units of each hidden layer. target_dims is the full (d_0, ..., d_{k+1}).
WnNetwork widen(const WnNetwork& net, const std::vector<std::size_t>& target_dims);

/// Adds hidden layers until depth == target_depth. Scalar output only.
///
/// The old output y becomes a hidden pair (y, -y) / ||T_{k+1}||_p whose ReLUs
/// are carried by 2x2 identity layers and recombined as
/// ||T_{k+1}||_p * (relu(y) - relu(-y)) = y. Inserted identity layers have
/// (p, inf) norm 1 and (p, q) norm 2^{1/q}. When the input carries a
/// certificate under `ns`, the result is re-canonicalized and certified with
/// c~ = max(c, 2^{1/q}) and c~_out = 2^{1/p} * c_out.
WnNetwork deepen(const WnNetwork& net, std::size_t target_depth, const NormSpec& ns);

/// A network of depth k computing the constant C0 everywhere whose layer-norm
/// product is at most gamma0: the first layer carries gamma0 / (a0 * C0) as a
/// single bias entry (a0 = norm of (1, 0, ..., 0)), middle layers a unit bias
/// entry, and the output layer is the bare bias C0.
WnNetwork constant_network(double C0, double gamma0, std::size_t k, const std::vector<std::size_t>& dims,
                           const NormSpec& ns);

}  // namespace wnn
