#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnn/network.hpp"

namespace wnn {

/// Which formula (and which case inside it) produced a bound.
enum class BoundBranch {
    Prop1Arm1,          // bias-as-neuron reduction: 2 max(1,c^k) sqrt(k+2+log(m1+1))
    Prop1Arm2,          // sqrt(k log 16) sum c^i + c^k (...)
    Prop2SmallP,        // p in (1, 2]
    Prop2OtherP,        // p == 1 or p > 2
    GenBoundP1,         // generalization, p == 1
    GenBoundSmallP,     // generalization, p in (1, 2]
    GenBoundLargeP,     // generalization, p > 2
    Corollary,
};

std::string_view to_string(BoundBranch b);

enum class Combine { Sum, Min };

struct BoundTerm {
    std::string name;
    double value = 0.0;
};

/// A closed-form bound with its ingredients. `value` is the sum (or min) of
/// `terms`; `aux` carries auxiliary constants and alternate forms that do not
/// enter `value`.
struct BoundReport {
    double value = 0.0;
    BoundBranch branch = BoundBranch::Prop2OtherP;
    /// Set by bound_auto when it picked among several formulas.
    std::optional<BoundBranch> via;
    Combine combine = Combine::Sum;
    ClassSpec spec;
    std::size_t n = 0;
    std::size_t m1 = 0;
    std::vector<BoundTerm> terms;
    std::vector<BoundTerm> aux;
    std::string note;

    /// Recomputes value from terms.
    double recombined() const;
    std::optional<double> aux_value(std::string_view name) const;
};

/// Sample-dependent constant of the linear first layer:
///   p in (1, 2]: sqrt(n) * min(sqrt(p*-1), sqrt(2 log 2m1)) * m1^{1/p*}
///   otherwise:   sqrt(2 n log 2m1) * m1^{1/p*}
double a_constant(double p, std::size_t m1, std::size_t n);

/// Width-independent bound for p == 1 (any q).
BoundReport bound_prop1(const ClassSpec& spec, std::size_t n);

/// Two-branch bound for general (p, q) with width factor prod d_l^{[1/p* - 1/q]_+}.
BoundReport bound_prop2(const ClassSpec& spec, std::size_t n);

/// Tightest applicable upper bound: min(prop1, prop2) for p == 1, else prop2.
BoundReport bound_auto(const ClassSpec& spec, std::size_t n);

/// Largest c^k c_out under which n points are shattered with unit margin:
/// (log2 n)^{1/p} n^{1/p + 1/q} d^{-(k-2)[1/p* - 1/q]_+}.
double shattering_budget(double p, const NormIndex& q, std::size_t d, std::size_t k, std::size_t n);

/// Excess-risk bound sqrt(log(1/delta)/(2n)) + 2 R, with R the Rademacher
/// term of the matching part (p == 1, p in (1,2], p > 2).
BoundReport generalization_bound(const ClassSpec& spec, std::size_t n, double delta);

/// sqrt(log(1/delta)/(2n)) + 4 c_out a0 / sqrt(n) * sqrt(k + 2 + log(m1 + 1)),
/// valid when c^k <= a0. p == 1 only.
BoundReport corollary_bound(const ClassSpec& spec, std::size_t n, double delta, double a0);

struct ResidualBudget {
    double c;   // 1 + v0 / k
    double a0;  // e^{v0} >= c^k
};
ResidualBudget residual_budget(double v0, std::size_t k);

struct ApproxPlan {
    std::size_t wid_k = 0;
    std::size_t k_max = 0;
    double inner = 0.0;  // C_r (log t)^{-2(m1+1)/(m1+4)} t^{2(m1+3)/(m1+4)}, t = c_out / L
};

/// Width prescription for approximating an L-Lipschitz function at depth k;
/// C_r is caller supplied. Requires c_out > L and 1 <= k <= k_max.
ApproxPlan approx_plan(std::size_t m1, double L, double c_out, std::size_t k, double Cr);

/// C L (c_out/L)^{-2/(m1+1)} log(c_out/L). Requires c_out > L.
double approx_error_bound(std::size_t m1, double L, double c_out, double C);

enum class Regime { A, B, C, D };

struct RegimeGrowth {
    Regime regime;
    double value;
};

std::string_view to_string(Regime r);

/// Architecture dependence of the generalization bound of the approximating
/// class, constants set to 1:
///   (a) p=1, q=inf      sqrt(k) c_out
///   (b) p=1, q<inf      sqrt(k) c_out wid^{k/q}
///   (c) p>1, q in (p*,inf]  sqrt(k) c_out (1+wid)^{k/p*}
///   (d) p>1, q in [1,p*]    sqrt(k) c_out (1+wid)^{k/q}
RegimeGrowth dependence_regime(double p, const NormIndex& q, std::size_t k, double c_out, std::size_t wid);

/// CSV header and row for bound sweeps.
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);

}  // namespace wnn
