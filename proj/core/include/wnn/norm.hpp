#pragma once

#include <string>

namespace wnn {

/// Exponent of an l_p norm: either a finite real >= 1 or exactly infinity.
/// Infinity is a distinguished state, not a large float, so the max-branch of
/// the mixed norm is taken exactly.
class NormIndex {
public:
    static NormIndex finite(double value);
    static NormIndex infinity() noexcept { return NormIndex(); }

    /// Parses "inf" (any case) or a decimal number.
    static NormIndex parse(const std::string& text);

    bool is_inf() const noexcept { return inf_; }

    /// Finite exponent; throws PreconditionError when infinite.
    double value() const;

    /// 1/p, with 1/inf == 0 exactly.
    double reciprocal() const noexcept { return inf_ ? 0.0 : 1.0 / value_; }

    /// Holder conjugate: 1/p + 1/p* = 1, p* == inf when p == 1.
    NormIndex conjugate() const;

    std::string to_string() const;

    friend bool operator==(const NormIndex& a, const NormIndex& b) noexcept {
        return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
    }

private:
    NormIndex() = default;

    bool inf_ = true;
    double value_ = 0.0;
};

/// The (p, q) pair of a column-wise mixed norm. p is always finite.
struct NormSpec {
    NormIndex p = NormIndex::finite(1.0);
    NormIndex q = NormIndex::infinity();

    NormSpec() = default;
    NormSpec(double p_value, NormIndex q_index);

    static NormSpec l1_inf() { return NormSpec(1.0, NormIndex::infinity()); }
    static NormSpec l2_inf() { return NormSpec(2.0, NormIndex::infinity()); }
    static NormSpec frobenius() { return NormSpec(2.0, NormIndex::finite(2.0)); }

    double p_value() const { return p.value(); }
    NormIndex p_star() const { return p.conjugate(); }

    std::string to_string() const;

    friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

}  // namespace wnn
