#include "wnn/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wnn/error.hpp"
#include "wnn/io.hpp"

namespace wnn {

namespace {

const double kLog16 = std::log(16.0);

double massart(std::size_t m1) { return std::sqrt(2.0 * std::log(2.0 * static_cast<double>(m1))); }

// 1 / p*
double inv_conjugate(double p) { return 1.0 - 1.0 / p; }

// [1/p* - 1/q]_+
// [1/p* - 1/q]_+, snapped to 0 when q == p* up to rounding
double width_exponent(double p, const NormIndex& q) {
    const double a = inv_conjugate(p), b = q.reciprocal();
    if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(a, b)) return 0.0;
    return std::max(a - b, 0.0);
}

double width_exponent(const NormSpec& ns) { return width_exponent(ns.p_value(), ns.q); }

// prod_{l=first}^{k} d_l^e, exactly 1 when e == 0
double width_product(const ClassSpec& spec, std::size_t first, double e) {
    if (e == 0.0) return 1.0;
    double prod = 1.0;
    for (std::size_t l = first; l <= spec.k; ++l) prod *= std::pow(static_cast<double>(spec.dims[l]), e);
    return prod;
}

// m1^{1/p*}, exactly 1 for p == 1
double input_factor(std::size_t m1, double p) {
    const double ip = inv_conjugate(p);
    return ip == 0.0 ? 1.0 : std::pow(static_cast<double>(m1), ip);
}

// sum_{i=1}^{k+1} c^{k-i+1} prod_{l=i}^k d_l^e
double depth_sum(const ClassSpec& spec, double e) {
    double s = 0.0;
    for (std::size_t i = 1; i <= spec.k + 1; ++i) {
        s += std::pow(spec.c, static_cast<double>(spec.k + 1 - i)) * width_product(spec, i, e);
    }
    return s;
}

double power_sum(double c, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += std::pow(c, static_cast<double>(i));
    return s;
}

void check_n(std::size_t n) {
    if (n < 1) throw PreconditionError("sample size n must be >= 1");
}

void require_p1(const ClassSpec& spec, const char* what) {
    if (spec.norm.p_value() != 1.0) {
        throw UnsupportedNorm(std::string(what) + " requires p = 1, got p = " + spec.norm.p.to_string());
    }
}

bool small_p(double p) { return p > 1.0 && p <= 2.0; }

double confidence_term(std::size_t n, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0, 1)");
    return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

BoundReport base_report(const ClassSpec& spec, std::size_t n) {
    BoundReport r;
    r.spec = spec;
    r.n = n;
    r.m1 = spec.input_dim();
    return r;
}

}  // namespace

std::string_view to_string(BoundBranch b) {
    switch (b) {
        case BoundBranch::Prop1Arm1: return "prop1_arm1";
        case BoundBranch::Prop1Arm2: return "prop1_arm2";
        case BoundBranch::Prop2SmallP: return "prop2_small_p";
        case BoundBranch::Prop2OtherP: return "prop2_other_p";
        case BoundBranch::GenBoundP1: return "gen_p1";
        case BoundBranch::GenBoundSmallP: return "gen_small_p";
        case BoundBranch::GenBoundLargeP: return "gen_large_p";
        case BoundBranch::Corollary: return "corollary";
    }
    return "unknown";
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::A: return "a";
        case Regime::B: return "b";
        case Regime::C: return "c";
        case Regime::D: return "d";
    }
    return "unknown";
}

double BoundReport::recombined() const {
    if (terms.empty()) return 0.0;
    if (combine == Combine::Min) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& t : terms) m = std::min(m, t.value);
        return m;
    }
    double s = 0.0;
    for (const auto& t : terms) s += t.value;
    return s;
}

std::optional<double> BoundReport::aux_value(std::string_view name) const {
    for (const auto& t : aux) {
        if (t.name == name) return t.value;
    }
    return std::nullopt;
}

double a_constant(double p, std::size_t m1, std::size_t n) {
    if (m1 < 1 || n < 1) throw PreconditionError("m1 and n must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("p must be a finite value >= 1");
    const double base = small_p(p) ? std::min(std::sqrt(p / (p - 1.0) - 1.0), massart(m1)) : massart(m1);
    return std::sqrt(static_cast<double>(n)) * base * input_factor(m1, p);
}

BoundReport bound_prop1(const ClassSpec& spec, std::size_t n) {
    spec.validate();
    check_n(n);
    require_p1(spec, "bound_prop1");
    const double k = static_cast<double>(spec.k);
    const std::size_t m1 = spec.input_dim();
    const double ck = std::pow(spec.c, k);
    const double scale = spec.c_out / std::sqrt(static_cast<double>(n));

    const double arm1 = 2.0 * std::max(1.0, ck) * std::sqrt(k + 2.0 + std::log(static_cast<double>(m1) + 1.0));
    const double depth = std::sqrt(k * kLog16);
    const double arm2 = depth * power_sum(spec.c, spec.k) + ck * (massart(m1) + depth);

    BoundReport r = base_report(spec, n);
    r.combine = Combine::Min;
    r.terms = {{"arm1", scale * arm1}, {"arm2", scale * arm2}};
    r.value = r.recombined();
    r.branch = scale * arm1 <= scale * arm2 ? BoundBranch::Prop1Arm1 : BoundBranch::Prop1Arm2;
    r.aux = {{"log16_factor", k * kLog16}};
    return r;
}

BoundReport bound_prop2(const ClassSpec& spec, std::size_t n) {
    spec.validate();
    check_n(n);
    const double p = spec.norm.p_value();
    const std::size_t m1 = spec.input_dim();
    const double k1_log16 = (static_cast<double>(spec.k) + 1.0) * kLog16;
    const double e = width_exponent(spec.norm);
    const double ck = std::pow(spec.c, static_cast<double>(spec.k));
    const double wp = width_product(spec, 1, e);
    const double mf = input_factor(m1, p);
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    const double term1 = spec.c_out * std::sqrt(k1_log16 / static_cast<double>(n)) * depth_sum(spec, e);
    const double linear = small_p(p) ? std::min(std::sqrt(p / (p - 1.0) - 1.0), massart(m1)) : massart(m1);
    const double term2 = spec.c_out * ck / sqrt_n * wp * mf * (linear + std::sqrt(k1_log16));

    // the proof's final display: separates the (m1^{1/p*} + 1) and +1 terms
    // and keeps the sample constant A unsplit
    double s_k = 0.0;
    for (std::size_t i = 2; i <= spec.k; ++i) {
        s_k += std::pow(spec.c, static_cast<double>(spec.k + 1 - i)) * width_product(spec, i, e);
    }
    s_k += (mf + 1.0) * ck * wp;
    const double proof_variant = spec.c_out * std::sqrt(k1_log16 / static_cast<double>(n)) * (s_k + 1.0) +
                                 spec.c_out * ck * wp * a_constant(p, m1, n) / static_cast<double>(n);

    BoundReport r = base_report(spec, n);
    r.combine = Combine::Sum;
    r.branch = small_p(p) ? BoundBranch::Prop2SmallP : BoundBranch::Prop2OtherP;
    r.terms = {{"depth_term", term1}, {"input_term", term2}};
    r.value = r.recombined();
    r.aux = {{"log16_factor", k1_log16},
             {"width_exponent", e},
             {"a_constant", a_constant(p, m1, n)},
             {"proof_variant", proof_variant}};
    return r;
}

BoundReport bound_auto(const ClassSpec& spec, std::size_t n) {
    BoundReport two = bound_prop2(spec, n);
    if (spec.norm.p_value() != 1.0) {
        two.via = two.branch;
        return two;
    }
    BoundReport one = bound_prop1(spec, n);
    BoundReport& best = one.value <= two.value ? one : two;
    best.via = best.branch;
    best.aux.push_back({"prop1_value", one.value});
    best.aux.push_back({"prop2_value", two.value});
    return best;
}

double shattering_budget(double p, const NormIndex& q, std::size_t d, std::size_t k, std::size_t n) {
    if (n < 2) throw PreconditionError("shattering budget needs n >= 2");
    if (k < 2) throw PreconditionError("shattering budget needs k >= 2");
    if (d < 1) throw PreconditionError("width d must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("p must be a finite value >= 1");
    const double nn = static_cast<double>(n);
    const double e = width_exponent(p, q);
    double value = std::pow(std::log2(nn), 1.0 / p) * std::pow(nn, 1.0 / p + q.reciprocal());
    if (e != 0.0) value *= std::pow(static_cast<double>(d), -static_cast<double>(k - 2) * e);
    return value;
}

BoundReport generalization_bound(const ClassSpec& spec, std::size_t n, double delta) {
    spec.validate();
    check_n(n);
    const double conf = confidence_term(n, delta);
    const double p = spec.norm.p_value();
    const std::size_t m1 = spec.input_dim();
    const double k = static_cast<double>(spec.k);
    const double k1_log16 = (k + 1.0) * kLog16;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double ck = std::pow(spec.c, k);

    BoundReport r = base_report(spec, n);
    r.combine = Combine::Sum;
    r.aux = {{"log16_factor", k1_log16}, {"prop1_log16_factor", k * kLog16}};

    if (p == 1.0) {
        const double arm1 = 2.0 * std::max(1.0, ck) * std::sqrt(k + 2.0 + std::log(static_cast<double>(m1) + 1.0));
        const double depth = std::sqrt(k1_log16);
        const double arm2 = depth * power_sum(spec.c, spec.k) + ck * (massart(m1) + depth);
        const double rad = spec.c_out / sqrt_n * std::min(arm1, arm2);
        r.branch = BoundBranch::GenBoundP1;
        r.terms = {{"confidence", conf}, {"complexity", 2.0 * rad}};
        r.aux.push_back({"arm1", spec.c_out / sqrt_n * arm1});
        r.aux.push_back({"arm2", spec.c_out / sqrt_n * arm2});
    } else {
        const double e = width_exponent(spec.norm);
        const double wp = width_product(spec, 1, e);
        const double mf = input_factor(m1, p);
        // the two parts place the min(sqrt(p*-1), sqrt(2 log 2m1)) factor
        // opposite to the Rademacher bound; kept as stated
        const double linear_factor = small_p(p) ? massart(m1) : std::min(std::sqrt(p / (p - 1.0) - 1.0), massart(m1));
        const double linear = spec.c_out * ck * wp * mf * linear_factor / sqrt_n;
        const double deep = spec.c_out * std::sqrt(k1_log16 / static_cast<double>(n)) * (depth_sum(spec, e) + mf * ck * wp);
        r.branch = small_p(p) ? BoundBranch::GenBoundSmallP : BoundBranch::GenBoundLargeP;
        r.terms = {{"confidence", conf}, {"input_complexity", 2.0 * linear}, {"depth_complexity", 2.0 * deep}};
    }
    r.value = r.recombined();
    return r;
}

BoundReport corollary_bound(const ClassSpec& spec, std::size_t n, double delta, double a0) {
    spec.validate();
    check_n(n);
    require_p1(spec, "corollary_bound");
    if (!(a0 >= 1.0) || !std::isfinite(a0)) throw PreconditionError("a0 must be >= 1");
    const double k = static_cast<double>(spec.k);
    const double ck = std::pow(spec.c, k);
    if (ck > a0 * (1.0 + 1e-12)) {
        throw PreconditionError("c^k = " + format_number(ck) + " exceeds a0 = " + format_number(a0));
    }
    const double conf = confidence_term(n, delta);
    const double complexity = 4.0 * spec.c_out * a0 / std::sqrt(static_cast<double>(n)) *
                              std::sqrt(k + 2.0 + std::log(static_cast<double>(spec.input_dim()) + 1.0));
    BoundReport r = base_report(spec, n);
    r.branch = BoundBranch::Corollary;
    r.combine = Combine::Sum;
    r.terms = {{"confidence", conf}, {"complexity", complexity}};
    r.value = r.recombined();
    r.aux = {{"a0", a0}, {"c_pow_k", ck}};
    return r;
}

ResidualBudget residual_budget(double v0, std::size_t k) {
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw PreconditionError("v0 must be >= 0");
    if (k < 1) throw PreconditionError("k must be >= 1");
    return {1.0 + v0 / static_cast<double>(k), std::exp(v0)};
}

namespace {

double checked_ratio(double L, double c_out) {
    if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("L must be positive");
    if (!std::isfinite(c_out) || !(c_out > L)) throw PreconditionError("c_out must exceed L");
    return c_out / L;
}

}  // namespace

ApproxPlan approx_plan(std::size_t m1, double L, double c_out, std::size_t k, double Cr) {
    if (m1 < 1) throw PreconditionError("m1 must be >= 1");
    if (!(Cr > 0.0) || !std::isfinite(Cr)) throw PreconditionError("Cr must be positive");
    const double t = checked_ratio(L, c_out);
    const double m = static_cast<double>(m1);
    ApproxPlan plan;
    plan.inner = Cr * std::pow(std::log(t), -2.0 * (m + 1.0) / (m + 4.0)) * std::pow(t, 2.0 * (m + 3.0) / (m + 4.0));
    if (!std::isfinite(plan.inner)) throw PreconditionError("width prescription overflows");
    plan.k_max = static_cast<std::size_t>(std::floor(plan.inner));
    if (k < 1 || k > plan.k_max) {
        throw PreconditionError("k = " + std::to_string(k) + " outside admissible range [1, " +
                                std::to_string(plan.k_max) + "]");
    }
    plan.wid_k = static_cast<std::size_t>(std::ceil(plan.inner / static_cast<double>(k))) + 2 * m1 + 3;
    return plan;
}

double approx_error_bound(std::size_t m1, double L, double c_out, double C) {
    if (m1 < 1) throw PreconditionError("m1 must be >= 1");
    if (!(C > 0.0) || !std::isfinite(C)) throw PreconditionError("C must be positive");
    const double t = checked_ratio(L, c_out);
    return C * L * std::pow(t, -2.0 / (static_cast<double>(m1) + 1.0)) * std::log(t);
}

RegimeGrowth dependence_regime(double p, const NormIndex& q, std::size_t k, double c_out, std::size_t wid) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("p must be a finite value >= 1");
    const double base = std::sqrt(static_cast<double>(k)) * c_out;
    const double kk = static_cast<double>(k);
    const double w = static_cast<double>(wid);
    if (p == 1.0) {
        if (q.is_inf()) return {Regime::A, base};
        return {Regime::B, base * std::pow(w, kk / q.value())};
    }
    const double p_star = p / (p - 1.0);
    if (width_exponent(p, q) > 0.0) return {Regime::C, base * std::pow(1.0 + w, kk / p_star)};
    return {Regime::D, base * std::pow(1.0 + w, kk / q.value())};
}

std::string bound_csv_header() { return "p,q,c,c_out,k,widths,n,m1,branch,value,term1,term2"; }

std::string bound_csv_row(const BoundReport& r) {
    std::string widths;
    for (std::size_t i = 1; i <= r.spec.k; ++i) {
        if (i > 1) widths += ';';
        widths += std::to_string(r.spec.dims[i]);
    }
    auto term = [&](std::size_t i) { return i < r.terms.size() ? format_number(r.terms[i].value) : std::string(); };
    return r.spec.norm.p.to_string() + "," + r.spec.norm.q.to_string() + "," + format_number(r.spec.c) + "," +
           format_number(r.spec.c_out) + "," + std::to_string(r.spec.k) + "," + widths + "," + std::to_string(r.n) +
           "," + std::to_string(r.m1) + "," + std::string(to_string(r.branch)) + "," + format_number(r.value) + "," +
           term(0) + "," + term(1);
}

}  // namespace wnn
