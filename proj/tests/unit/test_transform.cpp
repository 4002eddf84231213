#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "wnn/cli.hpp"
#include "wnn/error.hpp"
#include "wnn/transform.hpp"

using namespace wnn;

namespace {

const NormSpec kL1Inf = NormSpec::l1_inf();

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

void expect_same_function(const WnNetwork& a, const WnNetwork& b, std::mt19937_64& rng, int samples = 1000) {
    for (int i = 0; i < samples; ++i) {
        const auto x = oracle::random_point(rng, a.input_dim(), 1.0);
        const double fa = oracle::eval_scalar(a, x);
        ASSERT_NEAR(oracle::eval_scalar(b, x), fa, 1e-9 * (1.0 + std::abs(fa)));
    }
}

NormSpec random_norm(std::mt19937_64& rng) {
    static const std::vector<NormSpec> choices{
        NormSpec::l1_inf(), NormSpec(2.0, NormIndex::infinity()), NormSpec(2.0, NormIndex::finite(2.0)),
        NormSpec(1.0, NormIndex::finite(2.0)), NormSpec(3.0, NormIndex::finite(1.5))};
    return choices[rng() % choices.size()];
}

}  // namespace

TEST(Canonicalize, RescaledMotivatingNetwork) {
    const WnNetwork fp = cli::motivating_rescaled(100.0);
    const auto res = canonicalize(fp, kL1Inf, 2.0, 300.0);
    const auto norms = layer_norms(res.net, kL1Inf);
    EXPECT_NEAR(norms[0], 2.0, 1e-12);
    // weight rows shrink by 100, the bias row keeps 100
    EXPECT_NEAR(norms[1], 102.0, 1e-9);
    for (double x : grid(-1.0, 1.0, 101)) {
        const std::vector<double> in{x};
        EXPECT_NEAR(eval_scalar(res.net, in), eval_scalar(fp, in), 1e-12);
    }
    ASSERT_EQ(res.report.scale_factors.size(), 1u);
    EXPECT_NEAR(res.report.scale_factors[0], 100.0, 1e-9);
    EXPECT_TRUE(res.net.certificate().has_value());
}

TEST(Canonicalize, FixedPointLeavesEntriesUnchanged) {
    const WnNetwork f = cli::motivating_network();
    const auto res = canonicalize(f, kL1Inf, 2.0, 3.0);
    EXPECT_EQ(res.report.scale_factors, std::vector<double>{1.0});
    EXPECT_EQ(res.net.layers(), f.layers());
}

TEST(Canonicalize, BudgetExceededReportsLayer) {
    const WnNetwork f = cli::motivating_network();
    try {
        canonicalize(f, kL1Inf, 1.0, 3.0);
        FAIL();
    } catch (const BudgetExceeded& e) {
        EXPECT_EQ(e.layer(), 0u);
        EXPECT_EQ(e.norm(), 2.0);
    }
    EXPECT_THROW(canonicalize(f, kL1Inf, 2.0, 2.0), BudgetExceeded);
}

TEST(Canonicalize, ZeroNormLayerCollapsesToConstant) {
    // layer 2 is zero, the output bias survives
    const WnNetwork net(1, {AffineMap(DenseMatrix(2, 2, {0.5, 0, 0.5, 0.5})), AffineMap(DenseMatrix(3, 1)),
                            AffineMap(DenseMatrix(2, 1, {0.75, 4.0}))});
    for (double c : {1.0, 1.5, 3.0}) {
        const auto res = canonicalize(net, kL1Inf, c, 4.75);
        EXPECT_TRUE(res.report.constant_collapse);
        for (double x : grid(-2, 2, 21)) EXPECT_NEAR(eval_scalar(res.net, std::vector<double>{x}), 0.75, 1e-15);
        const ClassSpec spec{kL1Inf, c, 4.75, 2, {1, 2, 1, 1}};
        EXPECT_TRUE(class_check(res.net, spec, 1e-9).pass());
    }
}

TEST(Canonicalize, ConstantAboveOutputBudgetIsNotRepresentable) {
    // with p = 2 four unit constants sum to 2 through a norm-1 column, so the
    // collapsed constant needs more output norm than the input used
    const NormSpec ns(2.0, NormIndex::infinity());
    const WnNetwork net(1, {AffineMap(DenseMatrix(2, 1)), AffineMap(DenseMatrix(2, 4, {1, 1, 1, 1, 0, 0, 0, 0})),
                            AffineMap(DenseMatrix(5, 1, {0, 0.5, 0.5, 0.5, 0.5})),
                            AffineMap(DenseMatrix(2, 1, {0.0, 1.0}))});
    EXPECT_EQ(eval_scalar(net, std::vector<double>{0.3}), 2.0);
    EXPECT_THROW(canonicalize(net, ns, 1.0, 1.0), ConstantNotRepresentable);
    EXPECT_NO_THROW(canonicalize(net, ns, 1.0, 2.0));
    EXPECT_NO_THROW(canonicalize(net, ns, 2.0, 1.0));
}

TEST(Canonicalize, RandomNetworksPreserveFunctionAndHitBudget) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> slack(0.0, 3.0);
    for (int t = 0; t < 60; ++t) {
        const NormSpec ns = random_norm(rng);
        const auto dims = oracle::random_dims(rng, 1 + t % 4, 6, 4);
        const WnNetwork net = oracle::random_network(rng, dims);
        const auto norms = layer_norms(net, ns);
        const double c = *std::max_element(norms.begin(), norms.end() - 1) * (1.0 + slack(rng));
        const double c_out = norms.back() * (1.0 + slack(rng));
        const auto res = canonicalize(net, ns, c, c_out);
        const auto after = layer_norms(res.net, ns);
        for (std::size_t i = 0; i + 1 < after.size(); ++i) EXPECT_NEAR(after[i], c, 1e-9 * c);
        EXPECT_LE(after.back(), c_out * (1 + 1e-12));
        for (double s : res.report.scale_factors) EXPECT_GE(s, 1.0);
        expect_same_function(net, res.net, rng, 200);
        EXPECT_TRUE(class_check(res.net, res.report.output_spec, 1e-9).pass());
    }
}

TEST(Canonicalize, Idempotent) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 50; ++t) {
        const NormSpec ns = random_norm(rng);
        const WnNetwork net = oracle::random_network(rng, oracle::random_dims(rng, 1 + t % 4, 6, 4));
        const auto norms = layer_norms(net, ns);
        const double c = *std::max_element(norms.begin(), norms.end() - 1) * 1.5;
        const double c_out = norms.back() * 1.5;
        const WnNetwork once = canonicalize(net, ns, c, c_out).net;
        const WnNetwork twice = canonicalize(once, ns, c, c_out).net;
        for (std::size_t l = 0; l < once.layers().size(); ++l) {
            const auto a = once.layer(l).params().entries();
            const auto b = twice.layer(l).params().entries();
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1 + std::abs(a[i])));
        }
    }
}

TEST(ScaleOutput, ScalesOnlyTheLastLayer) {
    const WnNetwork f = cli::motivating_network();
    const WnNetwork g = scale_output(f, 2.0);
    EXPECT_EQ(eval_scalar(g, std::vector<double>{1.0}), 2.0);
    EXPECT_EQ(layer_norms(g, kL1Inf), (std::vector<double>{2.0, 6.0}));
    EXPECT_EQ(scale_output(f, 1.0), f);
    const WnNetwork z = scale_output(f, 0.0);
    EXPECT_EQ(layer_norms(z, kL1Inf).back(), 0.0);
    EXPECT_EQ(eval_scalar(z, std::vector<double>{0.3}), 0.0);
}

TEST(ScaleOutput, CertificateTracksAbsoluteFactor) {
    const WnNetwork f = canonicalize(cli::motivating_network(), kL1Inf, 2.0, 3.0).net;
    const WnNetwork g = scale_output(f, -2.0);
    ASSERT_TRUE(g.certificate().has_value());
    EXPECT_EQ(g.certificate()->c_out, 6.0);
}

TEST(ConvertNormBudget, WidthFactor) {
    const ClassSpec spec{kL1Inf, 1.0, 2.0, 3, {2, 5, 5, 5, 1}};
    const ClassSpec out = convert_norm_budget(spec, NormSpec(1.0, NormIndex::finite(2.0)));
    EXPECT_NEAR(out.c, std::sqrt(5.0), 1e-15);
    EXPECT_EQ(out.c_out, 2.0);
    EXPECT_THROW(convert_norm_budget(spec, kL1Inf), PreconditionError);
    EXPECT_THROW(convert_norm_budget(spec, NormSpec(2.0, NormIndex::finite(2.0))), PreconditionError);

    const ClassSpec thin{kL1Inf, 1.5, 2.0, 3, {2, 1, 1, 1, 1}};
    const ClassSpec t2 = convert_norm_budget(thin, NormSpec(1.0, NormIndex::finite(3.0)));
    EXPECT_EQ(t2.c, 1.5);
    EXPECT_EQ(t2.c_out, 2.0);
}

TEST(ConvertNormBudget, ContainmentAfterRecanonicalization) {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 40; ++t) {
        const double p = t % 2 ? 1.0 : 2.0;
        const NormSpec src(p, NormIndex::infinity());
        const auto dims = oracle::random_dims(rng, 1 + t % 3, 6, 3);
        const WnNetwork raw = oracle::random_network(rng, dims);
        const auto norms = layer_norms(raw, src);
        const ClassSpec a{src, *std::max_element(norms.begin(), norms.end() - 1), norms.back(), dims.size() - 2, dims};
        const WnNetwork in_a = canonicalize(raw, src, a.c, a.c_out).net;
        ASSERT_TRUE(class_check(in_a, a, 1e-9).pass());

        const NormSpec target(p, NormIndex::finite(1.0 + t % 3));
        const ClassSpec b = convert_norm_budget(a, target);
        const WnNetwork in_b = canonicalize(in_a, target, b.c, b.c_out).net;
        EXPECT_TRUE(class_check(in_b, b, 1e-9).pass());
        expect_same_function(in_a, in_b, rng, 50);
    }
}

TEST(Widen, AppendsDeadUnits) {
    const WnNetwork f = cli::motivating_network();
    const WnNetwork w = widen(f, {1, 5, 1});
    EXPECT_EQ(w.dims(), (std::vector<std::size_t>{1, 5, 1}));
    EXPECT_EQ(layer_norms(w, kL1Inf), (std::vector<double>{2.0, 3.0}));
    for (double x : grid(-2, 2, 41)) {
        const std::vector<double> in{x};
        EXPECT_EQ(eval_scalar(w, in), eval_scalar(f, in));
    }
    EXPECT_EQ(widen(f, {1, 2, 1}), f);
    EXPECT_THROW(widen(f, {1, 1, 1}), PreconditionError);
    EXPECT_THROW(widen(f, {2, 2, 1}), PreconditionError);
}

TEST(Widen, PreservesFunctionAndMembership) {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 40; ++t) {
        const NormSpec ns = random_norm(rng);
        auto dims = oracle::random_dims(rng, 1 + t % 3, 4, 3);
        const WnNetwork raw = oracle::random_network(rng, dims);
        const WnNetwork net = canonicalize(raw, ns, 2.0 * layer_norms(raw, ns)[0] + 10.0, 100.0 * (1 + layer_norms(raw, ns).back())).net;
        auto target = dims;
        for (std::size_t i = 1; i + 1 < target.size(); ++i) target[i] += t % 3;
        const WnNetwork w = widen(net, target);
        expect_same_function(net, w, rng, 100);
        const auto& cert = *net.certificate();
        const ClassSpec spec{ns, cert.c, cert.c_out, target.size() - 2, target};
        EXPECT_TRUE(class_check(w, spec, 1e-9).pass());
    }
}

TEST(Deepen, MotivatingNetworkIncludingNegativeOutputs) {
    const WnNetwork f = cli::motivating_network();
    const WnNetwork d = deepen(f, 3, kL1Inf);
    EXPECT_EQ(d.depth(), 3u);
    bool saw_negative = false;
    for (double x : grid(-2, 2, 101)) {
        const std::vector<double> in{x};
        const double want = eval_scalar(f, in);
        saw_negative = saw_negative || want < 0;
        EXPECT_NEAR(eval_scalar(d, in), want, 1e-12);
    }
    EXPECT_TRUE(saw_negative);
    const auto norms = layer_norms(d, kL1Inf);
    EXPECT_NEAR(norms[1], 1.0, 1e-15);
    EXPECT_EQ(norms[2], 1.0);
    EXPECT_EQ(deepen(f, 1, kL1Inf), f);
    EXPECT_THROW(deepen(f, 0, kL1Inf), PreconditionError);
}

TEST(Deepen, CertifiedNetworkStaysCertified) {
    std::mt19937_64 rng(35);
    for (int t = 0; t < 40; ++t) {
        const NormSpec ns = random_norm(rng);
        const auto dims = oracle::random_dims(rng, t % 3, 4, 3);
        const WnNetwork raw = oracle::random_network(rng, dims);
        const auto norms = layer_norms(raw, ns);
        const double c = dims.size() > 2 ? *std::max_element(norms.begin(), norms.end() - 1) * 1.2 : 1.0;
        const WnNetwork net = dims.size() > 2 ? canonicalize(raw, ns, c, norms.back()).net
                                              : raw.with_certificate(NormCertificate{ns, c, norms.back()});
        const std::size_t target = net.depth() + 1 + t % 3;
        const WnNetwork d = deepen(net, target, ns);
        expect_same_function(net, d, rng, 100);
        ASSERT_TRUE(d.certificate().has_value());
        const auto& cert = *d.certificate();
        EXPECT_GE(cert.c, c);
        EXPECT_LE(cert.c_out, std::pow(2.0, 1.0 / ns.p_value()) * norms.back() * (1 + 1e-12));
        const ClassSpec spec{ns, cert.c, cert.c_out, d.depth(), d.dims()};
        EXPECT_TRUE(class_check(d, spec, 1e-9).pass());
    }
}

TEST(ConstantNetwork, EvaluatesToConstantWithinNormProduct) {
    const WnNetwork net = constant_network(5.0, 1.0, 1, {1, 2, 1}, kL1Inf);
    for (double x : {-1.0, 0.0, 1.0}) EXPECT_EQ(eval_scalar(net, std::vector<double>{x}), 5.0);
    const auto norms = layer_norms(net, kL1Inf);
    EXPECT_NEAR(norms[0], 0.2, 1e-16);
    EXPECT_EQ(norms[1], 5.0);
    EXPECT_LE(norms[0] * norms[1], 1.0);
}

TEST(ConstantNetwork, ProductNeverExceedsGammaAndOutputIsExact) {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> logu(-6.0, 6.0);
    for (int t = 0; t < 200; ++t) {
        const double c0 = std::pow(10.0, logu(rng));
        const double gamma0 = std::pow(10.0, logu(rng) / 2);
        const std::size_t k = 1 + t % 4;
        const auto dims = oracle::random_dims(rng, k, 4, 3);
        const NormSpec ns = random_norm(rng);
        const WnNetwork net = constant_network(c0, gamma0, k, dims, ns);
        double prod = 1.0;
        for (double v : layer_norms(net, ns)) prod *= v;
        EXPECT_LE(prod, gamma0 + 1e-12);
        for (int i = 0; i < 10; ++i) EXPECT_EQ(eval_scalar(net, oracle::random_point(rng, dims[0], 1.0)), c0);
    }
    EXPECT_THROW(constant_network(1.0, 1.0, 1, {1, 2, 2}, kL1Inf), PreconditionError);
    EXPECT_THROW(constant_network(0.0, 1.0, 1, {1, 2, 1}, kL1Inf), PreconditionError);
}
