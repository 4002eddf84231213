#include <benchmark/benchmark.h>

#include <random>

#include "wnn/capacity.hpp"
#include "wnn/compile.hpp"
#include "wnn/estimate.hpp"
#include "wnn/transform.hpp"

using namespace wnn;

namespace {

DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> e(rows * cols);
    for (double& v : e) v = g(rng);
    return DenseMatrix(rows, cols, std::move(e));
}

WnNetwork random_network(std::size_t width, std::size_t depth) {
    std::mt19937_64 rng(1);
    std::vector<AffineMap> layers;
    std::size_t in = 4;
    for (std::size_t i = 0; i < depth; ++i) {
        layers.emplace_back(random_matrix(rng, in + 1, width));
        in = width;
    }
    layers.emplace_back(random_matrix(rng, in + 1, 1));
    return WnNetwork(4, std::move(layers));
}

ShallowNet random_shallow(std::size_t r) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    ShallowNet s;
    s.input_dim = 3;
    for (std::size_t i = 0; i < r; ++i) {
        ShallowUnit u{g(rng), {g(rng), g(rng), g(rng)}, g(rng)};
        double n = std::abs(u.bias);
        for (double w : u.weights) n += std::abs(w);
        u.bias /= n;
        for (double& w : u.weights) w /= n;
        s.units.push_back(u);
    }
    return s;
}

void BM_Eval(benchmark::State& state) {
    const WnNetwork net = random_network(static_cast<std::size_t>(state.range(0)), 4);
    const std::vector<double> x{0.1, -0.2, 0.3, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(eval_scalar(net, x));
}
BENCHMARK(BM_Eval)->Arg(8)->Arg(64)->Arg(256);

void BM_LpqNorm(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix m = random_matrix(rng, n, n);
    const NormSpec ns(1.5, NormIndex::finite(3.0));
    for (auto _ : state) benchmark::DoNotOptimize(lpq_norm(m, ns));
}
BENCHMARK(BM_LpqNorm)->Arg(16)->Arg(256);

void BM_Canonicalize(benchmark::State& state) {
    const WnNetwork net = random_network(static_cast<std::size_t>(state.range(0)), 6);
    const NormSpec ns = NormSpec::l2_inf();
    const auto norms = layer_norms(net, ns);
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < norms.size(); ++i) c = std::max(c, norms[i]);
    for (auto _ : state) benchmark::DoNotOptimize(canonicalize(net, ns, c, norms.back()));
}
BENCHMARK(BM_Canonicalize)->Arg(16)->Arg(128);

void BM_Compile(benchmark::State& state) {
    const ShallowNet s = random_shallow(static_cast<std::size_t>(state.range(0)));
    const double mass = s.coefficient_mass();
    for (auto _ : state) benchmark::DoNotOptimize(compile_to_depth(s, 8, NormSpec::l1_inf(), mass));
}
BENCHMARK(BM_Compile)->Arg(16)->Arg(256);

void BM_BoundProp2(benchmark::State& state) {
    ClassSpec spec;
    spec.norm = NormSpec::l2_inf();
    spec.c = 1.1;
    spec.c_out = 2.0;
    spec.k = static_cast<std::size_t>(state.range(0));
    spec.dims.assign(spec.k + 2, 32);
    spec.dims.back() = 1;
    for (auto _ : state) benchmark::DoNotOptimize(bound_prop2(spec, 1000));
}
BENCHMARK(BM_BoundProp2)->Arg(4)->Arg(256);

void BM_ProjectL1(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (double& x : v) x = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(project_l1(v, 1.0));
}
BENCHMARK(BM_ProjectL1)->Arg(16)->Arg(1024);

}  // namespace
BENCHMARK_MAIN();
