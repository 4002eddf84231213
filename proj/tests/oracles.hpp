#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the library code path it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "wnn/compile.hpp"
#include "wnn/matrix.hpp"
#include "wnn/network.hpp"

namespace oracle {

// Mixed norm from the definition, generic pow everywhere.
inline double lpq(const wnn::DenseMatrix& m, double p, double q /* inf allowed */) {
    std::vector<double> cols;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += std::pow(std::abs(m(r, c)), p);
        cols.push_back(std::pow(s, 1.0 / p));
    }
    if (std::isinf(q)) return *std::max_element(cols.begin(), cols.end());
    double s = 0.0;
    for (double v : cols) s += std::pow(v, q);
    return std::pow(s, 1.0 / q);
}

// Forward pass through the bias/weight accessors, prepending the constant 1.
inline std::vector<double> eval(const wnn::WnNetwork& net, const std::vector<double>& x) {
    std::vector<double> u = x;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const auto& layer = net.layer(l);
        std::vector<double> aug{1.0};
        aug.insert(aug.end(), u.begin(), u.end());
        std::vector<double> z(layer.out_dim(), 0.0);
        for (std::size_t j = 0; j < layer.out_dim(); ++j) {
            z[j] = layer.bias(j);
            for (std::size_t i = 0; i < layer.in_dim(); ++i) z[j] += layer.weight(i, j) * aug[i + 1];
        }
        if (l + 1 < net.layers().size()) {
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        }
        u = z;
    }
    return u;
}

inline double eval_scalar(const wnn::WnNetwork& net, const std::vector<double>& x) { return eval(net, x).at(0); }

inline double shallow(const wnn::ShallowNet& s, const std::vector<double>& x) {
    double total = 0.0;
    for (const auto& u : s.units) {
        double pre = u.bias;
        for (std::size_t i = 0; i < x.size(); ++i) pre += u.weights[i] * x[i];
        total += u.coef * std::max(pre, 0.0);
    }
    return total;
}

// Euclidean projection onto the l1 ball by enumerating every support set and
// solving its KKT system; the feasible candidate of least distance wins.
inline std::vector<double> project_l1_active_set(const std::vector<double>& v, double radius) {
    double n1 = 0.0;
    for (double x : v) n1 += std::abs(x);
    if (n1 <= radius) return v;
    const std::size_t d = v.size();
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask >> i & 1) {
                sum += std::abs(v[i]);
                ++count;
            }
        }
        const double tau = (sum - radius) / static_cast<double>(count);
        std::vector<double> x(d, 0.0);
        bool ok = tau >= 0.0;
        for (std::size_t i = 0; i < d && ok; ++i) {
            if (!(mask >> i & 1)) continue;
            const double y = std::abs(v[i]) - tau;
            if (y < 0.0) ok = false;
            x[i] = std::copysign(y, v[i]);
        }
        if (!ok) continue;
        double dist = 0.0;
        for (std::size_t i = 0; i < d; ++i) dist += (x[i] - v[i]) * (x[i] - v[i]);
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    return best;
}

// E|eps_1 + ... + eps_n| for independent uniform signs, by the binomial law.
inline double expected_abs_sign_sum(std::size_t n) {
    double total = 0.0;
    double binom = 1.0;  // C(n, j)
    for (std::size_t j = 0; j <= n; ++j) {
        total += binom * std::abs(2.0 * static_cast<double>(j) - static_cast<double>(n));
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return total / std::pow(2.0, static_cast<double>(n));
}

// Width-independent p = 1 Rademacher bound, transcribed from its closed form.
inline double prop1(double c, double c_out, int k, int m1, int n) {
    const double arm1 = 2.0 * std::max(1.0, std::pow(c, k)) * std::sqrt(k + 2.0 + std::log(m1 + 1.0));
    double geo = 0.0;
    for (int i = 0; i <= k; ++i) geo += std::pow(c, i);
    const double arm2 = std::sqrt(k * std::log(16.0)) * geo +
                        std::pow(c, k) * (std::sqrt(2.0 * std::log(2.0 * m1)) + std::sqrt(k * std::log(16.0)));
    return c_out / std::sqrt(static_cast<double>(n)) * std::min(arm1, arm2);
}

// General (p, q) bound with width factor; q_recip = 1/q (0 for q = inf).
inline double prop2(double p, double q_recip, double c, double c_out, const std::vector<std::size_t>& dims, int n) {
    const int k = static_cast<int>(dims.size()) - 2;
    const int m1 = static_cast<int>(dims[0]);
    const double ps_recip = 1.0 - 1.0 / p;
    const double e = std::max(ps_recip - q_recip, 0.0);
    auto prod = [&](int from) {
        double r = 1.0;
        for (int l = from; l <= k; ++l) r *= std::pow(static_cast<double>(dims[l]), e);
        return r;
    };
    double sum = 0.0;
    for (int i = 1; i <= k + 1; ++i) sum += std::pow(c, k - i + 1) * prod(i);
    const double lg = (k + 1) * std::log(16.0);
    const double massart = std::sqrt(2.0 * std::log(2.0 * m1));
    const double lin = (p > 1.0 && p <= 2.0) ? std::min(std::sqrt(p / (p - 1.0) - 1.0), massart) : massart;
    const double sn = std::sqrt(static_cast<double>(n));
    return c_out * std::sqrt(lg) / sn * sum +
           c_out * std::pow(c, k) / sn * prod(1) * std::pow(static_cast<double>(m1), ps_recip) * (lin + std::sqrt(lg));
}

// ---- random fixtures ----

inline wnn::DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> e(rows * cols);
    for (double& x : e) x = g(rng);
    return wnn::DenseMatrix(rows, cols, std::move(e));
}

inline wnn::WnNetwork random_network(std::mt19937_64& rng, const std::vector<std::size_t>& dims) {
    std::vector<wnn::AffineMap> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) layers.emplace_back(random_matrix(rng, dims[l] + 1, dims[l + 1]));
    return wnn::WnNetwork(dims.front(), std::move(layers));
}

inline std::vector<std::size_t> random_dims(std::mt19937_64& rng, std::size_t k, std::size_t max_width,
                                            std::size_t max_m1, std::size_t out = 1) {
    std::uniform_int_distribution<std::size_t> w(1, max_width), m(1, max_m1);
    std::vector<std::size_t> dims{m(rng)};
    for (std::size_t i = 0; i < k; ++i) dims.push_back(w(rng));
    dims.push_back(out);
    return dims;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t dim, double half_width) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    std::vector<double> x(dim);
    for (double& v : x) v = u(rng);
    return x;
}

// Units with ||(b, w)||_1 = 1; some coefficients zero.
inline wnn::ShallowNet random_shallow(std::mt19937_64& rng, std::size_t r, std::size_t m1) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> zero(0, 9);
    wnn::ShallowNet s;
    s.input_dim = m1;
    for (std::size_t i = 0; i < r; ++i) {
        wnn::ShallowUnit u;
        u.bias = g(rng);
        double n = std::abs(u.bias);
        for (std::size_t j = 0; j < m1; ++j) {
            u.weights.push_back(g(rng));
            n += std::abs(u.weights.back());
        }
        u.bias /= n;
        for (double& w : u.weights) w /= n;
        u.coef = zero(rng) == 0 ? 0.0 : g(rng);
        s.units.push_back(std::move(u));
    }
    return s;
}

}  // namespace oracle
