#include "wnn/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include "json_util.hpp"
#include "wnn/error.hpp"
#include "wnn/io.hpp"
#include "wnn/transform.hpp"

namespace wnn {

using detail::json;

std::vector<double> project_l1(std::span<const double> v, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("projection radius must be positive");
    std::vector<double> out(v.begin(), v.end());
    double norm = 0.0;
    for (double x : v) norm += std::abs(x);
    if (norm <= radius) return out;

    std::vector<double> u(v.size());
    std::transform(v.begin(), v.end(), u.begin(), [](double x) { return std::abs(x); });
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double t = (cumsum - radius) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    double result_norm = 0.0;
    for (double& x : out) {
        const double mag = std::max(std::abs(x) - theta, 0.0);
        x = std::copysign(mag, x);
        result_norm += mag;
    }
    if (result_norm > radius) {
        for (double& x : out) x *= radius / result_norm;
    }
    return out;
}

bool projection_supported(const NormSpec& ns) {
    if (!ns.q.is_inf() && ns.q.value() != 2.0) return false;
    const double p = ns.p_value();
    if (p == 1.0) return ns.q.is_inf();
    return p == 2.0;
}

DenseMatrix project_lpq(const DenseMatrix& m, const NormSpec& ns, double radius) {
    if (!projection_supported(ns)) throw UnsupportedNorm("no projection for norm " + ns.to_string());
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("projection radius must be positive");
    std::vector<double> e(m.entries().begin(), m.entries().end());
    const std::size_t rows = m.rows(), cols = m.cols();

    if (!ns.q.is_inf()) {
        const double n = lpq_norm(m, ns);
        if (n <= radius) return m;
        return m.scaled(radius / n);
    }
    for (std::size_t c = 0; c < cols; ++c) {
        const std::vector<double> col = m.column(c);
        std::vector<double> projected;
        if (ns.p_value() == 1.0) {
            projected = project_l1(col, radius);
        } else {
            const double n = lp_norm(col, ns.p);
            projected = col;
            if (n > radius) {
                for (double& x : projected) x *= radius / n;
            }
        }
        for (std::size_t r = 0; r < rows; ++r) e[r * cols + c] = projected[r];
    }
    return DenseMatrix(rows, cols, std::move(e));
}

Sample::Sample(std::vector<std::vector<double>> points) : points_(std::move(points)) {
    if (points_.empty()) throw DimensionError("sample must contain at least one point");
    const std::size_t m1 = points_.front().size();
    if (m1 == 0) throw DimensionError("sample points must have positive dimension");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != m1) {
            throw DimensionError("sample point " + std::to_string(i) + " has dimension " +
                                 std::to_string(points_[i].size()) + ", expected " + std::to_string(m1));
        }
        for (double x : points_[i]) {
            if (!std::isfinite(x)) throw NonFiniteError("sample point " + std::to_string(i) + " is not finite");
            if (std::abs(x) > 1.0) throw InputError("sample point " + std::to_string(i) + " lies outside [-1, 1]");
        }
    }
}

Sample Sample::uniform(std::size_t n, std::size_t m1, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(m1));
    for (auto& p : pts) {
        for (double& x : p) x = dist(rng);
    }
    return Sample(std::move(pts));
}

Sample sample_from_json(const std::string& text) {
    const json doc = detail::parse_json(text);
    detail::check_version(doc);
    const json& pj = detail::require(doc, "points");
    if (!pj.is_array()) throw FormatError("'points' must be an array");
    std::vector<std::vector<double>> pts;
    for (const auto& p : pj) pts.push_back(detail::as_real_vector(p, "point"));
    return Sample(std::move(pts));
}

std::string sample_to_json(const Sample& s) {
    std::string out = "{\"version\": 1, \"points\": [";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        detail::write_real_array(out, s[i]);
    }
    out += "]}\n";
    return out;
}

Sample load_sample(const std::filesystem::path& path) { return sample_from_json(read_text_file(path)); }

void EstimateConfig::validate() const {
    if (epsilon_draws < 1 || restarts < 1 || steps < 1 || decay_every < 1) {
        throw InputError("estimator counts must be >= 1");
    }
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw InputError("step size must be positive");
    if (!(decay > 0.0 && decay <= 1.0)) throw InputError("decay must lie in (0, 1]");
    if (exact_enumeration_max_n > 24) throw InputError("exact enumeration is capped at n = 24");
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t draw, std::uint64_t restart) {
    return splitmix(splitmix(splitmix(seed) ^ draw) ^ restart);
}

constexpr std::uint64_t kSignStream = ~std::uint64_t{0};

// Mutable per-layer parameters, same layout as DenseMatrix (bias row first).
struct Params {
    std::vector<DenseMatrix> layers;
};

class Ascent {
public:
    Ascent(const ClassSpec& spec, const Sample& s, const EstimateConfig& cfg)
        : spec_(spec), sample_(s), cfg_(cfg) {}

    // Best sum_i eps_i f(x_i) found over restarts, never below 0 (the zero
    // output layer is in the class).
    double maximize(const std::vector<double>& eps, std::uint64_t draw, std::size_t& infeasible) const {
        double best = 0.0;
        for (std::size_t r = 0; r < cfg_.restarts; ++r) {
            std::mt19937_64 rng(stream_seed(cfg_.seed, draw, r));
            best = std::max(best, run(eps, rng, infeasible));
        }
        return best;
    }

private:
    double run(const std::vector<double>& eps, std::mt19937_64& rng, std::size_t& infeasible) const {
        const std::size_t k = spec_.k;
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Params P;
        for (std::size_t l = 0; l <= k; ++l) {
            DenseMatrix m(spec_.dims[l] + 1, spec_.dims[l + 1]);
            std::vector<double> e(m.rows() * m.cols());
            for (double& x : e) x = dist(rng);
            m = DenseMatrix(m.rows(), m.cols(), std::move(e));
            P.layers.push_back(l < k ? to_sphere(project_lpq(m, spec_.norm, spec_.c), spec_.c)
                                     : to_sphere(m, spec_.c_out));
        }

        double best = 0.0;
        std::vector<DenseMatrix> grads;
        for (std::size_t t = 0; t < cfg_.steps; ++t) {
            const double value = objective_and_gradient(P, eps, grads);
            best = std::max(best, value);
            const double eta = cfg_.step_size * std::pow(cfg_.decay, static_cast<double>(t / cfg_.decay_every));
            for (std::size_t l = 0; l <= k; ++l) {
                const double radius = l < k ? spec_.c : spec_.c_out;
                const auto g = grads[l].entries();
                double gn = 0.0;
                for (double x : g) gn += x * x;
                gn = std::sqrt(gn);
                if (gn == 0.0) continue;
                std::vector<double> e(P.layers[l].entries().begin(), P.layers[l].entries().end());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eta * radius * g[i] / gn;
                DenseMatrix stepped(P.layers[l].rows(), P.layers[l].cols(), std::move(e));
                DenseMatrix projected = project_lpq(stepped, spec_.norm, radius);
                P.layers[l] = l < k ? to_sphere(projected, radius, &P.layers[l]) : projected;
            }
            if (cfg_.verify_feasibility && !feasible(P)) ++infeasible;
        }
        best = std::max(best, objective_and_gradient(P, eps, grads));
        return best;
    }

    // Rescale onto the norm sphere; a zero matrix keeps the fallback.
    DenseMatrix to_sphere(const DenseMatrix& m, double radius, const DenseMatrix* fallback = nullptr) const {
        const double n = lpq_norm(m, spec_.norm);
        if (n == 0.0) return fallback ? *fallback : m;
        return m.scaled(radius / n);
    }

    bool feasible(const Params& P) const {
        std::vector<AffineMap> layers;
        for (const auto& m : P.layers) layers.emplace_back(m);
        const WnNetwork net(spec_.input_dim(), std::move(layers));
        return class_check(net, spec_, 1e-9, HiddenNormRule::AtMost).pass();
    }

    double objective_and_gradient(const Params& P, const std::vector<double>& eps,
                                  std::vector<DenseMatrix>& grads) const {
        const std::size_t L = P.layers.size();
        std::vector<std::vector<double>> g(L);
        for (std::size_t l = 0; l < L; ++l) g[l].assign(P.layers[l].rows() * P.layers[l].cols(), 0.0);

        double total = 0.0;
        std::vector<std::vector<double>> act(L), pre(L);
        for (std::size_t i = 0; i < sample_.size(); ++i) {
            act[0] = sample_[i];
            for (std::size_t l = 0; l < L; ++l) {
                const DenseMatrix& m = P.layers[l];
                std::vector<double> z(m.cols());
                for (std::size_t c = 0; c < m.cols(); ++c) {
                    double s = m(0, c);
                    for (std::size_t r = 0; r + 1 < m.rows(); ++r) s += m(r + 1, c) * act[l][r];
                    z[c] = s;
                }
                pre[l] = z;
                if (l + 1 < L) {
                    act[l + 1].resize(z.size());
                    std::transform(z.begin(), z.end(), act[l + 1].begin(), relu);
                }
            }
            total += eps[i] * pre[L - 1][0];

            std::vector<double> delta{eps[i]};
            for (std::size_t l = L; l-- > 0;) {
                const DenseMatrix& m = P.layers[l];
                const std::size_t cols = m.cols();
                for (std::size_t c = 0; c < cols; ++c) {
                    if (delta[c] == 0.0) continue;
                    g[l][c] += delta[c];
                    for (std::size_t r = 0; r + 1 < m.rows(); ++r) g[l][(r + 1) * cols + c] += act[l][r] * delta[c];
                }
                if (l == 0) break;
                std::vector<double> prev(m.rows() - 1, 0.0);
                for (std::size_t r = 0; r + 1 < m.rows(); ++r) {
                    if (pre[l - 1][r] <= 0.0) continue;
                    double s = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) s += m(r + 1, c) * delta[c];
                    prev[r] = s;
                }
                delta = std::move(prev);
            }
        }
        grads.clear();
        for (std::size_t l = 0; l < L; ++l) {
            grads.emplace_back(P.layers[l].rows(), P.layers[l].cols(), std::move(g[l]));
        }
        return total;
    }

    const ClassSpec& spec_;
    const Sample& sample_;
    const EstimateConfig& cfg_;
};

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
    std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(t, work));
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

EstimateReport empirical_rademacher(const ClassSpec& spec, const Sample& s, const EstimateConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (!projection_supported(spec.norm)) throw UnsupportedNorm("no projection for norm " + spec.norm.to_string());
    if (spec.dims.front() != s.dim()) {
        throw DimensionError("sample dimension " + std::to_string(s.dim()) + " does not match class input dimension " +
                             std::to_string(spec.dims.front()));
    }
    if (spec.dims.back() != 1) throw DimensionError("estimator requires scalar output (d_{k+1} = 1)");

    const std::size_t n = s.size();
    EstimateReport rep;
    rep.config = cfg;
    rep.n = n;
    rep.exact_enumeration = n <= cfg.exact_enumeration_max_n;
    rep.analytic_bound = bound_auto(spec, n).value;

    // Sign vectors. Under exact enumeration eps and -eps give the same
    // supremum (the class is closed under negating the output layer), so only
    // patterns with eps_1 = +1 are visited.
    std::vector<std::vector<double>> signs;
    if (rep.exact_enumeration) {
        const std::size_t patterns = std::size_t{1} << (n - 1);
        for (std::size_t b = 0; b < patterns; ++b) {
            std::vector<double> e(n, 1.0);
            for (std::size_t i = 1; i < n; ++i) e[i] = (b >> (i - 1)) & 1 ? -1.0 : 1.0;
            signs.push_back(std::move(e));
        }
        rep.draw_weights.assign(patterns, 1.0 / static_cast<double>(patterns));
    } else {
        std::mt19937_64 rng(stream_seed(cfg.seed, 0, kSignStream));
        std::bernoulli_distribution coin(0.5);
        for (std::size_t d = 0; d < cfg.epsilon_draws; ++d) {
            std::vector<double> e(n);
            for (double& x : e) x = coin(rng) ? 1.0 : -1.0;
            signs.push_back(std::move(e));
        }
        rep.draw_weights.assign(cfg.epsilon_draws, 1.0 / static_cast<double>(cfg.epsilon_draws));
    }

    rep.per_draw_maxima.assign(signs.size(), 0.0);
    if (spec.c_out == 0.0) return rep;

    std::vector<std::size_t> infeasible(signs.size(), 0);
    const Ascent ascent(spec, s, cfg);
    parallel_for(signs.size(), resolve_threads(cfg.threads, signs.size()), [&](std::size_t d) {
        rep.per_draw_maxima[d] = ascent.maximize(signs[d], d, infeasible[d]);
    });
    rep.infeasible_iterates = std::accumulate(infeasible.begin(), infeasible.end(), std::size_t{0});

    const double nn = static_cast<double>(n);
    double mean = 0.0;
    for (std::size_t d = 0; d < signs.size(); ++d) mean += rep.draw_weights[d] * rep.per_draw_maxima[d] / nn;
    rep.estimate = mean;
    if (!rep.exact_enumeration && signs.size() > 1) {
        double ss = 0.0;
        for (double v : rep.per_draw_maxima) ss += (v / nn - mean) * (v / nn - mean);
        const double var = ss / static_cast<double>(signs.size() - 1);
        rep.standard_error = std::sqrt(var / static_cast<double>(signs.size()));
    }
    return rep;
}

std::string estimate_report_to_json(const EstimateReport& r) {
    std::string out = "{\n  \"version\": 1,\n  \"estimate\": ";
    detail::write_real(out, r.estimate);
    out += ",\n  \"standard_error\": ";
    detail::write_real(out, r.standard_error);
    out += ",\n  \"lower_bound_heuristic\": true";
    out += ",\n  \"exact_enumeration\": ";
    out += r.exact_enumeration ? "true" : "false";
    out += ",\n  \"n\": " + std::to_string(r.n);
    out += ",\n  \"infeasible_iterates\": " + std::to_string(r.infeasible_iterates);
    if (r.analytic_bound) {
        out += ",\n  \"analytic_bound\": ";
        detail::write_real(out, *r.analytic_bound);
        out += ",\n  \"margin\": ";
        detail::write_real(out, *r.margin());
    }
    out += ",\n  \"per_draw_maxima\": ";
    detail::write_real_array(out, r.per_draw_maxima);
    out += ",\n  \"draw_weights\": ";
    detail::write_real_array(out, r.draw_weights);
    const auto& c = r.config;
    out += ",\n  \"config\": {\"epsilon_draws\": " + std::to_string(c.epsilon_draws) +
           ", \"restarts\": " + std::to_string(c.restarts) + ", \"steps\": " + std::to_string(c.steps) +
           ", \"step_size\": ";
    detail::write_real(out, c.step_size);
    out += ", \"decay\": ";
    detail::write_real(out, c.decay);
    out += ", \"decay_every\": " + std::to_string(c.decay_every) + ", \"seed\": " + std::to_string(c.seed) +
           ", \"exact_enumeration_max_n\": " + std::to_string(c.exact_enumeration_max_n) + "}\n}\n";
    return out;
}

namespace {

// E over sign vectors of max(sum eps_i v_i, -sum eps_i v_i, 0), exact via Gray code.
double enumerate_abs_mean(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;  // all eps = +1
    double acc = std::abs(sum);
    std::vector<double> sign(n, 1.0);
    const std::uint64_t patterns = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < patterns; ++g) {
        const auto bit = static_cast<std::size_t>(__builtin_ctzll(g));
        sum -= 2.0 * sign[bit] * v[bit];
        sign[bit] = -sign[bit];
        acc += std::abs(sum);
    }
    return acc / static_cast<double>(patterns);
}

double monte_carlo_abs_mean(const std::vector<double>& v, std::uint64_t seed, std::size_t draws) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    double acc = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        double s = 0.0;
        for (double x : v) s += coin(rng) ? x : -x;
        acc += std::abs(s);
    }
    return acc / static_cast<double>(draws);
}

}  // namespace

std::vector<Claim1Row> demo_claim1(std::span<const double> c0_list, double gamma0, std::size_t n,
                                   std::uint64_t seed, bool monte_carlo, std::size_t draws) {
    if (n < 1) throw PreconditionError("n must be >= 1");
    if (n > 25 && !monte_carlo) throw PreconditionError("n > 25 requires Monte Carlo mode");
    if (monte_carlo && draws < 1) throw PreconditionError("Monte Carlo mode needs at least one draw");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw PreconditionError("gamma0 must be positive");

    const Sample sample = Sample::uniform(n, 1, seed);
    const NormSpec ns = NormSpec::l1_inf();
    const std::vector<std::size_t> dims{1, 2, 1};

    std::vector<Claim1Row> rows;
    for (double c0 : c0_list) {
        if (!(c0 >= 0.0) || !std::isfinite(c0)) throw PreconditionError("C0 values must be nonnegative");
        Claim1Row row;
        row.c0 = c0;
        if (c0 == 0.0) {
            rows.push_back(row);
            continue;
        }
        const WnNetwork net = constant_network(c0, gamma0, 1, dims, ns);
        row.norm_product = 1.0;
        for (double v : layer_norms(net, ns)) row.norm_product *= v;
        // the class holds net and its negation, so the supremum is |sum eps_i f(x_i)|
        std::vector<double> values;
        for (const auto& x : sample.points()) values.push_back(eval_scalar(net, x));
        const double mean = monte_carlo ? monte_carlo_abs_mean(values, stream_seed(seed, 1, kSignStream), draws)
                                        : enumerate_abs_mean(values);
        row.witness = mean / static_cast<double>(n);
        rows.push_back(row);
    }
    return rows;
}

std::string claim1_csv(const std::vector<Claim1Row>& rows) {
    std::string out = "C0,witness,norm_product\n";
    for (const auto& r : rows) {
        out += format_number(r.c0) + "," + format_number(r.witness) + "," + format_number(r.norm_product) + "\n";
    }
    return out;
}

}  // namespace wnn
