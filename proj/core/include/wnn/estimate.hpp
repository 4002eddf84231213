#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wnn/capacity.hpp"
#include "wnn/matrix.hpp"
#include "wnn/network.hpp"

namespace wnn {

/// Euclidean projection onto {x : ||x||_1 <= radius} (sort and threshold).
std::vector<double> project_l1(std::span<const double> v, double radius);

/// Projection onto the (p, q) ball of the given radius. Supported:
/// (1, inf) column-wise l1 projection, (2, inf) column rescale, (2, 2) global
/// Frobenius rescale. Throws UnsupportedNorm otherwise.
DenseMatrix project_lpq(const DenseMatrix& m, const NormSpec& ns, double radius);

bool projection_supported(const NormSpec& ns);

/// n points in [-1, 1]^{m1}.
class Sample {
public:
    explicit Sample(std::vector<std::vector<double>> points);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return points_.front().size(); }
    const std::vector<double>& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<std::vector<double>>& points() const noexcept { return points_; }

    static Sample uniform(std::size_t n, std::size_t m1, std::uint64_t seed);

private:
    std::vector<std::vector<double>> points_;
};

// Sample file: { "version": 1, "points": [[...], ...] }
Sample sample_from_json(const std::string& text);
std::string sample_to_json(const Sample& s);
Sample load_sample(const std::filesystem::path& path);

struct EstimateConfig {
    std::size_t epsilon_draws = 64;
    std::size_t restarts = 16;
    std::size_t steps = 500;
    double step_size = 0.05;
    double decay = 0.5;
    std::size_t decay_every = 100;
    std::uint64_t seed = 0;
    /// Sign vectors are enumerated exactly when n <= this.
    std::size_t exact_enumeration_max_n = 12;
    /// Check every iterate with class_check (<= rule); violations are counted.
    bool verify_feasibility = false;
    /// 0 = hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
};

struct EstimateReport {
    /// Mean over sign vectors of the best inner value, divided by n. A
    /// lower-bound heuristic for the empirical Rademacher complexity.
    double estimate = 0.0;
    double standard_error = 0.0;
    bool exact_enumeration = false;
    /// Best sum_i eps_i f(x_i) per sign vector (enumerated or drawn).
    std::vector<double> per_draw_maxima;
    /// Weight of each entry of per_draw_maxima in the mean.
    std::vector<double> draw_weights;
    std::size_t infeasible_iterates = 0;
    EstimateConfig config;
    std::size_t n = 0;
    std::optional<double> analytic_bound;

    std::optional<double> margin() const {
        if (!analytic_bound) return std::nullopt;
        return *analytic_bound - estimate;
    }
};

std::string estimate_report_to_json(const EstimateReport& r);

/// Monte-Carlo / exact-enumeration estimate of E_eps sup_f (1/n) sum eps_i f(x_i)
/// over the class, maximizing by projected gradient ascent with restarts.
/// Hidden layers are held at norm exactly c, the output layer inside the
/// c_out ball. Deterministic in (seed, config) regardless of thread count.
EstimateReport empirical_rademacher(const ClassSpec& spec, const Sample& s, const EstimateConfig& cfg);

struct Claim1Row {
    double c0 = 0.0;
    double witness = 0.0;
    double norm_product = 0.0;
};

/// For each C0 builds constant networks with output +-C0 and norm product
/// <= gamma0, and evaluates (1/n) E_eps max(sum eps_i f(x_i)) over {+C0, -C0, 0}
/// = C0 E|sum eps_i| / n. Exact enumeration for n <= 25; larger n requires
/// monte_carlo (uses `draws` sign vectors).
std::vector<Claim1Row> demo_claim1(std::span<const double> c0_list, double gamma0, std::size_t n,
                                   std::uint64_t seed, bool monte_carlo = false, std::size_t draws = 100000);

std::string claim1_csv(const std::vector<Claim1Row>& rows);

}  // namespace wnn
