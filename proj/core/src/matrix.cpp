#include "wnn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "wnn/error.hpp"

namespace wnn {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
    if (entries_.size() != rows * cols) {
        throw DimensionError("matrix expects " + std::to_string(rows * cols) + " entries, got " +
                             std::to_string(entries_.size()));
    }
    if (!std::all_of(entries_.begin(), entries_.end(), [](double v) { return std::isfinite(v); })) {
        throw NonFiniteError("matrix contains a non-finite entry");
    }
}

void DenseMatrix::set(std::size_t r, std::size_t c, double value) {
    if (r >= rows_ || c >= cols_) throw DimensionError("matrix index out of range");
    if (!std::isfinite(value)) throw NonFiniteError("non-finite matrix entry");
    entries_[r * cols_ + c] = value;
}

std::vector<double> DenseMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

DenseMatrix DenseMatrix::scaled(double s) const {
    std::vector<double> e(entries_);
    for (double& v : e) v *= s;
    return DenseMatrix(rows_, cols_, std::move(e));
}

double lp_norm(std::span<const double> v, const NormIndex& p) {
    if (p.is_inf()) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    const double pv = p.value();
    double acc = 0.0;
    if (pv == 1.0) {
        for (double x : v) acc += std::abs(x);
        return acc;
    }
    if (pv == 2.0) {
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    }
    for (double x : v) acc += std::pow(std::abs(x), pv);
    return std::pow(acc, 1.0 / pv);
}

namespace {

// sum_i |a_ij|^p for column j
double column_power_sum(const DenseMatrix& m, std::size_t j, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double a = std::abs(m(i, j));
        acc += p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
    }
    return acc;
}

}  // namespace

double lpq_norm(const DenseMatrix& m, const NormSpec& ns) {
    const double p = ns.p.value();
    if (ns.q.is_inf()) {
        double best = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double s = column_power_sum(m, j, p);
            const double col = p == 1.0 ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
            best = std::max(best, col);
        }
        return best;
    }
    const double q = ns.q.value();
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double s = column_power_sum(m, j, p);
        // an all-zero column contributes 0 for every exponent
        if (s == 0.0) continue;
        acc += q == p ? s : std::pow(s, q / p);
    }
    if (q == 1.0) return acc;
    if (q == 2.0) return std::sqrt(acc);
    return std::pow(acc, 1.0 / q);
}

}  // namespace wnn
