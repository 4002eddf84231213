#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wnn/norm.hpp"

namespace wnn {

/// Row-major dense matrix of finite doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// Zero-filled rows x cols matrix; both dimensions must be positive.
    DenseMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major entries. Throws DimensionError on a size
    /// mismatch and NonFiniteError on NaN/Inf.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }

    double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c]; }

    /// Bounds- and finiteness-checked write.
    void set(std::size_t r, std::size_t c, double value);

    std::span<const double> row(std::size_t r) const noexcept {
        return {entries_.data() + r * cols_, cols_};
    }
    std::vector<double> column(std::size_t c) const;

    std::span<const double> entries() const noexcept { return entries_; }

    DenseMatrix scaled(double s) const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

/// Column-wise mixed norm ||A||_{p,q}: p-norm down each column, q-norm across
/// columns; q == inf takes the largest column p-norm.
double lpq_norm(const DenseMatrix& m, const NormSpec& ns);

/// l_p norm of a vector (p may be infinite).
double lp_norm(std::span<const double> v, const NormIndex& p);

}  // namespace wnn
