#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace twobit {

/// Dense row-major matrix of doubles; rows are data points.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    const std::vector<double>& values() const { return values_; }

    /// Scales every row to unit l2 norm; throws ValidationError naming the first zero row.
    void normalize_rows();

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);

} // namespace twobit
