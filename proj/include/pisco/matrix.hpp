#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "pisco/kernels.hpp"

namespace pisco {

// Dense column-major matrix. In the protocol state, rows index the parameter
// dimension and each column is one agent's vector, so per-agent slices are
// contiguous and kernel-friendly.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double* col(std::size_t j) {
        assert(j < cols_);
        return data_.data() + j * rows_;
    }
    const double* col(std::size_t j) const {
        assert(j < cols_);
        return data_.data() + j * rows_;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    // Mean across columns, one entry per row.
    std::vector<double> row_mean() const {
        std::vector<double> m(rows_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            kernels::axpy(1.0, col(j), m.data(), rows_);
        kernels::scal(cols_ ? 1.0 / static_cast<double>(cols_) : 0.0, m.data(), rows_);
        return m;
    }

    double frob_sq() const { return kernels::sumsq(data_.data(), data_.size()); }

    // Squared Frobenius deviation from the column mean.
    double colmean_dev_sq() const {
        const std::vector<double> m = row_mean();
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j)
            s += kernels::sumsq_diff(col(j), m.data(), rows_);
        return s;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace pisco
