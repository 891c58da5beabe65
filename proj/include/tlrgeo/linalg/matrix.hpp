#pragma once

#include <cassert>
#include <utility>
#include <vector>

#include "tlrgeo/common.hpp"

namespace tlrgeo::linalg {

// Owning column-major matrix. Leading dimension always equals rows().
class Matrix {
public:
    Matrix() = default;
    Matrix(index_t rows, index_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    index_t rows() const noexcept { return rows_; }
    index_t cols() const noexcept { return cols_; }
    index_t size() const noexcept { return rows_ * cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(index_t i, index_t j) noexcept {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[i + j * rows_];
    }
    double operator()(index_t i, index_t j) const noexcept {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[i + j * rows_];
    }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    double* col(index_t j) noexcept { return data_.data() + j * rows_; }
    const double* col(index_t j) const noexcept { return data_.data() + j * rows_; }

    static Matrix identity(index_t n) {
        Matrix m(n, n);
        for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace tlrgeo::linalg
