#pragma once

#include <string>
#include <vector>

#include "tlrgeo/linalg/matrix.hpp"

namespace tlrgeo::cov {

// Symmetric n x n matrix stored as a ceil(n/nb)^2 grid of dense tiles
// (row-major tile grid, column-major entries inside a tile). Trailing tiles
// are ragged when nb does not divide n.
class TiledDenseMatrix {
public:
    TiledDenseMatrix() = default;
    TiledDenseMatrix(index_t n, index_t nb);

    index_t n() const noexcept { return n_; }
    index_t nb() const noexcept { return nb_; }
    index_t grid() const noexcept { return nt_; }
    index_t tile_size(index_t t) const noexcept {
        return (t + 1) * nb_ <= n_ ? nb_ : n_ - t * nb_;
    }
    index_t tile_offset(index_t t) const noexcept { return t * nb_; }

    linalg::Matrix& tile(index_t i, index_t j) noexcept { return tiles_[i * nt_ + j]; }
    const linalg::Matrix& tile(index_t i, index_t j) const noexcept { return tiles_[i * nt_ + j]; }

    double entry(index_t i, index_t j) const noexcept {
        return tile(i / nb_, j / nb_)(i % nb_, j % nb_);
    }

    // binary dump: header {n, nb} as uint64 LE, tiles in row-major tile
    // order, column-major float64 entries within each tile
    void dump(const std::string& path) const;
    static TiledDenseMatrix load(const std::string& path);

private:
    index_t n_ = 0;
    index_t nb_ = 0;
    index_t nt_ = 0;
    std::vector<linalg::Matrix> tiles_;
};

} // namespace tlrgeo::cov
