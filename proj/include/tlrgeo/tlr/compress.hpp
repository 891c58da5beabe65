#pragma once

#include <string>
#include <vector>

#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/cov/tiled_matrix.hpp"
#include "tlrgeo/linalg/matrix.hpp"
#include "tlrgeo/location.hpp"

namespace tlrgeo::tlr {

// Rank-r tile factors: tile ~= U V^T with spectral error <= eps * sigma_1.
// U carries the singular values; V has orthonormal columns.
struct LowRankTile {
    linalg::Matrix u; // rows x r
    linalg::Matrix v; // cols x r

    index_t rows() const noexcept { return u.rows(); }
    index_t cols() const noexcept { return v.rows(); }
    index_t rank() const noexcept { return u.cols(); }

    static LowRankTile zero(index_t rows, index_t cols) {
        return {linalg::Matrix(rows, 0), linalg::Matrix(cols, 0)};
    }
};

// Relative spectral truncation: keep the smallest r with sigma_{r+1} <= eps * sigma_1.
LowRankTile compress_tile(const linalg::Matrix& tile, double epsilon);
linalg::Matrix reconstruct_tile(const LowRankTile& lr);

// Exact factor pair (U = tile, V = I) for tiles past the compression budget:
// zero reconstruction error, rank equal to the tile width.
LowRankTile exact_tile(const linalg::Matrix& tile);

// Dense diagonal tiles + low-rank lower-triangle off-diagonal tiles.
class TlrMatrix {
public:
    TlrMatrix() = default;
    TlrMatrix(index_t n, index_t nb, double epsilon);

    index_t n() const noexcept { return n_; }
    index_t nb() const noexcept { return nb_; }
    index_t grid() const noexcept { return nt_; }
    double epsilon() const noexcept { return epsilon_; }
    index_t tile_size(index_t t) const noexcept {
        return (t + 1) * nb_ <= n_ ? nb_ : n_ - t * nb_;
    }

    linalg::Matrix& diag(index_t i) noexcept { return diag_[i]; }
    const linalg::Matrix& diag(index_t i) const noexcept { return diag_[i]; }
    // i > j
    LowRankTile& low(index_t i, index_t j) noexcept { return low_[i * (i - 1) / 2 + j]; }
    const LowRankTile& low(index_t i, index_t j) const noexcept { return low_[i * (i - 1) / 2 + j]; }

    OrderingMethod ordering = OrderingMethod::none; // annotation carried into reports

    // off-diagonal tiles with rank >= half the tile size (compression no
    // longer pays off at 2*nb*r vs nb^2 storage)
    std::vector<std::tuple<index_t, index_t, index_t>> over_budget_tiles() const;

private:
    index_t n_ = 0;
    index_t nb_ = 0;
    index_t nt_ = 0;
    double epsilon_ = 0.0;
    std::vector<linalg::Matrix> diag_;
    std::vector<LowRankTile> low_;
};

TlrMatrix compress_matrix(const cov::TiledDenseMatrix& dense, double epsilon);

// Streaming assemble-and-compress: never materializes the full dense matrix.
// Bitwise identical to build_covariance + compress_matrix.
TlrMatrix compress_covariance(const LocationSet& locs, const cov::CovarianceModel& model,
                              index_t nb, double epsilon);

struct RankReport {
    index_t n = 0;
    index_t nb = 0;
    double epsilon = 0.0;
    OrderingMethod ordering = OrderingMethod::none;
    std::vector<std::tuple<index_t, index_t, index_t>> grid; // (tile_i, tile_j, rank), i > j
    double min = 0.0, median = 0.0, mean = 0.0, max = 0.0;   // NaN when no off-diagonal tiles
    std::int64_t memory_bytes_tlr = 0;   // sum over lower off-diagonal tiles of (rows+cols)*r*8
    std::int64_t memory_bytes_dense = 0; // same tiles stored dense

    double mem_tlr_mb() const noexcept { return static_cast<double>(memory_bytes_tlr) / 1e6; }
    double mem_dense_mb() const noexcept { return static_cast<double>(memory_bytes_dense) / 1e6; }
};

RankReport rank_stats(const TlrMatrix& tlr);

// rows "tile_i,tile_j,rank"
void write_rank_heatmap_csv(const std::string& path, const RankReport& report,
                            const std::string& config_comment = "");
// {n, nb, epsilon, ordering, min, median, mean, max, mem_tlr_mb, mem_dense_mb}
std::string rank_report_json(const RankReport& report);

} // namespace tlrgeo::tlr
