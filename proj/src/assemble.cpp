#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/kernels/covariance.hpp"
#include "tlrgeo/linalg/dense.hpp"
#include "tlrgeo/rng.hpp"
#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/util/parallel.hpp"

namespace tlrgeo::cov {

TiledDenseMatrix::TiledDenseMatrix(index_t n, index_t nb) : n_(n), nb_(nb) {
    if (n < 1 || nb < 1 || nb > n)
        throw std::invalid_argument("TiledDenseMatrix: need 1 <= nb <= n");
    nt_ = (n + nb - 1) / nb;
    tiles_.resize(nt_ * nt_);
    for (index_t i = 0; i < nt_; ++i)
        for (index_t j = 0; j < nt_; ++j)
            tile(i, j) = linalg::Matrix(tile_size(i), tile_size(j));
}

void TiledDenseMatrix::dump(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw io_error("cannot open for writing: " + path);
    std::uint64_t header[2] = {static_cast<std::uint64_t>(n_), static_cast<std::uint64_t>(nb_)};
    std::fwrite(header, sizeof(std::uint64_t), 2, f);
    for (const auto& t : tiles_)
        std::fwrite(t.data(), sizeof(double), t.size(), f);
    if (std::fclose(f) != 0) throw io_error("write failed: " + path);
}

TiledDenseMatrix TiledDenseMatrix::load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw io_error("cannot open: " + path);
    std::uint64_t header[2];
    if (std::fread(header, sizeof(std::uint64_t), 2, f) != 2) {
        std::fclose(f);
        throw io_error("truncated header: " + path);
    }
    TiledDenseMatrix m(static_cast<index_t>(header[0]), static_cast<index_t>(header[1]));
    for (auto& t : m.tiles_) {
        if (std::fread(t.data(), sizeof(double), t.size(), f) != static_cast<size_t>(t.size())) {
            std::fclose(f);
            throw io_error("truncated tile data: " + path);
        }
    }
    std::fclose(f);
    return m;
}

void CovarianceModel::validate() const {
    switch (kernel) {
        case KernelId::matern: matern.validate(); break;
        case KernelId::bivariate_matern: bivariate.validate(); break;
        case KernelId::tgh_matern: matern.validate(); tgh.validate(); break;
    }
}

namespace {

// point index and component for a global row of the covariance matrix
inline index_t point_of(KernelId k, index_t g) noexcept {
    return k == KernelId::bivariate_matern ? g / 2 : g;
}
inline int comp_of(KernelId k, index_t g) noexcept {
    return k == KernelId::bivariate_matern ? static_cast<int>(g % 2) + 1 : 1;
}

void fill_tile(const LocationSet& locs, const CovarianceModel& model, linalg::Matrix& out,
               index_t row0, index_t col0, bool diagonal_tile) {
    index_t rows = out.rows();
    index_t cols = out.cols();
    KernelId k = model.kernel;
    bool univariate = (k != KernelId::bivariate_matern);

    if (univariate) {
        std::vector<double> d2(rows), d(rows);
        for (index_t j = 0; j < cols; ++j) {
            index_t gj = col0 + j;
            const Location& pj = locs.points[gj];
            index_t start = diagonal_tile ? j : 0; // lower half of diagonal tiles
            for (index_t i = start; i < rows; ++i) {
                const Location& pi = locs.points[row0 + i];
                double dx = pi.x - pj.x;
                double dy = pi.y - pj.y;
                d2[i] = dx * dx + dy * dy;
            }
            simd::sqrt_vec(rows - start, d2.data() + start, d.data() + start);
            kernels::matern_batch(rows - start, d.data() + start, model.matern,
                                  out.col(j) + start);
        }
    } else {
        for (index_t j = 0; j < cols; ++j) {
            index_t gj = col0 + j;
            const Location& pj = locs.points[point_of(k, gj)];
            int cj = comp_of(k, gj);
            index_t start = diagonal_tile ? j : 0;
            for (index_t i = start; i < rows; ++i) {
                index_t gi = row0 + i;
                const Location& pi = locs.points[point_of(k, gi)];
                double dx = pi.x - pj.x;
                double dy = pi.y - pj.y;
                out(i, j) = kernels::bivariate_matern(std::sqrt(dx * dx + dy * dy),
                                                      comp_of(k, gi), cj, model.bivariate);
            }
        }
    }
    if (diagonal_tile) {
        for (index_t j = 0; j < cols; ++j)
            for (index_t i = j + 1; i < rows; ++i) out(j, i) = out(i, j);
    }
}

} // namespace

linalg::Matrix assemble_tile(const LocationSet& locs, const CovarianceModel& model,
                             index_t nb, index_t tile_row, index_t tile_col) {
    model.validate();
    index_t dim = model.dim(locs.n());
    auto size_of = [&](index_t t) { return std::min(nb, dim - t * nb); };
    linalg::Matrix out(size_of(tile_row), size_of(tile_col));
    fill_tile(locs, model, out, tile_row * nb, tile_col * nb, tile_row == tile_col);
    return out;
}

TiledDenseMatrix build_covariance(const LocationSet& locs, const CovarianceModel& model,
                                  index_t nb) {
    model.validate();
    index_t dim = model.dim(locs.n());
    if (nb < 1 || nb > dim)
        throw std::invalid_argument("build_covariance: need 1 <= nb <= matrix dimension");
    TiledDenseMatrix sigma(dim, nb);
    index_t nt = sigma.grid();
    std::vector<std::pair<index_t, index_t>> lower;
    for (index_t i = 0; i < nt; ++i)
        for (index_t j = 0; j <= i; ++j) lower.emplace_back(i, j);

    util::parallel_for(static_cast<index_t>(lower.size()), [&](index_t t) {
        auto [i, j] = lower[t];
        linalg::Matrix& tile = sigma.tile(i, j);
        fill_tile(locs, model, tile, sigma.tile_offset(i), sigma.tile_offset(j), i == j);
        if (i != j) {
            // mirror: upper tile is the exact transpose
            linalg::Matrix& up = sigma.tile(j, i);
            for (index_t c = 0; c < tile.cols(); ++c)
                for (index_t r = 0; r < tile.rows(); ++r) up(c, r) = tile(r, c);
        }
    });
    return sigma;
}

std::vector<double> simulate_field(const LocationSet& locs, const CovarianceModel& model,
                                   std::uint64_t seed) {
    model.validate();
    index_t dim = model.dim(locs.n());
    if (dim > 50000)
        throw std::invalid_argument("simulate_field: dense Cholesky limited to n <= 50000");

    TiledDenseMatrix sigma = build_covariance(locs, model, dim); // single tile
    linalg::Matrix& full = sigma.tile(0, 0);
    linalg::potrf_lower(full);

    Rng rng(seed, streams::kFieldNoise);
    std::vector<double> w(dim), z(dim);
    for (auto& wi : w) wi = rng.normal();
    linalg::trmv_lower(full, w.data(), z.data());

    if (model.kernel == KernelId::tgh_matern)
        for (auto& zi : z) zi = kernels::tgh_transform(zi, model.tgh);
    return z;
}

} // namespace tlrgeo::cov
