#pragma once

#include <cstdint>
#include <vector>

#include "tlrgeo/cov/tiled_matrix.hpp"
#include "tlrgeo/location.hpp"
#include "tlrgeo/params.hpp"

namespace tlrgeo::cov {

// Kernel selection plus the matching parameter block. The tgh_matern model
// shares the Matern covariance; the Tukey g-and-h transform only enters
// simulation output.
struct CovarianceModel {
    KernelId kernel = KernelId::matern;
    MaternParams matern;
    BivariateMaternParams bivariate;
    TghParams tgh;

    void validate() const;
    // matrix dimension for n locations (2n for the bivariate model)
    index_t dim(index_t n_locations) const noexcept {
        return kernel == KernelId::bivariate_matern ? 2 * n_locations : n_locations;
    }
};

// Sigma_ij = C(||s_i - s_j||). Lower-triangle tiles are assembled once and
// mirrored, so Sigma is exactly symmetric. Tile tasks run under parallel_for.
TiledDenseMatrix build_covariance(const LocationSet& locs, const CovarianceModel& model,
                                  index_t nb);

// Assemble a single tile of the covariance matrix without materializing the
// rest (row/col are tile indices for tile size nb).
linalg::Matrix assemble_tile(const LocationSet& locs, const CovarianceModel& model,
                             index_t nb, index_t tile_row, index_t tile_col);

// Z = L w with L L^T = Sigma (dense Cholesky) and w ~ N(0, I) from the seed.
// For tgh_matern the Tukey transform is applied pointwise afterwards.
std::vector<double> simulate_field(const LocationSet& locs, const CovarianceModel& model,
                                   std::uint64_t seed);

} // namespace tlrgeo::cov
