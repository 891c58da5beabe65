#pragma once

#include <string>
#include <vector>

#include "tlrgeo/params.hpp"
#include "tlrgeo/tlr/compress.hpp"

namespace tlrgeo::tlr {

// Lower Cholesky factor in TLR form: diagonal tiles hold dense lower-
// triangular blocks, off-diagonal tiles stay low-rank.
struct TlrCholeskyFactor {
    TlrMatrix m;

    index_t n() const noexcept { return m.n(); }
    index_t grid() const noexcept { return m.grid(); }
};

// result ~= a + b with spectral error <= eps * sigma_1(a+b); QR of the
// concatenated factors, SVD of the small core, truncate.
LowRankTile recompress_sum(const LowRankTile& a, const LowRankTile& b, double epsilon);

// Right-looking tiled Cholesky. Consumes its input. Throws
// factorization_error carrying the diagonal tile index on a non-positive
// pivot (no regularization is ever applied).
TlrCholeskyFactor tlr_potrf(TlrMatrix a);

// y with L y = b (block forward substitution).
std::vector<double> tlr_trsv(const TlrCholeskyFactor& l, const std::vector<double>& b);

// log|Sigma| = 2 * sum_i log(L_ii diagonal entries)
double logdet(const TlrCholeskyFactor& l);

struct TimingRecord {
    index_t n = 0;
    index_t nb = 0;
    double epsilon = 0.0;
    OrderingMethod ordering = OrderingMethod::none;
    KernelId kernel = KernelId::matern;
    MaternParams params;
    double median_seconds = 0.0;
    int runs = 0;
    std::vector<double> seconds;
};

// Median wall-clock time of tlr_potrf alone over `runs` repetitions (each run
// factorizes a fresh copy; assembly and compression are not included).
TimingRecord time_factorization(const TlrMatrix& a, int runs, KernelId kernel,
                                const MaternParams& params);

std::string timing_record_json(const TimingRecord& rec);

} // namespace tlrgeo::tlr
