#pragma once

#include <vector>

#include "tlrgeo/location.hpp"

namespace tlrgeo::cov {
class TiledDenseMatrix;
struct CovarianceModel;
}

namespace tlrgeo::ordering {

// Undirected graph with sorted neighbor lists; no self loops.
struct SparseGraph {
    std::vector<std::vector<index_t>> adjacency;

    index_t n() const noexcept { return static_cast<index_t>(adjacency.size()); }
    index_t degree(index_t v) const noexcept { return static_cast<index_t>(adjacency[v].size()); }
};

// Edge (i, j) present iff |Sigma_ij| >= tau, i != j.
SparseGraph sparsify(const cov::TiledDenseMatrix& sigma, double tau);

// Cuthill-McKee BFS (start: minimum-degree node of each component, ties by
// lowest index; neighbors visited by ascending degree then index), reversed
// per component. Documented as experimental alongside order_min_degree: the
// curve and tree orderings are the ones that pay off in practice.
Permutation order_rcm(const SparseGraph& g);

// Repeated elimination of the minimum-degree node (ties by lowest index),
// updating neighbor degrees after each removal.
Permutation order_min_degree(const SparseGraph& g);

struct OrderingSpec {
    OrderingMethod method = OrderingMethod::none;
    int curve_bits = 16;       // morton / hilbert quantization
    double sparsify_tau = 0.5; // rcm / mindegree covariance threshold
};

// Dispatch to the right algorithm. Graph methods assemble the covariance with
// `model` and sparsify it at spec.sparsify_tau.
Permutation order_locations(const LocationSet& locs, const OrderingSpec& spec,
                            const cov::CovarianceModel& model);

} // namespace tlrgeo::ordering
