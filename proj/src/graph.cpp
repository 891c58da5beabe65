#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/cov/tiled_matrix.hpp"
#include "tlrgeo/ordering/curves.hpp"
#include "tlrgeo/ordering/graph.hpp"

namespace tlrgeo::ordering {

SparseGraph sparsify(const cov::TiledDenseMatrix& sigma, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("sparsify: tau must be > 0");
    index_t n = sigma.n();
    SparseGraph g;
    g.adjacency.resize(n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = i + 1; j < n; ++j) {
            if (std::abs(sigma.entry(i, j)) >= tau) {
                g.adjacency[i].push_back(j);
                g.adjacency[j].push_back(i);
            }
        }
    }
    return g;
}

Permutation order_rcm(const SparseGraph& g) {
    index_t n = g.n();
    Permutation perm;
    perm.method = OrderingMethod::rcm;
    perm.map.reserve(n);
    std::vector<char> visited(n, 0);
    std::vector<index_t> component;
    std::vector<index_t> order;

    for (index_t root = 0; root < n; ++root) {
        if (visited[root]) continue;

        // discover the component, then start Cuthill-McKee from its
        // minimum-degree node (ties by index)
        component.clear();
        component.push_back(root);
        visited[root] = 1;
        for (size_t h = 0; h < component.size(); ++h)
            for (index_t w : g.adjacency[component[h]])
                if (!visited[w]) {
                    visited[w] = 1;
                    component.push_back(w);
                }
        index_t start = component[0];
        for (index_t v : component)
            if (g.degree(v) < g.degree(start) || (g.degree(v) == g.degree(start) && v < start))
                start = v;

        for (index_t v : component) visited[v] = 0;
        order.clear();
        order.push_back(start);
        visited[start] = 1;
        std::vector<index_t> nbrs;
        for (size_t h = 0; h < order.size(); ++h) {
            nbrs.clear();
            for (index_t w : g.adjacency[order[h]])
                if (!visited[w]) nbrs.push_back(w);
            std::sort(nbrs.begin(), nbrs.end(), [&](index_t a, index_t b) {
                return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
            });
            for (index_t w : nbrs) {
                visited[w] = 1;
                order.push_back(w);
            }
        }
        // reverse per component so an edgeless graph stays in index order
        perm.map.insert(perm.map.end(), order.rbegin(), order.rend());
    }
    return perm;
}

Permutation order_min_degree(const SparseGraph& g) {
    index_t n = g.n();
    Permutation perm;
    perm.method = OrderingMethod::mindegree;
    perm.map.reserve(n);
    std::vector<index_t> degree(n);
    std::vector<char> removed(n, 0);
    for (index_t v = 0; v < n; ++v) degree[v] = g.degree(v);

    for (index_t step = 0; step < n; ++step) {
        index_t best = -1;
        for (index_t v = 0; v < n; ++v) {
            if (removed[v]) continue;
            if (best < 0 || degree[v] < degree[best]) best = v;
        }
        removed[best] = 1;
        perm.map.push_back(best);
        for (index_t w : g.adjacency[best])
            if (!removed[w]) --degree[w];
    }
    return perm;
}

Permutation order_locations(const LocationSet& locs, const OrderingSpec& spec,
                            const cov::CovarianceModel& model) {
    switch (spec.method) {
        case OrderingMethod::none:
            return Permutation::identity(locs.n());
        case OrderingMethod::morton:
            return order_by_curve(locs, Curve::morton, spec.curve_bits);
        case OrderingMethod::hilbert:
            return order_by_curve(locs, Curve::hilbert, spec.curve_bits);
        case OrderingMethod::kdtree:
            return order_kdtree(locs);
        case OrderingMethod::rcm:
        case OrderingMethod::mindegree: {
            index_t dim = model.dim(locs.n());
            auto sigma = cov::build_covariance(locs, model, std::min<index_t>(dim, 1024));
            SparseGraph g = sparsify(sigma, spec.sparsify_tau);
            return spec.method == OrderingMethod::rcm ? order_rcm(g) : order_min_degree(g);
        }
    }
    throw std::invalid_argument("order_locations: unknown method");
}

} // namespace tlrgeo::ordering
