#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/kernels/covariance.hpp"
#include "tlrgeo/ordering/curves.hpp"
#include "tlrgeo/ordering/graph.hpp"

using namespace tlrgeo;
using namespace tlrgeo::ordering;

TEST_CASE("quantize endpoints, midpoint, errors") {
    CHECK(quantize({0.0, 0.0}, 16).qx == 0);
    CHECK(quantize({1.0, 1.0}, 16).qx == 65535);
    // round(0.5 * 65535) = round(32767.5), half away from zero
    CHECK(quantize({0.5, 0.5}, 16).qx == 32768);
    CHECK_THROWS_AS(quantize({1.2, 0.0}, 16), std::invalid_argument);
    CHECK_THROWS_AS(quantize({0.5, 0.5}, 0), std::invalid_argument);
    CHECK_THROWS_AS(quantize({0.5, 0.5}, 33), std::invalid_argument);

    // monotone in each coordinate
    std::uint64_t prev = 0;
    for (double x = 0.0; x <= 1.0; x += 1.0 / 512) {
        auto g = quantize({x, 0.0}, 16);
        CHECK(g.qx >= prev);
        prev = g.qx;
    }
}

TEST_CASE("dequantize endpoints and grid roundtrip") {
    GridCoord g0{0, 0, 16};
    CHECK(dequantize(g0).x == 0.0);
    GridCoord g1{65535, 65535, 16};
    CHECK(dequantize(g1).x == 1.0);
    for (std::uint64_t q = 0; q < 256; ++q) {
        GridCoord g{q, 255 - q, 8};
        auto loc = dequantize(g);
        auto back = quantize(loc, 8);
        CHECK(back.qx == g.qx);
        CHECK(back.qy == g.qy);
    }
}

TEST_CASE("morton single-bit and hand-interleaved examples") {
    CHECK(morton_index({0, 0, 3}) == 0);
    CHECK(morton_index({1, 0, 3}) == 1);
    CHECK(morton_index({0, 1, 3}) == 2);
    // interleave of qx=011, qy=101 -> 100111b = 39
    CHECK(morton_index({3, 5, 3}) == 39);
    auto g = morton_decode(39, 3);
    CHECK(g.qx == 3);
    CHECK(g.qy == 5);
    CHECK(morton_decode(0, 3).qx == 0);
    CHECK_THROWS_AS(morton_decode(64, 3), std::invalid_argument);
}

TEST_CASE("curve roundtrips are exhaustive for small p") {
    for (int p = 1; p <= 6; ++p) {
        std::uint64_t cells = 1ull << (2 * p);
        for (std::uint64_t c = 0; c < cells; ++c) {
            auto gm = morton_decode(c, p);
            CHECK(morton_index(gm) == c);
            auto gh = hilbert_decode(c, p);
            CHECK(hilbert_index(gh) == c);
        }
        // index o decode on the grid side
        std::uint64_t side = 1ull << p;
        for (std::uint64_t x = 0; x < side; ++x)
            for (std::uint64_t y = 0; y < side; ++y) {
                GridCoord g{x, y, p};
                auto m = morton_decode(morton_index(g), p);
                CHECK(m.qx == x);
                CHECK(m.qy == y);
                auto h = hilbert_decode(hilbert_index(g), p);
                CHECK(h.qx == x);
                CHECK(h.qy == y);
            }
    }
}

TEST_CASE("hilbert p=1 traversal and unit-step locality") {
    std::uint64_t want[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    for (std::uint64_t c = 0; c < 4; ++c) {
        auto g = hilbert_decode(c, 1);
        CHECK(g.qx == want[c][0]);
        CHECK(g.qy == want[c][1]);
    }
    for (int p = 1; p <= 6; ++p) {
        std::uint64_t cells = 1ull << (2 * p);
        auto prev = hilbert_decode(0, p);
        for (std::uint64_t c = 1; c < cells; ++c) {
            auto cur = hilbert_decode(c, p);
            std::uint64_t dx = cur.qx > prev.qx ? cur.qx - prev.qx : prev.qx - cur.qx;
            std::uint64_t dy = cur.qy > prev.qy ? cur.qy - prev.qy : prev.qy - cur.qy;
            CHECK(dx + dy == 1); // exactly one axis moves by exactly one cell
            prev = cur;
        }
    }
}

TEST_CASE("morton nesting: truncating low bits coarsens the cell") {
    for (int p = 2; p <= 6; ++p)
        for (int pc = 1; pc < p; ++pc) {
            std::uint64_t side = 1ull << p;
            for (std::uint64_t x = 0; x < side; x += 3)
                for (std::uint64_t y = 0; y < side; y += 3) {
                    std::uint64_t fine = morton_index({x, y, p});
                    std::uint64_t coarse = morton_index({x >> (p - pc), y >> (p - pc), pc});
                    CHECK((fine >> (2 * (p - pc))) == coarse);
                }
        }
}

TEST_CASE("order_by_curve basics") {
    LocationSet one;
    one.points = {{0.3, 0.7}};
    CHECK(order_by_curve(one, Curve::hilbert).map == std::vector<index_t>{0});

    // the four p=1 cell centers, fed in scrambled order
    LocationSet four;
    four.points = {{0.75, 0.75}, {0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}};
    auto perm = order_by_curve(four, Curve::hilbert, 1);
    // hilbert order: (0,0),(0,1),(1,1),(1,0)
    CHECK(perm.map == std::vector<index_t>{1, 3, 0, 2});

    // already Morton-sorted input gives the identity
    LocationSet sorted;
    for (std::uint64_t c = 0; c < 16; ++c) {
        auto g = morton_decode(c, 2);
        sorted.points.push_back(dequantize(g));
    }
    auto mp = order_by_curve(sorted, Curve::morton, 2);
    for (index_t i = 0; i < 16; ++i) CHECK(mp.map[i] == i);

    // ties (same cell) break by original index
    LocationSet ties;
    ties.points = {{0.9, 0.9}, {0.1, 0.1}, {0.1000001, 0.1000001}};
    auto tp = order_by_curve(ties, Curve::morton, 1);
    CHECK(tp.map == std::vector<index_t>{1, 2, 0});
}

TEST_CASE("order_kdtree examples") {
    LocationSet one;
    one.points = {{0.4, 0.6}};
    CHECK(order_kdtree(one).map == std::vector<index_t>{0});

    LocationSet two;
    two.points = {{0.1, 0.5}, {0.9, 0.5}};
    CHECK(order_kdtree(two).map == std::vector<index_t>{0, 1});

    LocationSet collinear;
    collinear.points = {{0.7, 0.0}, {0.1, 0.0}, {0.9, 0.0}, {0.3, 0.0}};
    CHECK(order_kdtree(collinear).map == std::vector<index_t>{1, 3, 0, 2});
}

TEST_CASE("kdtree split dominance and bijectivity on random sets") {
    std::mt19937 gen(17);
    for (int trial = 0; trial < 10; ++trial) {
        auto locs = generate_uniform_locations(1 + gen() % 300, 1000 + trial);
        auto perm = order_kdtree(locs);
        CHECK(perm.is_valid());

        // first split: left block values on the split axis never exceed
        // strictly-greater right block values
        index_t n = locs.n();
        if (n < 2) continue;
        double xmin = 2, xmax = -1, ymin = 2, ymax = -1;
        for (auto& p : locs.points) {
            xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
        }
        int axis = (xmax - xmin >= ymax - ymin) ? 0 : 1;
        index_t k = (n + 1) / 2;
        double left_max = -1, right_min = 2;
        for (index_t i = 0; i < k; ++i) {
            double v = axis == 0 ? locs.points[perm.map[i]].x : locs.points[perm.map[i]].y;
            left_max = std::max(left_max, v);
        }
        for (index_t i = k; i < n; ++i) {
            double v = axis == 0 ? locs.points[perm.map[i]].x : locs.points[perm.map[i]].y;
            right_min = std::min(right_min, v);
        }
        CHECK(left_max <= right_min + 1e-15);
    }
}

TEST_CASE("orderings are pure functions of the locations") {
    auto locs = generate_uniform_locations(500, 99);
    auto h1 = order_by_curve(locs, Curve::hilbert);
    auto h2 = order_by_curve(locs, Curve::hilbert);
    CHECK(h1.map == h2.map);
    auto k1 = order_kdtree(locs);
    auto k2 = order_kdtree(locs);
    CHECK(k1.map == k2.map);
    CHECK(h1.is_valid());
    CHECK(order_by_curve(locs, Curve::morton).is_valid());
    CHECK(k1.is_valid());
}

namespace {

SparseGraph graph_from_edges(index_t n, std::initializer_list<std::pair<index_t, index_t>> edges) {
    SparseGraph g;
    g.adjacency.resize(n);
    for (auto [a, b] : edges) {
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
}

index_t bandwidth(const SparseGraph& g, const Permutation& perm) {
    std::vector<index_t> pos(g.n());
    for (index_t i = 0; i < perm.n(); ++i) pos[perm.map[i]] = i;
    index_t bw = 0;
    for (index_t v = 0; v < g.n(); ++v)
        for (index_t w : g.adjacency[v]) bw = std::max(bw, std::abs(pos[v] - pos[w]));
    return bw;
}

} // namespace

TEST_CASE("sparsify thresholds") {
    auto locs = generate_uniform_locations(5, 21);
    cov::CovarianceModel model;
    model.matern = {1.0, 0.3, 0.5};
    auto sigma = cov::build_covariance(locs, model, 5);

    double max_off = 0.0, min_off = 2.0;
    for (index_t i = 0; i < 5; ++i)
        for (index_t j = 0; j < 5; ++j)
            if (i != j) {
                max_off = std::max(max_off, std::abs(sigma.entry(i, j)));
                min_off = std::min(min_off, std::abs(sigma.entry(i, j)));
            }

    auto empty = sparsify(sigma, max_off * 1.0001);
    for (index_t v = 0; v < 5; ++v) CHECK(empty.degree(v) == 0);

    auto complete = sparsify(sigma, min_off * 0.9999);
    for (index_t v = 0; v < 5; ++v) CHECK(complete.degree(v) == 4);

    // edges exactly where the hand-evaluated kernel clears tau
    double tau = 0.5;
    auto mid = sparsify(sigma, tau);
    for (index_t i = 0; i < 5; ++i)
        for (index_t j = i + 1; j < 5; ++j) {
            double dx = locs.points[i].x - locs.points[j].x;
            double dy = locs.points[i].y - locs.points[j].y;
            double want = std::exp(-std::sqrt(dx * dx + dy * dy) / 0.3);
            bool edge = std::binary_search(mid.adjacency[i].begin(), mid.adjacency[i].end(), j);
            CHECK(edge == (want >= tau));
        }

    CHECK_THROWS_AS(sparsify(sigma, 0.0), std::invalid_argument);
}

TEST_CASE("rcm on canonical graphs") {
    SparseGraph empty;
    CHECK(order_rcm(empty).map.empty());

    // edgeless graph: tie-breaks keep index order
    SparseGraph edgeless;
    edgeless.adjacency.resize(4);
    CHECK(order_rcm(edgeless).map == std::vector<index_t>{0, 1, 2, 3});

    // path 0-1-2-3: BFS from node 0 gives 0,1,2,3; reversed
    auto path = graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(order_rcm(path).map == std::vector<index_t>{3, 2, 1, 0});

    // star: permuted bandwidth never exceeds the original
    auto star = graph_from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    auto sp = order_rcm(star);
    CHECK(sp.is_valid());
    CHECK(bandwidth(star, sp) <= bandwidth(star, Permutation::identity(5)));
}

TEST_CASE("rcm never increases the bandwidth of a banded graph") {
    // band graph with half-width 3, scrambled by a random relabeling
    index_t n = 40;
    std::mt19937 gen(3);
    std::vector<index_t> relabel(n);
    std::iota(relabel.begin(), relabel.end(), index_t{0});
    std::shuffle(relabel.begin(), relabel.end(), gen);
    SparseGraph g;
    g.adjacency.resize(n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j <= std::min(n - 1, i + 3); ++j) {
            g.adjacency[relabel[i]].push_back(relabel[j]);
            g.adjacency[relabel[j]].push_back(relabel[i]);
        }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    auto perm = order_rcm(g);
    CHECK(perm.is_valid());
    CHECK(bandwidth(g, perm) <= bandwidth(g, Permutation::identity(n)));
    CHECK(bandwidth(g, perm) <= 2 * 3); // ends up close to the true band
}

TEST_CASE("min degree elimination order") {
    SparseGraph edgeless;
    edgeless.adjacency.resize(3);
    CHECK(order_min_degree(edgeless).map == std::vector<index_t>{0, 1, 2});

    // path 0-1-2: degrees 1,2,1; eliminate 0, degrees become 1,1 and the
    // lowest-index tie-break picks 1
    auto path = graph_from_edges(3, {{0, 1}, {1, 2}});
    CHECK(order_min_degree(path).map == std::vector<index_t>{0, 1, 2});

    std::mt19937 gen(8);
    for (int trial = 0; trial < 5; ++trial) {
        index_t n = 2 + gen() % 50;
        SparseGraph g;
        g.adjacency.resize(n);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j)
                if (gen() % 4 == 0) {
                    g.adjacency[i].push_back(j);
                    g.adjacency[j].push_back(i);
                }
        auto perm = order_min_degree(g);
        CHECK(perm.is_valid());
    }
}
