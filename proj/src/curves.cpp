#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tlrgeo/ordering/curves.hpp"

namespace tlrgeo::ordering {

namespace {

void check_bits(int p) {
    if (p < 1 || p > 32) throw std::invalid_argument("curve bits p must be in [1, 32]");
}

std::uint64_t grid_max(int p) {
    return (p == 32) ? 0xFFFFFFFFull : ((1ull << p) - 1);
}

// spread the low 32 bits of v into the even bit positions
std::uint64_t spread_bits(std::uint64_t v) {
    v &= 0xFFFFFFFFull;
    v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
    v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
    v = (v | (v << 2)) & 0x3333333333333333ull;
    v = (v | (v << 1)) & 0x5555555555555555ull;
    return v;
}

std::uint64_t compact_bits(std::uint64_t v) {
    v &= 0x5555555555555555ull;
    v = (v | (v >> 1)) & 0x3333333333333333ull;
    v = (v | (v >> 2)) & 0x0F0F0F0F0F0F0F0Full;
    v = (v | (v >> 4)) & 0x00FF00FF00FF00FFull;
    v = (v | (v >> 8)) & 0x0000FFFF0000FFFFull;
    v = (v | (v >> 16)) & 0x00000000FFFFFFFFull;
    return v;
}

void hilbert_rot(std::uint64_t s, std::uint64_t& x, std::uint64_t& y,
                 std::uint64_t rx, std::uint64_t ry) {
    if (ry == 0) {
        if (rx == 1) {
            x = s - 1 - x;
            y = s - 1 - y;
        }
        std::swap(x, y);
    }
}

} // namespace

GridCoord quantize(const Location& loc, int p) {
    check_bits(p);
    if (!(loc.x >= 0.0 && loc.x <= 1.0 && loc.y >= 0.0 && loc.y <= 1.0))
        throw std::invalid_argument("quantize: coordinates must lie in [0, 1]");
    double scale = static_cast<double>(grid_max(p));
    GridCoord g;
    g.p = p;
    g.qx = static_cast<std::uint64_t>(std::llround(loc.x * scale));
    g.qy = static_cast<std::uint64_t>(std::llround(loc.y * scale));
    return g;
}

Location dequantize(const GridCoord& g) {
    check_bits(g.p);
    double scale = static_cast<double>(grid_max(g.p));
    return {static_cast<double>(g.qx) / scale, static_cast<double>(g.qy) / scale};
}

CurveIndex morton_index(const GridCoord& g) {
    check_bits(g.p);
    return spread_bits(g.qx) | (spread_bits(g.qy) << 1);
}

GridCoord morton_decode(CurveIndex c, int p) {
    check_bits(p);
    if (p < 32 && c >= (1ull << (2 * p)))
        throw std::invalid_argument("morton_decode: index out of range for p");
    GridCoord g;
    g.p = p;
    g.qx = compact_bits(c);
    g.qy = compact_bits(c >> 1);
    return g;
}

CurveIndex hilbert_index(const GridCoord& g) {
    check_bits(g.p);
    std::uint64_t x = g.qx, y = g.qy;
    CurveIndex d = 0;
    for (std::uint64_t s = 1ull << (g.p - 1); s > 0; s >>= 1) {
        std::uint64_t rx = (x & s) ? 1 : 0;
        std::uint64_t ry = (y & s) ? 1 : 0;
        d += s * s * ((3 * rx) ^ ry);
        hilbert_rot(s, x, y, rx, ry);
    }
    return d;
}

GridCoord hilbert_decode(CurveIndex c, int p) {
    check_bits(p);
    if (p < 32 && c >= (1ull << (2 * p)))
        throw std::invalid_argument("hilbert_decode: index out of range for p");
    std::uint64_t x = 0, y = 0;
    std::uint64_t t = c;
    for (std::uint64_t s = 1; s < (1ull << p); s <<= 1) {
        std::uint64_t rx = 1 & (t / 2);
        std::uint64_t ry = 1 & (t ^ rx);
        hilbert_rot(s, x, y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    GridCoord g;
    g.p = p;
    g.qx = x;
    g.qy = y;
    return g;
}

Permutation order_by_curve(const LocationSet& locs, Curve curve, int p) {
    check_bits(p);
    if (locs.n() < 1) throw std::invalid_argument("order_by_curve: empty location set");
    index_t n = locs.n();
    std::vector<std::pair<CurveIndex, index_t>> keyed(n);
    for (index_t i = 0; i < n; ++i) {
        GridCoord g = quantize(locs.points[i], p);
        keyed[i] = {curve == Curve::morton ? morton_index(g) : hilbert_index(g), i};
    }
    std::sort(keyed.begin(), keyed.end());
    Permutation perm;
    perm.method = curve == Curve::morton ? OrderingMethod::morton : OrderingMethod::hilbert;
    perm.map.resize(n);
    for (index_t i = 0; i < n; ++i) perm.map[i] = keyed[i].second;
    return perm;
}

namespace {

// Positional lower-median split: the first ceil(m/2) points under
// (axis value, original index) go left. For distinct axis values this is
// exactly "points <= median go left"; with duplicates it still makes
// progress, which the value rule does not guarantee.
void kdtree_order(const LocationSet& locs, std::vector<index_t>& idx,
                  index_t lo, index_t hi, std::vector<index_t>& out) {
    if (hi - lo == 1) {
        out.push_back(idx[lo]);
        return;
    }
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (index_t i = lo; i < hi; ++i) {
        const Location& pt = locs.points[idx[i]];
        xmin = std::min(xmin, pt.x);
        xmax = std::max(xmax, pt.x);
        ymin = std::min(ymin, pt.y);
        ymax = std::max(ymax, pt.y);
    }
    int axis = (xmax - xmin >= ymax - ymin) ? 0 : 1;
    auto key = [&](index_t a) {
        const Location& pt = locs.points[a];
        return std::pair<double, index_t>(axis == 0 ? pt.x : pt.y, a);
    };
    index_t k = (hi - lo + 1) / 2; // ceil(m/2) points on the left
    std::nth_element(idx.begin() + lo, idx.begin() + lo + k, idx.begin() + hi,
                     [&](index_t a, index_t b) { return key(a) < key(b); });
    kdtree_order(locs, idx, lo, lo + k, out);
    kdtree_order(locs, idx, lo + k, hi, out);
}

} // namespace

Permutation order_kdtree(const LocationSet& locs) {
    if (locs.n() < 1) throw std::invalid_argument("order_kdtree: empty location set");
    std::vector<index_t> idx(locs.n());
    std::iota(idx.begin(), idx.end(), index_t{0});
    Permutation perm;
    perm.method = OrderingMethod::kdtree;
    perm.map.reserve(locs.n());
    kdtree_order(locs, idx, 0, locs.n(), perm.map);
    return perm;
}

} // namespace tlrgeo::ordering
