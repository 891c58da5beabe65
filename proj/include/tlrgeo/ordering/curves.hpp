#pragma once

#include <cstdint>

#include "tlrgeo/location.hpp"

namespace tlrgeo::ordering {

// Integer cell coordinates on the 2^p x 2^p grid.
struct GridCoord {
    std::uint64_t qx = 0;
    std::uint64_t qy = 0;
    int p = 16;
};

using CurveIndex = std::uint64_t;

enum class Curve { morton, hilbert };

// q = round(coord * (2^p - 1)), half away from zero. Coordinates must lie in
// [0, 1]; p in [1, 32].
GridCoord quantize(const Location& loc, int p);
Location dequantize(const GridCoord& g);

// x in even (low) bits, y in odd bits.
CurveIndex morton_index(const GridCoord& g);
GridCoord morton_decode(CurveIndex c, int p);

// Orientation at p=1: (0,0), (0,1), (1,1), (1,0).
CurveIndex hilbert_index(const GridCoord& g);
GridCoord hilbert_decode(CurveIndex c, int p);

// Sort locations by ascending curve index of their quantized coordinates;
// ties resolved by original index.
Permutation order_by_curve(const LocationSet& locs, Curve curve, int p = 16);

Permutation order_kdtree(const LocationSet& locs);

} // namespace tlrgeo::ordering
