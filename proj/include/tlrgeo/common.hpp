#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tlrgeo {

inline constexpr const char* kVersion = "0.1.0";

using index_t = std::int64_t;

// Thrown when a Cholesky pivot is not strictly positive. For tiled
// factorizations `tile` is the diagonal tile index, for dense ones it is 0;
// `pivot` is the offending row within that tile.
class factorization_error : public std::runtime_error {
public:
    factorization_error(index_t tile, index_t pivot, double value)
        : std::runtime_error("non-positive pivot " + std::to_string(value) +
                             " at row " + std::to_string(pivot) + " of diagonal tile " +
                             std::to_string(tile)),
          tile_(tile), pivot_(pivot), value_(value) {}

    index_t tile() const noexcept { return tile_; }
    index_t pivot() const noexcept { return pivot_; }
    double value() const noexcept { return value_; }

private:
    index_t tile_;
    index_t pivot_;
    double value_;
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tlrgeo
