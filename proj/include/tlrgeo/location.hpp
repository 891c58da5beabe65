#pragma once

#include <string>
#include <vector>

#include "tlrgeo/common.hpp"
#include "tlrgeo/rng.hpp"

namespace tlrgeo {

// 2-D point in the unit square.
struct Location {
    double x = 0.0;
    double y = 0.0;
};

enum class Provenance { synthetic_uniform, ingested };

// Ordered list of distinct locations. Immutable by convention once built.
struct LocationSet {
    std::vector<Location> points;
    Provenance provenance = Provenance::synthetic_uniform;

    index_t n() const noexcept { return static_cast<index_t>(points.size()); }
};

enum class OrderingMethod { none, morton, hilbert, kdtree, rcm, mindegree };

const char* to_string(OrderingMethod m) noexcept;
OrderingMethod ordering_from_string(const std::string& s);

// Bijective reordering of location indices: output slot i takes input index map[i].
struct Permutation {
    std::vector<index_t> map;
    OrderingMethod method = OrderingMethod::none;

    index_t n() const noexcept { return static_cast<index_t>(map.size()); }

    static Permutation identity(index_t n, OrderingMethod m = OrderingMethod::none);
    bool is_valid() const;
    Permutation inverse() const;
};

LocationSet generate_uniform_locations(index_t n, std::uint64_t seed);

LocationSet apply_permutation(const LocationSet& locs, const Permutation& perm);
std::vector<double> apply_permutation(const std::vector<double>& values, const Permutation& perm);

// CSV with header "x,y" or "x,y,z"; z carries per-point values when present.
void write_locations_csv(const std::string& path, const LocationSet& locs,
                         const std::vector<double>* values = nullptr);
LocationSet read_locations_csv(const std::string& path, std::vector<double>* values = nullptr);

// One zero-based index per line.
void write_permutation(const std::string& path, const Permutation& perm);
Permutation read_permutation(const std::string& path);

} // namespace tlrgeo
