#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tlrgeo/location.hpp"

namespace tlrgeo::ingest {

struct IngestSchema {
    std::string lon_col = "lon";
    std::string lat_col = "lat";
    std::string value_col = "value";
    std::optional<double> missing; // sentinel value; empty/NA/nan cells always count as missing
};

struct IngestResult {
    LocationSet locs;           // min-max normalized to the unit square
    std::vector<double> values; // mean-centered, variance-standardized
    index_t rows_total = 0;
    index_t rows_missing = 0;
    index_t rows_kept = 0;
    double lon_min = 0.0, lon_max = 0.0, lat_min = 0.0, lat_max = 0.0;
    double value_mean = 0.0, value_std = 1.0; // of the kept raw values
};

// Reads lon/lat/value columns by header name. Missing-value rows are dropped
// (counted), exact duplicate coordinates are an error listing the offending
// line numbers, malformed rows report their line number.
IngestResult ingest_csv(const std::string& path, const IngestSchema& schema);

// Uniform sample of m rows without replacement; locations and values stay
// aligned. Deterministic per seed.
std::pair<LocationSet, std::vector<double>> subset_random(const LocationSet& locs,
                                                          const std::vector<double>& values,
                                                          index_t m, std::uint64_t seed);

} // namespace tlrgeo::ingest
