#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tlrgeo/ingest/ingest.hpp"
#include "tlrgeo/rng.hpp"

namespace tlrgeo::ingest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trimmed(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

bool is_missing_token(const std::string& t) {
    return t.empty() || t == "NA" || t == "na" || t == "nan" || t == "NaN";
}

} // namespace

IngestResult ingest_csv(const std::string& path, const IngestSchema& schema) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw io_error("empty file: " + path);

    auto header = split_csv(line);
    index_t ilon = -1, ilat = -1, ival = -1;
    for (size_t c = 0; c < header.size(); ++c) {
        std::string name = trimmed(header[c]);
        if (name == schema.lon_col) ilon = static_cast<index_t>(c);
        if (name == schema.lat_col) ilat = static_cast<index_t>(c);
        if (name == schema.value_col) ival = static_cast<index_t>(c);
    }
    if (ilon < 0 || ilat < 0 || ival < 0)
        throw io_error(path + ": header must contain columns '" + schema.lon_col + "', '" +
                       schema.lat_col + "', '" + schema.value_col + "'");

    IngestResult out;
    out.locs.provenance = Provenance::ingested;
    std::vector<double> lon, lat;
    std::vector<index_t> line_numbers;
    index_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        ++out.rows_total;
        auto cells = split_csv(line);
        index_t width = static_cast<index_t>(cells.size());
        if (ilon >= width || ilat >= width || ival >= width)
            throw io_error(path + ": malformed row at line " + std::to_string(lineno));
        std::string slon = trimmed(cells[ilon]);
        std::string slat = trimmed(cells[ilat]);
        std::string sval = trimmed(cells[ival]);
        if (is_missing_token(slon) || is_missing_token(slat) || is_missing_token(sval)) {
            ++out.rows_missing;
            continue;
        }
        double vlon, vlat, vval;
        try {
            vlon = std::stod(slon);
            vlat = std::stod(slat);
            vval = std::stod(sval);
        } catch (const std::exception&) {
            throw io_error(path + ": malformed row at line " + std::to_string(lineno));
        }
        if (!std::isfinite(vlon) || !std::isfinite(vlat) || !std::isfinite(vval) ||
            (schema.missing && vval == *schema.missing)) {
            ++out.rows_missing;
            continue;
        }
        lon.push_back(vlon);
        lat.push_back(vlat);
        out.values.push_back(vval);
        line_numbers.push_back(lineno);
    }
    out.rows_kept = static_cast<index_t>(lon.size());
    if (out.rows_kept == 0) throw io_error(path + ": no valid rows");

    // exact duplicate coordinates make Sigma singular; report every offender
    {
        std::vector<index_t> idx(out.rows_kept);
        std::iota(idx.begin(), idx.end(), index_t{0});
        std::sort(idx.begin(), idx.end(), [&](index_t a, index_t b) {
            return lon[a] != lon[b] ? lon[a] < lon[b] : lat[a] < lat[b];
        });
        std::string dup;
        for (index_t i = 1; i < out.rows_kept; ++i) {
            index_t a = idx[i - 1], b = idx[i];
            if (lon[a] == lon[b] && lat[a] == lat[b]) {
                if (!dup.empty()) dup += ", ";
                dup += std::to_string(line_numbers[a]) + "/" + std::to_string(line_numbers[b]);
            }
        }
        if (!dup.empty())
            throw io_error(path + ": exact duplicate locations at lines " + dup);
    }

    out.lon_min = *std::min_element(lon.begin(), lon.end());
    out.lon_max = *std::max_element(lon.begin(), lon.end());
    out.lat_min = *std::min_element(lat.begin(), lat.end());
    out.lat_max = *std::max_element(lat.begin(), lat.end());
    double lon_range = out.lon_max - out.lon_min;
    double lat_range = out.lat_max - out.lat_min;
    out.locs.points.resize(out.rows_kept);
    for (index_t i = 0; i < out.rows_kept; ++i) {
        out.locs.points[i].x = lon_range > 0.0 ? (lon[i] - out.lon_min) / lon_range : 0.5;
        out.locs.points[i].y = lat_range > 0.0 ? (lat[i] - out.lat_min) / lat_range : 0.5;
    }

    double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
                  static_cast<double>(out.rows_kept);
    double ss = 0.0;
    for (double v : out.values) ss += (v - mean) * (v - mean);
    double sd = out.rows_kept > 1 ? std::sqrt(ss / static_cast<double>(out.rows_kept - 1)) : 0.0;
    if (out.rows_kept > 1 && sd == 0.0)
        throw io_error(path + ": constant field, cannot standardize");
    if (sd == 0.0) sd = 1.0;
    for (double& v : out.values) v = (v - mean) / sd;
    out.value_mean = mean;
    out.value_std = sd;
    return out;
}

std::pair<LocationSet, std::vector<double>> subset_random(const LocationSet& locs,
                                                          const std::vector<double>& values,
                                                          index_t m, std::uint64_t seed) {
    index_t n = locs.n();
    if (static_cast<index_t>(values.size()) != n)
        throw std::invalid_argument("subset_random: values length mismatch");
    if (m < 1 || m > n) throw std::invalid_argument("subset_random: need 1 <= m <= n");

    Rng rng(seed, streams::kSubset);
    std::vector<index_t> idx(n);
    std::iota(idx.begin(), idx.end(), index_t{0});
    // partial Fisher-Yates; bounded draw by rejection to avoid modulo bias
    for (index_t i = 0; i < m; ++i) {
        std::uint64_t span = static_cast<std::uint64_t>(n - i);
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t draw;
        do { draw = rng.next_u64(); } while (draw >= limit);
        std::swap(idx[i], idx[i + static_cast<index_t>(draw % span)]);
    }
    LocationSet sub;
    sub.provenance = locs.provenance;
    sub.points.resize(m);
    std::vector<double> vals(m);
    for (index_t i = 0; i < m; ++i) {
        sub.points[i] = locs.points[idx[i]];
        vals[i] = values[idx[i]];
    }
    return {std::move(sub), std::move(vals)};
}

} // namespace tlrgeo::ingest
