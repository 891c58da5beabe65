#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tlrgeo/location.hpp"
#include "tlrgeo/params.hpp"

namespace tlrgeo {

const char* to_string(OrderingMethod m) noexcept {
    switch (m) {
        case OrderingMethod::none: return "none";
        case OrderingMethod::morton: return "morton";
        case OrderingMethod::hilbert: return "hilbert";
        case OrderingMethod::kdtree: return "kdtree";
        case OrderingMethod::rcm: return "rcm";
        case OrderingMethod::mindegree: return "mindegree";
    }
    return "?";
}

OrderingMethod ordering_from_string(const std::string& s) {
    if (s == "none") return OrderingMethod::none;
    if (s == "morton") return OrderingMethod::morton;
    if (s == "hilbert") return OrderingMethod::hilbert;
    if (s == "kdtree") return OrderingMethod::kdtree;
    if (s == "rcm") return OrderingMethod::rcm;
    if (s == "mindegree") return OrderingMethod::mindegree;
    throw std::invalid_argument("unknown ordering method: " + s);
}

const char* to_string(KernelId k) noexcept {
    switch (k) {
        case KernelId::matern: return "matern";
        case KernelId::bivariate_matern: return "bivariate-matern";
        case KernelId::tgh_matern: return "tgh-matern";
    }
    return "?";
}

KernelId kernel_from_string(const std::string& s) {
    if (s == "matern") return KernelId::matern;
    if (s == "bivariate-matern") return KernelId::bivariate_matern;
    if (s == "tgh-matern") return KernelId::tgh_matern;
    throw std::invalid_argument("unknown kernel: " + s);
}

Permutation Permutation::identity(index_t n, OrderingMethod m) {
    Permutation p;
    p.method = m;
    p.map.resize(n);
    std::iota(p.map.begin(), p.map.end(), index_t{0});
    return p;
}

bool Permutation::is_valid() const {
    std::vector<bool> seen(map.size(), false);
    for (index_t v : map) {
        if (v < 0 || v >= n() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Permutation Permutation::inverse() const {
    Permutation inv;
    inv.method = method;
    inv.map.resize(map.size());
    for (index_t i = 0; i < n(); ++i) inv.map[map[i]] = i;
    return inv;
}

LocationSet generate_uniform_locations(index_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_uniform_locations: n must be >= 1");
    Rng rng(seed, streams::kLocations);
    LocationSet out;
    out.provenance = Provenance::synthetic_uniform;
    out.points.resize(n);
    for (index_t i = 0; i < n; ++i) {
        out.points[i].x = rng.uniform();
        out.points[i].y = rng.uniform();
    }
    return out;
}

LocationSet apply_permutation(const LocationSet& locs, const Permutation& perm) {
    if (perm.n() != locs.n())
        throw std::invalid_argument("apply_permutation: size mismatch");
    LocationSet out;
    out.provenance = locs.provenance;
    out.points.resize(locs.points.size());
    for (index_t i = 0; i < perm.n(); ++i) out.points[i] = locs.points[perm.map[i]];
    return out;
}

std::vector<double> apply_permutation(const std::vector<double>& values, const Permutation& perm) {
    if (perm.n() != static_cast<index_t>(values.size()))
        throw std::invalid_argument("apply_permutation: size mismatch");
    std::vector<double> out(values.size());
    for (index_t i = 0; i < perm.n(); ++i) out[i] = values[perm.map[i]];
    return out;
}

namespace {

void format_double(std::ostream& os, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    os.write(buf, res.ptr - buf);
}

} // namespace

void write_locations_csv(const std::string& path, const LocationSet& locs,
                         const std::vector<double>* values) {
    if (values && static_cast<index_t>(values->size()) != locs.n())
        throw std::invalid_argument("write_locations_csv: value count mismatch");
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << (values ? "x,y,z\n" : "x,y\n");
    for (index_t i = 0; i < locs.n(); ++i) {
        format_double(f, locs.points[i].x);
        f << ',';
        format_double(f, locs.points[i].y);
        if (values) {
            f << ',';
            format_double(f, (*values)[i]);
        }
        f << '\n';
    }
    if (!f) throw io_error("write failed: " + path);
}

LocationSet read_locations_csv(const std::string& path, std::vector<double>* values) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw io_error("empty file: " + path);
    bool has_z = line.find('z') != std::string::npos;
    LocationSet out;
    out.provenance = Provenance::ingested;
    if (values) values->clear();
    index_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double v[3] = {0, 0, 0};
        int got = 0;
        while (std::getline(ss, tok, ',') && got < 3) {
            try {
                v[got++] = std::stod(tok);
            } catch (const std::exception&) {
                throw io_error(path + ": malformed row at line " + std::to_string(lineno));
            }
        }
        if (got < 2 || (has_z && values && got < 3))
            throw io_error(path + ": malformed row at line " + std::to_string(lineno));
        out.points.push_back({v[0], v[1]});
        if (values && has_z) values->push_back(v[2]);
    }
    if (out.points.empty()) throw io_error(path + ": no data rows");
    return out;
}

void write_permutation(const std::string& path, const Permutation& perm) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path);
    for (index_t v : perm.map) f << v << '\n';
    if (!f) throw io_error("write failed: " + path);
}

Permutation read_permutation(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open: " + path);
    Permutation p;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        p.map.push_back(std::stoll(line));
    }
    if (!p.is_valid()) throw io_error(path + ": not a valid permutation");
    return p;
}

} // namespace tlrgeo
