#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "besselcap/capacity.hpp"
#include "besselcap/dyadic.hpp"
#include "besselcap/fractal.hpp"
#include "besselcap/gauge.hpp"
#include "besselcap/grid.hpp"
#include "besselcap/kernels.hpp"
#include "besselcap/measure.hpp"
#include "besselcap/multiindex.hpp"

namespace besselcap::io {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& s, const std::string& field) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ParseError("field '" + field + "': cannot parse number from '" + s + "'");
    }
}

template <class T>
T require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ParseError("field '" + field + "' is missing");
    try {
        return j.at(field).get<T>();
    } catch (...) {
        throw ParseError("field '" + field + "' has the wrong type");
    }
}

} // namespace detail

/// CSV measure format: header "x1,...,xn,mass" then one atom per row.
inline DiscreteMeasure read_measure_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("field 'measure': cannot open file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("field 'measure': empty file " + path);
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 2 || detail::trim(header.back()) != "mass")
        throw ParseError("field 'measure': header must end with a 'mass' column");
    std::size_t n = header.size() - 1;
    std::vector<Atom> atoms;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != n + 1)
            throw ParseError("field 'measure': row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(n + 1));
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d)
            x[d] = detail::parse_number(detail::trim(cells[d]), header[d]);
        double m = detail::parse_number(detail::trim(cells[n]), "mass");
        atoms.push_back(Atom{PointPlus(std::move(x)), m});
    }
    return DiscreteMeasure(std::move(atoms));
}

inline void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu) {
    std::size_t n = mu.dim();
    for (std::size_t d = 0; d < n; ++d) out << "x" << (d + 1) << ",";
    out << "mass\n";
    char buf[64];
    for (const Atom& at : mu.atoms()) {
        for (std::size_t d = 0; d < n; ++d) {
            std::snprintf(buf, sizeof buf, "%.12g", at.point.x[d]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.12g", at.mass);
        out << buf << "\n";
    }
}

/// CSV points format: header "x1,...,xn" then one point per row.
inline std::vector<PointPlus> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("field 'points': cannot open file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("field 'points': empty file " + path);
    std::size_t n = detail::split_csv_line(line).size();
    std::vector<PointPlus> pts;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != n)
            throw ParseError("field 'points': row " + std::to_string(row) + " width mismatch");
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d)
            x[d] = detail::parse_number(detail::trim(cells[d]), "x" + std::to_string(d + 1));
        pts.push_back(PointPlus(std::move(x)));
    }
    return pts;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("field 'json': cannot open file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("field 'json': malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

/// Kernel spec: {"type":"bessel","nu":...} | {"type":"riesz","beta":...} |
/// {"type":"custom","table": path-to-csv(r,g)}.
inline RadialKernel kernel_from_json(const json& j, const MultiIndexA& A) {
    std::string type = detail::require<std::string>(j, "type");
    if (type == "bessel") return RadialKernel::bessel(A, detail::require<double>(j, "nu"));
    if (type == "riesz") return RadialKernel::riesz(A, detail::require<double>(j, "beta"));
    if (type == "custom") {
        std::string path = detail::require<std::string>(j, "table");
        std::ifstream in(path);
        if (!in) throw ParseError("field 'table': cannot open file " + path);
        std::vector<double> rs, gs;
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (detail::trim(line).empty()) continue;
            auto cells = detail::split_csv_line(line);
            if (cells.size() != 2) throw ParseError("field 'table': rows must be r,g");
            rs.push_back(detail::parse_number(detail::trim(cells[0]), "r"));
            gs.push_back(detail::parse_number(detail::trim(cells[1]), "g"));
        }
        if (rs.size() < 2) throw ParseError("field 'table': need at least two rows");
        std::vector<std::pair<double, double>> tab;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (!(rs[i] > 0.0) || !(gs[i] > 0.0))
                throw ParseError("field 'table': positive entries required");
            tab.emplace_back(std::log(rs[i]), std::log(gs[i]));
        }
        std::sort(tab.begin(), tab.end());
        auto profile = [tab](double r) -> double {
            double u = std::log(r);
            std::size_t hi = 1;
            if (u >= tab.back().first)
                hi = tab.size() - 1;
            else
                while (tab[hi].first < u) ++hi;
            double s = (tab[hi].second - tab[hi - 1].second) /
                       (tab[hi].first - tab[hi - 1].first);
            return std::exp(tab[hi - 1].second + s * (u - tab[hi - 1].first));
        };
        return RadialKernel::custom(profile, A);
    }
    throw ParseError("field 'type': unknown kernel type '" + type + "'");
}

/// CantorSpec: {"n":..,"q0":..,"l0":..,"ratios":[..]} or
/// {"n":..,"q0":..,"l0":..,"geometric":lambda,"levels":K}.
inline CantorSpec cantor_from_json(const json& j) {
    int n = detail::require<int>(j, "n");
    double q0 = j.value("q0", 0.0);
    double l0 = j.value("l0", 1.0);
    if (j.contains("geometric")) {
        double lambda = detail::require<double>(j, "geometric");
        int levels = j.value("levels", 12);
        return CantorSpec::geometric_spec(n, q0, l0, lambda, levels);
    }
    std::vector<double> ratios = detail::require<std::vector<double>>(j, "ratios");
    return CantorSpec::explicit_spec(n, q0, l0, std::move(ratios));
}

/// DyadicSetRep: {"n":..,"level":..,"cubes":[[i1,..],..]}.
inline DyadicSetRep dyadic_from_json(const json& j) {
    int n = detail::require<int>(j, "n");
    int level = detail::require<int>(j, "level");
    auto cubes = detail::require<std::vector<std::vector<std::int64_t>>>(j, "cubes");
    return DyadicSetRep(static_cast<std::size_t>(n), level, std::move(cubes));
}

/// Gauge spec: {"type":"power","exponent":c[,"scale":s]} |
/// {"type":"table","r":[..],"h":[..]}.
inline GaugeFunction gauge_from_json(const json& j) {
    std::string type = detail::require<std::string>(j, "type");
    if (type == "power")
        return GaugeFunction::power(detail::require<double>(j, "exponent"), j.value("scale", 1.0));
    if (type == "table")
        return GaugeFunction::from_table(detail::require<std::vector<double>>(j, "r"),
                                         detail::require<std::vector<double>>(j, "h"));
    throw ParseError("field 'type': unknown gauge type '" + type + "'");
}

/// Set descriptor for the capacity subcommands:
/// {"type":"interval","lo":..,"hi":..,"samples":..} |
/// {"type":"points","points":[[..],..]} |
/// {"type":"cantor","spec":{..},"depth":k[,"dyadic_level":L]} |
/// {"type":"dyadic","rep":{..}}.
inline CompactSetSample set_from_json(const json& j) {
    std::string type = detail::require<std::string>(j, "type");
    if (type == "interval") {
        return CompactSetSample::interval(detail::require<double>(j, "lo"),
                                          detail::require<double>(j, "hi"),
                                          static_cast<std::size_t>(j.value("samples", 17)));
    }
    if (type == "points") {
        auto rows = detail::require<std::vector<std::vector<double>>>(j, "points");
        std::vector<PointPlus> pts;
        for (auto& r : rows) pts.push_back(PointPlus(std::move(r)));
        return CompactSetSample::from_points(std::move(pts));
    }
    if (type == "cantor") {
        if (!j.contains("spec")) throw ParseError("field 'spec' is missing");
        CantorSpec spec = cantor_from_json(j.at("spec"));
        int depth = j.value("depth", std::min(8, spec.max_level()));
        CompactSetSample K;
        if (spec.n == 1) {
            K = CompactSetSample::from_points(cantor_sample_points(spec, depth));
            int lvl = j.value("dyadic_level", 2 * depth);
            K.dyadic = cantor_to_dyadic(spec, depth, lvl);
        } else {
            int lvl = j.value("dyadic_level", 2 * depth);
            K = CompactSetSample::from_dyadic(cantor_to_dyadic(spec, depth, lvl));
        }
        return K;
    }
    if (type == "dyadic") {
        if (!j.contains("rep")) throw ParseError("field 'rep' is missing");
        return CompactSetSample::from_dyadic(dyadic_from_json(j.at("rep")));
    }
    throw ParseError("field 'type': unknown set type '" + type + "'");
}

/// Axis/value CSV pair for grid functions: each axis file is a single
/// column of nodes; the value file is row-major.
inline GridFunction read_grid_function(const std::vector<std::string>& axis_paths,
                                       const std::string& value_path) {
    std::vector<std::vector<double>> axes;
    for (const std::string& p : axis_paths) {
        std::ifstream in(p);
        if (!in) throw ParseError("field 'f-axes': cannot open file " + p);
        std::vector<double> ax;
        std::string line;
        while (std::getline(in, line)) {
            std::string s = detail::trim(line);
            if (s.empty() || !(std::isdigit(s[0]) || s[0] == '-' || s[0] == '.')) continue;
            ax.push_back(detail::parse_number(s, "axis"));
        }
        axes.push_back(std::move(ax));
    }
    std::ifstream in(value_path);
    if (!in) throw ParseError("field 'f-values': cannot open file " + value_path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        for (const std::string& c : detail::split_csv_line(line)) {
            std::string s = detail::trim(c);
            if (s.empty() || !(std::isdigit(s[0]) || s[0] == '-' || s[0] == '.')) continue;
            vals.push_back(detail::parse_number(s, "values"));
        }
    }
    return GridFunction(std::move(axes), std::move(vals));
}

} // namespace besselcap::io
