#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besselcap/multiindex.hpp"

namespace besselcap {

/// Set of occupied dyadic cubes of side 2^{-level} in the nonnegative
/// orthant, stored as integer index vectors.
struct DyadicSetRep {
    std::size_t n = 1;
    int level = 0;
    std::vector<std::vector<std::int64_t>> cubes;

    DyadicSetRep() = default;
    DyadicSetRep(std::size_t dim, int lvl, std::vector<std::vector<std::int64_t>> idx)
        : n(dim), level(lvl), cubes(std::move(idx)) {
        for (auto& c : cubes) {
            if (c.size() != n) throw std::invalid_argument("DyadicSetRep: index dim mismatch");
            for (auto v : c)
                if (v < 0) throw std::invalid_argument("DyadicSetRep: indices must be >= 0");
        }
        canonicalize();
    }

    void canonicalize() {
        std::sort(cubes.begin(), cubes.end());
        cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
    }

    bool empty() const { return cubes.empty(); }
    double side() const { return std::pow(2.0, -level); }

    PointPlus cube_center(std::size_t i) const {
        double h = side();
        std::vector<double> c(n);
        for (std::size_t d = 0; d < n; ++d) c[d] = (cubes[i][d] + 0.5) * h;
        return PointPlus(std::move(c));
    }

    PointPlus cube_upper(std::size_t i) const {
        double h = side();
        std::vector<double> c(n);
        for (std::size_t d = 0; d < n; ++d) c[d] = (cubes[i][d] + 1.0) * h;
        return PointPlus(std::move(c));
    }

    /// Mark every level cube intersecting one of the closed 1-D intervals.
    static DyadicSetRep from_intervals(const std::vector<std::pair<double, double>>& intervals,
                                       int level) {
        double h = std::pow(2.0, -level);
        std::vector<std::vector<std::int64_t>> idx;
        for (auto [lo, hi] : intervals) {
            if (!(hi >= lo) || lo < 0.0)
                throw std::invalid_argument("DyadicSetRep: bad interval");
            auto first = static_cast<std::int64_t>(std::floor(lo / h));
            auto last = static_cast<std::int64_t>(std::floor(hi / h * (1.0 - 1e-15)));
            for (std::int64_t m = first; m <= last; ++m) idx.push_back({m});
        }
        return DyadicSetRep(1, level, std::move(idx));
    }

    static DyadicSetRep single_cube(std::size_t dim, int level,
                                    std::vector<std::int64_t> index) {
        return DyadicSetRep(dim, level, {std::move(index)});
    }
};

} // namespace besselcap
