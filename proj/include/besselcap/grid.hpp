#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besselcap/multiindex.hpp"

namespace besselcap {

/// Tensor-product sample of a function on the orthant: strictly increasing
/// per-axis node vectors and a row-major value array. Evaluation between
/// nodes is multilinear; outside the grid box the function is zero.
class GridFunction {
public:
    GridFunction(std::vector<std::vector<double>> axes, std::vector<double> values)
        : axes_(std::move(axes)), values_(std::move(values)) {
        if (axes_.empty()) throw std::invalid_argument("invalid grid: no axes");
        std::size_t extent = 1;
        for (const auto& ax : axes_) {
            if (ax.size() < 2) throw std::invalid_argument("invalid grid: axis needs >= 2 nodes");
            for (std::size_t i = 0; i < ax.size(); ++i) {
                if (!(ax[i] >= 0.0)) throw std::invalid_argument("invalid grid: negative node");
                if (i > 0 && !(ax[i] > ax[i - 1]))
                    throw std::invalid_argument("invalid grid: nodes must strictly increase");
            }
            extent *= ax.size();
        }
        if (extent != values_.size())
            throw std::invalid_argument("invalid grid: value extent mismatch");
    }

    template <class F>
    static GridFunction sample(std::vector<std::vector<double>> axes, F&& f) {
        std::size_t extent = 1;
        for (const auto& ax : axes) extent *= ax.size();
        std::vector<double> vals(extent);
        std::vector<std::size_t> idx(axes.size(), 0);
        for (std::size_t flat = 0; flat < extent; ++flat) {
            PointPlus p;
            p.x.resize(axes.size());
            for (std::size_t d = 0; d < axes.size(); ++d) p.x[d] = axes[d][idx[d]];
            vals[flat] = f(p);
            for (std::size_t d = axes.size(); d-- > 0;) {
                if (++idx[d] < axes[d].size()) break;
                idx[d] = 0;
            }
        }
        return GridFunction(std::move(axes), std::move(vals));
    }

    static std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
        if (count < 2 || !(hi > lo)) throw std::invalid_argument("uniform_axis: bad range");
        std::vector<double> ax(count);
        for (std::size_t i = 0; i < count; ++i)
            ax[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        return ax;
    }

    std::size_t dim() const { return axes_.size(); }
    const std::vector<double>& axis(std::size_t d) const { return axes_[d]; }
    const std::vector<std::vector<double>>& axes() const { return axes_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double axis_min(std::size_t d) const { return axes_[d].front(); }
    double axis_max(std::size_t d) const { return axes_[d].back(); }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        std::size_t f = 0;
        for (std::size_t d = 0; d < axes_.size(); ++d) f = f * axes_[d].size() + idx[d];
        return f;
    }

    double value_at(const std::vector<std::size_t>& idx) const { return values_[flat_index(idx)]; }

    /// Multilinear interpolation; zero outside the grid box.
    double eval(const PointPlus& p) const {
        if (p.dim() != dim()) throw std::invalid_argument("GridFunction::eval: dim mismatch");
        const std::size_t n = dim();
        std::vector<std::size_t> cell(n);
        std::vector<double> frac(n);
        for (std::size_t d = 0; d < n; ++d) {
            const auto& ax = axes_[d];
            double c = p.x[d];
            if (c < ax.front() || c > ax.back()) return 0.0;
            auto it = std::upper_bound(ax.begin(), ax.end(), c);
            std::size_t hi = static_cast<std::size_t>(it - ax.begin());
            if (hi == 0) hi = 1;
            if (hi >= ax.size()) hi = ax.size() - 1;
            cell[d] = hi - 1;
            frac[d] = (c - ax[hi - 1]) / (ax[hi] - ax[hi - 1]);
        }
        double acc = 0.0;
        const std::size_t corners = std::size_t{1} << n;
        std::vector<std::size_t> idx(n);
        for (std::size_t m = 0; m < corners; ++m) {
            double w = 1.0;
            for (std::size_t d = 0; d < n; ++d) {
                bool upper = (m >> d) & 1u;
                idx[d] = cell[d] + (upper ? 1 : 0);
                w *= upper ? frac[d] : (1.0 - frac[d]);
            }
            if (w != 0.0) acc += w * value_at(idx);
        }
        return acc;
    }

    double operator()(const PointPlus& p) const { return eval(p); }

private:
    std::vector<std::vector<double>> axes_;
    std::vector<double> values_;
};

} // namespace besselcap
