#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "besselcap/grid.hpp"
#include "besselcap/multiindex.hpp"

namespace besselcap {

/// Uniform tensor grid on a box strictly inside the open orthant; the box
/// must clear every coordinate hyperplane by at least one grid spacing.
struct StencilGrid {
    std::vector<double> lo, hi;
    std::vector<std::size_t> points;

    StencilGrid(std::vector<double> lo_, std::vector<double> hi_,
                std::vector<std::size_t> pts)
        : lo(std::move(lo_)), hi(std::move(hi_)), points(std::move(pts)) {
        if (lo.size() != hi.size() || lo.size() != points.size() || lo.empty())
            throw std::invalid_argument("StencilGrid: inconsistent extents");
        for (std::size_t d = 0; d < lo.size(); ++d) {
            if (points[d] < 3) throw std::invalid_argument("StencilGrid: need >= 3 points");
            if (!(hi[d] > lo[d])) throw std::invalid_argument("StencilGrid: empty box");
            double h = spacing(d);
            if (!(lo[d] > 0.0) || lo[d] < h * (1.0 - 1e-12))
                throw std::invalid_argument(
                    "StencilGrid: box must clear the coordinate hyperplanes by the spacing");
        }
    }

    std::size_t dim() const { return lo.size(); }
    double spacing(std::size_t d) const {
        return (hi[d] - lo[d]) / static_cast<double>(points[d] - 1);
    }

    std::vector<std::vector<double>> axes() const {
        std::vector<std::vector<double>> ax(dim());
        for (std::size_t d = 0; d < dim(); ++d)
            ax[d] = GridFunction::uniform_axis(lo[d], hi[d], points[d]);
        return ax;
    }

    template <class F>
    GridFunction sample(F&& f) const {
        return GridFunction::sample(axes(), std::forward<F>(f));
    }
};

/// Discrete Laplace-Bessel operator: second-order central differences of
/// sum_i (d^2/dx_i^2 + (a_i/x_i) d/dx_i) on the interior nodes. The input
/// grid supplies the one-node ghost ring.
inline GridFunction apply_laplace_bessel(const GridFunction& u, const MultiIndexA& A) {
    const std::size_t n = u.dim();
    if (n != A.dim()) throw std::invalid_argument("apply_laplace_bessel: dimension mismatch");
    std::vector<double> h(n);
    for (std::size_t d = 0; d < n; ++d) {
        const auto& ax = u.axis(d);
        if (ax.size() < 3)
            throw std::invalid_argument("apply_laplace_bessel: need >= 3 nodes per axis");
        h[d] = ax[1] - ax[0];
        for (std::size_t i = 1; i + 1 < ax.size(); ++i)
            if (std::fabs((ax[i + 1] - ax[i]) - h[d]) > 1e-10 * h[d])
                throw std::invalid_argument("apply_laplace_bessel: grid must be uniform");
        if (!(ax.front() > 0.0) || ax.front() < h[d] * (1.0 - 1e-12))
            throw std::invalid_argument(
                "apply_laplace_bessel: grid touches a coordinate hyperplane margin");
    }

    std::vector<std::vector<double>> inner_axes(n);
    for (std::size_t d = 0; d < n; ++d)
        inner_axes[d] = std::vector<double>(u.axis(d).begin() + 1, u.axis(d).end() - 1);

    std::vector<std::size_t> extent(n);
    std::size_t total = 1;
    for (std::size_t d = 0; d < n; ++d) {
        extent[d] = inner_axes[d].size();
        total *= extent[d];
    }
    std::vector<double> vals(total);
    std::vector<std::size_t> idx(n, 0);
    std::vector<std::size_t> uidx(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double acc = 0.0;
        for (std::size_t d = 0; d < n; ++d) uidx[d] = idx[d] + 1;
        double center = u.value_at(uidx);
        for (std::size_t d = 0; d < n; ++d) {
            uidx[d] = idx[d] + 2;
            double up = u.value_at(uidx);
            uidx[d] = idx[d];
            double dn = u.value_at(uidx);
            uidx[d] = idx[d] + 1;
            double x = inner_axes[d][idx[d]];
            acc += (up - 2.0 * center + dn) / (h[d] * h[d]) +
                   (A.a(d) / x) * (up - dn) / (2.0 * h[d]);
        }
        vals[flat] = acc;
        for (std::size_t d = n; d-- > 0;) {
            if (++idx[d] < extent[d]) break;
            idx[d] = 0;
        }
    }
    return GridFunction(std::move(inner_axes), std::move(vals));
}

/// Radial fundamental solution of the Laplace-Bessel operator, with the
/// unspecified constant fixed to 1: log branch when n + |a| = 2, the power
/// branch otherwise.
inline double fundamental_solution_E(const MultiIndexA& A, const PointPlus& x) {
    double r = x.norm();
    if (!(r > 0.0)) throw std::domain_error("fundamental_solution_E: singular origin");
    double deg = A.homogeneity();
    if (std::fabs(deg - 2.0) < 1e-12) return std::log(r);
    return std::pow(r, 2.0 - deg);
}

/// Max-norm residual of the discrete operator applied to E on an annulus
/// box, per refinement level, measured over the fixed middle window of the
/// box so the comparison set does not drift toward the boundary as the
/// grid refines; the observed order should be ~2.
inline std::vector<double> fundamental_solution_residuals(const MultiIndexA& A,
                                                          const std::vector<double>& lo,
                                                          const std::vector<double>& hi,
                                                          std::size_t base_points, int levels) {
    const std::size_t n = A.dim();
    std::vector<double> wlo(n), whi(n);
    for (std::size_t d = 0; d < n; ++d) {
        double span = hi[d] - lo[d];
        wlo[d] = lo[d] + 0.2 * span;
        whi[d] = hi[d] - 0.2 * span;
    }
    // probe set: coarse-grid nodes inside the window; the refinements nest,
    // so every probe is an exact node of every level
    std::vector<std::vector<double>> probe_axes(n);
    {
        StencilGrid coarse(lo, hi, std::vector<std::size_t>(n, base_points));
        auto axes = coarse.axes();
        for (std::size_t d = 0; d < n; ++d)
            for (double x : axes[d])
                if (x >= wlo[d] && x <= whi[d]) probe_axes[d].push_back(x);
    }
    std::vector<double> res;
    for (int l = 0; l < levels; ++l) {
        std::size_t pts = ((base_points - 1) << l) + 1;
        StencilGrid grid(lo, hi, std::vector<std::size_t>(n, pts));
        GridFunction u = grid.sample([&](const PointPlus& p) {
            return fundamental_solution_E(A, p);
        });
        GridFunction lap = apply_laplace_bessel(u, A);
        const auto& axes = lap.axes();
        double mx = 0.0;
        std::vector<std::size_t> pick(n, 0);
        bool done = false;
        while (!done) {
            std::vector<std::size_t> node(n);
            for (std::size_t d = 0; d < n; ++d) {
                double x = probe_axes[d][pick[d]];
                double h = axes[d][1] - axes[d][0];
                node[d] = static_cast<std::size_t>(std::llround((x - axes[d].front()) / h));
            }
            mx = std::max(mx, std::fabs(lap.value_at(node)));
            done = true;
            for (std::size_t d = n; d-- > 0;) {
                if (++pick[d] < probe_axes[d].size()) {
                    done = false;
                    break;
                }
                pick[d] = 0;
            }
        }
        res.push_back(mx);
    }
    return res;
}

} // namespace besselcap
