#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "besselcap/grid.hpp"
#include "besselcap/measure.hpp"
#include "besselcap/multiindex.hpp"
#include "besselcap/quadrature.hpp"

namespace besselcap {

/// Dual exponent p' with 1/p + 1/p' = 1. Returns +inf for p = 1.
inline double dual_exponent(double p) {
    if (!(p >= 1.0)) throw std::domain_error("dual_exponent: p must be >= 1");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

namespace detail {

/// Per-axis quadrature points for one grid cell against the weight x^a.
/// Cells meeting x = 0 use the substitution x = b u^2 so the weight's
/// singular derivative never hits a node.
struct AxisCellRule {
    std::vector<double> nodes;
    std::vector<double> weights; // include x^a and the jacobian
};

inline AxisCellRule axis_cell_rule(double lo, double hi, double a, std::size_t npts) {
    AxisCellRule out;
    const GaussRule& r = gauss_legendre(npts);
    if (lo <= 0.0) {
        // x = hi * u^2 on u in [0, 1]
        for (std::size_t i = 0; i < npts; ++i) {
            double u = 0.5 * (r.nodes[i] + 1.0);
            double w = 0.5 * r.weights[i];
            double x = hi * u * u;
            if (x == 0.0) continue;
            out.nodes.push_back(x);
            out.weights.push_back(w * 2.0 * hi * u * std::pow(x, a));
        }
    } else {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < npts; ++i) {
            double x = mid + half * r.nodes[i];
            out.nodes.push_back(x);
            out.weights.push_back(half * r.weights[i] * std::pow(x, a));
        }
    }
    return out;
}

/// Full tensor rule for integrating against dlambda_a over the grid box.
struct TensorRule {
    std::vector<std::vector<double>> nodes;   // per axis
    std::vector<std::vector<double>> weights; // per axis, weight folded in
};

inline TensorRule lambda_a_rule(const std::vector<std::vector<double>>& axes,
                                const MultiIndexA& A, std::size_t npts) {
    TensorRule t;
    t.nodes.resize(axes.size());
    t.weights.resize(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) {
        for (std::size_t c = 0; c + 1 < axes[d].size(); ++c) {
            AxisCellRule r = axis_cell_rule(axes[d][c], axes[d][c + 1], A.a(d), npts);
            t.nodes[d].insert(t.nodes[d].end(), r.nodes.begin(), r.nodes.end());
            t.weights[d].insert(t.weights[d].end(), r.weights.begin(), r.weights.end());
        }
    }
    return t;
}

template <class F>
double tensor_integrate(const TensorRule& t, F&& f) {
    const std::size_t n = t.nodes.size();
    for (const auto& v : t.nodes)
        if (v.empty()) return 0.0;
    std::vector<std::size_t> idx(n, 0);
    PointPlus p;
    p.x.resize(n);
    double acc = 0.0;
    bool done = (n == 0);
    while (!done) {
        double w = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            p.x[d] = t.nodes[d][idx[d]];
            w *= t.weights[d][idx[d]];
        }
        acc += w * f(p);
        done = true;
        for (std::size_t d = n; d-- > 0;) {
            if (++idx[d] < t.nodes[d].size()) {
                done = false;
                break;
            }
            idx[d] = 0;
        }
    }
    return acc;
}

} // namespace detail

/// Number of Gauss points used per grid cell per axis by weighted_norm and
/// the grid-based convolution quadratures.
inline constexpr std::size_t kCellGaussPoints = 8;

/// L^p_a norm of a grid function: (integral of |f|^p x^a dx)^{1/p} over the
/// grid box by composite per-cell Gauss quadrature.
inline double weighted_norm(const GridFunction& f, double p, const MultiIndexA& A) {
    if (!(p >= 1.0) || std::isinf(p)) throw std::domain_error("weighted_norm: need 1 <= p < inf");
    if (f.dim() != A.dim()) throw std::invalid_argument("weighted_norm: dimension mismatch");
    detail::TensorRule rule = detail::lambda_a_rule(f.axes(), A, kCellGaussPoints);
    double integral = detail::tensor_integrate(
        rule, [&](const PointPlus& x) { return std::pow(std::fabs(f.eval(x)), p); });
    return std::pow(std::max(integral, 0.0), 1.0 / p);
}

namespace detail {

/// lambda_a measure of the unit half-ball B_+(0,1), by reducing one axis at
/// a time with the dilation law for the remaining lower-dimensional ball.
inline double unit_ball_measure(const MultiIndexA& A) {
    double V = 1.0;
    double degree = 0.0; // homogeneity of the (k-1)-dim ball handled so far
    for (std::size_t k = 0; k < A.dim(); ++k) {
        double a = A.a(k);
        double D = degree;
        // int_0^1 x^a (1-x^2)^{D/2} dx, x = sin(phi)
        double I = integrate_adaptive(
            [&](double phi) {
                double s = std::sin(phi), c = std::cos(phi);
                return std::pow(s, a) * std::pow(c, D + 1.0);
            },
            0.0, 1.5707963267948966, 1e-13);
        V *= I;
        degree += a + 1.0;
    }
    return V;
}

inline double cached_ball_constant(const MultiIndexA& A) {
    static std::map<std::vector<double>, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(A.alphas());
    if (it == cache.end()) it = cache.emplace(A.alphas(), unit_ball_measure(A)).first;
    return it->second;
}

} // namespace detail

/// lambda_a(B_+(0,r)) = c(n,a) r^{n+|a|}. The constant is computed once per
/// multi-index by quadrature and cached; no closed form is claimed.
inline double lambda_a_ball(const MultiIndexA& A, double r) {
    if (!(r > 0.0)) throw std::domain_error("lambda_a_ball: r must be positive");
    return detail::cached_ball_constant(A) * std::pow(r, A.homogeneity());
}

/// Surface factor S(A) = integral of w^a over the unit sphere patch in the
/// orthant, so that integrals of radial functions reduce to
/// S(A) * int g(r) r^{n+|a|-1} dr.
inline double orthant_sphere_factor(const MultiIndexA& A) {
    return detail::cached_ball_constant(A) * A.homogeneity();
}

/// mu_a(E) = sum over atoms in E of mass * point^a.
template <class Pred>
double weighted_mass(const DiscreteMeasure& mu, const MultiIndexA& A, Pred&& in_set) {
    double s = 0.0;
    for (const Atom& at : mu.atoms())
        if (at.mass > 0.0 && in_set(at.point)) s += at.mass * orthant_weight(at.point, A);
    return s;
}

inline double weighted_mass(const DiscreteMeasure& mu, const MultiIndexA& A) {
    return weighted_mass(mu, A, [](const PointPlus&) { return true; });
}

} // namespace besselcap
