#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "besselcap/core.hpp"
#include "besselcap/errors.hpp"
#include "besselcap/grid.hpp"
#include "besselcap/multiindex.hpp"
#include "besselcap/quadrature.hpp"

namespace besselcap {

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

inline double sigma_norm_constant(double alpha) {
    // Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2))
    return std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 0.5)) / std::sqrt(kPi);
}

inline int sigma_power_sub(double alpha) {
    // theta = u^m flattens the sin^{2 alpha} endpoint; pick m so the pulled
    // back integrand is at least C^3 at the endpoint.
    double need = 4.0 / (2.0 * alpha + 1.0);
    int m = static_cast<int>(std::ceil(need));
    return std::max(1, m);
}

} // namespace detail

/// Integral of inner(theta) against the probability measure
/// dsigma = c_alpha sin^{2 alpha}(theta) dtheta over [lo, hi] in [0, pi].
/// Endpoint power substitutions keep accuracy for alpha in (-1/2, 0).
template <class G>
double sigma_integrate(double alpha, double lo, double hi, G&& inner, std::size_t gl = 48) {
    if (!(alpha > -0.5)) throw std::domain_error("sigma_integrate: alpha must exceed -1/2");
    lo = std::max(lo, 0.0);
    hi = std::min(hi, kPi);
    if (!(hi > lo)) return 0.0;
    const double c = detail::sigma_norm_constant(alpha);
    const int m = detail::sigma_power_sub(alpha);
    const double md = static_cast<double>(m);
    double acc = 0.0;

    auto piece_from_zero = [&](double a, double b) {
        // theta = u^m, u in [a^{1/m}, b^{1/m}]
        double ua = std::pow(a, 1.0 / md), ub = std::pow(b, 1.0 / md);
        acc += integrate_gl(
            [&](double u) {
                double th = std::pow(u, md);
                return c * std::pow(std::sin(th), 2.0 * alpha) * md * std::pow(u, md - 1.0) *
                       inner(th);
            },
            ua, ub, gl);
    };
    auto piece_from_pi = [&](double a, double b) {
        // theta = pi - v^m, v in [(pi-b)^{1/m}, (pi-a)^{1/m}]
        double va = std::pow(kPi - b, 1.0 / md), vb = std::pow(kPi - a, 1.0 / md);
        acc += integrate_gl(
            [&](double v) {
                double th = kPi - std::pow(v, md);
                return c * std::pow(std::sin(th), 2.0 * alpha) * md * std::pow(v, md - 1.0) *
                       inner(th);
            },
            va, vb, gl);
    };

    const double half = 0.5 * kPi;
    if (hi <= half) {
        piece_from_zero(lo, hi);
    } else if (lo >= half) {
        piece_from_pi(lo, hi);
    } else {
        piece_from_zero(lo, half);
        piece_from_pi(half, hi);
    }
    return acc;
}

/// sigma([0, theta]): cumulative distribution of the translation angle
/// measure on one axis. Closed forms for the orders that show up constantly
/// (alpha = 0, 1/2, 1); Gauss quadrature otherwise.
inline double sigma_cdf(double alpha, double theta) {
    if (theta <= 0.0) return 0.0;
    if (theta >= kPi) return 1.0;
    if (alpha == 0.0) return theta / kPi;
    if (alpha == 0.5) return 0.5 * (1.0 - std::cos(theta));
    if (alpha == 1.0) return (theta - std::sin(theta) * std::cos(theta)) / kPi;
    return sigma_integrate(alpha, 0.0, theta, [](double) { return 1.0; });
}

/// Per-axis Gauss-Jacobi realization of the probability measures dsigma_i
/// under u = cos(theta). Weights are normalized to sum to one per axis.
struct ThetaQuadrature {
    std::vector<std::vector<double>> cos_nodes;
    std::vector<std::vector<double>> weights;

    std::size_t dim() const { return cos_nodes.size(); }

    static ThetaQuadrature build(const MultiIndexA& A, std::size_t per_axis = 64) {
        ThetaQuadrature q;
        q.cos_nodes.resize(A.dim());
        q.weights.resize(A.dim());
        for (std::size_t i = 0; i < A.dim(); ++i) {
            double e = A.alpha(i) - 0.5;
            GaussRule r = gauss_jacobi(per_axis, e, e);
            double mu0 = std::exp((2.0 * e + 1.0) * std::log(2.0) + 2.0 * std::lgamma(e + 1.0) -
                                  std::lgamma(2.0 * e + 2.0));
            double sum = 0.0;
            for (double w : r.weights) {
                if (!(w > 0.0)) throw std::logic_error("ThetaQuadrature: nonpositive weight");
                sum += w;
            }
            q.cos_nodes[i] = r.nodes;
            q.weights[i].resize(per_axis);
            for (std::size_t j = 0; j < per_axis; ++j) q.weights[i][j] = r.weights[j] / mu0;
            if (std::fabs(sum / mu0 - 1.0) > 1e-10)
                throw std::logic_error("ThetaQuadrature: weights do not sum to 1");
        }
        return q;
    }
};

/// Bessel translation T^t f(x) in the theta form, by tensor Gauss-Jacobi
/// quadrature. Symmetric in (x, t) by construction.
template <class F>
double translate_theta(F&& f, const PointPlus& t, const PointPlus& x, const MultiIndexA& A,
                       const ThetaQuadrature& q) {
    const std::size_t n = A.dim();
    if (x.dim() != n || t.dim() != n || q.dim() != n)
        throw std::invalid_argument("translate_theta: dimension mismatch");
    std::vector<std::size_t> idx(n, 0);
    PointPlus z;
    z.x.resize(n);
    double acc = 0.0;
    bool done = false;
    while (!done) {
        double w = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            double u = q.cos_nodes[d][idx[d]];
            w *= q.weights[d][idx[d]];
            double s = x.x[d] * x.x[d] + t.x[d] * t.x[d] - 2.0 * x.x[d] * t.x[d] * u;
            z.x[d] = std::sqrt(std::max(s, 0.0));
        }
        acc += w * f(z);
        done = true;
        for (std::size_t d = n; d-- > 0;) {
            if (++idx[d] < q.cos_nodes[d].size()) {
                done = false;
                break;
            }
            idx[d] = 0;
        }
    }
    return acc;
}

/// One-axis translation kernel K(x,t,z) with respect to dlambda_a(z),
/// supported on |x-t| < z < x+t. The normalizing constant is the one forced
/// by the theta form, so that K reproduces constants.
inline double kernel_K(double x, double t, double z, double alpha) {
    if (!(alpha > -0.5)) throw std::domain_error("kernel_K: alpha must exceed -1/2");
    if (!(x >= 0.0) || !(t >= 0.0)) throw std::domain_error("kernel_K: x,t must be >= 0");
    double D = std::fabs(x - t), S = x + t;
    if (!(z > D) || !(z < S)) return 0.0;
    double C = std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 0.5) +
                        (1.0 - 2.0 * alpha) * std::log(2.0)) /
               std::sqrt(kPi);
    double quart = (S * S - z * z) * (z * z - D * D);
    return C * std::pow(quart, alpha - 0.5) / std::pow(x * t * z, 2.0 * alpha);
}

struct KernelQuadOpts {
    std::size_t gl = 16;         // Gauss points per panel
    double h0_frac = 1e-8;       // first panel width / span
    double ladder_factor = 4.0;  // geometric growth of panels from the ends
    std::vector<double> breaks;  // extra interior z breakpoints (e.g. grid kinks)
};

struct TranslateResult {
    double value = 0.0;
    bool divergent = false;
};

namespace detail {

// Panel engine for int_{D}^{S} K(x,t,z) f(z) z^a dz. The two endpoint panels
// fold the (z-D)^{alpha-1/2} and (S-z)^{alpha-1/2} factors through square
// substitutions; geometric ladders resolve steep f near the ends. For x = t
// (D = 0) the lower end is laddered toward zero with a geometric tail
// completion, flagged divergent when the panel series does not contract.
template <class F>
TranslateResult kernel_panels_1d(F&& f, double x, double t, double alpha, double a,
                                 const KernelQuadOpts& opts) {
    TranslateResult out;
    const double D = std::fabs(x - t), S = x + t;
    const double span = S - D;
    if (!(span > 0.0)) return out;
    const double C = std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 0.5) +
                              (1.0 - 2.0 * alpha) * std::log(2.0)) /
                     std::sqrt(kPi);
    const double invxt = 1.0 / std::pow(x * t, 2.0 * alpha);
    const int m = sigma_power_sub(alpha); // reuse: makes u^{2 alpha} panels smooth
    const double md = static_cast<double>(m);

    auto kernel_rest_low = [&](double z) {
        // K without the (z - D)^{alpha-1/2} factor
        return C * std::pow((z + D) * (S * S - z * z), alpha - 0.5) * invxt /
               std::pow(z, 2.0 * alpha);
    };
    auto kernel_rest_high = [&](double z) {
        // K without the (S - z)^{alpha-1/2} factor
        return C * std::pow((S + z) * (z * z - D * D), alpha - 0.5) * invxt /
               std::pow(z, 2.0 * alpha);
    };
    auto kernel_full = [&](double z) {
        return C * std::pow((S * S - z * z) * (z * z - D * D), alpha - 0.5) * invxt /
               std::pow(z, 2.0 * alpha);
    };

    const bool coincident = (D <= 1e-14 * S);
    const double h0 = span * opts.h0_frac;
    double lo_edge = coincident ? std::max(span * 1e-12, 1e-300) : D + h0;
    double hi_edge = S - h0;

    // assemble interior breakpoints
    std::vector<double> bks;
    bks.push_back(lo_edge);
    double step = coincident ? lo_edge : h0;
    double cur = lo_edge;
    while (cur + step < 0.5 * (D + S)) {
        cur += step;
        bks.push_back(cur);
        step *= opts.ladder_factor;
    }
    step = h0;
    cur = hi_edge;
    std::vector<double> top;
    top.push_back(hi_edge);
    while (cur - step > 0.5 * (D + S)) {
        cur -= step;
        top.push_back(cur);
        step *= opts.ladder_factor;
    }
    bks.insert(bks.end(), top.begin(), top.end());
    for (double b : opts.breaks)
        if (b > lo_edge && b < hi_edge) bks.push_back(b);
    std::sort(bks.begin(), bks.end());
    bks.erase(std::unique(bks.begin(), bks.end()), bks.end());

    // low endpoint panel
    if (!coincident) {
        // z = D + u^{2}, then u = w^m for alpha < 0 smoothness
        double ub = std::sqrt(lo_edge - D);
        double wb = std::pow(ub, 1.0 / md);
        out.value += integrate_gl(
            [&](double w) {
                double u = std::pow(w, md);
                double z = D + u * u;
                double jac = 2.0 * std::pow(u, 2.0 * alpha) * md * std::pow(w, md - 1.0);
                return jac * kernel_rest_low(z) * f(z) * std::pow(z, a);
            },
            0.0, wb, opts.gl);
    }

    // interior panels, low to high, watching the lowest panels when D = 0
    std::vector<double> low_panels;
    for (std::size_t i = 0; i + 1 < bks.size(); ++i) {
        double v = integrate_gl([&](double z) { return kernel_full(z) * f(z) * std::pow(z, a); },
                                bks[i], bks[i + 1], opts.gl);
        out.value += v;
        if (coincident && i < 3) low_panels.push_back(v);
    }
    if (coincident && low_panels.size() >= 2) {
        double p0 = std::fabs(low_panels[0]), p1 = std::fabs(low_panels[1]);
        if (p1 > 0.0) {
            double q = p0 / p1; // contraction toward z = 0
            if (q >= 0.95)
                out.divergent = true;
            else if (q > 1e-12)
                out.value += low_panels[0] * q / (1.0 - q); // geometric completion
        }
    }

    // high endpoint panel: z = S - u^2, u = w^m
    {
        double ub = std::sqrt(S - hi_edge);
        double wb = std::pow(ub, 1.0 / md);
        out.value += integrate_gl(
            [&](double w) {
                double u = std::pow(w, md);
                double z = S - u * u;
                double jac = 2.0 * std::pow(u, 2.0 * alpha) * md * std::pow(w, md - 1.0);
                return jac * kernel_rest_high(z) * f(z) * std::pow(z, a);
            },
            0.0, wb, opts.gl);
    }
    return out;
}

} // namespace detail

/// Kernel-form translation (product-kernel quadrature) of a callable
/// f over the product of intervals (|x_i - t_i|, x_i + t_i). Requires every
/// x_i t_i > 0; callers hitting the boundary should use translate_theta.
template <class F>
double translate_kernel(F&& f, const PointPlus& t, const PointPlus& x, const MultiIndexA& A,
                        const KernelQuadOpts& opts = {}) {
    const std::size_t n = A.dim();
    if (x.dim() != n || t.dim() != n)
        throw std::invalid_argument("translate_kernel: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!(x.x[i] * t.x[i] > 0.0))
            throw DegenerateKernelError(
                "translate_kernel: x_i t_i = 0 degenerates the kernel; use translate_theta");
    std::vector<double> z(n, 0.0);
    std::function<double(std::size_t)> rec = [&](std::size_t axis) -> double {
        if (axis == n) {
            PointPlus p;
            p.x = z;
            return f(p);
        }
        auto inner = [&](double zi) {
            z[axis] = zi;
            return rec(axis + 1);
        };
        return detail::kernel_panels_1d(inner, x.x[axis], t.x[axis], A.alpha(axis), A.a(axis),
                                        opts)
            .value;
    };
    return rec(0);
}

/// Translation of a GridFunction: kernel form with panels aligned to the
/// grid kinks; axes with x_i t_i = 0 collapse to exact evaluation, since the
/// angle dependence vanishes there.
inline double translate_grid(const GridFunction& f, const PointPlus& t, const PointPlus& x,
                             const MultiIndexA& A, std::size_t gl = 12) {
    const std::size_t n = A.dim();
    if (f.dim() != n || x.dim() != n || t.dim() != n)
        throw std::invalid_argument("translate_grid: dimension mismatch");
    std::vector<double> z(n, 0.0);
    std::function<double(std::size_t)> rec = [&](std::size_t axis) -> double {
        if (axis == n) {
            PointPlus p;
            p.x = z;
            return f.eval(p);
        }
        double xi = x.x[axis], ti = t.x[axis];
        if (xi * ti == 0.0) {
            z[axis] = std::hypot(xi, ti);
            return rec(axis + 1);
        }
        auto inner = [&](double zi) {
            z[axis] = zi;
            return rec(axis + 1);
        };
        KernelQuadOpts opts;
        opts.gl = gl;
        opts.h0_frac = 1e-6;
        opts.breaks = f.axis(axis);
        return detail::kernel_panels_1d(inner, xi, ti, A.alpha(axis), A.a(axis), opts).value;
    };
    return rec(0);
}

/// Generalized convolution f *_a g evaluated at x: integral of
/// T^t f(x) g(t) t^a dt by grid quadrature over the reachable box.
template <class G>
double convolve(const GridFunction& f, G&& g, const PointPlus& x, const MultiIndexA& A,
                std::size_t cell_gl = 6) {
    const std::size_t n = A.dim();
    if (f.dim() != n || x.dim() != n) throw std::invalid_argument("convolve: dimension mismatch");
    // t-axis breakpoints where the translated grid function kinks
    std::vector<std::vector<double>> taxes(n);
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<double> bk;
        bk.push_back(0.0);
        double tmax = x.x[d] + f.axis_max(d);
        for (double zn : f.axis(d)) {
            double lo = std::fabs(x.x[d] - zn), hi = x.x[d] + zn;
            if (lo > 0.0 && lo < tmax) bk.push_back(lo);
            if (hi > 0.0 && hi < tmax) bk.push_back(hi);
        }
        bk.push_back(tmax);
        std::sort(bk.begin(), bk.end());
        bk.erase(std::unique(bk.begin(), bk.end()), bk.end());
        taxes[d] = bk;
    }
    detail::TensorRule rule = detail::lambda_a_rule(taxes, A, cell_gl);
    return detail::tensor_integrate(rule, [&](const PointPlus& t) {
        return g(t) * translate_grid(f, t, x, A);
    });
}

/// T^t of the one-axis indicator chi_{[0,r)} at x: the analytic
/// angle-threshold rule (arccos clamp).
inline double translate_interval_indicator(double x, double t, double r, double alpha) {
    if (!(r > 0.0)) throw std::domain_error("translate_interval_indicator: r must be positive");
    if (x * t == 0.0) return (x * x + t * t < r * r) ? 1.0 : 0.0;
    double gamma = (x * x + t * t - r * r) / (2.0 * x * t);
    if (gamma <= -1.0) return 1.0;
    if (gamma >= 1.0) return 0.0;
    return sigma_cdf(alpha, std::acos(gamma));
}

/// T^t chi_{[0,r)^n}(x): cube indicators factor across axes.
inline double translate_cube_indicator(const PointPlus& x, const PointPlus& t, double r,
                                       const MultiIndexA& A) {
    if (!(r > 0.0)) throw std::domain_error("translate_cube_indicator: r must be positive");
    double v = 1.0;
    for (std::size_t i = 0; i < A.dim(); ++i) {
        v *= translate_interval_indicator(x.x[i], t.x[i], r, A.alpha(i));
        if (v == 0.0) return 0.0;
    }
    return v;
}

/// T^t chi_{B_+(0,r)}(x): per-axis recursion with the analytic rule on the
/// innermost axis and a single angle split on the outer ones.
inline double translate_ball_indicator(const PointPlus& x, const PointPlus& t, double r,
                                       const MultiIndexA& A) {
    if (!(r > 0.0)) throw std::domain_error("translate_ball_indicator: r must be positive");
    const std::size_t n = A.dim();
    if (x.dim() != n || t.dim() != n)
        throw std::invalid_argument("translate_ball_indicator: dimension mismatch");

    // suffix sums of extreme reachable |z_i|^2
    std::vector<double> min_rest(n + 1, 0.0), max_rest(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double d = x.x[i] - t.x[i], s = x.x[i] + t.x[i];
        min_rest[i] = min_rest[i + 1] + d * d;
        max_rest[i] = max_rest[i + 1] + s * s;
    }

    std::function<double(std::size_t, double)> rec = [&](std::size_t i, double budget) -> double {
        if (!(budget > 0.0)) return 0.0;
        if (min_rest[i] >= budget) return 0.0;
        if (max_rest[i] < budget) return 1.0;
        double xi = x.x[i], ti = t.x[i];
        if (i + 1 == n) return translate_interval_indicator(xi, ti, std::sqrt(budget), A.alpha(i));
        if (xi * ti == 0.0) return rec(i + 1, budget - xi * xi - ti * ti);
        double cap = budget - min_rest[i + 1]; // largest usable z_i^2
        double gamma = (xi * xi + ti * ti - cap) / (2.0 * xi * ti);
        double theta_hi = gamma <= -1.0 ? kPi : (gamma >= 1.0 ? 0.0 : std::acos(gamma));
        if (theta_hi <= 0.0) return 0.0;
        return sigma_integrate(
            A.alpha(i), 0.0, theta_hi,
            [&](double th) {
                double zz = xi * xi + ti * ti - 2.0 * xi * ti * std::cos(th);
                return rec(i + 1, budget - zz);
            },
            32);
    };
    return rec(0, r * r);
}

/// Support/bound data for the translated indicators of Lemma-type estimates:
/// the translated ball value, the envelope prod_i min{1, (r/x_i)^{a_i}}
/// (with unit constant; the actual constants are empirical), and the cube
/// translate with its half-cube membership flag.
struct IndicatorBounds {
    double value = 0.0;      // T^t chi_{B_+(0,r)}(x)
    double upper = 0.0;      // envelope, upper shape for the ball translate
    double lower = 0.0;      // envelope, lower shape for the cube translate
    double cube_value = 0.0; // T^t chi_{[0,r)^n}(x)
    bool in_half_cube = false;
};

inline IndicatorBounds indicator_translate_bounds(const PointPlus& x, const PointPlus& t,
                                                  double r, const MultiIndexA& A) {
    if (!(r > 0.0)) throw std::domain_error("indicator_translate_bounds: r must be positive");
    IndicatorBounds b;
    b.value = translate_ball_indicator(x, t, r, A);
    b.cube_value = translate_cube_indicator(x, t, r, A);
    double env = 1.0;
    for (std::size_t i = 0; i < A.dim(); ++i) {
        if (x.x[i] > 0.0) env *= std::min(1.0, std::pow(r / x.x[i], A.a(i)));
    }
    b.upper = env;
    b.in_half_cube = true;
    for (std::size_t i = 0; i < A.dim(); ++i)
        if (std::fabs(x.x[i] - t.x[i]) > 0.5 * r) b.in_half_cube = false;
    b.lower = b.in_half_cube ? env : 0.0;
    return b;
}

} // namespace besselcap
