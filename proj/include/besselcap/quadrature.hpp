#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace besselcap {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

namespace detail {

// Symmetric tridiagonal QL with implicit shifts, rotating a seed vector along.
// d: diagonal, e: subdiagonal (e[n-1] ignored), z: seed -> first eigenvector
// components. Eigenvalues returned ascending in d.
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    e.resize(n);
    e[n - 1] = 0.0;
    const double eps = 2.22e-16;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 60)
                throw std::runtime_error("tridiag_ql: no convergence");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool restart = false;
            for (std::size_t ii = m; ii-- > l;) {
                double f = s * e[ii];
                double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[m] = 0.0;
                    restart = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                f = z[ii + 1];
                z[ii + 1] = s * z[ii] + c * f;
                z[ii] = c * z[ii] - s * f;
            }
            if (restart) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending, carrying z
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> dn(n), zn(n);
    for (std::size_t i = 0; i < n; ++i) {
        dn[i] = d[idx[i]];
        zn[i] = z[idx[i]];
    }
    d.swap(dn);
    z.swap(zn);
}

} // namespace detail

/// Gauss-Jacobi rule for the weight (1-x)^A (1+x)^B on [-1,1], via
/// Golub-Welsch on the Jacobi recurrence. Valid for A, B > -1.
inline GaussRule gauss_jacobi(std::size_t n, double A, double B) {
    if (n == 0 || !(A > -1.0) || !(B > -1.0))
        throw std::invalid_argument("gauss_jacobi: need n>0 and A,B > -1");
    const double ab = A + B;
    std::vector<double> d(n), e(n, 0.0), z(n, 0.0);
    z[0] = 1.0;
    d[0] = (B - A) / (ab + 2.0);
    for (std::size_t k = 1; k < n; ++k) {
        double q = 2.0 * k + ab;
        d[k] = (B * B - A * A) / (q * (q + 2.0));
    }
    if (n > 1)
        e[0] = std::sqrt(4.0 * (A + 1.0) * (B + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double j = static_cast<double>(k + 1);
        double q = 2.0 * j + ab;
        e[k] = std::sqrt(4.0 * j * (j + A) * (j + B) * (j + ab) / (q * q * (q * q - 1.0)));
    }
    detail::tridiag_ql(d, e, z);

    const double mu0 =
        std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(A + 1.0) + std::lgamma(B + 1.0) -
                 std::lgamma(ab + 2.0));
    GaussRule rule;
    rule.nodes = d;
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) rule.weights[i] = mu0 * z[i] * z[i];
    return rule;
}

/// Cached Gauss-Legendre rule on [-1,1].
inline const GaussRule& gauss_legendre(std::size_t n) {
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_jacobi(n, 0.0, 0.0)).first;
    return it->second;
}

/// Fixed Gauss-Legendre quadrature of f over [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t n = 16) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

/// Composite Gauss-Legendre over consecutive breakpoints.
template <class F>
double integrate_composite(F&& f, const std::vector<double>& breaks, std::size_t n = 16) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) s += integrate_gl(f, breaks[i], breaks[i + 1], n);
    return s;
}

/// Composite rule tolerant of square-root cusps at the breakpoints: each
/// piece is split at its midpoint and integrated under the substitutions
/// x = a + u^2 and x = b - u^2.
template <class F>
double integrate_composite_sqrt(F&& f, const std::vector<double>& breaks, std::size_t n = 12) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        double m = 0.5 * (a + b);
        s += integrate_gl([&](double u) { return 2.0 * u * f(a + u * u); }, 0.0,
                          std::sqrt(m - a), n);
        s += integrate_gl([&](double u) { return 2.0 * u * f(b - u * u); }, 0.0,
                          std::sqrt(b - m), n);
    }
    return s;
}

namespace detail {

template <class F>
double adapt_rec(F& f, double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = integrate_gl(f, a, m, 15);
    double right = integrate_gl(f, m, b, 15);
    double err = std::fabs(left + right - whole);
    if (depth <= 0 || err <= tol) return left + right;
    return adapt_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adapt_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive bisecting Gauss quadrature. tol is treated relative to the
/// running estimate with a small absolute floor.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-11, int max_depth = 30) {
    if (!(b > a)) return 0.0;
    double whole = integrate_gl(f, a, b, 15);
    double tol = rel_tol * std::max(std::fabs(whole), 1e-300) + 1e-300;
    return detail::adapt_rec(f, a, b, whole, tol, max_depth);
}

/// Result of an improper integral probed for divergence through dyadic tails.
struct TailIntegral {
    double value = 0.0;
    bool divergent = false;
};

namespace detail {

// Shared trend logic for dyadic band integrals of nonnegative-ish
// integrands: sums the bands, declares divergence when the partial sum
// outgrows the first band by `growth_factor` or the bands stop contracting,
// and completes a geometric tail when the contraction ratio is clean.
template <class Band>
TailIntegral monitored_band_sum(Band&& band_at, double growth_factor, int max_bands) {
    TailIntegral out;
    double first_band = 0.0, prev = 0.0, prev2 = 0.0;
    int flat = 0;
    for (int k = 0; k < max_bands; ++k) {
        double band = band_at(k);
        out.value += band;
        if (k == 0) first_band = std::fabs(band) + 1e-300;
        if (k > 4 && std::fabs(band) >= 0.999 * std::fabs(prev) &&
            std::fabs(band) > 1e-13 * first_band)
            ++flat;
        else
            flat = 0;
        if (flat >= 8 || std::fabs(out.value) > growth_factor * first_band) {
            out.divergent = true;
            return out;
        }
        if (std::fabs(band) < 1e-14 * (std::fabs(out.value) + 1e-300)) return out;
        prev2 = prev;
        prev = band;
    }
    // bands never became negligible: decide by the contraction ratio and
    // complete the geometric remainder when it is conclusive
    if (std::fabs(prev2) > 0.0) {
        double q = std::fabs(prev) / std::fabs(prev2);
        if (q < 0.98) {
            out.value += prev * q / (1.0 - q);
            return out;
        }
    }
    out.divergent = std::fabs(prev) > 1e-10 * first_band;
    return out;
}

} // namespace detail

/// Integral over (0, upper] of f, watching the dyadic head for divergence.
template <class F>
TailIntegral integrate_head_monitored(F&& f, double upper, double growth_factor = 1e6,
                                      int max_bands = 60) {
    return detail::monitored_band_sum(
        [&](int k) {
            double hi = upper * std::pow(0.5, k);
            return integrate_gl(f, 0.5 * hi, hi, 24);
        },
        growth_factor, max_bands);
}

/// Integral over [lower, infinity) of f with the same dyadic monitoring.
template <class F>
TailIntegral integrate_tail_monitored(F&& f, double lower, double growth_factor = 1e6,
                                      int max_bands = 60) {
    return detail::monitored_band_sum(
        [&](int k) {
            double lo = lower * std::pow(2.0, k);
            return integrate_gl(f, lo, 2.0 * lo, 24);
        },
        growth_factor, max_bands);
}

/// Geometric ladder of breakpoints from `from` toward `to`, starting with a
/// step of |to-from|*h0_frac and doubling. Endpoints included, sorted in
/// integration order (from -> to).
inline std::vector<double> geometric_breaks(double from, double to, double h0_frac = 1e-8) {
    std::vector<double> b;
    b.push_back(from);
    double span = to - from;
    if (span <= 0.0) return b;
    double h = span * h0_frac;
    double cur = from;
    while (cur + h < to && h < span) {
        cur += h;
        b.push_back(cur);
        h *= 2.0;
    }
    b.push_back(to);
    return b;
}

} // namespace besselcap
