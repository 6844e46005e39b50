#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "besselcap/core.hpp"
#include "besselcap/kernels.hpp"
#include "besselcap/measure.hpp"
#include "besselcap/multiindex.hpp"
#include "besselcap/quadrature.hpp"
#include "besselcap/translation.hpp"

namespace besselcap {

/// chi_{B_+(0,r)} *_a mu (x): the averaged measure at scale r.
inline double averaged_measure(const DiscreteMeasure& mu, const PointPlus& x, double r,
                               const MultiIndexA& A) {
    if (!(r > 0.0)) throw std::domain_error("averaged_measure: r must be positive");
    double s = 0.0;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        s += at.mass * orthant_weight(at.point, A) * translate_ball_indicator(x, at.point, r, A);
    }
    return s;
}

struct WolffParams {
    MultiIndexA A;
    double nu;
    double p;
    int k_max = 20;       // dyadic depth
    int r_points = 400;   // target Gauss points for the Wolff r-integral
    double r_min = 1e-6;  // lower truncation of the r-integral
    double delta = 1.0;   // upper truncation (Remark-style flexibility)

    WolffParams(MultiIndexA a, double nu_, double p_) : A(std::move(a)), nu(nu_), p(p_) {
        if (!(p > 1.0)) throw std::invalid_argument("WolffParams: p must exceed 1");
        if (!(p * nu > 0.0) || !(p * nu < A.homogeneity()))
            throw std::invalid_argument("WolffParams: need 0 < p*nu < n+|a| (nontrivial regime)");
        if (k_max < 4) throw std::invalid_argument("WolffParams: k_max >= 4");
    }

    double dual_p() const { return dual_exponent(p); }
};

namespace detail {

inline double min_atom_distance(const DiscreteMeasure& mu, const PointPlus& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const Atom& at : mu.atoms())
        if (at.mass > 0.0) d = std::min(d, distance(at.point, x));
    return d;
}

inline double measure_scale(const DiscreteMeasure& mu, const PointPlus& x) {
    double s = std::max(1.0, x.norm());
    for (const Atom& at : mu.atoms()) s = std::max(s, at.point.norm());
    return s;
}

// Supremum of phi(r) over (r_lo, r_hi]: geometric base grid, exact hits on
// the supplied kink radii (the averaged measure is only piecewise smooth),
// and grid-zoom refinement around the leading local maxima. Accurate enough
// that sup-over-subset and subadditivity relations survive at 1e-9.
template <class Phi>
double sup_over_radii(Phi&& phi, double r_lo, double r_hi,
                      const std::vector<double>& kinks = {}, int grid_points = 200,
                      int zoom_rounds = 5) {
    if (!(r_hi > r_lo)) return 0.0;
    double best = 0.0;
    std::vector<double> rs(grid_points);
    const double lf = std::log(r_lo), hf = std::log(r_hi);
    std::vector<double> vals(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        rs[i] = std::exp(lf + (hf - lf) * i / double(grid_points - 1));
        vals[i] = phi(rs[i]);
        best = std::max(best, vals[i]);
    }
    for (double k : kinks)
        if (k > r_lo && k <= r_hi) best = std::max(best, phi(k));
    best = std::max(best, phi(r_hi));
    if (best <= 0.0) return 0.0;

    // rank local maxima of the base grid and zoom the strongest few
    std::vector<int> peaks;
    for (int i = 0; i < grid_points; ++i) {
        bool up = (i == 0) || vals[i] >= vals[i - 1];
        bool down = (i + 1 == grid_points) || vals[i] >= vals[i + 1];
        if (up && down && vals[i] > 0.0) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    if (peaks.size() > 4) peaks.resize(4);
    for (int pi : peaks) {
        double lo = std::log(rs[std::max(0, pi - 1)]);
        double hi = std::log(rs[std::min(grid_points - 1, pi + 1)]);
        for (int round = 0; round < zoom_rounds; ++round) {
            const int m = 33;
            int bi = 0;
            double bv = -1.0;
            for (int j = 0; j < m; ++j) {
                double r = std::exp(lo + (hi - lo) * j / double(m - 1));
                double v = phi(r);
                if (v > bv) {
                    bv = v;
                    bi = j;
                }
            }
            best = std::max(best, bv);
            double span = (hi - lo) / double(m - 1);
            double center = lo + span * bi;
            lo = center - span;
            hi = center + span;
        }
    }
    return best;
}

inline std::vector<double> atom_distances(const DiscreteMeasure& mu, const PointPlus& x) {
    std::vector<double> d;
    for (const Atom& at : mu.atoms())
        if (at.mass > 0.0) d.push_back(distance(at.point, x));
    return d;
}

} // namespace detail

/// Maximal measure M_a mu(x) = sup_r chi*mu(x) / lambda_a(B_+(0,r)).
/// Returns a tagged infinity when x carries an atom (the supremum genuinely
/// blows up there).
inline double maximal(const DiscreteMeasure& mu, const PointPlus& x, const MultiIndexA& A) {
    if (mu.empty()) return 0.0;
    if (detail::min_atom_distance(mu, x) == 0.0) return std::numeric_limits<double>::infinity();
    double scale = detail::measure_scale(mu, x);
    return detail::sup_over_radii(
        [&](double r) { return averaged_measure(mu, x, r, A) / lambda_a_ball(A, r); },
        1e-6 * scale, 1e3 * scale, detail::atom_distances(mu, x));
}

/// Fractional maximal measure M_{a,d} mu(x) = sup_r chi*mu(x)/r^{n+|a|-d}.
inline double fractional_maximal(const DiscreteMeasure& mu, const PointPlus& x, double d,
                                 const MultiIndexA& A) {
    if (!(d < A.homogeneity()))
        throw std::domain_error("fractional_maximal: need d < n+|a|");
    if (mu.empty()) return 0.0;
    double expo = A.homogeneity() - d;
    if (detail::min_atom_distance(mu, x) == 0.0 && d > static_cast<double>(A.dim()))
        return std::numeric_limits<double>::infinity();
    double scale = detail::measure_scale(mu, x);
    return detail::sup_over_radii(
        [&](double r) { return averaged_measure(mu, x, r, A) / std::pow(r, expo); },
        1e-6 * scale, 1e3 * scale, detail::atom_distances(mu, x));
}

/// Truncated fractional maximal measure: the supremum is capped at r <= b.
inline double truncated_maximal(const DiscreteMeasure& mu, const PointPlus& x, double d, double b,
                                const MultiIndexA& A) {
    if (!(b > 0.0)) throw std::domain_error("truncated_maximal: b must be positive");
    if (!(d < A.homogeneity()))
        throw std::domain_error("truncated_maximal: need d < n+|a|");
    if (mu.empty()) return 0.0;
    double expo = A.homogeneity() - d;
    if (detail::min_atom_distance(mu, x) == 0.0 && d > static_cast<double>(A.dim()))
        return std::numeric_limits<double>::infinity();
    double scale = detail::measure_scale(mu, x);
    return detail::sup_over_radii(
        [&](double r) { return averaged_measure(mu, x, r, A) / std::pow(r, expo); },
        1e-6 * std::min(scale, b), b, detail::atom_distances(mu, x));
}

namespace detail {

// Breakpoints for r-integrals of the averaged measure: the atom-distance
// thresholds are kinks, so each segment gets a short geometric ladder.
inline std::vector<double> averaged_measure_breaks(const DiscreteMeasure& mu, const PointPlus& x,
                                                   double r_start, double r_end) {
    std::vector<double> th;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        double d = distance(at.point, x);
        if (d > r_start && d < r_end) th.push_back(d);
    }
    th.push_back(r_start);
    th.push_back(r_end);
    std::sort(th.begin(), th.end());
    th.erase(std::unique(th.begin(), th.end()), th.end());
    std::vector<double> breaks;
    for (std::size_t i = 0; i + 1 < th.size(); ++i) {
        std::vector<double> seg = geometric_breaks(th[i], th[i + 1], 1e-5);
        if (!breaks.empty()) seg.erase(seg.begin());
        breaks.insert(breaks.end(), seg.begin(), seg.end());
    }
    return breaks;
}

} // namespace detail

/// The two pieces of the truncated Riesz potential identity: the scale
/// integral (n-beta) int_0^delta chi*mu(x) r^{beta-n} dr/r and the boundary
/// term chi_{B(0,delta)}*mu(x)/delta^{n-beta}; their sum equals
/// I_beta chi_{B_+(0,delta)} *_a mu(x).
struct RieszSplit {
    double scale_term = 0.0;
    double boundary_term = 0.0;
    bool divergent = false;
};

inline RieszSplit riesz_potential_split(const DiscreteMeasure& mu, const PointPlus& x,
                                        double beta, double delta, const MultiIndexA& A) {
    if (!(beta > 0.0)) throw std::domain_error("riesz_potential_split: beta must be positive");
    if (!(delta > 0.0)) throw std::domain_error("riesz_potential_split: delta must be positive");
    RieszSplit out;
    if (mu.empty()) return out;
    const double n = static_cast<double>(A.dim());
    double d0 = detail::min_atom_distance(mu, x);
    double r_start = d0;
    if (d0 == 0.0) {
        if (beta <= n - A.abs()) {
            out.divergent = true;
            return out;
        }
        r_start = 1e-9 * delta;
    }
    if (r_start < delta) {
        std::vector<double> breaks = detail::averaged_measure_breaks(mu, x, r_start, delta);
        double integral = integrate_composite(
            [&](double r) {
                return averaged_measure(mu, x, r, A) * std::pow(r, beta - n - 1.0);
            },
            breaks, 12);
        out.scale_term = (n - beta) * integral;
    }
    out.boundary_term = averaged_measure(mu, x, delta, A) / std::pow(delta, n - beta);
    return out;
}

/// Dyadic coefficients b_k and c_k of the Wolff machinery.
inline double dyadic_b(const DiscreteMeasure& mu, const PointPlus& x, const WolffParams& params,
                       int k) {
    if (k < 0) throw std::domain_error("dyadic_b: k must be >= 0");
    if (mu.empty()) return 0.0;
    double r = std::pow(2.0, -k);
    return std::pow(2.0, k * (params.A.homogeneity() - params.nu)) *
           averaged_measure(mu, x, r, params.A);
}

inline double dyadic_c(const DiscreteMeasure& mu, const PointPlus& x, const WolffParams& params,
                       int k) {
    if (k < 0) throw std::domain_error("dyadic_c: k must be >= 0");
    if (mu.empty()) return 0.0;
    double r = std::pow(2.0, -k);
    return std::pow(2.0, k * (params.A.homogeneity() - params.p * params.nu)) *
           averaged_measure(mu, x, r, params.A);
}

/// Value of the Wolff function at x together with an exactness flag: when x
/// carries an atom and p*nu <= n the untruncated r-integral diverges; the
/// value reported is the prescribed log-quadrature over [r_min, delta].
struct WolffValue {
    double value = 0.0;
    bool divergent = false;
};

inline WolffValue wolff_function(const DiscreteMeasure& mu, const PointPlus& x,
                                 const WolffParams& params) {
    WolffValue out;
    if (mu.empty()) return out;
    const MultiIndexA& A = params.A;
    const double expo = A.homogeneity() - params.p * params.nu;
    const double q = params.dual_p() - 1.0;
    double d0 = detail::min_atom_distance(mu, x);
    double r_start = d0;
    if (d0 == 0.0) {
        r_start = params.r_min;
        if (params.p * params.nu <= static_cast<double>(A.dim())) out.divergent = true;
    }
    if (!(r_start < params.delta)) return out;
    std::vector<double> breaks = detail::averaged_measure_breaks(mu, x, r_start, params.delta);
    out.value = integrate_composite(
        [&](double r) {
            double am = averaged_measure(mu, x, r, A);
            if (am <= 0.0) return 0.0;
            return std::pow(am / std::pow(r, expo), q) / r;
        },
        breaks, 8);
    return out;
}

struct WolffEnergy {
    double value = 0.0;
    bool divergent = false; // some Wolff value was a truncation of a divergent integral
};

/// Wolff energy: integral of the Wolff function against mu_a, i.e. the sum
/// over atoms of W(y) * mass * y^a.
inline WolffEnergy wolff_energy(const DiscreteMeasure& mu, const WolffParams& params) {
    WolffEnergy out;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        WolffValue w = wolff_function(mu, at.point, params);
        out.value += w.value * at.mass * orthant_weight(at.point, params.A);
        out.divergent = out.divergent || w.divergent;
    }
    return out;
}

namespace detail {

/// 1-D quadrature mesh for x-integrals of translated-kernel powers: cells
/// refine dyadically toward each atom down to the given offset, then fill
/// uniformly and stretch geometrically through the exponential tail.
inline std::vector<double> radial_energy_mesh(const DiscreteMeasure& mu, double min_offset,
                                              double tail_length = 40.0) {
    std::vector<double> pts;
    pts.push_back(0.0);
    double hi = 0.0;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        double y = at.point.x[0];
        hi = std::max(hi, y);
        pts.push_back(y);
        for (double off = 1.0; off >= min_offset * 0.5; off *= 0.5) {
            if (y - off > 0.0) pts.push_back(y - off);
            pts.push_back(y + off);
        }
    }
    double body_end = hi + 8.0;
    for (double xx = 0.0; xx <= body_end; xx += 0.5) pts.push_back(xx);
    double step = 1.0, xx = body_end;
    while (xx < hi + tail_length) {
        xx += step;
        pts.push_back(xx);
        step *= 1.4;
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
              pts.end());
    return pts;
}

} // namespace detail

/// ||G_{a,nu} *_a mu||_{p',a}^{p'} by quadrature; the x-mesh resolves the
/// atom singularities down to the same scale the Wolff r-integral uses, so
/// the two energies are comparable truncations.
inline WolffEnergy potential_energy(const DiscreteMeasure& mu, const WolffParams& params) {
    WolffEnergy out;
    if (mu.empty()) return out;
    const MultiIndexA& A = params.A;
    const double pp = params.dual_p();
    RadialKernel G = RadialKernel::bessel(A, params.nu);
    KernelQuadOpts opts;
    opts.gl = 12;
    opts.h0_frac = 1e-6;

    if (A.dim() == 1) {
        std::vector<double> mesh = detail::radial_energy_mesh(mu, params.r_min);
        std::vector<std::vector<double>> axes{mesh};
        detail::TensorRule rule = detail::lambda_a_rule(axes, A, 6);
        out.value = detail::tensor_integrate(rule, [&](const PointPlus& x) {
            TranslateResult tr = kernel_convolve_measure(G, mu, x, A, opts);
            if (tr.divergent) out.divergent = true;
            return std::pow(tr.value, pp);
        });
        return out;
    }

    // generic (slow) tensor mesh for n >= 2
    std::vector<std::vector<double>> axes(A.dim());
    for (std::size_t d = 0; d < A.dim(); ++d) {
        double hi = 0.0;
        std::vector<double> pts{0.0};
        for (const Atom& at : mu.atoms()) {
            double y = at.point.x[d];
            hi = std::max(hi, y);
            for (double off = 1.0; off >= 1e-4; off *= 0.25) {
                if (y - off > 0.0) pts.push_back(y - off);
                pts.push_back(y + off);
            }
            pts.push_back(y);
        }
        for (double xx = 0.0; xx <= hi + 20.0; xx += 1.0) pts.push_back(xx);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        axes[d] = pts;
    }
    KernelQuadOpts coarse;
    coarse.gl = 8;
    coarse.h0_frac = 1e-5;
    detail::TensorRule rule = detail::lambda_a_rule(axes, A, 3);
    out.value = detail::tensor_integrate(rule, [&](const PointPlus& x) {
        TranslateResult tr = kernel_convolve_measure(G, mu, x, A, coarse);
        if (tr.divergent) out.divergent = true;
        return std::pow(tr.value, pp);
    });
    return out;
}

/// || ||{b_k}_0^kmax||_{l^q} ||_{p',a}, the dyadic l^q norm variants;
/// q = infinity is accepted as std::numeric_limits<double>::infinity().
inline double bk_lq_energy(const DiscreteMeasure& mu, const WolffParams& params, double q) {
    if (mu.empty()) return 0.0;
    const MultiIndexA& A = params.A;
    if (A.dim() != 1)
        throw std::invalid_argument("bk_lq_energy: implemented for n = 1");
    const double pp = params.dual_p();
    std::vector<double> mesh = detail::radial_energy_mesh(mu, params.r_min, 30.0);
    std::vector<std::vector<double>> axes{mesh};
    detail::TensorRule rule = detail::lambda_a_rule(axes, A, 4);
    const double s = A.homogeneity() - params.nu;
    double integral = detail::tensor_integrate(rule, [&](const PointPlus& x) {
        double acc = 0.0, sup = 0.0;
        for (int k = 0; k <= params.k_max; ++k) {
            double r = std::pow(2.0, -k);
            double b = std::pow(2.0, k * s) * averaged_measure(mu, x, r, A);
            if (std::isinf(q))
                sup = std::max(sup, b);
            else
                acc += std::pow(b, q);
        }
        double lq = std::isinf(q) ? sup : std::pow(acc, 1.0 / q);
        return std::pow(lq, pp);
    });
    return std::pow(std::max(integral, 0.0), 1.0 / pp);
}

/// (integral of ||{c_k}||_{l^{p'-1}}^{p'-1} dmu_a)^{1/p'}: the dyadic form of
/// the Wolff energy.
inline double ck_energy(const DiscreteMeasure& mu, const WolffParams& params) {
    double q = params.dual_p() - 1.0;
    double acc = 0.0;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        double inner = 0.0;
        for (int k = 0; k <= params.k_max; ++k)
            inner += std::pow(dyadic_c(mu, at.point, params, k), q);
        acc += inner * at.mass * orthant_weight(at.point, params.A);
    }
    return std::pow(acc, 1.0 / params.dual_p());
}

} // namespace besselcap
