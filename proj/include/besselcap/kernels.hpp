#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "besselcap/core.hpp"
#include "besselcap/multiindex.hpp"
#include "besselcap/quadrature.hpp"
#include "besselcap/special.hpp"
#include "besselcap/translation.hpp"

namespace besselcap {

/// Parameters of the Bessel kernel G_{a,nu}.
struct BesselKernelParams {
    MultiIndexA A;
    double nu;

    BesselKernelParams(MultiIndexA a, double nu_) : A(std::move(a)), nu(nu_) {
        if (!(nu > 0.0)) throw std::invalid_argument("BesselKernelParams: nu must be positive");
    }

    /// Order (n + |a| - nu)/2 of the modified Bessel factor.
    double order() const { return 0.5 * (A.homogeneity() - nu); }
};

inline double bessel_kernel_constant(const BesselKernelParams& p) {
    double lg = (0.5 * (static_cast<double>(p.A.dim()) - p.A.abs() - p.nu) + 1.0) * std::log(2.0) -
                std::lgamma(0.5 * p.nu);
    for (std::size_t i = 0; i < p.A.dim(); ++i) lg -= std::lgamma(p.A.alpha(i) + 1.0);
    return std::exp(lg);
}

/// Radial profile of G_{a,nu}.
inline double bessel_kernel_G_radial(const BesselKernelParams& p, double r) {
    if (!(r > 0.0)) throw std::domain_error("bessel_kernel_G: singular origin");
    double m = p.order();
    return bessel_kernel_constant(p) * bessel_K(std::fabs(m), r) / std::pow(r, m);
}

inline double bessel_kernel_G(const BesselKernelParams& p, const PointPlus& x) {
    return bessel_kernel_G_radial(p, x.norm());
}

/// Riesz kernel |x|^{beta-n} with the normalizing constant fixed to 1; all
/// Riesz-based statements hold up to constants.
inline double riesz_kernel(double beta, std::size_t n, const PointPlus& x) {
    double r = x.norm();
    if (!(r > 0.0)) throw std::domain_error("riesz_kernel: singular origin");
    return std::pow(r, beta - static_cast<double>(n));
}

inline double riesz_kernel_radial(double beta, std::size_t n, double r) {
    if (!(r > 0.0)) throw std::domain_error("riesz_kernel: singular origin");
    return std::pow(r, beta - static_cast<double>(n));
}

/// B-p capacity with the Bessel kernel is nontrivial iff 0 < nu < (n+|a|)/p.
inline bool capacity_nontrivial(const MultiIndexA& A, double nu, double p) {
    if (!(p > 1.0)) throw std::domain_error("capacity_nontrivial: p must exceed 1");
    return nu > 0.0 && nu < A.homogeneity() / p;
}

namespace detail {

// Monotone log-log cubic Hermite table for positive radial profiles.
struct LogLogTable {
    std::vector<double> lr, lv, slope;

    double eval(double r) const {
        double u = std::log(r);
        auto it = std::upper_bound(lr.begin(), lr.end(), u);
        std::size_t hi = static_cast<std::size_t>(it - lr.begin());
        if (hi == 0) hi = 1;
        if (hi >= lr.size()) hi = lr.size() - 1;
        std::size_t lo = hi - 1;
        double h = lr[hi] - lr[lo];
        double s = (u - lr[lo]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        double val = h00 * lv[lo] + h10 * h * slope[lo] + h01 * lv[hi] + h11 * h * slope[hi];
        return std::exp(val);
    }
};

inline std::shared_ptr<LogLogTable> build_loglog_table(const std::function<double(double)>& g,
                                                       double rlo, double rhi, std::size_t npts) {
    auto tab = std::make_shared<LogLogTable>();
    tab->lr.resize(npts);
    tab->lv.resize(npts);
    double llo = std::log(rlo), lhi = std::log(rhi);
    for (std::size_t i = 0; i < npts; ++i) {
        tab->lr[i] = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(npts - 1);
        double v = g(std::exp(tab->lr[i]));
        tab->lv[i] = std::log(std::max(v, 1e-300));
    }
    // Fritsch-Carlson style slopes
    std::size_t n = npts;
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (tab->lv[i + 1] - tab->lv[i]) / (tab->lr[i + 1] - tab->lr[i]);
    tab->slope.resize(n);
    tab->slope[0] = d[0];
    tab->slope[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0)
            tab->slope[i] = 0.0;
        else
            tab->slope[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
    }
    return tab;
}

} // namespace detail

enum class KernelTag { bessel, riesz, custom };

/// Lower semi-continuous non-increasing radial profile g(|x|) with the local
/// admissibility integral certified at construction. Bessel profiles carry a
/// log-log table so that inner quadrature loops stay cheap.
class RadialKernel {
public:
    double operator()(double r) const {
        if (!(r > 0.0)) throw std::domain_error("RadialKernel: singular origin");
        if (table_ && r >= table_lo_ && r <= table_hi_) return table_->eval(r);
        return exact_(r);
    }

    double exact(double r) const { return exact_(r); }

    KernelTag tag() const { return tag_; }
    double admissibility() const { return admissibility_; }
    bool admissible() const { return admissible_; }
    double param_nu() const { return nu_; }
    double param_beta() const { return beta_; }

    static RadialKernel bessel(const MultiIndexA& A, double nu, bool tabulated = true) {
        BesselKernelParams p(A, nu);
        RadialKernel k;
        k.tag_ = KernelTag::bessel;
        k.nu_ = nu;
        k.exact_ = [p](double r) { return bessel_kernel_G_radial(p, r); };
        if (tabulated) {
            k.table_lo_ = 1e-9;
            k.table_hi_ = 90.0;
            k.table_ = detail::build_loglog_table(k.exact_, k.table_lo_, k.table_hi_, 2200);
        }
        k.certify(A);
        return k;
    }

    static RadialKernel riesz(const MultiIndexA& A, double beta) {
        std::size_t n = A.dim();
        RadialKernel k;
        k.tag_ = KernelTag::riesz;
        k.beta_ = beta;
        k.exact_ = [beta, n](double r) { return riesz_kernel_radial(beta, n, r); };
        k.certify(A);
        return k;
    }

    static RadialKernel custom(std::function<double(double)> g, const MultiIndexA& A) {
        RadialKernel k;
        k.tag_ = KernelTag::custom;
        k.exact_ = std::move(g);
        k.certify(A);
        return k;
    }

private:
    void certify(const MultiIndexA& A) {
        // non-increasing on a log-spaced sample
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000; ++i) {
            double r = std::pow(10.0, -6.0 + 9.0 * i / 999.0);
            double v = exact_(r);
            if (!(v >= 0.0)) throw std::invalid_argument("RadialKernel: negative profile");
            if (v > prev * (1.0 + 1e-9))
                throw std::invalid_argument("RadialKernel: profile must be non-increasing");
            prev = v;
        }
        double deg = A.homogeneity();
        auto integrand = [&](double t) { return exact_(t) * std::pow(t, deg - 1.0); };
        TailIntegral head = integrate_head_monitored(integrand, 1.0);
        admissible_ = !head.divergent;
        admissibility_ = head.value;
        if (!admissible_)
            throw std::invalid_argument("RadialKernel: admissibility integral diverges");
    }

    KernelTag tag_ = KernelTag::custom;
    std::function<double(double)> exact_;
    std::shared_ptr<detail::LogLogTable> table_;
    double table_lo_ = 0.0, table_hi_ = 0.0;
    double admissibility_ = 0.0;
    bool admissible_ = false;
    double nu_ = 0.0, beta_ = 0.0;
};

/// ||kappa||_{p,a} of a radial kernel, reduced to the radial line through
/// the orthant sphere factor, with dyadic divergence monitoring at both ends.
struct RadialNorm {
    double value = std::numeric_limits<double>::infinity();
    bool finite = false;
    bool head_divergent = false;
    bool tail_divergent = false;
};

inline RadialNorm radial_weighted_norm(const RadialKernel& kappa, double p, const MultiIndexA& A) {
    if (!(p >= 1.0)) throw std::domain_error("radial_weighted_norm: p must be >= 1");
    double deg = A.homogeneity();
    auto integrand = [&](double r) { return std::pow(kappa.exact(r), p) * std::pow(r, deg - 1.0); };
    TailIntegral head = integrate_head_monitored(integrand, 1.0);
    TailIntegral tail = integrate_tail_monitored(integrand, 1.0);
    RadialNorm out;
    out.head_divergent = head.divergent;
    out.tail_divergent = tail.divergent;
    out.finite = !head.divergent && !tail.divergent;
    if (out.finite)
        out.value = std::pow(orthant_sphere_factor(A) * (head.value + tail.value), 1.0 / p);
    return out;
}

/// Verdict of the single-point capacity test: positive capacity with the
/// Dirac lower bound y^a / ||kappa||_{p',a} when the dual norm is finite;
/// when the tail alone diverges every set has zero capacity.
struct PointCapacityResult {
    bool positive = false;
    double lower_bound = 0.0;  // lower bound for C_{p,kappa}({y})
    double kappa_norm = std::numeric_limits<double>::infinity();
    bool norm_finite = false;
    bool all_capacities_zero = false;
    std::string diagnostic;
};

inline PointCapacityResult point_capacity_positive(const RadialKernel& kappa, double p,
                                                   const MultiIndexA& A, const PointPlus& y) {
    if (!(p > 1.0)) throw std::domain_error("point_capacity_positive: p must exceed 1");
    PointCapacityResult out;
    RadialNorm norm = radial_weighted_norm(kappa, dual_exponent(p), A);
    out.norm_finite = norm.finite;
    out.kappa_norm = norm.value;
    if (norm.tail_divergent) {
        out.all_capacities_zero = true;
        out.diagnostic = "tail integral of kappa^{p'} diverges: all capacities vanish";
        return out;
    }
    if (!norm.finite) {
        out.diagnostic = "||kappa||_{p',a} diverges at the origin";
        return out;
    }
    double w = orthant_weight(y, A);
    out.lower_bound = std::pow(w / norm.value, p);
    out.positive = out.lower_bound > 0.0;
    if (!y.interior()) out.diagnostic = "boundary point: weight vanishes, bound degenerates to 0";
    return out;
}

/// T^t kappa(x) for a radial kernel: kernel-form panels on each axis; axes
/// with x_i t_i = 0 collapse to exact evaluation. Divergence of the panel
/// series (possible when x = t and the profile is too singular) is flagged.
inline TranslateResult translate_radial(const RadialKernel& kappa, const PointPlus& t,
                                        const PointPlus& x, const MultiIndexA& A,
                                        const KernelQuadOpts& opts = {}) {
    const std::size_t n = A.dim();
    if (x.dim() != n || t.dim() != n)
        throw std::invalid_argument("translate_radial: dimension mismatch");
    std::vector<double> z(n, 0.0);
    bool divergent = false;
    std::function<double(std::size_t)> rec = [&](std::size_t axis) -> double {
        if (axis == n) {
            double s = 0.0;
            for (double c : z) s += c * c;
            double r = std::sqrt(s);
            if (!(r > 0.0)) return 0.0; // measure-zero corner
            return kappa(r);
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
        TranslateResult r =
            detail::kernel_panels_1d(inner, xi, ti, A.alpha(axis), A.a(axis), opts);
        if (r.divergent) divergent = true;
        return r.value;
    };
    TranslateResult out;
    out.value = rec(0);
    out.divergent = divergent;
    return out;
}

/// kappa *_a mu (x) for a discrete measure: sum of translated kernels
/// against the weighted atom masses.
inline TranslateResult kernel_convolve_measure(const RadialKernel& kappa,
                                               const DiscreteMeasure& mu, const PointPlus& x,
                                               const MultiIndexA& A,
                                               const KernelQuadOpts& opts = {}) {
    TranslateResult out;
    for (const Atom& at : mu.atoms()) {
        if (at.mass <= 0.0) continue;
        TranslateResult tr = translate_radial(kappa, at.point, x, A, opts);
        out.value += at.mass * orthant_weight(at.point, A) * tr.value;
        out.divergent = out.divergent || tr.divergent;
    }
    return out;
}

} // namespace besselcap
