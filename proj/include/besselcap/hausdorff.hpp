#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besselcap/dyadic.hpp"
#include "besselcap/fractal.hpp"
#include "besselcap/gauge.hpp"
#include "besselcap/measure.hpp"
#include "besselcap/multiindex.hpp"

namespace besselcap {

namespace detail {

inline int ball_level_shift(std::size_t n) {
    // dyadic ball radius 2^{-l + shift} circumscribes a level-l cube
    double need = std::sqrt(static_cast<double>(n));
    int s = 0;
    while (std::pow(2.0, s) < need) ++s;
    return s;
}

// max of t^a over the closed ball around the cube center: enclosing-box
// corner value (upper bound, consistent direction for covering costs)
inline double ball_corner_weight(const std::vector<std::int64_t>& cube, int level, double r,
                                 const MultiIndexA& A) {
    double h = std::pow(2.0, -level);
    double w = 1.0;
    for (std::size_t d = 0; d < A.dim(); ++d) {
        double c = (cube[d] + 0.5) * h;
        w *= std::pow(c + r, A.a(d));
    }
    return w;
}

} // namespace detail

/// Upper bound for the a-Hausdorff content Lambda^rho_{h,a}(E): optimal
/// dyadic-aligned ball cover by bottom-up tree merging. Only dyadic covers
/// are searched, so the value bounds the true infimum from above.
inline double hausdorff_content(const DyadicSetRep& E, const GaugeFunction& h,
                                const MultiIndexA& A,
                                double rho = std::numeric_limits<double>::infinity()) {
    if (E.empty()) return 0.0;
    if (E.n != A.dim()) throw std::invalid_argument("hausdorff_content: dimension mismatch");
    const int shift = detail::ball_level_shift(E.n);

    std::map<std::vector<std::int64_t>, double> cost;
    {
        double r = std::pow(2.0, -E.level + shift);
        bool ok = r <= rho;
        for (const auto& c : E.cubes) {
            double v = ok ? detail::ball_corner_weight(c, E.level, r, A) * h(r)
                          : std::numeric_limits<double>::infinity();
            cost[c] = v;
        }
    }
    for (int lvl = E.level - 1; lvl >= 0; --lvl) {
        std::map<std::vector<std::int64_t>, double> up;
        for (const auto& [c, v] : cost) {
            std::vector<std::int64_t> parent(c.size());
            for (std::size_t d = 0; d < c.size(); ++d) parent[d] = c[d] >> 1;
            auto [it, fresh] = up.emplace(parent, 0.0);
            it->second += v;
        }
        double r = std::pow(2.0, -lvl + shift);
        if (r <= rho) {
            for (auto& [c, v] : up)
                v = std::min(v, detail::ball_corner_weight(c, lvl, r, A) * h(r));
        }
        cost.swap(up);
    }
    double total = 0.0;
    for (const auto& [c, v] : cost) total += v;
    return total;
}

/// Frostman-type measure of the dyadic proof: deepest-level cubes get mass
/// h(2^{-L}), ancestors are rescaled so mu(Q_i) <= h(2^{-i}) at every level,
/// and a final pass normalizes the dyadic ball family mu(B(x, 2^{-i})) <=
/// h(2^{-i}) with unit constant (the raw construction only guarantees 3^n,
/// under which the content link can fail). Atoms sit at deepest centers.
inline DiscreteMeasure frostman_measure(const DyadicSetRep& E, const GaugeFunction& h,
                                        int levels) {
    if (E.empty()) return {};
    if (levels < 1 || levels > E.level)
        throw std::invalid_argument("frostman_measure: need 1 <= levels <= E.level");
    const std::size_t n = E.n;
    const int L = E.level;

    std::map<std::vector<std::int64_t>, double> mass;
    for (const auto& c : E.cubes) mass[c] = h(std::pow(2.0, -L));

    // bottom-up ancestor rescaling
    for (int lvl = L - 1; lvl >= 0; --lvl) {
        int drop = L - lvl;
        std::map<std::vector<std::int64_t>, double> group;
        for (const auto& [c, m] : mass) {
            std::vector<std::int64_t> anc(n);
            for (std::size_t d = 0; d < n; ++d) anc[d] = c[d] >> drop;
            group[anc] += m;
        }
        double cap = h(std::pow(2.0, -lvl));
        for (const auto& [anc, tot] : group) {
            if (tot > cap) {
                double sc = cap / tot;
                for (auto& [c, m] : mass) {
                    bool under = true;
                    for (std::size_t d = 0; d < n && under; ++d)
                        under = (c[d] >> drop) == anc[d];
                    if (under) m *= sc;
                }
            }
        }
    }

    // dyadic-ball normalization: windows of 3^n adjacent cubes per level
    double gamma = 1.0;
    for (int lvl = L; lvl >= 0; --lvl) {
        int drop = L - lvl;
        std::map<std::vector<std::int64_t>, double> agg;
        for (const auto& [c, m] : mass) {
            std::vector<std::int64_t> anc(n);
            for (std::size_t d = 0; d < n; ++d) anc[d] = c[d] >> drop;
            agg[anc] += m;
        }
        double cap = h(std::pow(2.0, -lvl));
        // candidate window anchors: occupied cubes and their neighbors
        std::vector<std::vector<std::int64_t>> anchors;
        for (const auto& [c, m] : agg) anchors.push_back(c);
        std::size_t base = anchors.size();
        for (std::size_t i = 0; i < base; ++i) {
            std::vector<std::size_t> off(n, 0);
            bool done = false;
            while (!done) {
                std::vector<std::int64_t> cand = anchors[i];
                bool valid = true;
                for (std::size_t d = 0; d < n; ++d) {
                    cand[d] += static_cast<std::int64_t>(off[d]) - 1;
                    if (cand[d] < 0) valid = false;
                }
                if (valid) anchors.push_back(cand);
                done = true;
                for (std::size_t d = n; d-- > 0;) {
                    if (++off[d] < 3) {
                        done = false;
                        break;
                    }
                    off[d] = 0;
                }
            }
        }
        std::sort(anchors.begin(), anchors.end());
        anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
        for (const auto& anc : anchors) {
            double window = 0.0;
            std::vector<std::size_t> off(n, 0);
            bool done = false;
            while (!done) {
                std::vector<std::int64_t> c = anc;
                bool valid = true;
                for (std::size_t d = 0; d < n; ++d) {
                    c[d] += static_cast<std::int64_t>(off[d]) - 1;
                    if (c[d] < 0) valid = false;
                }
                if (valid) {
                    auto it = agg.find(c);
                    if (it != agg.end()) window += it->second;
                }
                done = true;
                for (std::size_t d = n; d-- > 0;) {
                    if (++off[d] < 3) {
                        done = false;
                        break;
                    }
                    off[d] = 0;
                }
            }
            if (window > cap) gamma = std::max(gamma, window / cap);
        }
    }

    std::vector<Atom> atoms;
    double hh = std::pow(2.0, -L);
    for (const auto& [c, m] : mass) {
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d) x[d] = (c[d] + 0.5) * hh;
        atoms.push_back(Atom{PointPlus(std::move(x)), m / gamma});
    }
    return DiscreteMeasure(std::move(atoms));
}

/// mu(B(x, r)) for a discrete measure (closed ball).
inline double ball_mass(const DiscreteMeasure& mu, const PointPlus& x, double r) {
    double s = 0.0;
    for (const Atom& at : mu.atoms())
        if (distance(at.point, x) <= r) s += at.mass;
    return s;
}

struct RegularizedGauge {
    GaugeFunction gauge = GaugeFunction::power(1.0);
    bool zero_gauge = false; // liminf h(r)/r^b vanished on samples
};

/// Running-infimum regularization: htilde(r)/r^b = inf_{0 < t <= r} h(t)/t^b,
/// increasing with htilde <= h and htilde/r^b non-increasing. When the
/// sampled liminf vanishes the content is zero and the zero marker is set.
inline RegularizedGauge regularize_gauge(const GaugeFunction& h, double b) {
    if (!(b > 0.0)) throw std::domain_error("regularize_gauge: b must be positive");
    const int N = 600;
    std::vector<double> rs(N), qs(N);
    for (int i = 0; i < N; ++i) {
        rs[i] = std::pow(10.0, -8.0 + 8.0 * i / (N - 1.0)); // up to r = 1
        qs[i] = h(rs[i]) / std::pow(rs[i], b);
    }
    RegularizedGauge out;
    double ref = qs[N - 1];
    if (!(qs[0] > 1e-4 * ref)) {
        out.zero_gauge = true;
        return out;
    }
    double runmin = std::numeric_limits<double>::infinity();
    std::vector<double> hv(N);
    for (int i = 0; i < N; ++i) {
        runmin = std::min(runmin, qs[i]);
        hv[i] = runmin * std::pow(rs[i], b);
    }
    out.gauge = GaugeFunction::from_table(rs, hv);
    return out;
}

struct CantorHausdorffBounds {
    bool conclusive = false;
    bool lower_positive = false; // liminf h(l_k)/h_L(l_k) > 0 on the prefix
    double upper_value = 0.0;    // c * liminf with c empirical (reported as 1)
    std::vector<double> ratios;
};

/// Prefix verdict for Lambda_{h,a}(C_L): positive when the ratio
/// h(l_k)/h_L(l_k) stays bounded below, with the liminf read as the minimum
/// over the last quartile of stored levels.
inline CantorHausdorffBounds cantor_hausdorff_bounds(const CantorSpec& spec,
                                                     const GaugeFunction& h,
                                                     const MultiIndexA& A) {
    spec.validate();
    CantorHausdorffBounds out;
    int K = spec.max_level();
    if (K < 4) return out; // prefix too short
    out.conclusive = true;
    for (int k = 0; k <= K; ++k)
        out.ratios.push_back(h(spec.lengths[k]) * corner_weight_sum(spec, k, A));
    std::size_t q0 = out.ratios.size() - std::max<std::size_t>(3, out.ratios.size() / 4);
    bool decaying = true;
    double qmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = q0; i < out.ratios.size(); ++i) {
        qmin = std::min(qmin, out.ratios[i]);
        if (i > q0 && out.ratios[i] >= out.ratios[i - 1] * (1.0 - 1e-3)) decaying = false;
    }
    if (decaying) {
        out.lower_positive = false;
        out.upper_value = 0.0;
        return out;
    }
    out.lower_positive = qmin > 1e-6;
    out.upper_value = qmin;
    return out;
}

} // namespace besselcap
