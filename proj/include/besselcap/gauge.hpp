#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace besselcap {

/// Increasing gauge h with h(0) = 0, validated on a sampled log grid at
/// construction (monotonicity certificate).
class GaugeFunction {
public:
    static GaugeFunction power(double exponent, double scale = 1.0) {
        if (!(exponent > 0.0) || !(scale > 0.0))
            throw std::invalid_argument("GaugeFunction::power: need exponent, scale > 0");
        return GaugeFunction([exponent, scale](double r) { return scale * std::pow(r, exponent); },
                             false);
    }

    static GaugeFunction from_function(std::function<double(double)> h) {
        return GaugeFunction(std::move(h), true);
    }

    /// Log-log linear interpolation through (r_k, h_k) breakpoints with
    /// power-law extension on both sides; requires positive decreasing r_k
    /// with positive h_k.
    static GaugeFunction from_table(std::vector<double> rs, std::vector<double> hs) {
        if (rs.size() != hs.size() || rs.size() < 2)
            throw std::invalid_argument("GaugeFunction::from_table: need >= 2 breakpoints");
        std::vector<std::pair<double, double>> tab(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (!(rs[i] > 0.0) || !(hs[i] > 0.0))
                throw std::invalid_argument("GaugeFunction::from_table: positive entries only");
            tab[i] = {std::log(rs[i]), std::log(hs[i])};
        }
        std::sort(tab.begin(), tab.end());
        for (std::size_t i = 1; i < tab.size(); ++i)
            if (!(tab[i].second > tab[i - 1].second))
                throw std::invalid_argument("GaugeFunction::from_table: values must increase with r");
        auto eval = [tab](double r) -> double {
            if (!(r > 0.0)) return 0.0;
            double u = std::log(r);
            std::size_t hi = tab.size() - 1;
            if (u <= tab.front().first) hi = 1;
            else if (u >= tab.back().first) hi = tab.size() - 1;
            else {
                hi = 1;
                while (tab[hi].first < u) ++hi;
            }
            double s = (tab[hi].second - tab[hi - 1].second) / (tab[hi].first - tab[hi - 1].first);
            return std::exp(tab[hi - 1].second + s * (u - tab[hi - 1].first));
        };
        return GaugeFunction(eval, true);
    }

    double operator()(double r) const {
        if (r <= 0.0) return 0.0;
        return h_(r);
    }

private:
    explicit GaugeFunction(std::function<double(double)> h, bool validate) : h_(std::move(h)) {
        if (!validate) return;
        double prev = -1.0;
        for (int i = 0; i < 200; ++i) {
            double r = std::pow(10.0, -9.0 + 10.0 * i / 199.0);
            double v = h_(r);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("invalid gauge: nonfinite or negative value");
            if (v < prev * (1.0 - 1e-12))
                throw std::invalid_argument("invalid gauge: not increasing on samples");
            prev = v;
        }
        // sampled h(0+) = 0 certificate: only flag gauges that clearly fail
        // to vanish (legitimate gauges may decay arbitrarily slowly)
        if (!(h_(1e-12) <= 0.5 * std::max(h_(1.0), 1e-300)))
            throw std::invalid_argument("invalid gauge: h(0+) does not vanish");
    }

    std::function<double(double)> h_;
};

} // namespace besselcap
