#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace besselcap {

/// Multi-index of per-axis weights a_i = 2*alpha_i + 1 > 0 that defines the
/// weighted measure dlambda_a(x) = x^a dx on the orthant. Everything in this
/// library is parameterized by one of these.
class MultiIndexA {
public:
    explicit MultiIndexA(std::vector<double> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.empty())
            throw std::invalid_argument("MultiIndexA: need at least one alpha");
        for (double al : alphas_) {
            if (!(al > -0.5) || !std::isfinite(al))
                throw std::invalid_argument("MultiIndexA: alpha_i must exceed -1/2");
        }
    }

    /// Build from the weights a_i themselves (a_i > 0).
    static MultiIndexA from_weights(const std::vector<double>& a) {
        std::vector<double> al(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) al[i] = 0.5 * (a[i] - 1.0);
        return MultiIndexA(std::move(al));
    }

    std::size_t dim() const { return alphas_.size(); }
    double alpha(std::size_t i) const { return alphas_[i]; }
    double a(std::size_t i) const { return 2.0 * alphas_[i] + 1.0; }
    const std::vector<double>& alphas() const { return alphas_; }

    std::vector<double> weights() const {
        std::vector<double> w(alphas_.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = a(i);
        return w;
    }

    /// |a| = sum of the a_i.
    double abs() const {
        double s = 0.0;
        for (std::size_t i = 0; i < alphas_.size(); ++i) s += a(i);
        return s;
    }

    /// n + |a|, the homogeneity degree of lambda_a under dilation.
    double homogeneity() const { return static_cast<double>(dim()) + abs(); }

    bool operator==(const MultiIndexA& o) const { return alphas_ == o.alphas_; }

private:
    std::vector<double> alphas_;
};

/// A point of the closed orthant R^n_+.
struct PointPlus {
    std::vector<double> x;

    PointPlus() = default;
    explicit PointPlus(std::vector<double> coords) : x(std::move(coords)) {
        for (double c : x) {
            if (!(c >= 0.0) || !std::isfinite(c))
                throw std::invalid_argument("PointPlus: coordinates must be finite and >= 0");
        }
    }

    std::size_t dim() const { return x.size(); }

    double norm() const {
        double s = 0.0;
        for (double c : x) s += c * c;
        return std::sqrt(s);
    }

    bool interior() const {
        for (double c : x)
            if (!(c > 0.0)) return false;
        return true;
    }

    double operator[](std::size_t i) const { return x[i]; }
};

inline double distance(const PointPlus& p, const PointPlus& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        double d = p.x[i] - q.x[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// The product weight x^a. Vanishes whenever a coordinate is zero (a_i > 0).
inline double orthant_weight(const PointPlus& p, const MultiIndexA& A) {
    if (p.dim() != A.dim())
        throw std::invalid_argument("orthant_weight: dimension mismatch");
    double w = 1.0;
    for (std::size_t i = 0; i < A.dim(); ++i) w *= std::pow(p.x[i], A.a(i));
    return w;
}

} // namespace besselcap
