#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besselcap/multiindex.hpp"

namespace besselcap {

struct Atom {
    PointPlus point;
    double mass = 0.0;
};

/// Finitely supported positive measure on R^n_+. Atoms of zero mass are
/// allowed and contribute nothing.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        std::size_t n = atoms_.empty() ? 0 : atoms_.front().point.dim();
        for (const Atom& at : atoms_) {
            if (!(at.mass >= 0.0) || !std::isfinite(at.mass))
                throw std::invalid_argument("DiscreteMeasure: masses must be finite and >= 0");
            if (at.point.dim() != n)
                throw std::invalid_argument("DiscreteMeasure: mixed atom dimensions");
        }
    }

    static DiscreteMeasure single(PointPlus p, double mass) {
        return DiscreteMeasure({Atom{std::move(p), mass}});
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    std::size_t dim() const { return atoms_.empty() ? 0 : atoms_.front().point.dim(); }

    double total_mass() const {
        double s = 0.0;
        for (const Atom& a : atoms_) s += a.mass;
        return s;
    }

    DiscreteMeasure scaled(double c) const {
        std::vector<Atom> out = atoms_;
        for (Atom& a : out) a.mass *= c;
        return DiscreteMeasure(std::move(out));
    }

    DiscreteMeasure operator+(const DiscreteMeasure& other) const {
        std::vector<Atom> out = atoms_;
        out.insert(out.end(), other.atoms_.begin(), other.atoms_.end());
        return DiscreteMeasure(std::move(out));
    }

private:
    std::vector<Atom> atoms_;
};

} // namespace besselcap
