#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace besselcap {

/// Modified Bessel function of the second kind K_nu(x), x > 0, by the
/// integral representation  K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
/// summed with a trapezoid step small enough that the quadrature error sits
/// below double precision. Uniform in the order; validated against the
/// half-integer closed forms.
inline double bessel_K(double order, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_K: x must be positive");
    const double nu = std::fabs(order);

    const double tpeak = nu > 0.0 ? std::asinh(nu / x) : 0.0;
    const double emax = nu * tpeak - x * std::cosh(tpeak);
    if (emax > 690.0) return std::numeric_limits<double>::infinity();

    auto log_cosh = [](double y) {
        double ay = std::fabs(y);
        return ay + std::log1p(std::exp(-2.0 * ay)) - 0.6931471805599453;
    };

    const double h = 0.1;
    double sum = 0.5 * std::exp(-x); // t = 0 contribution
    double peak = sum;
    for (int k = 1; k < 60000; ++k) {
        double tt = h * k;
        double expo = log_cosh(nu * tt) - x * std::cosh(tt);
        double term = (expo < -745.0) ? 0.0 : std::exp(expo);
        sum += term;
        if (term > peak) peak = term;
        if (tt > tpeak && term < 1e-18 * peak) break;
    }
    return h * sum;
}

} // namespace besselcap
