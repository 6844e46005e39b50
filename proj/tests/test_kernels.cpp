#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "besselcap/kernels.hpp"

using namespace besselcap;

namespace {
MultiIndexA a1() { return MultiIndexA::from_weights({1.0}); }
constexpr double kEulerGamma = 0.5772156649015329;
} // namespace

TEST_CASE("bessel_K half-integer closed form") {
    // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    CHECK(bessel_K(0.5, 1.0) == doctest::Approx(std::sqrt(kPi / 2.0) * std::exp(-1.0))
                                    .epsilon(1e-12));
    for (double x : {0.1, 0.5, 2.0, 10.0, 50.0}) {
        double exact = std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
        CHECK(bessel_K(0.5, x) == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bessel_K(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_K(1.0, -2.0), std::domain_error);
}

TEST_CASE("bessel_K asymptotic laws") {
    // small-x: K_0(r) ~ -ln(r/2) - gamma
    double r = 1e-4;
    double ratio = bessel_K(0.0, r) / (-std::log(r / 2.0) - kEulerGamma);
    CHECK(std::fabs(ratio - 1.0) < 1e-3);

    // large-x: K_1(r) sqrt(r) e^{r} stabilizes to sqrt(pi/2). At r = 50 the
    // first correction of the standard expansion, 3/(8r), is still 7.5e-3,
    // so the flat limit is only reached to that order; checking against the
    // corrected value pins the law to 1e-4.
    double v = bessel_K(1.0, 50.0) * std::sqrt(50.0) * std::exp(50.0);
    double limit = std::sqrt(kPi / 2.0);
    CHECK(std::fabs(v - limit) < 1e-2);
    CHECK(std::fabs(v - limit * (1.0 + 3.0 / 400.0)) < 1e-4 * limit);
    // and the deviation halves as r doubles
    double v2 = bessel_K(1.0, 100.0) * std::sqrt(100.0) * std::exp(100.0);
    CHECK(std::fabs(v2 - limit) < 0.55 * std::fabs(v - limit));
}

TEST_CASE("bessel_K recurrence cross-check") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> Ua(0.3, 3.0), Ux(0.2, 20.0);
    for (int i = 0; i < 40; ++i) {
        double al = Ua(rng), x = Ux(rng);
        double lhs = bessel_K(al + 1.0, x);
        double rhs = bessel_K(al - 1.0, x) + (2.0 * al / x) * bessel_K(al, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("bessel_K positivity and monotonicity in x") {
    for (double al : {0.0, 0.7, 2.5}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double x = 0.05; x < 30.0; x *= 1.7) {
            double v = bessel_K(al, x);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("Bessel kernel G: radial, near-zero power law, tabulation") {
    MultiIndexA A = a1();
    BesselKernelParams p(A, 0.5);

    // radiality is structural; check two points of equal norm in 2-D
    MultiIndexA A2 = MultiIndexA::from_weights({1.0, 2.0});
    BesselKernelParams p2(A2, 0.8);
    double va = bessel_kernel_G(p2, PointPlus({0.6, 0.8}));
    double vb = bessel_kernel_G(p2, PointPlus({1.0, 0.0}));
    CHECK(va == doctest::Approx(vb).epsilon(1e-13));

    // G(x) |x|^{n+|a|-nu} tends to a positive constant at the origin
    double expo = A.homogeneity() - p.nu;
    double c1 = bessel_kernel_G_radial(p, 1e-5) * std::pow(1e-5, expo);
    double c2 = bessel_kernel_G_radial(p, 1e-7) * std::pow(1e-7, expo);
    CHECK(c1 > 0.0);
    CHECK(c1 == doctest::Approx(c2).epsilon(2e-3));

    CHECK_THROWS_AS(bessel_kernel_G(p, PointPlus({0.0})), std::domain_error);

    // the tabulated profile tracks the exact one
    RadialKernel G = RadialKernel::bessel(A, 0.5);
    for (double r : {1e-6, 1e-3, 0.1, 1.0, 5.0, 40.0}) {
        CHECK(G(r) == doctest::Approx(G.exact(r)).epsilon(1e-6));
    }
}

TEST_CASE("integrability switch of G at nu = 0") {
    // G in L^1_a iff nu > 0: the admissibility/head integral of the profile
    // diverges as nu -> 0 (order = (n+|a|)/2 makes K_m(r)/r^m ~ r^{-n-|a|}).
    MultiIndexA A = a1();
    double deg = A.homogeneity();

    // nu = 0.5: head integral converges
    BesselKernelParams good(A, 0.5);
    TailIntegral head_good = integrate_head_monitored(
        [&](double r) { return bessel_kernel_G_radial(good, r) * std::pow(r, deg - 1.0); }, 1.0);
    CHECK_FALSE(head_good.divergent);

    // nu = 0 limit mimicked by the pure power r^{-(n+|a|)} profile
    TailIntegral head_bad = integrate_head_monitored(
        [&](double r) { return std::pow(r, -deg) * std::pow(r, deg - 1.0); }, 1.0);
    CHECK(head_bad.divergent);
}

TEST_CASE("G decays like a power times e^{-r}/sqrt(r)") {
    MultiIndexA A = a1();
    BesselKernelParams p(A, 0.6);
    double expo = 0.5 * (A.homogeneity() - p.nu + 1.0);
    // log-slope of G * r^expo * e^r flattens over [20, 50]
    auto val = [&](double r) {
        return std::log(bessel_kernel_G_radial(p, r)) + expo * std::log(r) + r;
    };
    double s1 = (val(25.0) - val(20.0)) / (std::log(25.0) - std::log(20.0));
    double s2 = (val(50.0) - val(45.0)) / (std::log(50.0) - std::log(45.0));
    CHECK(std::fabs(s1) < 0.05);
    CHECK(std::fabs(s2) < 0.02);
    CHECK(std::fabs(s2) < std::fabs(s1));
}

TEST_CASE("riesz kernel: value, homogeneity") {
    CHECK(riesz_kernel(1.0, 2, PointPlus({2.0, 0.0})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(riesz_kernel(1.0, 2, PointPlus({0.0, 0.0})), std::domain_error);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> U(0.2, 2.0);
    for (int i = 0; i < 10; ++i) {
        double beta = 0.3 + 0.2 * U(rng);
        PointPlus x({U(rng), U(rng)});
        double s = 1.0 + U(rng);
        PointPlus sx({s * x.x[0], s * x.x[1]});
        double lhs = riesz_kernel(beta, 2, sx);
        double rhs = std::pow(s, beta - 2.0) * riesz_kernel(beta, 2, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("Riesz and Bessel kernels are comparable near the origin") {
    // G_{a,nu}(x) |x|^{n+|a|-nu} bounded above and below for |x| <= 0.1
    MultiIndexA A = a1();
    BesselKernelParams p(A, 0.5);
    double expo = A.homogeneity() - p.nu;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double r = 1e-6; r <= 0.1; r *= 1.6) {
        double v = bessel_kernel_G_radial(p, r) * std::pow(r, expo);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 2.0);
}

TEST_CASE("capacity nontriviality predicate") {
    MultiIndexA A = a1(); // n + |a| = 2
    CHECK_FALSE(capacity_nontrivial(A, 1.0, 2.0)); // 1 is not < 1
    CHECK(capacity_nontrivial(A, 0.5, 2.0));
    CHECK_FALSE(capacity_nontrivial(A, 0.0, 2.0));
    CHECK_THROWS_AS(capacity_nontrivial(A, 0.5, 1.0), std::domain_error);
}

TEST_CASE("RadialKernel admissibility certificates") {
    MultiIndexA A = a1();
    RadialKernel G = RadialKernel::bessel(A, 0.4);
    CHECK(G.admissible());
    CHECK(G.admissibility() > 0.0);
    RadialKernel R = RadialKernel::riesz(A, 0.5);
    CHECK(R.admissible());
    // an inadmissible profile is rejected at construction
    CHECK_THROWS_AS(RadialKernel::custom(
                        [&](double r) { return std::pow(r, -A.homogeneity() - 0.5); }, A),
                    std::invalid_argument);
    // increasing profiles are rejected
    CHECK_THROWS_AS(RadialKernel::custom([](double r) { return r; }, A),
                    std::invalid_argument);
}

TEST_CASE("point capacity: positive bound, boundary degeneracy, divergent tail") {
    MultiIndexA A = a1();

    // ||G_{a,nu}||_{p',a} finite needs nu > (n+|a|)/p; nu = 1.5, p = 2 works
    RadialKernel G = RadialKernel::bessel(A, 1.5);
    PointCapacityResult in = point_capacity_positive(G, 2.0, A, PointPlus({1.0}));
    CHECK(in.norm_finite);
    CHECK(in.positive);
    CHECK(in.lower_bound > 0.0);

    PointCapacityResult bd = point_capacity_positive(G, 2.0, A, PointPlus({0.0}));
    CHECK(bd.lower_bound == doctest::Approx(0.0));
    CHECK_FALSE(bd.positive);

    // Riesz kernel with divergent tail: all capacities vanish
    RadialKernel R = RadialKernel::riesz(A, 0.5);
    PointCapacityResult rz = point_capacity_positive(R, 2.0, A, PointPlus({1.0}));
    CHECK(rz.all_capacities_zero);
    CHECK_FALSE(rz.positive);

    // nu below the finiteness threshold: the head integral diverges
    RadialKernel Gs = RadialKernel::bessel(A, 0.9);
    PointCapacityResult dv = point_capacity_positive(Gs, 2.0, A, PointPlus({1.0}));
    CHECK_FALSE(dv.norm_finite);
    CHECK_FALSE(dv.positive);
}

TEST_CASE("translate_radial agrees with theta form away from singular spots") {
    MultiIndexA A = a1();
    RadialKernel G = RadialKernel::bessel(A, 1.2);
    ThetaQuadrature q = ThetaQuadrature::build(A, 96);
    for (double x : {0.8, 1.5}) {
        for (double t : {0.3, 2.0}) {
            double kr = translate_radial(G, PointPlus({t}), PointPlus({x}), A).value;
            double th = translate_theta([&](const PointPlus& z) { return G(z.norm()); },
                                        PointPlus({t}), PointPlus({x}), A, q);
            CHECK(kr == doctest::Approx(th).epsilon(5e-4));
        }
    }
}
