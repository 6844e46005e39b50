#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "besselcap/core.hpp"
#include "besselcap/translation.hpp"

using namespace besselcap;

namespace {

MultiIndexA a1() { return MultiIndexA::from_weights({1.0}); }

PointPlus pt(double v) { return PointPlus({v}); }
PointPlus pt(double v, double w) { return PointPlus({v, w}); }

} // namespace

TEST_CASE("theta quadrature is a probability measure") {
    for (double al : {-0.4, 0.0, 0.5, 1.0, 3.0}) {
        MultiIndexA A({al});
        ThetaQuadrature q = ThetaQuadrature::build(A);
        double s = 0.0;
        for (double w : q.weights[0]) {
            CHECK(w > 0.0);
            s += w;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("translate of the constant is the constant") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (double al : {-0.4, 0.0, 0.5, 1.0, 3.0}) {
        MultiIndexA A({al});
        ThetaQuadrature q = ThetaQuadrature::build(A);
        for (int i = 0; i < 20; ++i) {
            double v = translate_theta([](const PointPlus&) { return 1.0; }, pt(U(rng)),
                                       pt(U(rng)), A, q);
            CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("translation is symmetric in (x,t)") {
    MultiIndexA A({0.5, 1.0});
    ThetaQuadrature q = ThetaQuadrature::build(A);
    auto f = [](const PointPlus& z) { return std::exp(-z.x[0]) * std::cos(z.x[1]); };
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int i = 0; i < 10; ++i) {
        PointPlus x = pt(U(rng), U(rng)), t = pt(U(rng), U(rng));
        CHECK(translate_theta(f, t, x, A, q) == translate_theta(f, x, t, A, q));
    }
}

TEST_CASE("translation by zero is the identity on continuous f") {
    MultiIndexA A({0.5});
    ThetaQuadrature q = ThetaQuadrature::build(A);
    auto f = [](const PointPlus& z) { return std::sin(z.x[0]) + 2.0; };
    for (double xv : {0.3, 1.1, 2.4}) {
        double v = translate_theta(f, pt(0.0), pt(xv), A, q);
        CHECK(v == doctest::Approx(f(pt(xv))).epsilon(1e-12));
    }
}

TEST_CASE("arccos closed form for the indicator at alpha = 0") {
    // T^t chi_{[0,1)}(x) at alpha=0, x=t=1 equals arccos(1/2)/pi = 1/3
    double v = translate_interval_indicator(1.0, 1.0, 1.0, 0.0);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // the generic theta-form quadrature agrees only at jump-limited accuracy
    MultiIndexA A({0.0});
    ThetaQuadrature q = ThetaQuadrature::build(A);
    double approx = translate_theta(
        [](const PointPlus& z) { return z.x[0] < 1.0 ? 1.0 : 0.0; }, pt(1.0), pt(1.0), A, q);
    CHECK(std::fabs(approx - 1.0 / 3.0) < 0.02);
}

TEST_CASE("kernel_K: support, symmetry, reproduction of constants") {
    CHECK(kernel_K(1.0, 0.5, 0.4, 0.7) == 0.0);  // z below |x-t|
    CHECK(kernel_K(1.0, 0.5, 1.6, 0.7) == 0.0);  // z above x+t
    CHECK_THROWS_AS(kernel_K(1.0, 1.0, 1.0, -0.6), std::domain_error);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    for (double al : {-0.3, 0.0, 0.5, 1.5}) {
        for (int i = 0; i < 5; ++i) {
            double x = U(rng), t = U(rng);
            double lo = std::fabs(x - t), hi = x + t;
            double z = lo + (hi - lo) * 0.37;
            CHECK(kernel_K(x, t, z, al) == doctest::Approx(kernel_K(t, x, z, al)));
            CHECK(kernel_K(x, t, z, al) >= 0.0);
        }
    }

    // integral of K z^a dz over the support is 1 (translate of f == 1)
    MultiIndexA A({0.5});
    for (int i = 0; i < 6; ++i) {
        double x = U(rng), t = U(rng);
        double v = translate_kernel([](const PointPlus&) { return 1.0; }, pt(t), pt(x), A);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("two-form agreement on smooth functions") {
    MultiIndexA A({1.0});
    ThetaQuadrature q = ThetaQuadrature::build(A);
    auto f = [](const PointPlus& z) { return std::exp(-0.7 * z.x[0] * z.x[0]) + 0.2 * z.x[0]; };
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> U(0.05, 2.5);
    for (int i = 0; i < 12; ++i) {
        double x = U(rng), t = U(rng);
        double th = translate_theta(f, pt(t), pt(x), A, q);
        double kr = translate_kernel(f, pt(t), pt(x), A);
        CHECK(kr == doctest::Approx(th).epsilon(1e-6));
    }
}

TEST_CASE("kernel form rejects degenerate axes") {
    MultiIndexA A({0.5});
    CHECK_THROWS_AS(
        translate_kernel([](const PointPlus&) { return 1.0; }, pt(0.0), pt(1.0), A),
        DegenerateKernelError);
}

TEST_CASE("monotone domination of indicator translates") {
    // chi_H <= chi_S pointwise with H subset of S orders the translates
    MultiIndexA A({0.7});
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    for (int i = 0; i < 20; ++i) {
        double x = U(rng), t = U(rng);
        double small = translate_interval_indicator(x, t, 0.6, A.alpha(0));
        double big = translate_interval_indicator(x, t, 1.1, A.alpha(0));
        CHECK(small <= big + 1e-12);
    }
}

TEST_CASE("indicator translate bounds: support and envelope") {
    MultiIndexA A = a1();
    // value vanishes when t lies outside the closed ball around x
    IndicatorBounds far = indicator_translate_bounds(pt(1.0), pt(2.5), 1.0, A);
    CHECK(far.value == 0.0);

    // all x_i <= r makes every envelope factor 1
    IndicatorBounds in = indicator_translate_bounds(pt(0.5), pt(0.6), 1.0, A);
    CHECK(in.upper == doctest::Approx(1.0));

    CHECK_THROWS_AS(indicator_translate_bounds(pt(1.0), pt(1.0), 0.0, A), std::domain_error);

    // sampled lattice: ball value <= c_up * envelope and cube value >=
    // c_lo * envelope on the half-cube; the fitted constants are logged.
    double c_up = 0.0, c_lo = std::numeric_limits<double>::infinity();
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> U(0.05, 3.0);
    std::uniform_real_distribution<double> R(0.2, 1.5);
    int lower_samples = 0;
    for (int i = 0; i < 400; ++i) {
        double xv = U(rng), r = R(rng);
        std::uniform_real_distribution<double> T(std::max(0.0, xv - r), xv + r);
        double tv = T(rng);
        IndicatorBounds b = indicator_translate_bounds(pt(xv), pt(tv), r, A);
        if (b.upper > 0.0) c_up = std::max(c_up, b.value / b.upper);
        if (b.in_half_cube && b.lower > 0.0) {
            c_lo = std::min(c_lo, b.cube_value / b.lower);
            ++lower_samples;
        }
    }
    CHECK(lower_samples > 50);
    CHECK(c_up < 16.0);  // envelope constant exists; fitted here, not asserted exact
    CHECK(c_lo > 1e-3);
    MESSAGE("lemma envelope constants: upper ", c_up, " lower ", c_lo);
}

TEST_CASE("ball translate matches interval rule in 1-D and factors in nice cases") {
    MultiIndexA A({0.3});
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(0.05, 2.0);
    for (int i = 0; i < 25; ++i) {
        double x = U(rng), t = U(rng), r = U(rng);
        double ball = translate_ball_indicator(pt(x), pt(t), r, A);
        double iv = translate_interval_indicator(x, t, r, A.alpha(0));
        CHECK(ball == doctest::Approx(iv).epsilon(1e-12));
    }
}

TEST_CASE("2-D ball translate: brute-force tensor oracle") {
    MultiIndexA A({0.5, 0.0});
    ThetaQuadrature q = ThetaQuadrature::build(A, 220);
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> U(0.2, 1.4);
    for (int i = 0; i < 4; ++i) {
        PointPlus x = pt(U(rng), U(rng)), t = pt(U(rng), U(rng));
        double r = 0.8 + 0.4 * U(rng);
        double rr = r * r;
        double brute = translate_theta(
            [&](const PointPlus& z) {
                return (z.x[0] * z.x[0] + z.x[1] * z.x[1] < rr) ? 1.0 : 0.0;
            },
            t, x, A, q);
        double fast = translate_ball_indicator(x, t, r, A);
        CHECK(std::fabs(fast - brute) < 5e-3); // oracle limited by the jump
    }
}

TEST_CASE("Remark-style comparability of nested ball translates") {
    // ratio T chi_{B(0,cr)} / T chi_{B(0,r)} with c = 2 sqrt(n) stays within
    // positive constants over t in B_+(x,r); constants are logged.
    MultiIndexA A = a1();
    double c = 2.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> U(0.1, 2.5);
    for (int i = 0; i < 200; ++i) {
        double x = U(rng), r = 0.2 + 0.5 * U(rng);
        std::uniform_real_distribution<double> T(std::max(0.0, x - r), x + r);
        double t = T(rng);
        double small = translate_ball_indicator(pt(x), pt(t), r, A);
        double big = translate_ball_indicator(pt(x), pt(t), c * r, A);
        if (small > 1e-14) {
            double ratio = big / small;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    CHECK(lo >= 1.0 - 1e-12);
    CHECK(hi < 1e4);
    MESSAGE("comparability constants for c=2sqrt(1): [", lo, ", ", hi, "]");
}

TEST_CASE("convolve: zero function, positivity") {
    MultiIndexA A = a1();
    auto ax = GridFunction::uniform_axis(0.0, 2.0, 9);
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> vals(9);
    for (auto& v : vals) v = U(rng);
    GridFunction f({ax}, vals);

    CHECK(convolve(f, [](const PointPlus&) { return 0.0; }, pt(1.0), A) == doctest::Approx(0.0));

    for (double xv : {0.2, 0.9, 1.7, 3.0}) {
        double v = convolve(f, [](const PointPlus& t) { return std::exp(-t.x[0]); }, pt(xv), A);
        CHECK(v >= -1e-14);
    }
}

TEST_CASE("convolution commutes within quadrature tolerance") {
    MultiIndexA A = a1();
    auto ax = GridFunction::uniform_axis(0.0, 2.0, 11);
    GridFunction f = GridFunction::sample({ax}, [](const PointPlus& p) {
        return std::exp(-p.x[0] * p.x[0]);
    });
    GridFunction g = GridFunction::sample({ax}, [](const PointPlus& p) {
        return p.x[0] * std::exp(-p.x[0]);
    });
    for (double xv : {0.4, 1.0, 1.6}) {
        double fg = convolve(f, [&](const PointPlus& t) { return g.eval(t); }, pt(xv), A);
        double gf = convolve(g, [&](const PointPlus& t) { return f.eval(t); }, pt(xv), A);
        CHECK(fg == doctest::Approx(gf).epsilon(2e-4));
    }
}

TEST_CASE("contraction of the translation operator in L^p_a") {
    // ||T^t f||_{p,a} <= ||f||_{p,a} for sampled t, via grid quadrature on a
    // box containing the support of the translate.
    MultiIndexA A = a1();
    auto ax = GridFunction::uniform_axis(0.0, 2.0, 9);
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> U(0.1, 1.0);
    std::vector<double> vals(9);
    for (auto& v : vals) v = U(rng);
    GridFunction f({ax}, vals);
    for (double p : {1.0, 2.0}) {
        double nf = weighted_norm(f, p, A);
        for (double tv : {0.3, 1.2}) {
            PointPlus t = pt(tv);
            auto big = GridFunction::uniform_axis(0.0, 2.0 + tv + 0.1, 161);
            GridFunction Tf = GridFunction::sample({big}, [&](const PointPlus& x) {
                return translate_grid(f, t, x, A);
            });
            double nt = weighted_norm(Tf, p, A);
            CHECK(nt <= nf * (1.0 + 2e-3)); // sampled translate, modest slack
        }
    }
}
