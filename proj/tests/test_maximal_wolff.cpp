#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "besselcap/maximal_wolff.hpp"

using namespace besselcap;

namespace {

MultiIndexA a1() { return MultiIndexA::from_weights({1.0}); }
PointPlus pt(double v) { return PointPlus({v}); }

DiscreteMeasure sample_measure(std::mt19937& rng, int max_atoms = 5) {
    std::uniform_int_distribution<int> N(1, max_atoms);
    std::uniform_real_distribution<double> Y(0.6, 2.8), M(0.2, 1.5);
    std::vector<Atom> atoms;
    int n = N(rng);
    for (int i = 0; i < n; ++i) atoms.push_back(Atom{pt(Y(rng)), M(rng)});
    return DiscreteMeasure(atoms);
}

} // namespace

TEST_CASE("maximal operators: empty measure, truncation, tagged infinity") {
    MultiIndexA A = a1();
    DiscreteMeasure empty;
    CHECK(maximal(empty, pt(1.0), A) == doctest::Approx(0.0));
    CHECK(fractional_maximal(empty, pt(1.0), 0.4, A) == doctest::Approx(0.0));

    DiscreteMeasure mu({Atom{pt(1.0), 1.0}});
    double full = fractional_maximal(mu, pt(1.3), 0.4, A);
    double trunc = truncated_maximal(mu, pt(1.3), 0.4, 0.5, A);
    CHECK(trunc <= full * (1.0 + 1e-9));

    CHECK_THROWS_AS(truncated_maximal(mu, pt(1.3), 0.4, 0.0, A), std::domain_error);
    CHECK_THROWS_AS(fractional_maximal(mu, pt(1.3), 5.0, A), std::domain_error);

    // at an atom the un-normalized maximal genuinely blows up
    CHECK(std::isinf(maximal(mu, pt(1.0), A)));
    // fractional with d = nu < n stays finite at the atom
    CHECK(std::isfinite(fractional_maximal(mu, pt(1.0), 0.4, A)));
    // d > n diverges at the atom
    CHECK(std::isinf(fractional_maximal(mu, pt(1.0), 1.5, A)));
}

TEST_CASE("fractional maximal: dense-grid oracle for a single atom") {
    MultiIndexA A = a1();
    DiscreteMeasure mu({Atom{pt(1.2), 0.8}});
    PointPlus x = pt(0.9);
    double d = 0.4;
    double expo = A.homogeneity() - d;

    double brute = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double r = std::pow(10.0, -4.0 + 5.0 * i / 9999.0);
        brute = std::max(brute, averaged_measure(mu, x, r, A) / std::pow(r, expo));
    }
    double fast = fractional_maximal(mu, x, d, A);
    CHECK(fast == doctest::Approx(brute).epsilon(1e-3));
    CHECK(fast >= brute * (1.0 - 1e-10)); // refinement can only improve on the grid
}

TEST_CASE("subadditivity of the maximal operators in mu") {
    MultiIndexA A = a1();
    std::mt19937 rng(19);
    for (int rep = 0; rep < 6; ++rep) {
        DiscreteMeasure m1 = sample_measure(rng, 3), m2 = sample_measure(rng, 3);
        DiscreteMeasure sum = m1 + m2;
        for (double xv : {0.5, 1.1, 2.3}) {
            double lhs = fractional_maximal(sum, pt(xv), 0.4, A);
            double rhs = fractional_maximal(m1, pt(xv), 0.4, A) +
                         fractional_maximal(m2, pt(xv), 0.4, A);
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("riesz potential split: zero measure and monotonicity in delta") {
    MultiIndexA A = a1();
    DiscreteMeasure empty;
    RieszSplit z = riesz_potential_split(empty, pt(1.0), 0.5, 1.0, A);
    CHECK(z.scale_term == doctest::Approx(0.0));
    CHECK(z.boundary_term == doctest::Approx(0.0));

    DiscreteMeasure mu({Atom{pt(1.0), 1.0}, Atom{pt(1.7), 0.6}});
    double prev = 0.0;
    for (double d : {0.3, 0.6, 1.0, 1.5}) {
        RieszSplit s = riesz_potential_split(mu, pt(1.2), 0.5, d, A);
        CHECK(s.scale_term >= prev - 1e-12);
        prev = s.scale_term;
    }
}

TEST_CASE("riesz potential split: divergence flag for small beta at an atom") {
    // with |a| < n - beta the scale integral blows up at an atom sitting on
    // the query point; here n - |a| = 0.6 and beta = 0.5
    MultiIndexA A = MultiIndexA::from_weights({0.4});
    DiscreteMeasure mu({Atom{PointPlus({1.0}), 1.0}});
    RieszSplit diverged = riesz_potential_split(mu, PointPlus({1.0}), 0.5, 1.0, A);
    CHECK(diverged.divergent);
    RieszSplit fine = riesz_potential_split(mu, PointPlus({1.0}), 0.9, 1.0, A);
    CHECK_FALSE(fine.divergent);
    CHECK(std::isfinite(fine.scale_term));

    // wolff function vanishes when every atom lies beyond the truncation
    WolffParams params(MultiIndexA::from_weights({1.0}), 0.4, 2.0);
    DiscreteMeasure far({Atom{PointPlus({5.0}), 1.0}});
    CHECK(wolff_function(far, PointPlus({1.0}), params).value == doctest::Approx(0.0));
}

TEST_CASE("riesz potential split identity against direct quadrature") {
    // both sides of the Lemma: scale term + boundary term equals the direct
    // translate of I_beta chi_{B_+(0,delta)} against the measure.
    MultiIndexA A = a1();
    std::mt19937 rng(23);
    int checked = 0;
    for (int rep = 0; rep < 6; ++rep) {
        DiscreteMeasure mu = sample_measure(rng, 3);
        for (double beta : {0.3, 0.7}) {
            for (double xv : {0.85, 1.55}) {
                double delta = 1.0;
                RieszSplit s = riesz_potential_split(mu, pt(xv), beta, delta, A);
                // direct side: custom kernel r^{beta-n} chi_{r < delta}
                double direct = 0.0;
                for (const Atom& at : mu.atoms()) {
                    KernelQuadOpts opts;
                    opts.breaks = {delta};
                    opts.gl = 24;
                    double tr = translate_kernel(
                        [&](const PointPlus& zz) {
                            double r = zz.x[0];
                            return (r < delta && r > 0.0) ? std::pow(r, beta - 1.0) : 0.0;
                        },
                        at.point, pt(xv), A, opts);
                    direct += at.mass * orthant_weight(at.point, A) * tr;
                }
                double split_sum = s.scale_term + s.boundary_term;
                CHECK(split_sum == doctest::Approx(direct).epsilon(1e-4));
                ++checked;
            }
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("dyadic coefficients: zero measure and sup/sum comparisons") {
    MultiIndexA A = a1();
    WolffParams params(A, 0.4, 2.0);
    DiscreteMeasure empty;
    CHECK(dyadic_b(empty, pt(1.0), params, 3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(dyadic_b(empty, pt(1.0), params, -1), std::domain_error);

    std::mt19937 rng(29);
    DiscreteMeasure mu = sample_measure(rng);
    PointPlus x = pt(1.3);

    // sup_k b_k comparable to truncated maximal at d = nu, b = 1:
    // dyadic radii against all radii; ratio within [1, 2^{n+|a|-nu}].
    double supb = 0.0, sumb = 0.0;
    for (int k = 0; k <= params.k_max; ++k) {
        double b = dyadic_b(mu, x, params, k);
        supb = std::max(supb, b);
        sumb += b;
    }
    double tm = truncated_maximal(mu, x, params.nu, 1.0, A);
    double band = std::pow(2.0, A.homogeneity() - params.nu);
    CHECK(tm >= supb * (1.0 - 1e-9));
    CHECK(tm <= supb * band * (1.0 + 1e-9));
    MESSAGE("sup_k b_k vs truncated maximal ratio: ", tm / supb);

    // sum_k b_k comparable to the delta=1 Riesz scale term at beta = nu-|a|+n... i.e.
    // the r-integral with exponent n+|a|-nu; constants logged, bracket generous.
    double s = A.homogeneity() - params.nu;
    std::vector<double> breaks =
        geometric_breaks(detail::min_atom_distance(mu, x), 1.0, 1e-6);
    double integral = integrate_composite(
        [&](double r) { return averaged_measure(mu, x, r, A) / std::pow(r, s + 1.0); }, breaks,
        12);
    if (integral > 0.0 && sumb > 0.0) {
        double ratio = sumb / integral;
        CHECK(ratio > 1.0 / 64.0);
        CHECK(ratio < 64.0);
        MESSAGE("sum_k b_k vs dyadic-scale integral ratio: ", ratio);
    }
}

TEST_CASE("wolff function: zero measure, scaling homogeneity, divergence flag") {
    MultiIndexA A = a1();
    WolffParams params(A, 0.4, 2.0);
    DiscreteMeasure empty;
    CHECK(wolff_function(empty, pt(1.0), params).value == doctest::Approx(0.0));

    std::mt19937 rng(31);
    DiscreteMeasure mu = sample_measure(rng);
    PointPlus x = pt(0.95);

    // doubling all masses multiplies W by 2^{p'-1}
    WolffValue w1 = wolff_function(mu, x, params);
    WolffValue w2 = wolff_function(mu.scaled(2.0), x, params);
    double pp = dual_exponent(params.p);
    CHECK(w2.value == doctest::Approx(std::pow(2.0, pp - 1.0) * w1.value).epsilon(1e-9));

    // p' = 2 makes the integrand linear in the averaged measure: W is then
    // additive over atoms; cross-check against the per-atom sum.
    DiscreteMeasure one({mu.atoms()[0]});
    double watom = 0.0;
    for (const Atom& at : mu.atoms()) {
        DiscreteMeasure single({at});
        watom += wolff_function(single, x, params).value;
    }
    CHECK(w1.value == doctest::Approx(watom).epsilon(1e-8));

    // at an atom with p*nu <= n the exact integral diverges: flag set
    WolffValue at_atom = wolff_function(mu, mu.atoms()[0].point, params);
    CHECK(at_atom.divergent);
    CHECK(std::isfinite(at_atom.value));
}

TEST_CASE("wolff energy and potential energy: zero measure and homogeneity") {
    MultiIndexA A = a1();
    WolffParams params(A, 0.4, 2.0);
    DiscreteMeasure empty;
    CHECK(wolff_energy(empty, params).value == doctest::Approx(0.0));
    CHECK(potential_energy(empty, params).value == doctest::Approx(0.0));

    DiscreteMeasure mu({Atom{pt(1.0), 0.7}, Atom{pt(1.9), 0.4}});
    double pp = dual_exponent(params.p);

    WolffEnergy we = wolff_energy(mu, params);
    WolffEnergy we2 = wolff_energy(mu.scaled(3.0), params);
    CHECK(we2.value == doctest::Approx(std::pow(3.0, pp) * we.value).epsilon(1e-9));

    WolffEnergy pe = potential_energy(mu, params);
    WolffEnergy pe2 = potential_energy(mu.scaled(3.0), params);
    CHECK(pe2.value == doctest::Approx(std::pow(3.0, pp) * pe.value).epsilon(1e-9));
}

TEST_CASE("Wolff-type equivalence: energies comparable on a measure suite") {
    MultiIndexA A = a1();
    std::mt19937 rng(37);
    double cmax = 0.0;
    for (double nu : {0.3, 0.4}) {
        WolffParams params(A, nu, 2.0);
        for (int rep = 0; rep < 5; ++rep) {
            DiscreteMeasure mu = sample_measure(rng);
            double pe = potential_energy(mu, params).value;
            double we = wolff_energy(mu, params).value;
            REQUIRE(we > 0.0);
            double ratio = pe / we;
            cmax = std::max({cmax, ratio, 1.0 / ratio});
        }
    }
    CHECK(cmax < 100.0);
    MESSAGE("Wolff-type energy comparability constant on suite: ", cmax);
}

TEST_CASE("l^q norms of {b_k} are ordered and mutually comparable") {
    MultiIndexA A = a1();
    WolffParams params(A, 0.4, 2.0);
    std::mt19937 rng(41);
    for (int rep = 0; rep < 3; ++rep) {
        DiscreteMeasure mu = sample_measure(rng, 3);
        double e1 = bk_lq_energy(mu, params, 1.0);
        double e2 = bk_lq_energy(mu, params, 2.0);
        double einf = bk_lq_energy(mu, params, std::numeric_limits<double>::infinity());
        CHECK(e1 >= e2 * (1.0 - 1e-12));
        CHECK(e2 >= einf * (1.0 - 1e-12));
        CHECK(e1 <= 100.0 * einf);
        MESSAGE("l^q spread e1/einf: ", e1 / einf);
    }
}

TEST_CASE("delta-flexibility of the truncated energies") {
    MultiIndexA A = a1();
    std::mt19937 rng(43);
    DiscreteMeasure mu = sample_measure(rng);
    WolffParams half(A, 0.4, 2.0), two(A, 0.4, 2.0);
    half.delta = 0.5;
    two.delta = 2.0;
    double eh = wolff_energy(mu, half).value;
    double et = wolff_energy(mu, two).value;
    CHECK(eh > 0.0);
    CHECK(et >= eh);
    CHECK(et / eh < 16.0);
    MESSAGE("delta 0.5 vs 2 energy ratio: ", et / eh);
}
