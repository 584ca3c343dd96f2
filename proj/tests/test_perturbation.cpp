#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace rfh;
using rfh::testing::random_point;

namespace {

FunctionalContext make_ctx() {
    return FunctionalContext(build_circle_spectrum(2), 0.5,
                             NonlinearitySpec::quadratic());
}

ExtendedPoint basis_vector(const FunctionalContext& ctx, int i) {
    return EBasis(ctx).unit(i);
}

}  // namespace

TEST_CASE("hitting operator, aligned branch: x=e1, y=2e1 is rank one") {
    FunctionalContext ctx = make_ctx();
    ExtendedPoint e1 = basis_vector(ctx, 0);
    ExtendedPoint y = basis_vector(ctx, 0);
    y.z.u *= 2.0;
    y.z.v *= 2.0;
    y.lambda *= 2.0;
    FiniteRankOperator k = make_hitting_operator(ctx, e1, y);
    CHECK(k.terms.size() == 1);
    ExtendedPoint out = k.apply(ctx, e1);
    EBasis basis(ctx);
    VectorXd diff = basis.to_coords(out) - basis.to_coords(y);
    CHECK(diff.norm() < 1e-13);
}

TEST_CASE("hitting operator, orthogonal branch: x=e1, y=e2") {
    FunctionalContext ctx = make_ctx();
    ExtendedPoint x = basis_vector(ctx, 0);
    ExtendedPoint y = basis_vector(ctx, 1);
    FiniteRankOperator k = make_hitting_operator(ctx, x, y);
    CHECK(k.terms.size() == 2);
    EBasis basis(ctx);
    VectorXd diff = basis.to_coords(k.apply(ctx, x)) - basis.to_coords(y);
    CHECK(diff.norm() < 1e-13);
}

TEST_CASE("K(x) = y to machine precision for random pairs (both branches)") {
    FunctionalContext ctx = make_ctx();
    EBasis basis(ctx);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        ExtendedPoint x = random_point(ctx.spectrum, ctx.s, rng);
        ExtendedPoint y = random_point(ctx.spectrum, ctx.s, rng);
        if (trial % 2 == 0) {
            // force the orthogonal branch
            VectorXd xc = basis.to_coords(x);
            VectorXd yc = basis.to_coords(y);
            yc -= (yc.dot(xc) / xc.squaredNorm()) * xc;
            y = basis.from_coords(yc);
        }
        FiniteRankOperator k = make_hitting_operator(ctx, x, y);
        VectorXd diff = basis.to_coords(k.apply(ctx, x)) - basis.to_coords(y);
        CHECK(diff.norm() < 1e-12 * (1.0 + e_norm(ctx.spectrum, y)));
    }
}

TEST_CASE("finite-rank operators are E-symmetric") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(42);
    ExtendedPoint x = random_point(ctx.spectrum, ctx.s, rng);
    ExtendedPoint y = random_point(ctx.spectrum, ctx.s, rng);
    FiniteRankOperator k = make_hitting_operator(ctx, x, y);
    for (int trial = 0; trial < 100; ++trial) {
        ExtendedPoint a = random_point(ctx.spectrum, ctx.s, rng);
        ExtendedPoint b = random_point(ctx.spectrum, ctx.s, rng);
        double lhs = e_inner(ctx.spectrum, k.apply(ctx, a), b);
        double rhs = e_inner(ctx.spectrum, a, k.apply(ctx, b));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("rank-one norm bound is ||y||^2 / |(x,y)|") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(43);
    ExtendedPoint x = random_point(ctx.spectrum, ctx.s, rng);
    ExtendedPoint y = random_point(ctx.spectrum, ctx.s, rng);
    if (std::abs(e_inner(ctx.spectrum, x, y)) < 1e-6) y.lambda += 1.0;
    FiniteRankOperator k = make_hitting_operator(ctx, x, y);
    REQUIRE(k.terms.size() == 1);
    double expected = e_inner(ctx.spectrum, y, y) /
                      std::abs(e_inner(ctx.spectrum, x, y));
    CHECK(k.norm_bound(ctx) == doctest::Approx(expected).epsilon(1e-12));

    FiniteRankOperator zero;
    CHECK(zero.norm_bound(ctx) == 0.0);
}

TEST_CASE("bump profile and cutoff radius") {
    CHECK(bump_profile(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(bump_profile(1.0) == 0.0);
    CHECK(bump_profile(2.5) == 0.0);

    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(44);
    ExtendedPoint x = random_point(ctx.spectrum, ctx.s, rng, 0.1);
    ExtendedPoint y = random_point(ctx.spectrum, ctx.s, rng, 0.1);
    PerturbationMap pert;
    pert.k0 = make_hitting_operator(ctx, x, y);
    pert.center = ExtendedPoint{PairField::zero(ctx.spectrum, ctx.s), 0.0};
    ExtendedPoint far = random_point(ctx.spectrum, ctx.s, rng);
    EBasis basis(ctx);
    VectorXd fc = basis.to_coords(far);
    fc *= 3.0 / fc.norm();  // ||far - center|| = 3 > 1
    far = basis.from_coords(fc);
    ExtendedPoint probe = random_point(ctx.spectrum, ctx.s, rng);
    CHECK(e_norm(ctx.spectrum, pert.apply(ctx, far, probe)) == 0.0);
}

TEST_CASE("perturbed gradient with K = 0 equals the plain gradient") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(45);
    PerturbationMap pert;
    pert.center = ExtendedPoint{PairField::zero(ctx.spectrum, ctx.s), 0.0};
    EBasis basis(ctx);
    for (int trial = 0; trial < 20; ++trial) {
        ExtendedPoint w = random_point(ctx.spectrum, ctx.s, rng);
        VectorXd diff = basis.to_coords(perturbed_gradient(ctx, pert, w)) -
                        basis.to_coords(gradient(ctx, w));
        CHECK(diff.norm() < 1e-14);
    }
}

namespace {

/// Perturbation with operator-norm bound scaled to exactly `target`.
PerturbationMap scaled_pert(const FunctionalContext& ctx, double target,
                            std::mt19937_64& rng) {
    ExtendedPoint x = random_point(ctx.spectrum, ctx.s, rng);
    ExtendedPoint y = random_point(ctx.spectrum, ctx.s, rng);
    PerturbationMap pert;
    pert.k0 = make_hitting_operator(ctx, x, y);
    pert.center = ExtendedPoint{PairField::zero(ctx.spectrum, ctx.s), 0.0};
    double bound = pert.operator_norm_bound(ctx);
    REQUIRE(bound > 0.0);
    double factor = std::sqrt(target / bound);
    for (auto& term : pert.k0.terms) {
        term.left.z.u *= factor;
        term.left.z.v *= factor;
        term.left.lambda *= factor;
        term.right.z.u *= factor;
        term.right.z.v *= factor;
        term.right.lambda *= factor;
    }
    return pert;
}

}  // namespace

TEST_CASE("norm gate: bound 0.49 passes, 0.51 is rejected") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(46);
    ExtendedPoint w = random_point(ctx.spectrum, ctx.s, rng, 0.1);

    PerturbationMap ok = scaled_pert(ctx, 0.49, rng);
    CHECK(ok.operator_norm_bound(ctx) == doctest::Approx(0.49).epsilon(1e-10));
    CHECK_NOTHROW(perturbed_gradient(ctx, ok, w));

    PerturbationMap bad = scaled_pert(ctx, 0.51, rng);
    CHECK_THROWS_AS(perturbed_gradient(ctx, bad, w), DomainError);
}

TEST_CASE("quadratic-form bounds 1/2 and 2/9 and g^K positivity") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(47);
    PerturbationMap pert = scaled_pert(ctx, 0.49, rng);
    for (int trial = 0; trial < 100; ++trial) {
        ExtendedPoint w = random_point(ctx.spectrum, ctx.s, rng, 0.2);
        ExtendedPoint xi = random_point(ctx.spectrum, ctx.s, rng);
        double nsq = e_inner(ctx.spectrum, xi, xi);
        ExtendedPoint kxi = pert.apply(ctx, w, xi);
        ExtendedPoint ipk = xi;
        ipk.z.u += kxi.z.u;
        ipk.z.v += kxi.z.v;
        ipk.lambda += kxi.lambda;
        CHECK(e_inner(ctx.spectrum, ipk, xi) >= 0.5 * nsq - 1e-10);

        double inv_form = gk_pairing(ctx, pert, w, xi, xi);
        CHECK(inv_form > 0.0);
        CHECK(inv_form >= (2.0 / 9.0) * nsq - 1e-10);
    }
}

TEST_CASE("norm equivalence of the perturbed gradient") {
    FunctionalContext ctx = make_ctx();
    std::mt19937_64 rng(48);
    PerturbationMap pert = scaled_pert(ctx, 0.45, rng);
    for (int trial = 0; trial < 50; ++trial) {
        ExtendedPoint w = random_point(ctx.spectrum, ctx.s, rng, 0.3);
        ExtendedPoint g = gradient(ctx, w);
        ExtendedPoint gk = perturbed_gradient(ctx, pert, w);
        double plain = e_inner(ctx.spectrum, g, g);
        double gk_sq = gk_pairing(ctx, pert, w, gk, gk);
        CHECK(gk_sq >= 0.5 * plain - 1e-12);
        CHECK(gk_sq <= 4.5 * plain + 1e-12);
    }
}
