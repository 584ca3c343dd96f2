#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace rfh;
using rfh::testing::random_field;

TEST_CASE("select_s: n=3, p=q=1.2 gives the interval (0.13636, 0.86364)") {
    ExponentWitness w = select_s(3, 1.2, 1.2);
    CHECK(w.s_lo == doctest::Approx(0.6 / 4.4).epsilon(1e-12));
    CHECK(w.s_hi == doctest::Approx(3.8 / 4.4).epsilon(1e-12));
    CHECK(w.s == doctest::Approx(0.5).epsilon(1e-12));

    // independent grid scan of both exponent inequalities
    for (double s = 1e-4; s < 1.0; s += 1e-4) {
        bool cond_p = 1.2 < (3 + 2 * s) / (3 - 2 * s);
        bool cond_q = 1.2 < (3 + 2 - 2 * s) / (3 + 2 * s - 2);
        bool inside = s > w.s_lo && s < w.s_hi;
        CHECK((cond_p && cond_q) == inside);
    }
}

TEST_CASE("select_s: n=3, p=q=2 is infeasible with a diagnostic") {
    CHECK_THROWS_AS(select_s(3, 2.0, 2.0), DomainError);
    try {
        select_s(3, 2.0, 2.0);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("1/(p+1)") != std::string::npos);
    }
}

TEST_CASE("select_s: n=1 is feasible for any p, q > 1") {
    for (double p : {1.1, 3.0, 10.0})
        for (double q : {1.5, 7.0}) {
            ExponentWitness w = select_s(1, p, q);
            CHECK(w.s > 0.0);
            CHECK(w.s < 1.0);
        }
}

TEST_CASE("pointwise evaluation: quadratic and power fibers") {
    NonlinearitySpec h0 = NonlinearitySpec::quadratic();
    CHECK(evaluate_H(h0, 0.0, 0.0, 0.0) == 0.0);
    FiberGradient g0 = evaluate_Hz(h0, 0.0, 0.0, 0.0);
    CHECK(std::abs(g0.hu) == 0.0);
    CHECK(std::abs(g0.hv) == 0.0);

    NonlinearitySpec p33 = NonlinearitySpec::power_type(3.0, 3.0);
    double c = 1.3;
    CHECK(evaluate_H(p33, 0.2, c, c) == doctest::Approx(c * c * c * c / 2.0));
    FiberGradient g = evaluate_Hz(p33, 0.2, c, c);
    CHECK(g.hu.real() == doctest::Approx(c * c * c));
    CHECK(g.hu.imag() == doctest::Approx(0.0));
}

TEST_CASE("fiber gradient and Hessian match central differences") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    NonlinearitySpec p = NonlinearitySpec::power_type(2.4, 3.1);
    double h = 1e-6;
    for (int trial = 0; trial < 1000; ++trial) {
        cplx u(gauss(rng), gauss(rng)), v(gauss(rng), gauss(rng));
        if (std::abs(u) < 0.1 || std::abs(v) < 0.1) continue;  // away from the origin kink
        FiberGradient g = evaluate_Hz(p, 0.0, u, v);
        double fd_re = (evaluate_H(p, 0.0, u + h, v) - evaluate_H(p, 0.0, u - h, v)) / (2 * h);
        double fd_im = (evaluate_H(p, 0.0, u + cplx(0, h), v) -
                        evaluate_H(p, 0.0, u - cplx(0, h), v)) / (2 * h);
        CHECK(std::abs(fd_re - g.hu.real()) < 1e-6 * (1.0 + std::abs(g.hu)));
        CHECK(std::abs(fd_im - g.hu.imag()) < 1e-6 * (1.0 + std::abs(g.hu)));

        FiberGradient hz = evaluate_Hzz(p, 0.0, u, v, 1.0, 0.0);
        FiberGradient gp = evaluate_Hz(p, 0.0, u + h, v);
        FiberGradient gm = evaluate_Hz(p, 0.0, u - h, v);
        CHECK(std::abs((gp.hu - gm.hu) / (2 * h) - hz.hu) < 1e-5 * (1.0 + std::abs(hz.hu)));
    }
}

TEST_CASE("S1-equivariance of H at sampled phases") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& nl :
         {NonlinearitySpec::quadratic(), NonlinearitySpec::power_type(3.0, 2.0)}) {
        for (int trial = 0; trial < 200; ++trial) {
            cplx u(gauss(rng), gauss(rng)), v(gauss(rng), gauss(rng));
            double theta = gauss(rng);
            cplx phase = std::polar(1.0, theta);
            CHECK(std::abs(evaluate_H(nl, 0.1, phase * u, phase * v) -
                           evaluate_H(nl, 0.1, u, v)) < 1e-12 *
                  (1.0 + std::abs(evaluate_H(nl, 0.1, u, v))));
        }
    }
}

TEST_CASE("integral_H: quadratic is half the L2 norm; power on a single mode") {
    Spectrum spec = build_circle_spectrum(2);
    NonlinearitySpec h0 = NonlinearitySpec::quadratic();

    PairField z = PairField::zero(spec, 0.5);
    z.u[2] = std::sqrt(2.0);
    CHECK(integral_H(spec, h0, z, 16) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(integral_H(spec, h0, PairField::zero(spec, 0.5), 16) == 0.0);

    NonlinearitySpec p33 = NonlinearitySpec::power_type(3.0, 3.0);
    cplx c(0.8, 0.5);
    PairField w = PairField::zero(spec, 0.5);
    w.u[2] = c;
    w.v[2] = c;
    CHECK(integral_H(spec, p33, w, 32) ==
          doctest::Approx(2.0 * std::pow(std::abs(c), 4.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("integral_H gradient is consistent with finite differences of integral_H") {
    Spectrum spec = build_circle_spectrum(2);
    NonlinearitySpec p33 = NonlinearitySpec::power_type(3.0, 3.0);
    std::mt19937_64 rng(23);
    PairField z = random_field(spec, 0.5, rng);
    PairField grad = integral_H_gradient(spec, p33, z, 32);
    double h = 1e-6;
    for (int i = 0; i < spec.mode_count(); ++i) {
        PairField zp = z, zm = z;
        zp.u[i] += h;
        zm.u[i] -= h;
        double fd = (integral_H(spec, p33, zp, 32) - integral_H(spec, p33, zm, 32)) / (2 * h);
        // derivative wrt the real part of u_i is Re of the gradient coefficient
        CHECK(std::abs(fd - grad.u[i].real()) < 1e-5 * (1.0 + std::abs(grad.u[i])));
    }
}

TEST_CASE("hypothesis checker accepts H0 and the power type") {
    HypothesisReport quad = check_hypotheses(NonlinearitySpec::quadratic(), 2000, 3.0, 5);
    CHECK(quad.all_passed());

    HypothesisReport pow = check_hypotheses(NonlinearitySpec::power_type(3.0, 3.0),
                                            10000, 3.0, 5);
    for (const auto& item : pow.items)
        if (item.name == "H1" || item.name == "H2") CHECK(item.passed);
}

TEST_CASE("constant H = 5 is rejected under (H1) with a witness") {
    NonlinearitySpec flat;
    flat.kind = NonlinKind::Custom;
    flat.eval = [](cplx, cplx) { return 5.0; };
    flat.eval_grad = [](cplx, cplx) { return FiberGradient{0.0, 0.0}; };
    flat.eval_hess = [](cplx, cplx, cplx, cplx) { return FiberGradient{0.0, 0.0}; };
    HypothesisReport rep = check_hypotheses(flat, 500, 3.0, 5);
    bool h1_failed = false;
    for (const auto& item : rep.items)
        if (item.name == "H1") {
            h1_failed = !item.passed;
            CHECK_FALSE(item.witness.empty());
        }
    CHECK(h1_failed);
    CHECK_FALSE(rep.all_passed());
}

TEST_CASE("H4 is reported as heuristic") {
    Spectrum spec = build_circle_spectrum(2);
    HypothesisReport rep = check_hypotheses(NonlinearitySpec::power_type(3.0, 3.0),
                                            200, 3.0, 5, &spec, 0.5, 16);
    bool saw_h4 = false;
    for (const auto& item : rep.items)
        if (item.name == "H4") {
            saw_h4 = true;
            CHECK(item.heuristic);
        }
    CHECK(saw_h4);
}
