#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"

using namespace rfh;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("circle spectrum enumerates 2*pi*(j + 1/2) with both signs") {
    Spectrum one = build_circle_spectrum(1);
    REQUIRE(one.mode_count() == 2);
    CHECK(one.modes[0] == doctest::Approx(-kPi).epsilon(1e-15));
    CHECK(one.modes[1] == doctest::Approx(kPi).epsilon(1e-15));

    Spectrum two = build_circle_spectrum(2);
    REQUIRE(two.mode_count() == 4);
    CHECK(two.modes[0] == doctest::Approx(-3 * kPi));
    CHECK(two.modes[1] == doctest::Approx(-kPi));
    CHECK(two.modes[2] == doctest::Approx(kPi));
    CHECK(two.modes[3] == doctest::Approx(3 * kPi));
}

TEST_CASE("circle spectrum equals its negation as a set") {
    Spectrum spec = build_circle_spectrum(5);
    for (const auto& lv : spec.levels) {
        bool found = false;
        for (const auto& other : spec.levels)
            if (other.lambda == -lv.lambda && other.multiplicity == lv.multiplicity)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("L-spectrum of the circle: (2k-1)pi with multiplicity 2") {
    Spectrum spec = build_circle_spectrum(3);
    LSpectrum ls = l_spectrum(spec);
    REQUIRE(ls.levels.size() == 6);
    for (int k = 1; k <= 3; ++k) {
        CHECK(ls.level(k).lambda == doctest::Approx((2 * k - 1) * kPi));
        CHECK(ls.level(k).multiplicity == 2);
        CHECK(ls.level(-k).lambda == doctest::Approx(-(2 * k - 1) * kPi));
        CHECK(ls.level(-k).multiplicity == 2);
    }
}

TEST_CASE("L eigenvectors (phi, +-phi) satisfy L(u,v) = lambda (u,v) coefficientwise") {
    Spectrum spec = build_circle_spectrum(3);
    // D phi = pi phi at mode index 3 (circle num_modes=3 -> modes sorted)
    int idx = -1;
    for (int i = 0; i < spec.mode_count(); ++i)
        if (spec.modes[i] == kPi) idx = i;
    REQUIRE(idx >= 0);

    PairField plus = PairField::zero(spec, 0.5);
    plus.u[idx] = 1.0;
    plus.v[idx] = 1.0;
    PairField lp = l_apply(spec, plus);
    for (int i = 0; i < spec.mode_count(); ++i) {
        CHECK(std::abs(lp.u[i] - kPi * plus.u[i]) < 1e-14);
        CHECK(std::abs(lp.v[i] - kPi * plus.v[i]) < 1e-14);
    }

    PairField minus = PairField::zero(spec, 0.5);
    minus.u[idx] = 1.0;
    minus.v[idx] = -1.0;  // L(phi, -phi) = -pi (phi, -phi) for D phi = pi phi
    PairField lm = l_apply(spec, minus);
    for (int i = 0; i < spec.mode_count(); ++i) {
        CHECK(std::abs(lm.u[i] + kPi * minus.u[i]) < 1e-14);
        CHECK(std::abs(lm.v[i] + kPi * minus.v[i]) < 1e-14);
    }
}

TEST_CASE("synthetic spectrum {1,2,3} doubles to {+-1,+-2,+-3} each m=1") {
    Spectrum spec = build_synthetic_spectrum({{1.0, 1}, {2.0, 1}, {3.0, 1}});
    LSpectrum ls = l_spectrum(spec);
    REQUIRE(ls.levels.size() == 6);
    for (int k = 1; k <= 3; ++k) {
        CHECK(ls.level(k).lambda == doctest::Approx(static_cast<double>(k)));
        CHECK(ls.level(k).multiplicity == 1);
        CHECK(ls.level(-k).multiplicity == 1);
    }
}

TEST_CASE("mirror-sum multiplicity m_L = m_D(lb) + m_D(-lb)") {
    Spectrum spec = build_synthetic_spectrum({{-2.0, 3}, {1.0, 1}, {2.0, 2}});
    LSpectrum ls = l_spectrum(spec);
    CHECK(ls.level(2).multiplicity == 5);   // lb = 2: 2 + 3
    CHECK(ls.level(-2).multiplicity == 5);
    CHECK(ls.level(1).multiplicity == 1);
    CHECK(ls.level(-1).multiplicity == 1);
}

TEST_CASE("zero eigenvalue is rejected") {
    CHECK_THROWS_AS(build_synthetic_spectrum({{0.0, 1}}), DomainError);
}

TEST_CASE("invalid circle size is rejected") {
    CHECK_THROWS_AS(build_circle_spectrum(0), DomainError);
}

TEST_CASE("spectrum JSON round-trip") {
    Spectrum spec = build_circle_spectrum(4);
    Spectrum back = spectrum_from_json(spectrum_to_json(spec));
    CHECK(back.model == spec.model);
    CHECK(back.num_modes == spec.num_modes);
    REQUIRE(back.mode_count() == spec.mode_count());
    for (int i = 0; i < spec.mode_count(); ++i) CHECK(back.modes[i] == spec.modes[i]);

    Spectrum syn = build_synthetic_spectrum({{-1.5, 2}, {0.5, 1}});
    Spectrum syn_back = spectrum_from_json(spectrum_to_json(syn));
    CHECK(syn_back.model == SpectrumModel::Synthetic);
    REQUIRE(syn_back.levels.size() == syn.levels.size());
    for (std::size_t i = 0; i < syn.levels.size(); ++i) {
        CHECK(syn_back.levels[i].lambda == syn.levels[i].lambda);
        CHECK(syn_back.levels[i].multiplicity == syn.levels[i].multiplicity);
    }
}
