#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ptesc/errors.hpp"
#include "ptesc/timescale.hpp"

using namespace ptesc;

namespace {

PrescribedTime horizon(double T) {
    PrescribedTime pt;
    pt.T = T;
    return pt;
}

}  // namespace

TEST_CASE("tau_of_t examples") {
    const auto pt = horizon(5.0);
    CHECK(tau_of_t(0.0, pt) == 0.0);
    CHECK(tau_of_t(2.5, pt) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(tau_of_t(4.5, pt) == doctest::Approx(45.0).epsilon(1e-14));
}

TEST_CASE("tau_of_t rejects times outside [0, T)") {
    const auto pt = horizon(5.0);
    CHECK_THROWS_AS((void)tau_of_t(5.0, pt), DomainError);
    CHECK_THROWS_AS((void)tau_of_t(-1e-9, pt), DomainError);
    try {
        (void)tau_of_t(6.0, pt);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.value() == 6.0);
    }
}

TEST_CASE("t_of_tau examples") {
    const auto pt = horizon(5.0);
    CHECK(t_of_tau(0.0, pt) == 0.0);
    CHECK(t_of_tau(5.0, pt) == doctest::Approx(2.5).epsilon(1e-15));
    const double far = t_of_tau(1e9, pt);
    CHECK(far < 5.0);
    CHECK(far > 4.999999);
    CHECK_THROWS_AS((void)t_of_tau(-1.0, pt), DomainError);
}

TEST_CASE("dtau_dt examples and clamp") {
    auto pt = horizon(5.0);
    CHECK(dtau_dt(0.0, pt) == 1.0);
    CHECK(dtau_dt(2.5, pt) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)dtau_dt(5.0, pt), DomainError);
    pt.gain_clamp = 1000.0;
    CHECK(dtau_dt(4.95, pt) == 1000.0);
    CHECK(dtau_dt(2.5, pt) == doctest::Approx(4.0));
}

TEST_CASE("v_of_t examples") {
    auto pt = horizon(5.0);
    CHECK(v_of_t(0.0, pt) == 1.0);
    CHECK(v_of_t(2.5, pt) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(v_of_t(1.234, pt) * dtau_dt(1.234, pt) == doctest::Approx(1.0).epsilon(1e-15));
    // The clamp applies to dtau_dt only.
    pt.gain_clamp = 10.0;
    CHECK(v_of_t(4.95, pt) == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("gain_schedule examples") {
    auto pt = horizon(5.0);
    CHECK(gain_schedule(0.0, 25.0, pt) == 50.0);
    CHECK(gain_schedule(2.5, 25.0, pt) == doctest::Approx(125.0).epsilon(1e-15));
    pt.gain_clamp = 100.0;
    CHECK(gain_schedule(4.9999, 25.0, pt) == doctest::Approx(25.0 * 101.0));
}

TEST_CASE("PrescribedTime validation") {
    PrescribedTime pt;
    pt.T = 5.0;
    CHECK_NOTHROW(pt.validate());
    CHECK(pt.t_stop() < pt.T);
    CHECK(pt.t_stop() == doctest::Approx(4.995));

    pt.T = 0.0;
    CHECK_THROWS_AS(pt.validate(), DomainError);
    pt.T = 5.0;
    pt.stop_fraction = 1.0;
    CHECK_THROWS_AS(pt.validate(), DomainError);
    pt.stop_fraction = 0.0;
    CHECK_THROWS_AS(pt.validate(), DomainError);
    pt.stop_fraction = 1e-3;
    pt.gain_clamp = 0.5;
    CHECK_THROWS_AS(pt.validate(), DomainError);
}

TEST_CASE("property: round trip, reciprocity and gain bound on random times") {
    std::mt19937_64 rng(20240611);
    for (double T : {0.1, 1.0, 5.0, 50.0}) {
        const auto pt = horizon(T);
        std::uniform_real_distribution<double> dist(0.0, 0.999 * T);
        for (int i = 0; i < 1000; ++i) {
            const double t = dist(rng);
            const double back = t_of_tau(tau_of_t(t, pt), pt);
            REQUIRE(std::fabs(back - t) <= 1e-12 * std::max(1.0, std::fabs(t)));
            REQUIRE(std::fabs(dtau_dt(t, pt) * v_of_t(t, pt) - 1.0) <= 1e-12);
            REQUIRE(gain_schedule(t, 2.0, pt) >= 4.0);
            if (t > 0.0) REQUIRE(gain_schedule(t, 2.0, pt) > 4.0);
        }
    }
}

TEST_CASE("property: tau strictly increasing on a grid of [0, t_stop]") {
    const auto pt = horizon(5.0);
    const int n = 20000;
    double prev = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double t = pt.t_stop() * i / n;
        const double tau = tau_of_t(t, pt);
        REQUIRE(tau > prev);
        prev = tau;
    }
}

TEST_CASE("timescale near the singularity is computed from T - t") {
    // With t = T(1 - 1e-12) the stretched time is about 1e12 T; a formula
    // that subtracted accumulated quantities would lose all digits here.
    const auto pt = horizon(1.0);
    const double t = 1.0 - 1e-12;
    const double exact = t / (1.0 - t);
    CHECK(tau_of_t(t, pt) == doctest::Approx(exact).epsilon(1e-15));
    CHECK(dtau_dt(t, pt) * v_of_t(t, pt) == doctest::Approx(1.0).epsilon(1e-15));
}
