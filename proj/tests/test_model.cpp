#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwire/profile.hpp"

using namespace qwire;

namespace {
ModelParams defaults() { return ModelParams{}; }
}  // namespace

TEST_CASE("parameter validation") {
    ModelParams p = defaults();
    CHECK_NOTHROW(p.validate());
    p.field = 0.0;
    CHECK_THROWS(p.validate());
    p = defaults();
    p.impurity_amp = -1.0;
    CHECK_THROWS(p.validate());
    p = defaults();
    p.transverse_fraction = 1.0;  // must stay below min f = 1
    CHECK_THROWS(p.validate());
    p = defaults();
    p.transverse_fraction = 0.0;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("level profile values") {
    Profile prof(defaults());
    CHECK(prof.f_real(60.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(prof.f_real(-60.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(prof.f_real(0.0) == doctest::Approx(std::sqrt(1.03)).epsilon(1e-15));

    ModelParams p0 = defaults();
    p0.impurity_amp = 0.0;
    Profile prof0(p0);
    CHECK(prof0.f_real(1.7) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("level profile symmetry and monotonicity") {
    Profile prof(defaults());
    for (double y : {0.3, 1.1, 2.7, 4.0})
        CHECK(prof.f_real(y) == doctest::Approx(prof.f_real(-y)).epsilon(1e-15));
    double prev = prof.f_real(1e-3);
    for (double y = 0.2; y < 5.0; y += 0.2) {
        const double cur = prof.f_real(y);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("channel momentum examples") {
    Profile prof(defaults());
    // far from the impurity: p_Y = sqrt(2 m eta D0), the 0.2 condition
    CHECK(prof.channel_momentum_real(40.0) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
    // at the impurity center
    const double expect = std::sqrt(2.0 * (std::sqrt(1.03) - 0.8));
    CHECK(prof.channel_momentum_real(0.0) == doctest::Approx(expect).epsilon(1e-14));

    ModelParams pz = defaults();
    pz.transverse_fraction = 0.0;
    Profile prof0(pz);
    CHECK(prof0.channel_momentum_real(50.0) == doctest::Approx(0.0).epsilon(1e-12));

    // classically forbidden stretch along the wire must signal
    ModelParams pneg = defaults();
    pneg.impurity_amp = -0.5;
    pneg.transverse_fraction = 0.1;
    Profile profn(pneg);
    CHECK_THROWS_AS((void)profn.channel_momentum_real(0.0), std::domain_error);
}

TEST_CASE("decay momentum examples") {
    ModelParams p0 = defaults();
    p0.impurity_amp = 0.0;
    Profile prof0(p0);
    CHECK(prof0.decay_momentum_real(1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    Profile prof(defaults());
    CHECK(prof.decay_momentum_real(0.0) ==
          doctest::Approx(std::sqrt(2.0 * std::sqrt(1.03))).epsilon(1e-15));

    ModelParams psmall = defaults();
    psmall.depth0 = 1e-12;
    Profile profs(psmall);
    CHECK(profs.decay_momentum_real(0.0) < 2e-6);
}

TEST_CASE("energy budget closes exactly on the launch surface") {
    Profile prof(defaults());
    const ModelParams& p = prof.params();
    const double E = p.total_energy();
    CHECK(E == doctest::Approx(-0.8));
    for (double y : {-3.2, -0.7, 0.0, 0.4, 1.9, 6.0}) {
        const double px2 = -std::pow(prof.decay_momentum_real(y), 2);  // (i hk)^2
        const double py2 = std::pow(prof.channel_momentum_real(y), 2);
        CHECK(std::abs((px2 + py2) / (2.0 * p.mass) - E) < 1e-14);
    }
    // same identity at complex launch coordinates
    for (Cx y : {Cx(0.5, 0.8), Cx(-1.2, 1.5), Cx(2.0, -0.6)}) {
        ChannelState cs = prof.state(y);
        const Cx h = (cs.px * cs.px + cs.py * cs.py) / (2.0 * p.mass);
        CHECK(std::abs(h - E) < 1e-13);
    }
}

TEST_CASE("complex continuation agrees with principal branch near the real axis") {
    Profile prof(defaults());
    const Cx y(0.7, 0.4);
    ChannelState cs = prof.state(y);
    const Cx g = 1.0 + 0.03 * std::exp(-y * y);
    CHECK(std::abs(cs.f - std::sqrt(g)) < 1e-13);
    CHECK_FALSE(cs.cut_crossed);
    // evenness carries over to the canonical-path continuation
    ChannelState cm = prof.state(-y);
    CHECK(std::abs(cm.f - cs.f) < 1e-13);
}

TEST_CASE("channel state derivatives match finite differences") {
    Profile prof(defaults());
    const double h = 1e-6;
    for (Cx y : {Cx(0.4, 0.9), Cx(-1.1, 0.35), Cx(1.8, 1.2)}) {
        ChannelState c0 = prof.state(y);
        ChannelState cp = prof.state(y + h);
        ChannelState cm = prof.state(y - h);
        CHECK(std::abs((cp.f - cm.f) / (2 * h) - c0.fp) < 1e-7);
        CHECK(std::abs((cp.fp - cm.fp) / (2 * h) - c0.fpp) < 1e-6);
        CHECK(std::abs((cp.py - cm.py) / (2 * h) - c0.pyp) < 1e-6);
        CHECK(std::abs((cp.px - cm.px) / (2 * h) - c0.pxp) < 1e-6);
        CHECK(std::abs((cp.pyp - cm.pyp) / (2 * h) - c0.pypp) < 1e-5);
        CHECK(std::abs((cp.pxp - cm.pxp) / (2 * h) - c0.pxpp) < 1e-5);
    }
}

TEST_CASE("launch phase derivative equals channel momentum") {
    Profile prof(defaults());
    const double h = 1e-5;
    for (Cx y : {Cx(0.9, 0.0), Cx(0.9, 0.7), Cx(-0.4, 1.3), Cx(2.2, 0.5)}) {
        const Cx dw = (prof.launch_phase(y + h) - prof.launch_phase(y - h)) / (2 * h);
        const Cx dwi =
            (prof.launch_phase(y + Cx(0, h)) - prof.launch_phase(y - Cx(0, h))) / Cx(0, 2 * h);
        ChannelState cs = prof.state(y);
        CHECK(std::abs(dw - cs.py) < 2e-8);
        CHECK(std::abs(dwi - cs.py) < 2e-8);
    }
}
