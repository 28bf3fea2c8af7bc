#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwire/trajectory.hpp"

using namespace qwire;

namespace {

ModelParams defaults() { return ModelParams{}; }

ModelParams no_impurity() {
    ModelParams p;
    p.impurity_amp = 0.0;
    return p;
}

// deterministic low-discrepancy stream for sampling test points
double halton(int i, int b) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= b;
        r += f * (i % b);
        i /= b;
    }
    return r;
}

}  // namespace

TEST_CASE("flow at t = 0 reproduces the launch data") {
    Profile prof(defaults());
    Flow flow(prof);
    LaunchState ls = flow.launch(Cx(0.8, 0.0));
    TrajectoryPoint p = flow.at(ls, 0.0);
    CHECK(std::abs(p.x) == 0.0);
    CHECK(std::abs(p.y - ls.y0) == 0.0);
    CHECK(std::abs(p.px - ls.px0) == 0.0);
    CHECK(std::abs(p.action) == 0.0);
}

TEST_CASE("barrier potential") {
    Profile prof(defaults());
    Flow flow(prof);
    CHECK(flow.barrier_potential(0.0) == 0.0);
    CHECK(flow.barrier_potential(2.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS((void)flow.barrier_potential(-0.1), std::domain_error);
    // classical exit point: V(D0/eps) = -D0 = E at eta = 0
    ModelParams p0 = no_impurity();
    p0.transverse_fraction = 0.0;
    Profile prof0(p0);
    Flow flow0(prof0);
    const double xe = p0.depth0 / p0.field;
    CHECK(flow0.barrier_potential(xe) == doctest::Approx(p0.total_energy()));
    LaunchState ls = flow0.launch(0.0);
    TrajectoryPoint ex = flow0.exit_point(ls);
    CHECK(std::abs(ex.x - xe) < 1e-14);
}

TEST_CASE("exit point, beta = 0 defaults") {
    Profile prof((no_impurity()));
    Flow flow(prof);
    LaunchState ls = flow.launch(Cx(0.3, 0.0));
    TrajectoryPoint ex = flow.exit_point(ls);
    CHECK(std::abs(ex.t - Cx(0.0, -std::sqrt(2.0) / 0.5)) < 1e-14);
    CHECK(std::abs(ex.x - 2.0) < 1e-14);
    CHECK(std::abs(ex.px) < 1e-14);
    // y_exit has imaginary part -v_Y hbar kappa / eps
    const double vy = std::sqrt(0.4);
    CHECK(ex.y.imag() == doctest::Approx(-vy * std::sqrt(2.0) / 0.5).epsilon(1e-13));

    // doubling the field halves the exit distance
    ModelParams p2 = no_impurity();
    p2.field = 1.0;
    Profile prof2(p2);
    Flow flow2(prof2);
    CHECK(std::abs(flow2.exit_point(flow2.launch(0.3)).x - 1.0) < 1e-14);

    // eta = 0: no transverse drift
    ModelParams p0 = no_impurity();
    p0.transverse_fraction = 0.0;
    Profile prof0(p0);
    Flow flow0(prof0);
    LaunchState ls0 = flow0.launch(Cx(1.4, 0.0));
    CHECK(std::abs(flow0.exit_point(ls0).y - ls0.y0) < 1e-14);
}

TEST_CASE("real-time continuation past the exit recovers the reflection parabola") {
    Profile prof((no_impurity()));
    Flow flow(prof);
    const ModelParams& p = prof.params();
    LaunchState ls = flow.launch(Cx(-0.9, 0.0));
    TrajectoryPoint ex = flow.exit_point(ls);
    const double vy = ls.py0.real() / p.mass;
    const double curv = p.field / (2.0 * p.mass * vy * vy);
    for (int k = 1; k <= 100; ++k) {
        const double dt = 0.07 * k;
        TrajectoryPoint q = flow.at(ls, ex.t + dt);
        CHECK(std::abs(q.y.imag() - ex.y.imag()) < 1e-13);
        const double dy = q.y.real() - ex.y.real();
        CHECK(std::abs(q.x.real() - (ex.x.real() + curv * dy * dy)) < 1e-12 * (1.0 + q.x.real()));
        CHECK(std::abs(q.x.imag()) < 1e-12);
    }
}

TEST_CASE("action along the under-barrier segment") {
    ModelParams p0 = no_impurity();
    p0.transverse_fraction = 0.0;
    Profile prof(p0);
    Flow flow(prof);
    LaunchState ls = flow.launch(0.0);
    const double tau_exit = std::sqrt(2.0) / p0.field;

    CHECK(std::abs(flow.action(ls, 0.0)) == 0.0);

    double prev = 0.0;
    for (double s = 0.05; s <= 1.0; s += 0.05) {
        const Cx w = flow.action(ls, Cx(0.0, -s * tau_exit));
        CHECK(std::abs(w.real()) < 1e-14);
        CHECK(w.imag() > prev);
        prev = w.imag();
    }
    // Im W at the exit equals the 1D WKB half-exponent 2 sqrt(2m) D0^1.5 / (3 eps)
    const double whalf = 2.0 * std::sqrt(2.0) / (3.0 * p0.field);
    CHECK(flow.action(ls, Cx(0.0, -tau_exit)).imag() == doctest::Approx(whalf).epsilon(1e-13));
}

TEST_CASE("action composes along the path and matches quadrature") {
    Profile prof(defaults());
    Flow flow(prof);
    LaunchState ls = flow.launch(Cx(0.4, 0.9));
    const Cx t1(0.6, -1.1), t2(1.9, -2.4);
    // independent check: 64-panel Gauss quadrature of p . qdot between t1 and t2
    Cx acc = 0.0;
    const int n = 64;
    static const double gx[4] = {0.069431844202973712, 0.33000947820757187, 0.66999052179242813,
                                 0.93056815579702629};
    static const double gw[4] = {0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                 0.17392742256872693};
    const Cx dt = (t2 - t1) / double(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 4; ++k) {
            const Cx t = t1 + (double(i) + gx[k]) * dt;
            const Cx px = ls.px0 + prof.params().field * t;
            const Cx integ = (px * px + ls.py0 * ls.py0) / prof.params().mass;
            acc += gw[k] * integ * dt;
        }
    }
    const Cx composed = flow.action(ls, t2) - flow.action(ls, t1);
    CHECK(std::abs(composed - acc) < 1e-12 * (1.0 + std::abs(acc)));
}

TEST_CASE("energy is conserved to 1e-12 at arbitrary complex times") {
    Profile prof(defaults());
    Flow flow(prof);
    const double E = prof.params().total_energy();
    for (int i = 1; i <= 200; ++i) {
        const Cx y0(4.0 * halton(i, 2) - 2.0, 2.5 * halton(i, 3) - 0.5);
        const Cx t(6.0 * halton(i, 5) - 3.0, -4.0 * halton(i, 7) + 0.5);
        LaunchState ls = flow.launch(y0);
        TrajectoryPoint q = flow.at(ls, t);
        const Cx h = (q.px * q.px + q.py * q.py) / (2.0 * prof.params().mass) -
                     prof.params().field * q.x;
        CHECK(std::abs(h - E) < 1e-12 * (1.0 + std::abs(E)));
    }
}

TEST_CASE("time reversal returns the launch state") {
    Profile prof(defaults());
    Flow flow(prof);
    const ModelParams& p = prof.params();
    LaunchState ls = flow.launch(Cx(0.7, 0.4));
    const Cx t(1.3, -0.8);
    TrajectoryPoint q = flow.at(ls, t);
    // continue from q for time -t with the closed form
    const Cx xb = q.x + q.px * (-t) / p.mass + p.field * t * t / (2.0 * p.mass);
    const Cx yb = q.y + q.py * (-t) / p.mass;
    CHECK(std::abs(xb) < 1e-14);
    CHECK(std::abs(yb - ls.y0) < 1e-14);
}

TEST_CASE("launch-surface Jacobian is never singular at t = 0") {
    Profile prof(defaults());
    Flow flow(prof);
    EndpointJet j = flow.endpoint(Cx(0.6, 0.0), Cx(0.0, 0.0));
    CHECK(std::abs(j.dx_dy0) == 0.0);
    CHECK(std::abs(j.dy_dy0 - 1.0) == 0.0);
    const Cx expected = -flow.launch(Cx(0.6, 0.0)).px0 / prof.params().mass;
    CHECK(std::abs(j.det - expected) < 1e-15);
    CHECK(std::abs(j.det) > 0.5);
}

TEST_CASE("beta = 0 Jacobian has no zeros off the turning time") {
    Profile prof((no_impurity()));
    Flow flow(prof);
    LaunchState ls = flow.launch(Cx(1.0, 0.5));
    for (int i = 1; i <= 50; ++i) {
        const Cx t(3.0 * halton(i, 2), -3.0 * halton(i, 3));
        EndpointJet j = flow.endpoint(ls, t);
        CHECK(std::abs(j.dx_dy0) < 1e-15);              // dpx0/dy0 = 0 without impurity
        const Cx px = ls.px0 + prof.params().field * t;
        CHECK(std::abs(j.det + px / prof.params().mass) < 1e-14);
    }
}

TEST_CASE("analytic endpoint Jacobian matches central differences") {
    Profile prof(defaults());
    Flow flow(prof);
    const double h = 1e-6;
    int checked = 0;
    for (int i = 1; i <= 1000; ++i) {
        const Cx y0(5.0 * halton(i, 2) - 2.5, 2.8 * halton(i, 3) - 0.4);
        const Cx t(4.0 * halton(i, 5) - 1.0, -3.5 * halton(i, 7) + 0.3);
        EndpointJet j = flow.endpoint(y0, t);

        EndpointJet jyp = flow.endpoint(y0 + h, t);
        EndpointJet jym = flow.endpoint(y0 - h, t);
        EndpointJet jtp = flow.endpoint(y0, t + h);
        EndpointJet jtm = flow.endpoint(y0, t - h);

        const double scale = 1.0 + std::abs(j.dx_dy0) + std::abs(j.dy_dy0);
        CHECK(std::abs((jyp.x - jym.x) / (2 * h) - j.dx_dy0) < 1e-8 * scale);
        CHECK(std::abs((jyp.y - jym.y) / (2 * h) - j.dy_dy0) < 1e-8 * scale);
        CHECK(std::abs((jtp.x - jtm.x) / (2 * h) - j.dx_dt) < 1e-8 * (1.0 + std::abs(j.dx_dt)));
        CHECK(std::abs((jtp.y - jtm.y) / (2 * h) - j.dy_dt) < 1e-8 * (1.0 + std::abs(j.dy_dt)));

        // derivative of det J, used by the caustic search
        CHECK(std::abs((jyp.det - jym.det) / (2 * h) - j.ddet_dy0) <
              1e-6 * (1.0 + std::abs(j.ddet_dy0)));
        CHECK(std::abs((jtp.det - jtm.det) / (2 * h) - j.ddet_dt) <
              1e-6 * (1.0 + std::abs(j.ddet_dt)));
        ++checked;
    }
    CHECK(checked == 1000);
}
