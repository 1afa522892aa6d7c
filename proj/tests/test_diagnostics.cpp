// Diagnostics checks: mass, budget residual at stationarity, the boundedness
// monitor (including NaN detection), and divergence_max.

#include <doctest.h>

#include <cmath>
#include <limits>

#include "chns/diagnostics.hpp"
#include "chns/ic.hpp"
#include "chns/stepper.hpp"
#include "test_support.hpp"

using namespace chns;
using namespace chns::test;

TEST_CASE("mass: zero, uniform, and conservation under advance") {
    Grid g(32, 32, 1.0, 1.0, BcMode::paper);
    CHECK(mass(ScalarField(g)) == 0.0);
    CHECK(mass(ScalarField(g, 0.3)) == doctest::Approx(0.3).epsilon(1e-13));

    SimParams p;
    IcSpec ic;
    ic.amplitude = 0.02;
    ic.seed = 9;
    State s = build_initial_state(g, ic, p);
    const double m0 = mass(s.phi);
    Stepper st(g, p);
    for (int n = 0; n < 10; ++n) st.advance(s);
    CHECK(std::abs(mass(s.phi) - m0) < 1e-11);
}

TEST_CASE("budget residual vanishes at stationarity") {
    Grid g(16, 16, 1.0, 1.0, BcMode::paper);
    SimParams p;
    State s;
    s.phi = ScalarField(g, 0.5);
    s.v = VectorField(g);
    s.p = ScalarField(g);
    s.mu = init_mu0(s.phi, s.v, p);
    Stepper st(g, p);
    State next = s;
    const DiagnosticsRecord rec = st.advance(next);
    CHECK(std::abs(rec.budget_residual) < 1e-12);
    CHECK(rec.dissipation < 1e-12);
}

TEST_CASE("energy is nonincreasing within the per-step budget residual") {
    Grid g(32, 32, 1.0, 1.0, BcMode::paper);
    SimParams p;
    IcSpec ic;
    ic.amplitude = 0.01;
    ic.seed = 31;
    State s = build_initial_state(g, ic, p);
    Stepper st(g, p);
    double e_prev = total_energy(s, p);
    for (int n = 0; n < 40; ++n) {
        const DiagnosticsRecord r = st.advance(s);
        CHECK(r.energy - e_prev <= std::abs(r.budget_residual) + 1e-15);
        e_prev = r.energy;
    }
}

TEST_CASE("apriori monitor: the zero stationary state keeps zero accumulators") {
    Grid g(16, 16, 1.0, 1.0, BcMode::paper);
    SimParams p; // u = -1: phi = 0 sits at the well top but is an exact fixed point
    State s;
    s.phi = ScalarField(g, 0.0);
    s.v = VectorField(g);
    s.p = ScalarField(g);
    s.mu = init_mu0(s.phi, s.v, p);
    Stepper st(g, p);
    AprioriMonitor monitor;
    for (int n = 0; n < 10; ++n) monitor.observe(st.advance(s));
    const MonitorVerdict v = monitor.verdict();
    CHECK(v.bounded);
    CHECK(v.final_acc.acc62 < 1e-15);
    CHECK(v.final_acc.acc63 < 1e-15);
    CHECK(v.final_acc.acc64 < 1e-15);
}

TEST_CASE("apriori monitor: nonzero stationary state has constant groups") {
    Grid g(16, 16, 1.0, 1.0, BcMode::paper);
    SimParams p;
    State s;
    s.phi = ScalarField(g, 0.25);
    s.v = VectorField(g);
    s.p = ScalarField(g);
    s.mu = init_mu0(s.phi, s.v, p);
    Stepper st(g, p);
    AprioriMonitor monitor;
    double g62_first = -1.0;
    for (int n = 0; n < 10; ++n) {
        const DiagnosticsRecord r = st.advance(s);
        monitor.observe(r);
        if (g62_first < 0.0) g62_first = r.group62;
        CHECK(r.group62 == doctest::Approx(g62_first).epsilon(1e-10));
    }
    CHECK(monitor.verdict().bounded);
}

TEST_CASE("apriori monitor: NaN flips the verdict with a timestamp") {
    AprioriMonitor monitor;
    DiagnosticsRecord ok;
    ok.t = 0.5;
    ok.mass = 1.0;
    monitor.observe(ok);
    DiagnosticsRecord bad;
    bad.t = 0.75;
    bad.energy = std::numeric_limits<double>::quiet_NaN();
    monitor.observe(bad);
    const MonitorVerdict v = monitor.verdict();
    CHECK_FALSE(v.bounded);
    CHECK(v.first_failure_t == 0.75);
    CHECK(v.reason == "non-finite diagnostic value");
}

TEST_CASE("apriori monitor: ceiling breach is reported") {
    AprioriMonitor monitor(10.0);
    DiagnosticsRecord r;
    r.t = 1.0;
    r.group62 = 11.0;
    monitor.observe(r);
    CHECK_FALSE(monitor.verdict().bounded);
}

TEST_CASE("divergence_max: zero, shear, and projection round trip") {
    Grid g(32, 32, 1.0, 1.0, BcMode::periodic);
    VectorField zero(g);
    CHECK(divergence_max(zero) == 0.0);

    // periodic shear is divergence-free to round-off
    VectorField shear(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            shear.u(i, j) = std::sin(2.0 * M_PI * g.yc(j));
    shear.enforce_bc();
    CHECK(divergence_max(shear) < 1e-13);

    // a gradient field has divergence before projection, none after
    const ScalarField f = random_scalar(g, 13);
    VectorField w = gradient(f);
    CHECK(divergence_max(w) > 1e-3);
    SpectralHelmholtz poisson(g, 0.0, 1.0);
    project_divergence_free(w, poisson);
    CHECK(divergence_max(w) < 1e-10);
}
