// Constitutive-law checks: pointwise potential values, chemical potential vs
// an independently coded stencil, the capillary weak-form identity, energy
// and dissipation functionals, and thermodynamic cancellation.

#include <doctest.h>

#include <cmath>

#include "chns/model.hpp"
#include "chns/rng.hpp"
#include "chns/stepper.hpp"
#include "test_support.hpp"

using namespace chns;
using namespace chns::test;

TEST_CASE("local potential values") {
    SimParams p;
    p.u = -1.0;
    p.lambda = 0.1;
    CHECK(local_potential(0.0, {0.3, -2.0}, p) == 0.0);
    CHECK(local_potential(1.0, {0.0, 0.0}, p) == doctest::Approx(0.0).epsilon(1e-15));
    // 0.5^3 + (-0.5)(0.5) + 0.1 * 1 * 0.5 = 0.125 - 0.25 + 0.05
    p.u = -0.5;
    CHECK(local_potential(0.5, {1.0, 0.0}, p) == doctest::Approx(-0.075).epsilon(1e-14));
}

TEST_CASE("potential is the derivative of the scalar energy density") {
    SimParams p;
    p.u = -0.7;
    SplitMix64 rng(17);
    auto well = [&](double phi) {
        return p.u * 0.5 * phi * phi + 0.25 * phi * phi * phi * phi;
    };
    for (int k = 0; k < 100; ++k) {
        const double phi = 2.0 * rng.next_symmetric();
        const double h = 1e-5;
        const double fd = (well(phi + h) - well(phi - h)) / (2.0 * h);
        CHECK(local_potential(phi, {0.0, 0.0}, p) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("chemical potential: uniform and zero fields") {
    Grid g(16, 16, 1.0, 1.0, BcMode::paper);
    SimParams p;
    p.u = -0.3;

    ScalarField phi(g, 0.6), zero(g);
    VectorField v(g);
    const ScalarField mu = chemical_potential(phi, zero, v, p);
    const double expected = 0.6 * 0.6 * 0.6 + p.u * 0.6;
    for (int k = 0; k < mu.size(); ++k)
        CHECK(mu.data()[k] == doctest::Approx(expected).epsilon(1e-14));

    const ScalarField mu0 = chemical_potential(zero, zero, v, p);
    CHECK(linf(mu0) == 0.0);
}

TEST_CASE("chemical potential: tanh stripe vs independent stencil oracle") {
    Grid g(32, 32, 1.0, 1.0, BcMode::paper);
    SimParams p;
    p.kappa = 4e-3;
    p.u = -1.0;
    ScalarField phi(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            phi(i, j) = std::tanh((g.yc(j) - 0.5) / std::sqrt(2.0 * p.kappa));
    ScalarField zero(g);
    VectorField v(g);
    const ScalarField mu = chemical_potential(phi, zero, v, p);

    // separately coded 5-point stencil with mirror ghosts
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            auto at = [&](int ii, int jj) {
                ii = std::min(std::max(ii, 0), g.nx - 1);
                jj = std::min(std::max(jj, 0), g.ny - 1);
                return phi(ii, jj);
            };
            const double lap =
                (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j)) / (g.dx() * g.dx()) +
                (at(i, j - 1) - 2.0 * at(i, j) + at(i, j + 1)) / (g.dy() * g.dy());
            const double expect = -p.kappa * lap + std::pow(phi(i, j), 3) + p.u * phi(i, j);
            CHECK(mu(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("capillary force: uniform and linear-ramp fields give zero") {
    Grid g(24, 24, 1.0, 1.0, BcMode::periodic);
    SimParams p;
    ScalarField uni(g, 0.4);
    ScalarField mu(g);
    CHECK(linf(capillary_force(uni, mu, p)) == 0.0);

    Grid gp(24, 24, 1.0, 1.0, BcMode::paper);
    ScalarField ramp(gp);
    for (int j = 0; j < gp.ny; ++j)
        for (int i = 0; i < gp.nx; ++i) ramp(i, j) = 0.7 * gp.xc(i);
    const VectorField f = capillary_force(ramp, ScalarField(gp), p);
    // interior: lap(ramp) = 0 exactly on the centered stencil
    for (int j = 0; j < gp.ny; ++j)
        for (int i = 2; i < gp.nx - 1; ++i)
            CHECK(std::abs(f.u(i, j)) < 1e-13);
}

TEST_CASE("capillary weak form: <force, w> = -kappa <w . grad phi, lap phi>") {
    for (BcMode bc : {BcMode::paper, BcMode::periodic}) {
        Grid g(20, 20, 1.0, 1.0, bc);
        SimParams p;
        p.kappa = 3e-3;
        for (int trial = 0; trial < 20; ++trial) {
            const ScalarField phi = random_scalar(g, 100 + trial);
            const VectorField w = random_solenoidal(g, 200 + trial);
            const VectorField force = capillary_force(phi, ScalarField(g), p);
            const double lhs = field_dot(force, w);
            const double rhs = -p.kappa * field_dot(advect(w, phi), laplacian(phi));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        }
    }
}

TEST_CASE("constitutive force values") {
    Grid g(8, 8, 1.0, 1.0, BcMode::periodic);
    SimParams p;
    p.lambda = 0.0;
    ScalarField phi(g, 1.0), phidot(g, 2.0);
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.u(i, j) = 0.5;
    v.enforce_bc();
    CHECK(linf(constitutive_force(phi, phidot, v, p)) == 0.0);

    p.lambda = 0.1;
    ScalarField zerodot(g);
    CHECK(linf(constitutive_force(phi, zerodot, v, p)) == 0.0);

    const VectorField f = constitutive_force(phi, phidot, v, p);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            CHECK(f.u(i, j) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(linf(divergence(f)) < 1e-12); // uniform force
}

TEST_CASE("total energy values") {
    Grid g(32, 32, 1.0, 1.0, BcMode::paper);
    SimParams p;

    State s;
    s.phi = ScalarField(g, 0.0);
    s.v = VectorField(g);
    s.p = ScalarField(g);
    s.mu = ScalarField(g);

    p.u = -1.0;
    CHECK(total_energy(s, p) == doctest::Approx(0.25).epsilon(1e-13));

    s.phi = ScalarField(g, 1.0);
    CHECK(total_energy(s, p) == doctest::Approx(0.0).epsilon(1e-13));

    // phi = 0, v = (1, 0), u = 0 on a periodic unit square
    Grid gp(32, 32, 1.0, 1.0, BcMode::periodic);
    State sp;
    sp.phi = ScalarField(gp, 0.0);
    sp.v = VectorField(gp);
    for (int j = 0; j < gp.ny; ++j)
        for (int i = 0; i <= gp.nx; ++i) sp.v.u(i, j) = 1.0;
    sp.v.enforce_bc();
    sp.p = ScalarField(gp);
    sp.mu = ScalarField(gp);
    SimParams p0;
    p0.u = 0.0;
    CHECK(total_energy(sp, p0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("energy equals uG + H form plus the u^2 |Omega| / 4 offset") {
    Grid g(24, 24, 1.0, 1.0, BcMode::paper);
    SimParams p;
    p.u = -0.8;
    p.epsilon = 0.2;

    State s;
    s.phi = random_scalar(g, 55, 0.9);
    s.v = random_vector(g, 56, 0.3);
    s.p = ScalarField(g);
    s.mu = random_scalar(g, 57, 0.5);

    double alt = 0.5 * p.kappa * grad_norm_sq(s.phi) + 0.5 * field_dot(s.v, s.v) +
                 0.5 * p.epsilon * field_dot(s.mu, s.mu);
    for (int k = 0; k < s.phi.size(); ++k) {
        const double f = s.phi.data()[k];
        alt += (p.u * 0.5 * f * f + 0.25 * f * f * f * f) * g.cell_area();
    }
    const double offset = 0.25 * p.u * p.u * g.area();
    CHECK(total_energy(s, p) == doctest::Approx(alt + offset).epsilon(1e-12));
}

TEST_CASE("dissipation rate: stationary zero, nonnegative, uniform value") {
    Grid g(16, 16, 1.0, 1.0, BcMode::paper);
    SimParams p;
    p.beta = 0.37;

    State s;
    s.phi = ScalarField(g, 0.2);
    s.v = VectorField(g);
    s.p = ScalarField(g);
    s.mu = ScalarField(g, 1.3);

    ScalarField zero(g);
    CHECK(dissipation_rate(s, zero, p) == 0.0);

    ScalarField one(g, 1.0);
    CHECK(dissipation_rate(s, one, p) == doctest::Approx(p.beta).epsilon(1e-13));

    s.v = random_vector(g, 77, 0.5);
    s.mu = random_scalar(g, 78);
    const ScalarField pd = random_scalar(g, 79);
    CHECK(dissipation_rate(s, pd, p) >= 0.0);
}

TEST_CASE("thermo consistency: exact cancellation and nonnegative production") {
    SimParams p;
    p.lambda = 0.25;
    p.u = -0.4;

    ProcessSample quiet;
    const ThermoResidual r0 = thermo_consistency_residual(quiet, p);
    CHECK(r0.cancel_residual == 0.0);
    CHECK(r0.entropy_production == 0.0);

    SplitMix64 rng(2024);
    double worst = 0.0, min_entropy = 1.0;
    for (int k = 0; k < 10000; ++k) {
        ProcessSample s;
        s.phi = 2.0 * rng.next_symmetric();
        s.phi_dot = 2.0 * rng.next_symmetric();
        s.v = {2.0 * rng.next_symmetric(), 2.0 * rng.next_symmetric()};
        s.h = {rng.next_symmetric(), rng.next_symmetric()};
        s.d11 = rng.next_symmetric();
        s.d12 = rng.next_symmetric();
        s.grad_mu = {rng.next_symmetric(), rng.next_symmetric()};
        const ThermoResidual r = thermo_consistency_residual(s, p);
        worst = std::max(worst, std::abs(r.cancel_residual) / std::max(r.scale, 1e-30));
        min_entropy = std::min(min_entropy, r.entropy_production);
    }
    CHECK(worst <= 1e-13);
    CHECK(min_entropy >= 0.0);
}

TEST_CASE("sim params validation") {
    SimParams p;
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = SimParams{};
    p.u = -1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = SimParams{};
    p.epsilon = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = SimParams{};
    CHECK_NOTHROW(p.validate());
}
