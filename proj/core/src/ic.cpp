#include "chns/ic.hpp"

#include <cmath>

#include "chns/rng.hpp"

namespace chns {

IcSpec::Kind ic_kind_from_string(const std::string& s) {
    if (s == "uniform_noise") return IcSpec::Kind::uniform_noise;
    if (s == "tanh_stripe") return IcSpec::Kind::tanh_stripe;
    if (s == "tanh_disk") return IcSpec::Kind::tanh_disk;
    throw ValidationError("ic.kind", "unknown initial condition '" + s + "'");
}

IcSpec::VKind v_kind_from_string(const std::string& s) {
    if (s == "zero") return IcSpec::VKind::zero;
    if (s == "shear") return IcSpec::VKind::shear;
    if (s == "taylor_green") return IcSpec::VKind::taylor_green;
    throw ValidationError("ic.v_kind", "unknown velocity initial condition '" + s + "'");
}

ScalarField build_phi0(const Grid& g, const IcSpec& ic, const SimParams& p) {
    ScalarField phi(g);
    switch (ic.kind) {
        case IcSpec::Kind::uniform_noise: {
            SplitMix64 rng(ic.seed);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    phi(i, j) = ic.mean + ic.amplitude * rng.next_symmetric();
            const double correction = ic.mean - field_mean(phi);
            for (int k = 0; k < phi.size(); ++k) phi.data()[k] += correction;
            break;
        }
        case IcSpec::Kind::tanh_stripe: {
            const double w = std::sqrt(2.0 * p.kappa);
            for (int j = 0; j < g.ny; ++j) {
                const double d = g.ly / 4.0 - std::abs(g.yc(j) - g.ly / 2.0);
                const double val = ic.amplitude * std::tanh(d / w);
                for (int i = 0; i < g.nx; ++i) phi(i, j) = val;
            }
            break;
        }
        case IcSpec::Kind::tanh_disk: {
            const double w = std::sqrt(2.0 * p.kappa);
            const double r0 = std::min(g.lx, g.ly) / 4.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double dx = g.xc(i) - g.lx / 2.0;
                    const double dy = g.yc(j) - g.ly / 2.0;
                    const double r = std::sqrt(dx * dx + dy * dy);
                    phi(i, j) = ic.amplitude * std::tanh((r0 - r) / w);
                }
            break;
        }
    }
    return phi;
}

VectorField build_v0(const Grid& g, const IcSpec& ic) {
    VectorField v(g);
    switch (ic.v_kind) {
        case IcSpec::VKind::zero:
            break;
        case IcSpec::VKind::shear:
            for (int j = 0; j < g.ny; ++j) {
                const double val = std::sin(2.0 * M_PI * g.yc(j) / g.ly);
                for (int i = 0; i <= g.nx; ++i) v.u(i, j) = val;
            }
            break;
        case IcSpec::VKind::taylor_green:
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    v.u(i, j) = std::sin(2.0 * M_PI * g.xf(i) / g.lx) *
                                std::cos(2.0 * M_PI * g.yc(j) / g.ly);
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    v.v(i, j) = -std::cos(2.0 * M_PI * g.xc(i) / g.lx) *
                                std::sin(2.0 * M_PI * g.yf(j) / g.ly);
            break;
    }
    v.enforce_bc();
    return v;
}

ScalarField build_unit_noise(const Grid& g, std::uint64_t seed) {
    ScalarField eta(g);
    SplitMix64 rng(seed);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) eta(i, j) = rng.next_symmetric();
    const double m = field_mean(eta);
    for (int k = 0; k < eta.size(); ++k) eta.data()[k] -= m;
    const double n = std::sqrt(field_dot(eta, eta));
    for (int k = 0; k < eta.size(); ++k) eta.data()[k] /= n;
    return eta;
}

State build_initial_state(const Grid& g, const IcSpec& ic, const SimParams& p) {
    State s;
    s.phi = build_phi0(g, ic, p);
    s.v = build_v0(g, ic);
    if (ic.v_kind != IcSpec::VKind::zero) {
        SpectralHelmholtz poisson(g, 0.0, 1.0);
        project_divergence_free(s.v, poisson);
    }
    s.p = ScalarField(g);
    s.mu = init_mu0(s.phi, s.v, p);
    s.t = 0.0;
    return s;
}

} // namespace chns
