#include "chns/model.hpp"

#include "chns/stepper.hpp"

namespace chns {

void SimParams::validate() const {
    if (!(kappa > 0.0)) throw ValidationError("phys.kappa", "must be > 0");
    if (!(beta > 0.0)) throw ValidationError("phys.beta", "must be > 0");
    if (!(gamma > 0.0)) throw ValidationError("phys.gamma", "must be > 0");
    if (!(nu > 0.0)) throw ValidationError("phys.nu", "must be > 0");
    if (!(lambda >= 0.0)) throw ValidationError("phys.lambda", "must be >= 0");
    if (!(u >= -1.0)) throw ValidationError("phys.u", "must be >= -1");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw ValidationError("phys.epsilon", "must lie in [0, 1)");
    if (!(dt > 0.0)) throw ValidationError("time.dt", "must be > 0");
    if (!stab_auto && !(stab_s >= 0.0))
        throw ValidationError("phys.stab_S", "must be >= 0");
}

double local_potential(double phi, Vec2 v, const SimParams& p) {
    const double vsq = v.x * v.x + v.y * v.y;
    return phi * phi * phi + p.u * phi + p.lambda * vsq * phi;
}

Vec2 constitutive_force_point(double phi, double phi_dot, Vec2 v, const SimParams& p) {
    const double c = p.lambda * phi * phi_dot;
    return {c * v.x, c * v.y};
}

ThermoResidual thermo_consistency_residual(const ProcessSample& s, const SimParams& p) {
    ThermoResidual r;
    const double psi_phi = local_energy_derivative(s.phi, p.u);
    const double mu_loc = local_potential(s.phi, s.v, p);
    const Vec2 d = constitutive_force_point(s.phi, s.phi_dot, s.v, p);
    // the lambda terms cancel algebraically; anything left is round-off
    const double t1 = (psi_phi - mu_loc) * s.phi_dot;
    const double t2 = d.x * s.v.x + d.y * s.v.y;
    r.cancel_residual = t1 + t2;
    r.scale = std::abs(t1) + std::abs(t2) + std::abs(psi_phi * s.phi_dot);

    const double dsq = 2.0 * (s.d11 * s.d11 + s.d12 * s.d12); // |D~|^2, traceless
    const double gmu = s.grad_mu.x * s.grad_mu.x + s.grad_mu.y * s.grad_mu.y;
    r.entropy_production = p.beta * s.phi_dot * s.phi_dot + 2.0 * p.nu * dsq + p.gamma * gmu;
    return r;
}

ScalarField local_potential_field(const ScalarField& phi, const VectorField& v,
                                  const SimParams& p) {
    const Grid& g = phi.grid();
    const ScalarField vsq = center_speed_squared(v);
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double f = phi(i, j);
            out(i, j) = f * f * f + p.u * f + p.lambda * vsq(i, j) * f;
        }
    return out;
}

ScalarField chemical_potential(const ScalarField& phi, const ScalarField& phi_dot,
                               const VectorField& v, const SimParams& p) {
    const Grid& g = phi.grid();
    ScalarField mu = local_potential_field(phi, v, p);
    ScalarField lap(g);
    laplacian_into(phi, lap);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            mu(i, j) += -p.kappa * lap(i, j) + p.beta * phi_dot(i, j);
    return mu;
}

VectorField capillary_force(const ScalarField& phi, const ScalarField& mu,
                            const SimParams& p) {
    (void)mu;
    const Grid& g = phi.grid();
    const int nx = g.nx, ny = g.ny;
    ScalarField lap(g);
    laplacian_into(phi, lap);
    const VectorField dphi = gradient(phi);
    VectorField out(g);
    const bool wrap = g.bc == BcMode::periodic;

    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            out.u(i, j) = -p.kappa * 0.5 * (lap(i - 1, j) + lap(i, j)) * dphi.u(i, j);
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.v(i, j) = -p.kappa * 0.5 * (lap(i, j - 1) + lap(i, j)) * dphi.v(i, j);
    if (wrap) {
        for (int j = 0; j < ny; ++j)
            out.u(0, j) = -p.kappa * 0.5 * (lap(nx - 1, j) + lap(0, j)) * dphi.u(0, j);
        for (int i = 0; i < nx; ++i)
            out.v(i, 0) = -p.kappa * 0.5 * (lap(i, ny - 1) + lap(i, 0)) * dphi.v(i, 0);
    }
    // paper mode: boundary faces carry zero normal gradient, so zero force
    out.enforce_bc();
    return out;
}

VectorField constitutive_force(const ScalarField& phi, const ScalarField& phi_dot,
                               const VectorField& v, const SimParams& p) {
    const Grid& g = phi.grid();
    const int nx = g.nx, ny = g.ny;
    VectorField out(g);
    if (p.lambda == 0.0) return out;
    const bool wrap = g.bc == BcMode::periodic;

    auto s = [&](int i, int j) { return phi(i, j) * phi_dot(i, j); };

    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            out.u(i, j) = p.lambda * 0.5 * (s(i - 1, j) + s(i, j)) * v.u(i, j);
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.v(i, j) = p.lambda * 0.5 * (s(i, j - 1) + s(i, j)) * v.v(i, j);
    if (wrap) {
        for (int j = 0; j < ny; ++j)
            out.u(0, j) = p.lambda * 0.5 * (s(nx - 1, j) + s(0, j)) * v.u(0, j);
        for (int i = 0; i < nx; ++i)
            out.v(i, 0) = p.lambda * 0.5 * (s(i, ny - 1) + s(i, 0)) * v.v(i, 0);
    }
    out.enforce_bc();
    return out;
}

double total_energy(const State& s, const SimParams& p) {
    const Grid& g = s.phi.grid();
    double e = 0.5 * p.kappa * grad_norm_sq(s.phi) + 0.5 * field_dot(s.v, s.v);
    if (p.epsilon > 0.0) e += 0.5 * p.epsilon * field_dot(s.mu, s.mu);
    double well = 0.0;
    const double* f = s.phi.data();
    for (int k = 0; k < s.phi.size(); ++k) {
        const double w = f[k] * f[k] + p.u;
        well += w * w;
    }
    e += 0.25 * well * g.cell_area();
    return e;
}

double dissipation_rate(const State& s, const ScalarField& phi_dot_material,
                        const SimParams& p) {
    const double d_phi = field_dot(phi_dot_material, phi_dot_material);
    const double d_visc = grad_norm_sq(s.v);
    const double d_mu = grad_norm_sq(s.mu);
    return p.beta * d_phi + p.nu * d_visc + p.gamma * d_mu;
}

} // namespace chns
