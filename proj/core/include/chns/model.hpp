#pragma once

/// Constitutive physics of the binary-mixture model: double-well potential
/// with a velocity-dependent local chemical potential, capillary and
/// constitutive body forces, the Lyapunov energy functional, dissipation
/// functionals, and the pointwise thermodynamic-consistency residual.
///
/// The free energy density is psi = kappa/2 |grad phi|^2 + u G(phi) + H(phi)
/// with G = phi^2/2, H = phi^4/4; the chemical potential picks up the
/// velocity coupling lambda |v|^2 phi and the rate term beta phi_dot. The
/// mixture density is fixed at 1 throughout.

#include <array>
#include <cmath>
#include <string>

#include "chns/grid.hpp"
#include "chns/linsolve.hpp"

namespace chns {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Analytic body force f(x, y, t). Restricted to closed-form families so runs
/// stay reproducible from the config text alone.
struct ForceSpec {
    enum class Kind { zero, constant, trig } kind = Kind::zero;
    double fx = 0.0, fy = 0.0;          // constant
    double amplitude = 0.0;             // trig
    double kx = 1.0, ky = 1.0;          // trig mode numbers
    double omega = 0.0;                 // trig angular frequency

    Vec2 eval(double x, double y, double t, double lx, double ly) const {
        switch (kind) {
            case Kind::zero: return {0.0, 0.0};
            case Kind::constant: return {fx, fy};
            case Kind::trig: {
                const double cx = 2.0 * M_PI * kx / lx;
                const double cy = 2.0 * M_PI * ky / ly;
                const double ct = std::cos(omega * t);
                return {amplitude * std::sin(cx * x) * std::cos(cy * y) * ct,
                        -amplitude * std::cos(cx * x) * std::sin(cy * y) * ct};
            }
        }
        return {0.0, 0.0};
    }
    bool is_zero() const { return kind == Kind::zero || (kind == Kind::constant && fx == 0.0 && fy == 0.0) || (kind == Kind::trig && amplitude == 0.0); }
};

/// All physical and numerical constants of a run. rho is fixed at 1 and not a
/// runtime parameter.
struct SimParams {
    double kappa = 2.5e-3; // gradient-energy coefficient, > 0
    double beta = 0.1;     // viscous Cahn-Hilliard coefficient, > 0
    double gamma = 1.0;    // mobility, > 0
    double nu = 0.1;       // shear viscosity, > 0
    double lambda = 0.05;  // velocity-coupling coefficient, >= 0
    double u = -1.0;       // reduced temperature, >= -1
    double epsilon = 0.0;  // mu_t regularization, in [0, 1)
    double dt = 1e-3;
    double stab_s = 0.0;   // stabilization override; used when stab_auto = false
    bool stab_auto = true; // S = 2 max(1, max|3 phi^2 + u|) recomputed each step
    ForceSpec force;
    SolverConfig solver;

    static constexpr double rho = 1.0;

    /// Throws ValidationError on any violated constraint.
    void validate() const;
};

/// One pointwise sample of the process variables entering the dissipation
/// inequality. d_tilde is the traceless symmetric velocity gradient,
/// stored as (d11, d12) with d22 = -d11.
struct ProcessSample {
    double phi = 0.0;
    double phi_dot = 0.0;
    Vec2 v;
    Vec2 h;       // grad phi
    double d11 = 0.0, d12 = 0.0;
    Vec2 grad_mu;
};

struct ThermoResidual {
    double cancel_residual = 0.0;    // must vanish to round-off
    double entropy_production = 0.0; // must be >= 0
    double scale = 0.0;              // magnitude used for relative comparison
};

/// Forward declaration (full definition in stepper.hpp).
struct State;

// ---------------------------------------------------------------------------
// Pointwise constitutive laws
// ---------------------------------------------------------------------------

/// psi_phi of the local free energy: u phi + phi^3.
inline double local_energy_derivative(double phi, double u) {
    return phi * phi * phi + u * phi;
}

/// Local chemical potential mu_loc(phi, v) = phi^3 + u phi + lambda |v|^2 phi.
double local_potential(double phi, Vec2 v, const SimParams& p);

/// Constitutive body force d = lambda v phi phi_dot.
Vec2 constitutive_force_point(double phi, double phi_dot, Vec2 v, const SimParams& p);

ThermoResidual thermo_consistency_residual(const ProcessSample& s, const SimParams& p);

// ---------------------------------------------------------------------------
// Field-level operations
// ---------------------------------------------------------------------------

/// mu_loc evaluated at cell centers; |v|^2 interpolated as the average of
/// squared face values (the adjoint of face-averaging).
ScalarField local_potential_field(const ScalarField& phi, const VectorField& v,
                                  const SimParams& p);

/// mu = -kappa lap(phi) + mu_loc(phi, v) + beta phi_dot.
ScalarField chemical_potential(const ScalarField& phi, const ScalarField& phi_dot,
                               const VectorField& v, const SimParams& p);

/// Face-centered capillary force -kappa lap(phi) grad(phi); differs from
/// -kappa div(grad phi x grad phi) by a pure gradient that the projection
/// absorbs. mu is part of the interface contract but unused by this form.
VectorField capillary_force(const ScalarField& phi, const ScalarField& mu,
                            const SimParams& p);

/// Face-centered constitutive force lambda phi phi_dot v, the scalar factor
/// averaged from centers to faces.
VectorField constitutive_force(const ScalarField& phi, const ScalarField& phi_dot,
                               const VectorField& v, const SimParams& p);

/// The Lyapunov functional
///   E = 1/2 [ kappa |grad phi|^2 + |v|^2 + eps |mu|^2 + 1/2 |phi^2 + u|^2 ],
/// with the eps term present iff eps > 0.
double total_energy(const State& s, const SimParams& p);

/// beta |phi_dot_material|^2 + nu |grad v|^2 + gamma |grad mu|^2, all discrete
/// functionals chosen as the exact SBP counterparts of the stepper operators.
double dissipation_rate(const State& s, const ScalarField& phi_dot_material,
                        const SimParams& p);

} // namespace chns
