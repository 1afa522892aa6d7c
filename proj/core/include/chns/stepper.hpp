#pragma once

/// Time integration of the coupled system, unified over eps >= 0:
///
///   (beta/dt + S) phi' - kappa lap phi' - mu'      = (beta/dt + S) phi
///                                                    - beta advect(v, phi)
///                                                    - mu_loc(phi, v)
///   (eps/dt) mu' - gamma lap mu' + (1/dt) phi'     = (eps/dt) mu + (1/dt) phi
///                                                    - advect(v, phi)
///
/// solved per step through the Schur complement (mu' eliminated with one
/// Helmholtz solve per outer-CG matvec), followed by a momentum predictor
/// ((1/dt) I - nu lap, componentwise CG) and a pressure projection. The
/// eps = 0 Neumann singularity of the inner operator is handled by mean-zero
/// inner solves plus an exact mean-recovery for mu from the phi equation.
///
/// One Stepper drives one simulation; distinct simulations share nothing.

#include <functional>
#include <memory>
#include <utility>

#include "chns/diagnostics.hpp"
#include "chns/grid.hpp"
#include "chns/linsolve.hpp"
#include "chns/model.hpp"

namespace chns {

/// The unknowns advanced in time. v is discretely divergence-free and p is
/// mean-zero after every accepted step.
struct State {
    ScalarField phi;
    VectorField v;
    ScalarField p;
    ScalarField mu;
    double t = 0.0;
};

/// Per-step byproducts: the material derivative used by the forces and the
/// budget, solver work counts, and the external-force power.
struct StepReport {
    ScalarField phi_dot_material; // (phi' - phi)/dt + advect(v, phi)
    int outer_iterations = 0;
    int inner_solves = 0;
    int momentum_iterations = 0;
    int pressure_solves = 0;
    double force_power = 0.0; // <f, v_new>
    double stabilization = 0.0;
};

/// Optional extra sources (manufactured-solution runs): called once per step
/// at t^{n+1} with zeroed fields to fill.
using SourceHook =
    std::function<void(double t_new, ScalarField& src_phi, ScalarField& src_mu,
                       VectorField& src_v)>;

/// mu0 from the Helmholtz problem
///   -beta gamma lap mu0 + mu0 = -kappa lap phi0 + mu_loc(phi0, v0).
/// Required initial datum for eps > 0; reported as a consistency diagnostic
/// for eps = 0.
ScalarField init_mu0(const ScalarField& phi0, const VectorField& v0,
                     const SimParams& p);

class Stepper {
public:
    Stepper(const Grid& g, const SimParams& p);

    const Grid& grid() const { return grid_; }
    const SimParams& params() const { return params_; }
    const AprioriAccumulators& accumulators() const { return acc_; }

    void set_source_hook(SourceHook hook) { source_ = std::move(hook); }

    /// Coupled phi-mu solve. Throws NonConvergence / BlowUp.
    std::pair<ScalarField, ScalarField> step_phi_mu(const State& s, StepReport& rep);

    /// Momentum predictor + projection, using the fields produced by
    /// step_phi_mu earlier in the same step.
    std::pair<VectorField, ScalarField> step_momentum(const State& s,
                                                      const ScalarField& phi_new,
                                                      const ScalarField& mu_new,
                                                      StepReport& rep);

    /// One full step: CFL check, step_phi_mu, step_momentum, state swap,
    /// diagnostics record. Mutates s in place.
    DiagnosticsRecord advance(State& s);

private:
    Grid grid_;
    SimParams params_;
    SpectralHelmholtz inner_;    // ((eps/dt) I - gamma lap)^{-1}
    SpectralHelmholtz pressure_; // (-lap)^{-1}, mean-zero
    SourceHook source_;
    AprioriAccumulators acc_;

    double stabilization_coefficient(const ScalarField& phi) const;
    void check_blowup(double t, const ScalarField& f, const char* name) const;
    void check_blowup(double t, const VectorField& f, const char* name) const;
};

/// Apply the discrete Leray projection in place: v <- v - dt grad p with p
/// from the pressure Poisson solve of div(v)/dt. Used for initial data and
/// by the stepper. Returns the pressure.
ScalarField project_divergence_free(VectorField& v, const SpectralHelmholtz& poisson,
                                    double dt = 1.0);

} // namespace chns
