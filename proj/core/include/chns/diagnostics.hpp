#pragma once

/// Per-step scalar functionals: conserved mass, Lyapunov energy, dissipation,
/// the discrete energy-budget defect, incompressibility residual, and the
/// running a-priori accumulators with their ceiling-based boundedness monitor.

#include <string>
#include <vector>

#include "chns/grid.hpp"
#include "chns/model.hpp"

namespace chns {

struct State;      // stepper.hpp
struct StepReport; // stepper.hpp

struct AprioriAccumulators {
    double acc62 = 0.0; // int [ |grad mu|^2 + |v|_H1^2 + |phi_t|^2 + |phi|_H2^2 ]
    double acc63 = 0.0; // int |mu|_H2^2
    double acc64 = 0.0; // int [ |grad phi_t|^2 + |phi|_H3s^2 + |Av|^2 + |v_t|^2 ]
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double budget_residual = 0.0;
    double div_max = 0.0;
    double l2_v = 0.0;
    double h1_phi = 0.0;
    double h2_phi = 0.0;
    double l2_grad_mu = 0.0;
    double acc62 = 0.0;
    double acc63 = 0.0;
    double acc64 = 0.0;
    // instantaneous left-hand-side groups of the a-priori estimates
    double group62 = 0.0; // |v|^2 + |phi|_H1^2 + eps |mu|^2
    double group63 = 0.0; // eps |mu|_H1^2
    double group64 = 0.0; // |lap phi|^2 + |grad v|^2
};

double mass(const ScalarField& phi);

/// Signed discrete defect of the energy identity over one step:
///   E(next) - E(prev) + dt * dissipation - dt * <f, v_next>.
double energy_budget_residual(const State& prev, const State& next,
                              const StepReport& report, const SimParams& p);

double divergence_max(const VectorField& v);

/// Full record for one accepted step; updates the running accumulators.
DiagnosticsRecord make_record(const State& prev, const State& next,
                              const StepReport& report, const SimParams& p,
                              AprioriAccumulators& acc);

/// Record for the initial state (no step-derived quantities).
DiagnosticsRecord make_initial_record(const State& s, const SimParams& p);

struct MonitorVerdict {
    bool bounded = true;
    double first_failure_t = 0.0;
    std::string reason;
    double sup62 = 0.0, sup63 = 0.0, sup64 = 0.0;
    AprioriAccumulators final_acc;
};

/// Consumes the record stream and reports boundedness. Any NaN or any value
/// above the ceiling flips the verdict and pins the first failure time.
class AprioriMonitor {
public:
    explicit AprioriMonitor(double ceiling = 1e6) : ceiling_(ceiling) {}
    void observe(const DiagnosticsRecord& r);
    MonitorVerdict verdict() const { return verdict_; }

private:
    double ceiling_;
    MonitorVerdict verdict_;
    bool failed_ = false;
};

} // namespace chns
