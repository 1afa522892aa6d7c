#pragma once

/// Verification studies: manufactured-solution convergence (space and time),
/// the eps -> 0 trajectory-convergence sweep, and the continuous-dependence /
/// uniqueness proxy (perturbation-pair growth against a fitted Gronwall
/// envelope). Each study member is an independent simulation.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chns/config.hpp"
#include "chns/grid.hpp"
#include "chns/ic.hpp"
#include "chns/model.hpp"

namespace chns {

struct StudyConfig {
    SimParams params;
    Grid grid; // coarsest level for spatial studies, the grid for the others
    IcSpec ic;
    double t_end = 0.5;
    int levels = 3;
    int refine = 2;
    std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0};
    double delta = 1e-4;
    int snapshot_stride = 10; // L2(0,T) trapezoid sampling, in steps
    std::vector<std::string> norms = {"l2"};
};

/// Closed-form manufactured fields and the forcing terms obtained by
/// substituting them into the model equations. All functions take (x, y, t).
struct MmsFamily {
    using Fn = std::function<double(double, double, double)>;
    Fn phi, mu, u, v;
    Fn src_phi, src_mu, src_vx, src_vy;
    Fn div_v; // must vanish identically
};

/// Trigonometric stream-function family (periodic, divergence-free by
/// construction); sources hard-coded from the closed-form derivatives.
MmsFamily make_trig_family(const SimParams& p, double lx, double ly);

enum class MmsMode { spatial, temporal };

struct ConvergenceRow {
    double resolution = 0.0; // dx for spatial, dt for temporal
    double err_phi = 0.0;
    double err_v = 0.0;
};

struct ConvergenceTable {
    MmsMode mode = MmsMode::spatial;
    std::vector<ConvergenceRow> rows;
    std::vector<double> orders_phi; // consecutive-pair estimates
    std::vector<double> orders_v;
};

/// Runs the manufactured-solution study. Spatial mode refines the grid by
/// cfg.refine per level with dt scaled as dx^2 (so both error components
/// shrink at second order); temporal mode halves dt on the fixed grid and
/// estimates the order from consecutive self-differences. Throws ConfigError
/// if the manufactured velocity is not divergence-free.
ConvergenceTable mms_run(const MmsFamily& family, const StudyConfig& cfg, MmsMode mode);

struct EpsilonStudyResult {
    std::vector<double> eps;      // nonzero entries of the sweep
    std::vector<double> diff_phi; // |phi^eps - phi^0| in L2(0,T;L2)
    std::vector<double> diff_v;
    std::vector<double> slopes; // empirical log-log slopes, recorded not asserted
    bool monotone = false;      // strictly decreasing diff_phi along the list
    int violating_index = -1;   // first pair breaking monotonicity
};

EpsilonStudyResult epsilon_study(const StudyConfig& cfg);

struct StabilityResult {
    std::vector<double> times;
    std::vector<double> r_delta; // |phi1-phi2|^2 + |v1-v2|^2 for delta
    std::vector<double> r_half;  // same for delta/2
    double rate_delta = 0.0;     // fitted exponential rate on the first half
    double rate_half = 0.0;
    bool envelope_ok = true; // second half stays under the fitted envelope
    double final_ratio = 0.0; // r_delta(T) / r_half(T), ~4 in the linear regime
};

StabilityResult perturbation_stability(const StudyConfig& cfg);

/// Monte-Carlo sweep of the pointwise thermodynamic identity.
struct ThermoSweepResult {
    double max_cancel_rel = 0.0;
    double min_entropy = 0.0;
    int samples = 0;
};

ThermoSweepResult thermo_sweep(int samples, std::uint64_t seed, const SimParams& p);

} // namespace chns
