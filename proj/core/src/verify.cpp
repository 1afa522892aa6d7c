#include "chns/verify.hpp"

#include <cmath>
#include <limits>

#include "chns/rng.hpp"
#include "chns/stepper.hpp"

namespace chns {

// ---------------------------------------------------------------------------
// Manufactured family
// ---------------------------------------------------------------------------

MmsFamily make_trig_family(const SimParams& p, double lx, double ly) {
    const double ax = 2.0 * M_PI / lx;
    const double ay = 2.0 * M_PI / ly;
    const double A_phi = 0.3;
    const double A_mu = 0.2;
    const double A_psi = 0.3 / std::max(ax, ay); // |v| <= ~0.3
    const double om = 3.0;   // phi/mu clock
    const double omv = 2.0;  // velocity clock
    const double ph = 0.5;   // mu phase offset
    const double kap = p.kappa, bet = p.beta, gam = p.gamma, nu_ = p.nu;
    const double lam = p.lambda, uu = p.u, eps = p.epsilon;
    const double k2 = ax * ax + ay * ay;

    MmsFamily f;
    f.phi = [=](double x, double y, double t) {
        return A_phi * std::cos(ax * x) * std::cos(ay * y) * std::cos(om * t);
    };
    f.mu = [=](double x, double y, double t) {
        return A_mu * std::cos(ax * x) * std::cos(ay * y) * std::sin(om * t + ph);
    };
    f.u = [=](double x, double y, double t) {
        return A_psi * ay * std::sin(ax * x) * std::cos(ay * y) * std::cos(omv * t);
    };
    f.v = [=](double x, double y, double t) {
        return -A_psi * ax * std::cos(ax * x) * std::sin(ay * y) * std::cos(omv * t);
    };
    f.div_v = [](double, double, double) { return 0.0; };

    auto phi_t = [=](double x, double y, double t) {
        return -A_phi * om * std::cos(ax * x) * std::cos(ay * y) * std::sin(om * t);
    };
    auto phi_x = [=](double x, double y, double t) {
        return -A_phi * ax * std::sin(ax * x) * std::cos(ay * y) * std::cos(om * t);
    };
    auto phi_y = [=](double x, double y, double t) {
        return -A_phi * ay * std::cos(ax * x) * std::sin(ay * y) * std::cos(om * t);
    };
    auto mu_t = [=](double x, double y, double t) {
        return A_mu * om * std::cos(ax * x) * std::cos(ay * y) * std::cos(om * t + ph);
    };
    auto u_t = [=](double x, double y, double t) {
        return -A_psi * ay * omv * std::sin(ax * x) * std::cos(ay * y) * std::sin(omv * t);
    };
    auto v_t = [=](double x, double y, double t) {
        return A_psi * ax * omv * std::cos(ax * x) * std::sin(ay * y) * std::sin(omv * t);
    };
    auto u_x = [=](double x, double y, double t) {
        return A_psi * ay * ax * std::cos(ax * x) * std::cos(ay * y) * std::cos(omv * t);
    };
    auto u_y = [=](double x, double y, double t) {
        return -A_psi * ay * ay * std::sin(ax * x) * std::sin(ay * y) * std::cos(omv * t);
    };
    auto v_x = [=](double x, double y, double t) {
        return A_psi * ax * ax * std::sin(ax * x) * std::sin(ay * y) * std::cos(omv * t);
    };
    auto v_y = [=](double x, double y, double t) {
        return -A_psi * ax * ay * std::cos(ax * x) * std::cos(ay * y) * std::cos(omv * t);
    };

    f.src_phi = [=](double x, double y, double t) {
        const double P = f.phi(x, y, t);
        const double U = f.u(x, y, t), V = f.v(x, y, t);
        const double transport = U * phi_x(x, y, t) + V * phi_y(x, y, t);
        const double lap_phi = -k2 * P;
        return bet * phi_t(x, y, t) - kap * lap_phi - f.mu(x, y, t) +
               bet * transport + P * P * P + uu * P + lam * P * (U * U + V * V);
    };
    f.src_mu = [=](double x, double y, double t) {
        const double U = f.u(x, y, t), V = f.v(x, y, t);
        const double transport = U * phi_x(x, y, t) + V * phi_y(x, y, t);
        const double lap_mu = -k2 * f.mu(x, y, t);
        return eps * mu_t(x, y, t) - gam * lap_mu + phi_t(x, y, t) + transport;
    };
    f.src_vx = [=](double x, double y, double t) {
        const double P = f.phi(x, y, t);
        const double U = f.u(x, y, t), V = f.v(x, y, t);
        const double mat = phi_t(x, y, t) + U * phi_x(x, y, t) + V * phi_y(x, y, t);
        const double lap_phi = -k2 * P;
        const double lap_u = -k2 * U;
        return u_t(x, y, t) + U * u_x(x, y, t) + V * u_y(x, y, t) - nu_ * lap_u +
               kap * lap_phi * phi_x(x, y, t) - lam * P * mat * U;
    };
    f.src_vy = [=](double x, double y, double t) {
        const double P = f.phi(x, y, t);
        const double U = f.u(x, y, t), V = f.v(x, y, t);
        const double mat = phi_t(x, y, t) + U * phi_x(x, y, t) + V * phi_y(x, y, t);
        const double lap_phi = -k2 * P;
        const double lap_v = -k2 * V;
        return v_t(x, y, t) + U * v_x(x, y, t) + V * v_y(x, y, t) - nu_ * lap_v +
               kap * lap_phi * phi_y(x, y, t) - lam * P * mat * V;
    };
    return f;
}

// ---------------------------------------------------------------------------
// MMS study
// ---------------------------------------------------------------------------

namespace {

ScalarField sample_centers(const Grid& g, const MmsFamily::Fn& fn, double t) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.xc(i), g.yc(j), t);
    return f;
}

VectorField sample_faces(const Grid& g, const MmsFamily::Fn& fu,
                         const MmsFamily::Fn& fv, double t) {
    VectorField w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) w.u(i, j) = fu(g.xf(i), g.yc(j), t);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = fv(g.xc(i), g.yf(j), t);
    w.enforce_bc();
    return w;
}

double l2_error(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a;
    double* pd = d.data();
    const double* pb = b.data();
    for (int k = 0; k < d.size(); ++k) pd[k] -= pb[k];
    return std::sqrt(field_dot(d, d));
}

double l2_error(const VectorField& a, const VectorField& b) {
    VectorField d = a;
    const Grid& g = a.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) d.u(i, j) -= b.u(i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) d.v(i, j) -= b.v(i, j);
    return std::sqrt(field_dot(d, d));
}

struct MmsRunResult {
    ScalarField phi;
    VectorField v;
    double err_phi = 0.0;
    double err_v = 0.0;
};

MmsRunResult run_mms_case(const MmsFamily& fam, const Grid& g, SimParams p,
                          double t_end) {
    const int steps = std::max(1, static_cast<int>(std::llround(t_end / p.dt)));
    p.dt = t_end / steps;

    State s;
    s.phi = sample_centers(g, fam.phi, 0.0);
    s.mu = sample_centers(g, fam.mu, 0.0);
    s.v = sample_faces(g, fam.u, fam.v, 0.0);
    {
        SpectralHelmholtz poisson(g, 0.0, 1.0);
        project_divergence_free(s.v, poisson);
    }
    s.p = ScalarField(g);
    s.t = 0.0;

    Stepper stepper(g, p);
    stepper.set_source_hook([&fam, &g](double t_new, ScalarField& sp, ScalarField& sm,
                                       VectorField& sv) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                sp(i, j) = fam.src_phi(g.xc(i), g.yc(j), t_new);
                sm(i, j) = fam.src_mu(g.xc(i), g.yc(j), t_new);
            }
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                sv.u(i, j) = fam.src_vx(g.xf(i), g.yc(j), t_new);
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                sv.v(i, j) = fam.src_vy(g.xc(i), g.yf(j), t_new);
        sv.enforce_bc();
    });

    for (int n = 0; n < steps; ++n) stepper.advance(s);

    MmsRunResult out;
    out.err_phi = l2_error(s.phi, sample_centers(g, fam.phi, t_end));
    out.err_v = l2_error(s.v, sample_faces(g, fam.u, fam.v, t_end));
    out.phi = std::move(s.phi);
    out.v = std::move(s.v);
    return out;
}

} // namespace

ConvergenceTable mms_run(const MmsFamily& fam, const StudyConfig& cfg, MmsMode mode) {
    if (cfg.levels < 3)
        throw ConfigError("level count must be >= 3 for order estimation");

    // divergence-free check on a coarse sample lattice
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) {
            const double x = (i + 0.37) / 8.0 * cfg.grid.lx;
            const double y = (j + 0.61) / 8.0 * cfg.grid.ly;
            for (double t : {0.0, 0.13 * cfg.t_end, cfg.t_end})
                if (std::abs(fam.div_v(x, y, t)) > 1e-12)
                    throw ConfigError("manufactured velocity is not divergence-free");
        }

    ConvergenceTable table;
    table.mode = mode;

    if (mode == MmsMode::spatial) {
        for (int level = 0; level < cfg.levels; ++level) {
            int factor = 1;
            for (int l = 0; l < level; ++l) factor *= cfg.refine;
            const Grid g(cfg.grid.nx * factor, cfg.grid.ny * factor, cfg.grid.lx,
                         cfg.grid.ly, cfg.grid.bc);
            SimParams p = cfg.params;
            p.dt = cfg.params.dt / (factor * factor); // dt ~ dx^2
            const MmsRunResult r = run_mms_case(fam, g, p, cfg.t_end);
            table.rows.push_back({g.dx(), r.err_phi, r.err_v});
        }
        for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
            const double ratio = std::log(static_cast<double>(cfg.refine));
            table.orders_phi.push_back(
                std::log(table.rows[k].err_phi / table.rows[k + 1].err_phi) / ratio);
            table.orders_v.push_back(
                std::log(table.rows[k].err_v / table.rows[k + 1].err_v) / ratio);
        }
    } else {
        std::vector<MmsRunResult> runs;
        for (int level = 0; level < cfg.levels; ++level) {
            int factor = 1;
            for (int l = 0; l < level; ++l) factor *= cfg.refine;
            SimParams p = cfg.params;
            p.dt = cfg.params.dt / factor;
            runs.push_back(run_mms_case(fam, cfg.grid, p, cfg.t_end));
            table.rows.push_back({p.dt, runs.back().err_phi, runs.back().err_v});
        }
        // self-convergence: differences between consecutive dt levels cancel
        // the common spatial error exactly
        std::vector<double> dphi, dv;
        for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
            dphi.push_back(l2_error(runs[k].phi, runs[k + 1].phi));
            dv.push_back(l2_error(runs[k].v, runs[k + 1].v));
        }
        for (std::size_t k = 0; k + 1 < dphi.size(); ++k) {
            const double ratio = std::log(static_cast<double>(cfg.refine));
            table.orders_phi.push_back(std::log(dphi[k] / dphi[k + 1]) / ratio);
            table.orders_v.push_back(std::log(dv[k] / dv[k + 1]) / ratio);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// eps -> 0 sweep
// ---------------------------------------------------------------------------

namespace {

struct Trajectory {
    std::vector<double> times;
    std::vector<ScalarField> phi;
    std::vector<VectorField> v;
};

Trajectory run_trajectory(const Grid& g, const SimParams& p, State s, double t_end,
                          int stride) {
    Trajectory tr;
    const int steps = std::max(1, static_cast<int>(std::llround(t_end / p.dt)));
    tr.times.push_back(s.t);
    tr.phi.push_back(s.phi);
    tr.v.push_back(s.v);
    Stepper stepper(g, p);
    for (int n = 1; n <= steps; ++n) {
        stepper.advance(s);
        if (n % stride == 0 || n == steps) {
            tr.times.push_back(s.t);
            tr.phi.push_back(s.phi);
            tr.v.push_back(s.v);
        }
    }
    return tr;
}

/// sqrt of the trapezoid integral of |a(t) - b(t)|^2 over the common times.
void l2_in_time_diff(const Trajectory& a, const Trajectory& b, double& dphi,
                     double& dv) {
    double sp = 0.0, sv = 0.0;
    const std::size_t n = a.times.size();
    std::vector<double> wp(n), wv(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ep = l2_error(a.phi[k], b.phi[k]);
        const double ev = l2_error(a.v[k], b.v[k]);
        wp[k] = ep * ep;
        wv[k] = ev * ev;
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = a.times[k + 1] - a.times[k];
        sp += 0.5 * h * (wp[k] + wp[k + 1]);
        sv += 0.5 * h * (wv[k] + wv[k + 1]);
    }
    dphi = std::sqrt(sp);
    dv = std::sqrt(sv);
}

} // namespace

EpsilonStudyResult epsilon_study(const StudyConfig& cfg) {
    const auto& eps = cfg.eps_list;
    if (eps.size() < 2) throw ConfigError("eps list needs at least two entries");
    for (std::size_t k = 0; k + 1 < eps.size(); ++k)
        if (!(eps[k] > eps[k + 1]))
            throw ConfigError("eps list must be strictly decreasing");
    if (eps.back() != 0.0) throw ConfigError("eps list must end with 0");

    const State initial = build_initial_state(cfg.grid, cfg.ic, cfg.params);

    std::vector<Trajectory> trajectories;
    for (double e : eps) {
        SimParams p = cfg.params;
        p.epsilon = e;
        trajectories.push_back(
            run_trajectory(cfg.grid, p, initial, cfg.t_end, cfg.snapshot_stride));
    }

    EpsilonStudyResult r;
    const Trajectory& ref = trajectories.back(); // eps = 0
    for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
        double dphi = 0.0, dv = 0.0;
        l2_in_time_diff(trajectories[k], ref, dphi, dv);
        r.eps.push_back(eps[k]);
        r.diff_phi.push_back(dphi);
        r.diff_v.push_back(dv);
    }
    r.monotone = true;
    for (std::size_t k = 0; k + 1 < r.diff_phi.size(); ++k) {
        if (!(r.diff_phi[k] > r.diff_phi[k + 1])) {
            r.monotone = false;
            r.violating_index = static_cast<int>(k);
            break;
        }
        r.slopes.push_back(std::log(r.diff_phi[k] / r.diff_phi[k + 1]) /
                           std::log(r.eps[k] / r.eps[k + 1]));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Perturbation stability
// ---------------------------------------------------------------------------

namespace {

struct GronwallFit {
    double rate = 0.0;
    double anchor_t = 0.0;
    double anchor_r = 0.0;
    bool valid = false;
};

/// Gronwall rate estimate over the first half of the run: the largest local
/// slope of ln r. A least-squares slope would be dragged down by the initial
/// transient (white-noise perturbations start on the damped high-k modes), so
/// the observed growth-rate supremum is the honest envelope rate.
GronwallFit fit_gronwall_rate(const std::vector<double>& t,
                              const std::vector<double>& r, double t_half) {
    GronwallFit out;
    std::size_t last = 0;
    bool any = false;
    const double edge = t_half * (1.0 + 1e-12) + 1e-300;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (t[k + 1] > edge) break;
        if (r[k] <= 0.0 || r[k + 1] <= 0.0) continue;
        const double slope =
            (std::log(r[k + 1]) - std::log(r[k])) / (t[k + 1] - t[k]);
        out.rate = any ? std::max(out.rate, slope) : slope;
        any = true;
        last = k + 1;
    }
    if (!any) return out;
    out.anchor_t = t[last];
    out.anchor_r = r[last];
    out.valid = true;
    return out;
}

/// Second-half test: r may not escape anchor * exp(rate * (t - anchor_t))
/// by more than a fixed 1.5x headroom.
bool envelope_holds(const std::vector<double>& t, const std::vector<double>& r,
                    const GronwallFit& fit) {
    if (!fit.valid) return true; // degenerate (r == 0): nothing can escape
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= fit.anchor_t || r[k] <= 0.0) continue;
        const double bound =
            std::log(fit.anchor_r) + fit.rate * (t[k] - fit.anchor_t) + std::log(1.5);
        if (std::log(r[k]) > bound) return false;
    }
    return true;
}

} // namespace

StabilityResult perturbation_stability(const StudyConfig& cfg) {
    const Grid& g = cfg.grid;
    const ScalarField eta = build_unit_noise(g, cfg.ic.seed + 1);

    auto perturbed_state = [&](double delta) {
        State s = build_initial_state(g, cfg.ic, cfg.params);
        double* pp = s.phi.data();
        const double* pe = eta.data();
        for (int k = 0; k < s.phi.size(); ++k) pp[k] += delta * pe[k];
        s.mu = init_mu0(s.phi, s.v, cfg.params); // mu0 is defined from phi0
        return s;
    };

    const Trajectory base = run_trajectory(g, cfg.params, perturbed_state(0.0),
                                           cfg.t_end, cfg.snapshot_stride);
    const Trajectory run_d = run_trajectory(g, cfg.params, perturbed_state(cfg.delta),
                                            cfg.t_end, cfg.snapshot_stride);
    const Trajectory run_h =
        run_trajectory(g, cfg.params, perturbed_state(0.5 * cfg.delta), cfg.t_end,
                       cfg.snapshot_stride);

    StabilityResult res;
    res.times = base.times;
    for (std::size_t k = 0; k < base.times.size(); ++k) {
        const double ep = l2_error(run_d.phi[k], base.phi[k]);
        const double ev = l2_error(run_d.v[k], base.v[k]);
        res.r_delta.push_back(ep * ep + ev * ev);
        const double hp = l2_error(run_h.phi[k], base.phi[k]);
        const double hv = l2_error(run_h.v[k], base.v[k]);
        res.r_half.push_back(hp * hp + hv * hv);
    }

    const double t_half = 0.5 * cfg.t_end;
    const GronwallFit fit_d = fit_gronwall_rate(res.times, res.r_delta, t_half);
    const GronwallFit fit_h = fit_gronwall_rate(res.times, res.r_half, t_half);
    res.rate_delta = fit_d.rate;
    res.rate_half = fit_h.rate;
    res.envelope_ok = envelope_holds(res.times, res.r_delta, fit_d) &&
                      envelope_holds(res.times, res.r_half, fit_h);
    // whole-run bound: r(T)/r(0) may not exceed exp(rate * T)
    if (fit_d.valid && res.r_delta.front() > 0.0) {
        const double growth = std::log(res.r_delta.back() / res.r_delta.front());
        if (growth > fit_d.rate * cfg.t_end + std::log(1.5)) res.envelope_ok = false;
    }
    const double rd = res.r_delta.back();
    const double rh = res.r_half.back();
    res.final_ratio = (rh > 0.0) ? rd / rh : 0.0;
    return res;
}

// ---------------------------------------------------------------------------
// Thermodynamic sweep
// ---------------------------------------------------------------------------

ThermoSweepResult thermo_sweep(int samples, std::uint64_t seed, const SimParams& p) {
    SplitMix64 rng(seed);
    ThermoSweepResult r;
    r.samples = samples;
    r.min_entropy = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        ProcessSample s;
        s.phi = 2.0 * rng.next_symmetric();
        s.phi_dot = 2.0 * rng.next_symmetric();
        s.v = {2.0 * rng.next_symmetric(), 2.0 * rng.next_symmetric()};
        s.h = {2.0 * rng.next_symmetric(), 2.0 * rng.next_symmetric()};
        s.d11 = 2.0 * rng.next_symmetric();
        s.d12 = 2.0 * rng.next_symmetric();
        s.grad_mu = {2.0 * rng.next_symmetric(), 2.0 * rng.next_symmetric()};
        const ThermoResidual tr = thermo_consistency_residual(s, p);
        const double rel = std::abs(tr.cancel_residual) / std::max(tr.scale, 1e-30);
        r.max_cancel_rel = std::max(r.max_cancel_rel, rel);
        r.min_entropy = std::min(r.min_entropy, tr.entropy_production);
    }
    return r;
}

} // namespace chns
