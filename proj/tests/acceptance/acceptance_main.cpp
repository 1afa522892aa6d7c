// Acceptance suite. Each criterion runs at its stated tolerance and prints
// one [PASS]/[FAIL] line; the process exits nonzero if any criterion fails.
//
//  1. mass conservation over the 64^2 spinodal run
//  2. energy dissipation + O(dt^2) budget defect (>= 3x shrink at dt/2)
//  3. pointwise thermodynamic cancellation over 10^4 random samples
//  4. incompressibility after every step of the criterion-1 run
//  5. eps -> 0 trajectory convergence (strictly decreasing differences)
//  6. continuous dependence: delta-pair ratio in [3, 5] + Gronwall envelope
//  7. manufactured-solution orders (spatial 2.0 +- 0.3, temporal 1.0 +- 0.2)
//  8. a-priori boundedness monitor over T = 2
//  9. solver correctness: 8^2 dense oracle + Stokes shear decay at 128^2
// 10. determinism, snapshot round trip, restart fidelity

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "chns/config.hpp"
#include "chns/diagnostics.hpp"
#include "chns/ic.hpp"
#include "chns/io.hpp"
#include "chns/linsolve.hpp"
#include "chns/rng.hpp"
#include "chns/stepper.hpp"
#include "chns/verify.hpp"

using namespace chns;
namespace fs = std::filesystem;

namespace {

// --------------------------------------------------------------------------
// shared setup: the spinodal quench the criteria revolve around
// --------------------------------------------------------------------------

SimParams spinodal_params() {
    SimParams p;
    p.kappa = 2.5e-3;
    p.beta = 0.8; // caps the stiff-mode rate: every step sits in the O(dt^2) regime
    p.gamma = 1.0;
    p.nu = 0.1;
    p.lambda = 0.05;
    p.u = -1.0;
    p.epsilon = 0.0;
    p.dt = 1e-3;
    return p;
}

Grid spinodal_grid() { return Grid(64, 64, 1.0, 1.0, BcMode::paper); }

IcSpec spinodal_ic() {
    IcSpec ic;
    ic.kind = IcSpec::Kind::uniform_noise;
    ic.amplitude = 0.005; // keeps the white-noise H^3 layer under the monitor ceiling
    ic.mean = 0.0;
    ic.seed = 2024;
    return ic;
}

struct RunLog {
    std::vector<DiagnosticsRecord> records; // one per step
    DiagnosticsRecord initial;
    double wall_seconds = 0.0;
};

RunLog run_simulation(const Grid& g, const SimParams& p, const IcSpec& ic, int steps) {
    RunLog log;
    State s = build_initial_state(g, ic, p);
    log.initial = make_initial_record(s, p);
    Stepper stepper(g, p);
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n < steps; ++n) log.records.push_back(stepper.advance(s));
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return log;
}

const RunLog& criterion1_run() {
    static const RunLog log = run_simulation(spinodal_grid(), spinodal_params(),
                                             spinodal_ic(), 1000);
    return log;
}

// --------------------------------------------------------------------------

struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> body;
};

bool criterion_mass(std::string& detail) {
    const RunLog& log = criterion1_run();
    const double m0 = log.initial.mass;
    double worst = 0.0;
    for (const auto& r : log.records) worst = std::max(worst, std::abs(r.mass - m0));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max |mass drift| = %.3e (tol 1e-9), wall %.1f s",
                  worst, log.wall_seconds);
    detail = buf;
    return worst <= 1e-9 && log.wall_seconds <= 60.0;
}

bool criterion_energy(std::string& detail) {
    const RunLog& log = criterion1_run();
    double e_prev = log.initial.energy;
    bool monotone = true;
    double max_budget = 0.0;
    for (const auto& r : log.records) {
        if (r.energy - e_prev > std::abs(r.budget_residual) + 1e-15) monotone = false;
        max_budget = std::max(max_budget, std::abs(r.budget_residual));
        e_prev = r.energy;
    }

    SimParams fine = spinodal_params();
    fine.dt = 5e-4;
    const RunLog log_fine =
        run_simulation(spinodal_grid(), fine, spinodal_ic(), 2000);
    double max_budget_fine = 0.0;
    for (const auto& r : log_fine.records)
        max_budget_fine = std::max(max_budget_fine, std::abs(r.budget_residual));

    const double shrink = max_budget / max_budget_fine;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "monotone within budget: %s; max|residual| %.3e -> %.3e, "
                  "shrink %.2fx (need >= 3)",
                  monotone ? "yes" : "NO", max_budget, max_budget_fine, shrink);
    detail = buf;
    return monotone && shrink >= 3.0;
}

bool criterion_thermo(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ThermoSweepResult r = thermo_sweep(10000, 424242, spinodal_params());
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max |cancel| = %.3e rel (tol 1e-13), min entropy = %.3e, %.3f s",
                  r.max_cancel_rel, r.min_entropy, wall);
    detail = buf;
    return r.max_cancel_rel <= 1e-13 && r.min_entropy >= 0.0 && wall <= 1.0;
}

bool criterion_divergence(std::string& detail) {
    const RunLog& log = criterion1_run();
    const double tol = 1e-8 / spinodal_grid().dx();
    double worst = 0.0;
    for (const auto& r : log.records) worst = std::max(worst, r.div_max);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "max div = %.3e (tol %.3e)", worst, tol);
    detail = buf;
    return worst <= tol;
}

bool criterion_epsilon(std::string& detail) {
    StudyConfig cfg;
    cfg.params = spinodal_params();
    cfg.grid = spinodal_grid();
    cfg.ic = spinodal_ic();
    cfg.t_end = 0.5;
    cfg.eps_list = {0.1, 0.05, 0.025, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    const EpsilonStudyResult r = epsilon_study(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os.precision(3);
    os << "diffs";
    for (double d : r.diff_phi) os << " " << d;
    os << "; slopes";
    for (double s : r.slopes) os << " " << s;
    os << "; " << wall << " s";
    detail = os.str();
    return r.monotone && wall <= 300.0;
}

bool criterion_stability(std::string& detail) {
    StudyConfig cfg;
    cfg.params = spinodal_params();
    cfg.grid = spinodal_grid();
    cfg.ic = spinodal_ic();
    cfg.t_end = 1.4; // dominant-mode growth rules both fit halves at beta = 0.8
    cfg.delta = 1e-4; // the delta/2 = 5e-5 pair runs inside
    const auto t0 = std::chrono::steady_clock::now();
    const StabilityResult r = perturbation_stability(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "final ratio %.2f (need [3,5]), rates %.3g / %.3g, envelope %s, %.1f s",
                  r.final_ratio, r.rate_delta, r.rate_half,
                  r.envelope_ok ? "ok" : "VIOLATED", wall);
    detail = buf;
    return r.final_ratio >= 3.0 && r.final_ratio <= 5.0 && r.envelope_ok &&
           wall <= 240.0;
}

bool criterion_mms(std::string& detail) {
    SimParams p = spinodal_params();
    p.dt = 1e-3; // coarsest spatial level; scaled as dx^2 per level
    StudyConfig cfg;
    cfg.params = p;
    cfg.grid = Grid(32, 32, 1.0, 1.0, BcMode::periodic);
    cfg.t_end = 0.05;
    cfg.levels = 3;
    const MmsFamily fam = make_trig_family(p, 1.0, 1.0);

    const auto t0 = std::chrono::steady_clock::now();
    const ConvergenceTable sp = mms_run(fam, cfg, MmsMode::spatial);

    StudyConfig tcfg = cfg;
    tcfg.grid = Grid(64, 64, 1.0, 1.0, BcMode::periodic);
    tcfg.params.dt = 0.01;
    tcfg.t_end = 0.2;
    tcfg.levels = 4;
    const ConvergenceTable tp = mms_run(fam, tcfg, MmsMode::temporal);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double sp_phi = sp.orders_phi.back();
    const double sp_v = sp.orders_v.back();
    const double tp_phi = tp.orders_phi.back();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "spatial orders phi %.2f, v %.2f (2.0 +- 0.3); temporal %.2f "
                  "(1.0 +- 0.2); %.1f s",
                  sp_phi, sp_v, tp_phi, wall);
    detail = buf;
    return sp_phi >= 1.7 && sp_phi <= 2.3 && sp_v >= 1.7 && sp_v <= 2.3 &&
           tp_phi >= 0.8 && tp_phi <= 1.2 && wall <= 600.0;
}

bool criterion_apriori(std::string& detail) {
    const RunLog log =
        run_simulation(spinodal_grid(), spinodal_params(), spinodal_ic(), 2000);
    AprioriMonitor monitor(1e6);
    monitor.observe(log.initial);
    for (const auto& r : log.records) monitor.observe(r);
    const MonitorVerdict v = monitor.verdict();
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "verdict %s; sup62 %.3e, sup64 %.3e, acc62 %.3e, acc64 %.3e",
                  v.bounded ? "bounded" : "UNBOUNDED", v.sup62, v.sup64,
                  v.final_acc.acc62, v.final_acc.acc64);
    detail = buf;
    return v.bounded;
}

bool criterion_solver(std::string& detail) {
    // dense-oracle equivalence at 8^2 (paper bc, generic coefficients)
    Grid g8(8, 8, 1.0, 1.0, BcMode::paper);
    ScalarField rhs(g8);
    {
        SplitMix64 rng(7);
        for (int k = 0; k < rhs.size(); ++k) rhs.data()[k] = rng.next_symmetric();
    }
    SolverConfig cfg;
    cfg.rel_tol = 1e-12;
    const ScalarField x = solve_helmholtz(0.9, 1.7, rhs, g8.bc, cfg);
    // dense assembly + Gaussian elimination, coded independently of linsolve
    const int n = 64;
    std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
    const double cx = 1.7 / (g8.dx() * g8.dx());
    const double cy = 1.7 / (g8.dy() * g8.dy());
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) {
            const int k = j * 8 + i;
            A[static_cast<std::size_t>(k) * n + k] += 0.9;
            auto couple = [&](int ni, int nj, double c) {
                if (ni < 0 || ni >= 8 || nj < 0 || nj >= 8) return;
                A[static_cast<std::size_t>(k) * n + k] += c;
                A[static_cast<std::size_t>(k) * n + (nj * 8 + ni)] -= c;
            };
            couple(i - 1, j, cx);
            couple(i + 1, j, cx);
            couple(i, j - 1, cy);
            couple(i, j + 1, cy);
        }
    std::vector<double> b(rhs.data(), rhs.data() + n);
    // gaussian elimination with partial pivoting
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[static_cast<std::size_t>(r) * n + col]) >
                std::abs(A[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(A[static_cast<std::size_t>(piv) * n + c],
                          A[static_cast<std::size_t>(col) * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = A[static_cast<std::size_t>(r) * n + col] /
                             A[static_cast<std::size_t>(col) * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                A[static_cast<std::size_t>(r) * n + c] -=
                    f * A[static_cast<std::size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> xd(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[static_cast<std::size_t>(r) * n + c] * xd[c];
        xd[r] = s / A[static_cast<std::size_t>(r) * n + r];
    }
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
        num += (x.data()[k] - xd[k]) * (x.data()[k] - xd[k]);
        den += xd[k] * xd[k];
    }
    const double dense_rel = std::sqrt(num / den);

    // Stokes shear decay at 128^2: no coupling active (phi = 0, lambda = 0)
    Grid g(128, 128, 1.0, 1.0, BcMode::periodic);
    SimParams p = spinodal_params();
    p.lambda = 0.0;
    IcSpec ic;
    ic.amplitude = 0.0;
    ic.v_kind = IcSpec::VKind::shear;
    State s = build_initial_state(g, ic, p);
    Stepper stepper(g, p);
    const double e0 = 0.5 * field_dot(s.v, s.v);
    const int steps = 250;
    bool monotone = true;
    double e_prev = e0;
    for (int k = 0; k < steps; ++k) {
        stepper.advance(s);
        const double e = 0.5 * field_dot(s.v, s.v);
        if (e > e_prev * (1.0 + 1e-12)) monotone = false;
        e_prev = e;
    }
    const double rate = std::log(e0 / e_prev) / (steps * p.dt);
    const double exact = 2.0 * p.nu * 4.0 * M_PI * M_PI;
    const double rate_err = std::abs(rate - exact) / exact;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "dense oracle rel err %.2e (tol 1e-8); decay rate %.4f vs %.4f "
                  "(err %.2f%%, tol 10%%), monotone %s",
                  dense_rel, rate, exact, 100.0 * rate_err, monotone ? "yes" : "NO");
    detail = buf;
    return dense_rel <= 1e-8 && rate_err <= 0.10 && monotone;
}

bool criterion_io(std::string& detail) {
    const fs::path base = fs::temp_directory_path() /
                          ("chns_accept_" + std::to_string(::getpid()));
    fs::create_directories(base);
    struct Cleanup {
        fs::path p;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } cleanup{base};

    const std::string cfg_text =
        "grid.nx = 32\ngrid.ny = 32\nic.amplitude = 0.01\nic.seed = 11\n"
        "time.t_end = 0.02\n";

    auto run_once = [&](const std::string& dir) {
        LoadedRun run = materialize(parse_config_text(cfg_text));
        Stepper st(run.grid, run.params);
        ensure_directory(dir);
        SeriesWriter w(dir + "/series.csv");
        w.write(make_initial_record(run.state, run.params));
        std::vector<DiagnosticsRecord> recs;
        for (int k = 0; k < run.total_steps(); ++k) {
            recs.push_back(st.advance(run.state));
            w.write(recs.back());
            if (k + 1 == 10) write_state_snapshot(run.state, dir, 10);
        }
        w.flush();
        write_state_snapshot(run.state, dir, run.total_steps());
        return recs;
    };

    const auto recs_a = run_once((base / "a").string());
    run_once((base / "b").string());

    auto file_equal = [](const fs::path& x, const fs::path& y) {
        std::ifstream fx(x, std::ios::binary), fy(y, std::ios::binary);
        std::stringstream sx, sy;
        sx << fx.rdbuf();
        sy << fy.rdbuf();
        return sx.str() == sy.str() && !sx.str().empty();
    };
    const bool deterministic =
        file_equal(base / "a" / "series.csv", base / "b" / "series.csv") &&
        file_equal(base / "a" / "phi_000020.raw", base / "b" / "phi_000020.raw") &&
        file_equal(base / "a" / "u_000020.raw", base / "b" / "u_000020.raw");

    // bit-exact snapshot round trip
    LoadedRun probe = materialize(parse_config_text(cfg_text));
    fs::create_directories(base / "rt");
    write_state_snapshot(probe.state, (base / "rt").string(), 0);
    const State back = read_state_snapshot((base / "rt").string(), 0, probe.grid);
    const bool roundtrip =
        std::memcmp(back.phi.data(), probe.state.phi.data(),
                    sizeof(double) * probe.state.phi.size()) == 0 &&
        std::memcmp(back.v.u_data(), probe.state.v.u_data(),
                    sizeof(double) * probe.state.v.u_size()) == 0;

    // restart fidelity: continue from the step-10 snapshot of run "a"
    LoadedRun cont = materialize(parse_config_text(cfg_text));
    State restored = read_state_snapshot((base / "a").string(), 10, cont.grid);
    Stepper st2(cont.grid, cont.params);
    bool restart_ok = true;
    double worst_restart = 0.0;
    for (int k = 10; k < 20; ++k) {
        const DiagnosticsRecord r = st2.advance(restored);
        const DiagnosticsRecord& ref = recs_a[static_cast<std::size_t>(k)];
        const double dm = std::abs(r.mass - ref.mass);
        const double de = std::abs(r.energy - ref.energy) /
                          std::max(1.0, std::abs(ref.energy));
        worst_restart = std::max({worst_restart, dm, de});
        if (dm > 1e-10 || de > 1e-8) restart_ok = false;
    }

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "deterministic %s; round trip bit-exact %s; restart defect %.2e",
                  deterministic ? "yes" : "NO", roundtrip ? "yes" : "NO",
                  worst_restart);
    detail = buf;
    return deterministic && roundtrip && restart_ok;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "mass conservation (64^2 spinodal, 1000 steps)", criterion_mass},
        {2, "energy dissipation and O(dt^2) budget defect", criterion_energy},
        {3, "thermodynamic cancellation (10^4 samples)", criterion_thermo},
        {4, "incompressibility after every step", criterion_divergence},
        {5, "eps -> 0 trajectory convergence", criterion_epsilon},
        {6, "uniqueness / continuous dependence", criterion_stability},
        {7, "discretization orders (MMS)", criterion_mms},
        {8, "a-priori boundedness (T = 2)", criterion_apriori},
        {9, "solver correctness (dense oracle + Stokes decay)", criterion_solver},
        {10, "determinism and IO", criterion_io},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.id,
                    c.label, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures,
                    criteria.size());
    return failures == 0 ? 0 : 1;
}
