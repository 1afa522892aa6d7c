// chns command-line driver: simulation runs and the verification studies.
//
// Exit codes: 0 success, 2 config/validation failure, 3 solver failure
// (non-convergence, blow-up, CFL violation), 4 failed verification assertion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chns/config.hpp"
#include "chns/diagnostics.hpp"
#include "chns/io.hpp"
#include "chns/stepper.hpp"
#include "chns/verify.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAssertion = 4;

struct MmsOrderBands {
    double spatial_lo = 1.7, spatial_hi = 2.3;
    double temporal_lo = 0.8, temporal_hi = 1.2;
};

int cmd_run(const std::string& config_path, const std::string& out_override) {
    chns::LoadedRun run = chns::load_config(config_path);
    if (!out_override.empty()) run.output.dir = out_override;
    chns::ensure_directory(run.output.dir);

    chns::SeriesWriter series(run.output.dir + "/series.csv");
    chns::Stepper stepper(run.grid, run.params);
    chns::State& s = run.state;
    chns::AprioriMonitor monitor;

    const int steps = run.total_steps();
    const chns::DiagnosticsRecord first = chns::make_initial_record(s, run.params);
    series.write(first);
    monitor.observe(first);
    const double mass0 = first.mass;

    auto flush_outputs = [&](int step) {
        chns::write_state_snapshot(s, run.output.dir, step);
        if (run.output.render) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "/phi_%06d.pgm", step);
            chns::render_pgm(s.phi, run.output.dir + buf);
        }
    };
    if (run.output.snapshot_every > 0) flush_outputs(0);

    const auto t_start = std::chrono::steady_clock::now();
    chns::DiagnosticsRecord last = first;
    int step = 0;
    try {
        for (step = 1; step <= steps; ++step) {
            last = stepper.advance(s);
            monitor.observe(last);
            if (step % run.output.series_every == 0 || step == steps)
                series.write(last);
            if (run.output.snapshot_every > 0 && step % run.output.snapshot_every == 0)
                flush_outputs(step);
        }
    } catch (const chns::BlowUp& e) {
        series.flush();
        flush_outputs(step - 1); // last valid state
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolver;
    }
    if (run.output.snapshot_every == 0 || steps % run.output.snapshot_every != 0)
        flush_outputs(steps);
    series.flush();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    std::printf("run: %d steps to t = %.6g on %dx%d (%s)\n", steps, s.t, run.grid.nx,
                run.grid.ny, chns::to_string(run.grid.bc));
    std::printf("  mass %.17g (drift %.3e), energy %.17g\n", last.mass,
                last.mass - mass0, last.energy);
    std::printf("  div_max %.3e, wall %.2f s, output '%s'\n", last.div_max, wall,
                run.output.dir.c_str());
    const chns::MonitorVerdict v = monitor.verdict();
    const std::string verdict =
        v.bounded ? "bounded"
                  : "UNBOUNDED at t=" + std::to_string(v.first_failure_t) + " (" +
                        v.reason + ")";
    std::printf("  a-priori monitor: %s (sup62 %.3e, sup64 %.3e, acc64 %.3e)\n",
                verdict.c_str(), v.sup62, v.sup64, v.final_acc.acc64);
    return 0;
}

void write_convergence_csv(const chns::ConvergenceTable& t, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw chns::IoError("cannot open '" + path + "'");
    std::fprintf(f, "%s,err_phi,err_v\n",
                 t.mode == chns::MmsMode::spatial ? "dx" : "dt");
    for (const auto& r : t.rows)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", r.resolution, r.err_phi, r.err_v);
    std::fclose(f);
}

void print_convergence(const chns::ConvergenceTable& t) {
    std::printf("  %10s %14s %14s\n",
                t.mode == chns::MmsMode::spatial ? "dx" : "dt", "err_phi", "err_v");
    for (const auto& r : t.rows)
        std::printf("  %10.4g %14.6e %14.6e\n", r.resolution, r.err_phi, r.err_v);
    std::printf("  orders (phi):");
    for (double o : t.orders_phi) std::printf(" %.2f", o);
    std::printf("   orders (v):");
    for (double o : t.orders_v) std::printf(" %.2f", o);
    std::printf("\n");
}

int cmd_verify_mms(const std::string& config_path, int levels) {
    chns::LoadedRun run = chns::load_config(config_path);
    if (run.grid.bc != chns::BcMode::periodic)
        throw chns::ConfigError("verify-mms needs grid.bc = periodic");
    chns::ensure_directory(run.output.dir);

    chns::StudyConfig cfg;
    cfg.params = run.params;
    cfg.grid = run.grid;
    cfg.ic = run.ic;
    cfg.t_end = run.t_end;
    cfg.levels = levels;
    const chns::MmsFamily family =
        chns::make_trig_family(run.params, run.grid.lx, run.grid.ly);

    const MmsOrderBands bands;
    bool ok = true;

    std::printf("mms spatial study (%d levels, dt ~ dx^2):\n", levels);
    const chns::ConvergenceTable sp = chns::mms_run(family, cfg, chns::MmsMode::spatial);
    print_convergence(sp);
    write_convergence_csv(sp, run.output.dir + "/mms_spatial.csv");
    const double order_sp = sp.orders_phi.back();
    const double order_sp_v = sp.orders_v.back();
    if (order_sp < bands.spatial_lo || order_sp > bands.spatial_hi ||
        order_sp_v < bands.spatial_lo || order_sp_v > bands.spatial_hi) {
        std::printf("  FAIL: spatial order outside [%.1f, %.1f]\n", bands.spatial_lo,
                    bands.spatial_hi);
        ok = false;
    }

    chns::StudyConfig tcfg = cfg;
    tcfg.levels = std::max(levels, 4);
    std::printf("mms temporal study (%d dt levels, fixed grid):\n", tcfg.levels);
    const chns::ConvergenceTable tp =
        chns::mms_run(family, tcfg, chns::MmsMode::temporal);
    print_convergence(tp);
    write_convergence_csv(tp, run.output.dir + "/mms_temporal.csv");
    const double order_t = tp.orders_phi.back();
    if (order_t < bands.temporal_lo || order_t > bands.temporal_hi) {
        std::printf("  FAIL: temporal order %.2f outside [%.1f, %.1f]\n", order_t,
                    bands.temporal_lo, bands.temporal_hi);
        ok = false;
    }

    std::printf("verify-mms: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : kExitAssertion;
}

int cmd_sweep_eps(const std::string& config_path, const std::string& eps_arg) {
    chns::LoadedRun run = chns::load_config(config_path);
    chns::ensure_directory(run.output.dir);

    chns::StudyConfig cfg;
    cfg.params = run.params;
    cfg.grid = run.grid;
    cfg.ic = run.ic;
    cfg.t_end = run.t_end;
    if (!eps_arg.empty()) {
        cfg.eps_list.clear();
        std::size_t pos = 0;
        while (pos <= eps_arg.size()) {
            const std::size_t comma = eps_arg.find(',', pos);
            const std::string tok = eps_arg.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!tok.empty()) cfg.eps_list.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    const chns::EpsilonStudyResult r = chns::epsilon_study(cfg);

    std::FILE* f = std::fopen((run.output.dir + "/sweep_eps.csv").c_str(), "w");
    if (!f) throw chns::IoError("cannot open sweep_eps.csv");
    std::fprintf(f, "eps,diff_phi,diff_v\n");
    for (std::size_t k = 0; k < r.eps.size(); ++k)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", r.eps[k], r.diff_phi[k], r.diff_v[k]);
    std::fclose(f);

    std::printf("eps sweep vs eps = 0 (T = %g):\n", cfg.t_end);
    std::printf("  %8s %16s %16s\n", "eps", "|phi-phi0|", "|v-v0|");
    for (std::size_t k = 0; k < r.eps.size(); ++k)
        std::printf("  %8.4g %16.8e %16.8e\n", r.eps[k], r.diff_phi[k], r.diff_v[k]);
    if (!r.slopes.empty()) {
        std::printf("  empirical slopes:");
        for (double s : r.slopes) std::printf(" %.2f", s);
        std::printf("\n");
    }
    if (!r.monotone) {
        const int k = r.violating_index;
        std::printf("sweep-eps: FAIL, not strictly decreasing between eps = %g and %g\n",
                    r.eps[k], r.eps[k + 1]);
        return kExitAssertion;
    }
    std::printf("sweep-eps: PASS (strictly decreasing)\n");
    return 0;
}

int cmd_stability(const std::string& config_path, double delta) {
    chns::LoadedRun run = chns::load_config(config_path);
    chns::ensure_directory(run.output.dir);

    chns::StudyConfig cfg;
    cfg.params = run.params;
    cfg.grid = run.grid;
    cfg.ic = run.ic;
    cfg.t_end = run.t_end;
    cfg.delta = delta;

    const chns::StabilityResult r = chns::perturbation_stability(cfg);

    std::FILE* f = std::fopen((run.output.dir + "/stability.csv").c_str(), "w");
    if (!f) throw chns::IoError("cannot open stability.csv");
    std::fprintf(f, "t,r_delta,r_half\n");
    for (std::size_t k = 0; k < r.times.size(); ++k)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", r.times[k], r.r_delta[k], r.r_half[k]);
    std::fclose(f);

    std::printf("perturbation stability (delta = %g, T = %g):\n", delta, cfg.t_end);
    std::printf("  r(0) = %.6e -> r(T) = %.6e, fitted rate %.4g\n", r.r_delta.front(),
                r.r_delta.back(), r.rate_delta);
    std::printf("  delta/2: r(T) = %.6e, fitted rate %.4g\n", r.r_half.back(),
                r.rate_half);
    std::printf("  final ratio r_delta/r_half = %.3f (linear regime ~ 4)\n",
                r.final_ratio);

    if (delta == 0.0) {
        const bool all_zero = r.r_delta.back() == 0.0 && r.r_delta.front() == 0.0;
        std::printf("stability: %s (delta = 0 reproduces the base run)\n",
                    all_zero ? "PASS" : "FAIL");
        return all_zero ? 0 : kExitAssertion;
    }

    const double scale = std::max(std::abs(r.rate_delta), std::abs(r.rate_half));
    const bool rate_stable =
        scale == 0.0 || std::abs(r.rate_delta - r.rate_half) <= 0.5 * scale;
    bool ok = r.envelope_ok && rate_stable;
    if (!r.envelope_ok) std::printf("  FAIL: growth escapes the fitted envelope\n");
    if (!rate_stable) std::printf("  FAIL: fitted rate not stable under delta/2\n");
    std::printf("stability: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : kExitAssertion;
}

int cmd_check_thermo(int samples, std::uint64_t seed) {
    chns::SimParams p; // defaults carry a nonzero lambda coupling
    const chns::ThermoSweepResult r = chns::thermo_sweep(samples, seed, p);
    std::printf("thermo sweep: %d samples, max |cancel| = %.3e (relative), "
                "min entropy production = %.3e\n",
                r.samples, r.max_cancel_rel, r.min_entropy);
    const bool ok = r.max_cancel_rel <= 1e-13 && r.min_entropy >= 0.0;
    std::printf("check-thermo: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : kExitAssertion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled Cahn-Hilliard / Navier-Stokes mixture simulator"};
    app.require_subcommand(1);

    std::string config_path, out_override, eps_arg;
    int levels = 3;
    double delta = 1e-4;
    int samples = 10000;
    std::uint64_t seed = 1;

    CLI::App* run = app.add_subcommand("run", "advance a configured simulation");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_override, "override output.dir");

    CLI::App* mms = app.add_subcommand("verify-mms", "manufactured-solution orders");
    mms->add_option("--config", config_path, "config file (periodic grid)")->required();
    mms->add_option("--levels", levels, "refinement levels (>= 3)");

    CLI::App* sweep = app.add_subcommand("sweep-eps", "eps -> 0 trajectory study");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--eps", eps_arg, "comma list, strictly decreasing, last 0");

    CLI::App* stab = app.add_subcommand("stability", "perturbation-pair growth study");
    stab->add_option("--config", config_path, "config file")->required();
    stab->add_option("--delta", delta, "perturbation amplitude");

    CLI::App* thermo = app.add_subcommand("check-thermo", "pointwise dissipation identity");
    thermo->add_option("--samples", samples, "number of Monte-Carlo samples");
    thermo->add_option("--seed", seed, "SplitMix64 seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) return cmd_run(config_path, out_override);
        if (app.got_subcommand(mms)) return cmd_verify_mms(config_path, levels);
        if (app.got_subcommand(sweep)) return cmd_sweep_eps(config_path, eps_arg);
        if (app.got_subcommand(stab)) return cmd_stability(config_path, delta);
        if (app.got_subcommand(thermo)) return cmd_check_thermo(samples, seed);
    } catch (const chns::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const chns::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const chns::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const chns::IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const chns::FormatError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const chns::NonConvergence& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolver;
    } catch (const chns::BlowUp& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolver;
    } catch (const chns::CflViolation& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolver;
    }
    return 0;
}
