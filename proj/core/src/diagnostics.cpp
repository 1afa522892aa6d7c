#include "chns/diagnostics.hpp"

#include <cmath>

#include "chns/stepper.hpp"

namespace chns {

double mass(const ScalarField& phi) { return field_sum(phi); }

double divergence_max(const VectorField& v) { return linf(divergence(v)); }

double energy_budget_residual(const State& prev, const State& next,
                              const StepReport& report, const SimParams& p) {
    const double e_prev = total_energy(prev, p);
    const double e_next = total_energy(next, p);
    const double diss = dissipation_rate(next, report.phi_dot_material, p);
    return e_next - e_prev + p.dt * diss - p.dt * report.force_power;
}

namespace {

double h3_surrogate_sq(const ScalarField& phi) {
    // |phi| + |grad lap phi|, squared
    const ScalarField lap = laplacian(phi);
    const double l2 = std::sqrt(field_dot(phi, phi));
    const double gl = std::sqrt(grad_norm_sq(lap));
    const double s = l2 + gl;
    return s * s;
}

} // namespace

DiagnosticsRecord make_record(const State& prev, const State& next,
                              const StepReport& report, const SimParams& p,
                              AprioriAccumulators& acc) {
    DiagnosticsRecord r;
    const double dt = p.dt;
    r.t = next.t;
    r.mass = mass(next.phi);
    r.energy = total_energy(next, p);
    r.dissipation = dissipation_rate(next, report.phi_dot_material, p);
    r.budget_residual = energy_budget_residual(prev, next, report, p);
    r.div_max = divergence_max(next.v);

    const FieldNorms nv = norms(next.v);
    const FieldNorms nphi = norms(next.phi);
    const FieldNorms nmu = norms(next.mu);
    r.l2_v = nv.l2;
    r.h1_phi = nphi.h1;
    r.h2_phi = nphi.h2;
    r.l2_grad_mu = std::sqrt(grad_norm_sq(next.mu));

    // backward differences for the rate norms
    ScalarField phi_t = next.phi;
    {
        double* pd = phi_t.data();
        const double* po = prev.phi.data();
        for (int k = 0; k < phi_t.size(); ++k) pd[k] = (pd[k] - po[k]) / dt;
    }
    double vt_sq = 0.0;
    {
        VectorField v_t = next.v;
        const Grid& g = next.v.grid();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                v_t.u(i, j) = (v_t.u(i, j) - prev.v.u(i, j)) / dt;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                v_t.v(i, j) = (v_t.v(i, j) - prev.v.v(i, j)) / dt;
        vt_sq = field_dot(v_t, v_t);
    }

    const double grad_mu_sq = r.l2_grad_mu * r.l2_grad_mu;
    const double v_h1_sq = nv.h1 * nv.h1;
    const double phi_t_sq = field_dot(phi_t, phi_t);
    const double phi_h2_sq = nphi.h2 * nphi.h2;
    acc.acc62 += dt * (grad_mu_sq + v_h1_sq + phi_t_sq + phi_h2_sq);

    acc.acc63 += dt * (nmu.h2 * nmu.h2);

    const double grad_phi_t_sq = grad_norm_sq(phi_t);
    // |Av| taken as the unprojected |lap v|: exact for periodic, an upper
    // bound under no-slip walls
    const VectorField lap_v = vector_laplacian(next.v);
    const double av_sq = field_dot(lap_v, lap_v);
    acc.acc64 += dt * (grad_phi_t_sq + h3_surrogate_sq(next.phi) + av_sq + vt_sq);

    r.acc62 = acc.acc62;
    r.acc63 = acc.acc63;
    r.acc64 = acc.acc64;

    const double eps = p.epsilon;
    r.group62 = nv.l2 * nv.l2 + nphi.h1 * nphi.h1 + eps * nmu.l2 * nmu.l2;
    r.group63 = eps * nmu.h1 * nmu.h1;
    const ScalarField lap_phi = laplacian(next.phi);
    r.group64 = field_dot(lap_phi, lap_phi) + grad_norm_sq(next.v);
    return r;
}

DiagnosticsRecord make_initial_record(const State& s, const SimParams& p) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = mass(s.phi);
    r.energy = total_energy(s, p);
    r.div_max = divergence_max(s.v);
    const FieldNorms nv = norms(s.v);
    const FieldNorms nphi = norms(s.phi);
    const FieldNorms nmu = norms(s.mu);
    r.l2_v = nv.l2;
    r.h1_phi = nphi.h1;
    r.h2_phi = nphi.h2;
    r.l2_grad_mu = std::sqrt(grad_norm_sq(s.mu));
    r.group62 = nv.l2 * nv.l2 + nphi.h1 * nphi.h1 + p.epsilon * nmu.l2 * nmu.l2;
    r.group63 = p.epsilon * nmu.h1 * nmu.h1;
    const ScalarField lap_phi = laplacian(s.phi);
    r.group64 = field_dot(lap_phi, lap_phi) + grad_norm_sq(s.v);
    return r;
}

void AprioriMonitor::observe(const DiagnosticsRecord& r) {
    if (failed_) return;
    auto fail = [&](const std::string& why) {
        failed_ = true;
        verdict_.bounded = false;
        verdict_.first_failure_t = r.t;
        verdict_.reason = why;
    };
    const double vals[] = {r.mass,  r.energy, r.dissipation, r.budget_residual,
                           r.div_max, r.l2_v, r.h1_phi,      r.h2_phi,
                           r.l2_grad_mu, r.acc62, r.acc63,   r.acc64,
                           r.group62, r.group63, r.group64};
    for (double v : vals)
        if (!std::isfinite(v)) {
            fail("non-finite diagnostic value");
            return;
        }
    verdict_.sup62 = std::max(verdict_.sup62, r.group62);
    verdict_.sup63 = std::max(verdict_.sup63, r.group63);
    verdict_.sup64 = std::max(verdict_.sup64, r.group64);
    verdict_.final_acc.acc62 = r.acc62;
    verdict_.final_acc.acc63 = r.acc63;
    verdict_.final_acc.acc64 = r.acc64;

    if (verdict_.sup62 > ceiling_ || verdict_.sup63 > ceiling_ ||
        verdict_.sup64 > ceiling_)
        fail("instantaneous group above ceiling");
    else if (r.acc62 > ceiling_ || r.acc63 > ceiling_ || r.acc64 > ceiling_)
        fail("accumulator above ceiling");
}

} // namespace chns
