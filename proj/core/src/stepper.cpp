#include "chns/stepper.hpp"

#include <cmath>
#include <cstring>

namespace chns {

namespace {

constexpr double kBlowUpCeiling = 1e8;
constexpr double kCflFraction = 0.4;

void axpy(ScalarField& y, double a, const ScalarField& x) {
    double* py = y.data();
    const double* px = x.data();
    for (int k = 0; k < y.size(); ++k) py[k] += a * px[k];
}

void subtract_mean(ScalarField& f) {
    const double m = field_mean(f);
    double* p = f.data();
    for (int k = 0; k < f.size(); ++k) p[k] -= m;
}

} // namespace

ScalarField init_mu0(const ScalarField& phi0, const VectorField& v0,
                     const SimParams& p) {
    const Grid& g = phi0.grid();
    ScalarField rhs = local_potential_field(phi0, v0, p);
    ScalarField lap(g);
    laplacian_into(phi0, lap);
    double* pr = rhs.data();
    const double* pl = lap.data();
    for (int k = 0; k < rhs.size(); ++k) pr[k] -= p.kappa * pl[k];
    return solve_helmholtz(1.0, p.beta * p.gamma, rhs, g.bc, p.solver);
}

ScalarField project_divergence_free(VectorField& v, const SpectralHelmholtz& poisson,
                                    double dt) {
    const Grid& g = v.grid();
    ScalarField rhs = divergence(v);
    // lap(p) = div(v)/dt; the spectral operator inverts (a I - b lap)
    double* pr = rhs.data();
    for (int k = 0; k < rhs.size(); ++k) pr[k] = -pr[k] / dt;
    ScalarField p(g);
    poisson.solve(rhs, p);
    subtract_mean(p);
    const VectorField gp = gradient(p);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.u(i, j) -= dt * gp.u(i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.v(i, j) -= dt * gp.v(i, j);
    v.enforce_bc();
    return p;
}

Stepper::Stepper(const Grid& g, const SimParams& p)
    : grid_(g),
      params_(p),
      inner_(g, p.epsilon / p.dt, p.gamma),
      pressure_(g, 0.0, 1.0) {
    params_.validate();
}

double Stepper::stabilization_coefficient(const ScalarField& phi) const {
    if (!params_.stab_auto) return params_.stab_s;
    double m = 0.0;
    const double* f = phi.data();
    for (int k = 0; k < phi.size(); ++k)
        m = std::max(m, std::abs(3.0 * f[k] * f[k] + params_.u));
    return 2.0 * std::max(1.0, m);
}

void Stepper::check_blowup(double t, const ScalarField& f, const char* name) const {
    const double m = linf(f);
    if (!std::isfinite(m) || m > kBlowUpCeiling) throw BlowUp(t, name, m);
}

void Stepper::check_blowup(double t, const VectorField& f, const char* name) const {
    const double m = linf(f);
    if (!std::isfinite(m) || m > kBlowUpCeiling) throw BlowUp(t, name, m);
}

// ---------------------------------------------------------------------------
// phi-mu step (Schur complement, outer CG)
// ---------------------------------------------------------------------------

std::pair<ScalarField, ScalarField> Stepper::step_phi_mu(const State& s,
                                                         StepReport& rep) {
    const Grid& g = grid_;
    const SimParams& p = params_;
    const int n = g.cell_count();
    const double dt = p.dt;
    const double t_new = s.t + dt;
    const double S = stabilization_coefficient(s.phi);
    const double a_coef = p.beta / dt + S;
    const bool singular = p.epsilon == 0.0;
    rep.stabilization = S;

    const ScalarField adv = advect(s.v, s.phi);
    const ScalarField pot = local_potential_field(s.phi, s.v, p);

    ScalarField src_phi(g), src_mu(g);
    VectorField src_v(g);
    if (source_) source_(t_new, src_phi, src_mu, src_v);

    // R_A = a_coef phi - beta adv - pot + src_phi
    ScalarField r_a(g);
    {
        double* pa = r_a.data();
        const double* pp = s.phi.data();
        const double* pd = adv.data();
        const double* pq = pot.data();
        const double* ps = src_phi.data();
        for (int k = 0; k < n; ++k)
            pa[k] = a_coef * pp[k] - p.beta * pd[k] - pq[k] + ps[k];
    }
    // R_B = (eps/dt) mu + phi/dt - adv + src_mu
    ScalarField r_b(g);
    {
        double* pb = r_b.data();
        const double* pm = s.mu.data();
        const double* pp = s.phi.data();
        const double* pd = adv.data();
        const double* ps = src_mu.data();
        const double ed = p.epsilon / dt;
        for (int k = 0; k < n; ++k)
            pb[k] = ed * pm[k] + pp[k] / dt - pd[k] + ps[k];
    }

    // mean bookkeeping for the singular (eps = 0) branch
    double mean_target = 0.0, c_mu = 0.0;
    if (singular) {
        const double m_phi = field_mean(s.phi);
        const double m_adv = field_mean(adv);
        const double m_smu = field_mean(src_mu);
        const double m_pot = field_mean(pot);
        const double m_sphi = field_mean(src_phi);
        mean_target = m_phi + dt * (m_smu - m_adv);
        c_mu = a_coef * (mean_target - m_phi) + p.beta * m_adv + m_pot - m_sphi;
    }

    ScalarField tmp_in(g), tmp_lap(g), tmp_t(g);
    int inner_count = 0;
    auto apply_schur = [&](std::span<const double> x, std::span<double> out) {
        std::memcpy(tmp_in.data(), x.data(), sizeof(double) * n);
        laplacian_into(tmp_in, tmp_lap);
        inner_.solve(tmp_in, tmp_t);
        ++inner_count;
        const double* pi = tmp_in.data();
        const double* pl = tmp_lap.data();
        const double* pt = tmp_t.data();
        for (int k = 0; k < n; ++k)
            out[k] = a_coef * pi[k] - p.kappa * pl[k] + pt[k] / dt;
    };

    // b = R_A + T(R_B); in the singular branch the constant content of b is
    // exactly c_mu - a_coef * mean_target by the mean identity, and the CG
    // runs on the fluctuation space, so it is projected out
    ScalarField b(g);
    inner_.solve(r_b, b);
    ++inner_count;
    axpy(b, 1.0, r_a);
    if (singular) subtract_mean(b);

    ScalarField x(g);
    {
        // warm start from the previous phi (its fluctuation when singular)
        std::memcpy(x.data(), s.phi.data(), sizeof(double) * n);
        if (singular) subtract_mean(x);
    }

    std::function<void(std::span<double>)> project;
    if (singular) {
        project = [n](std::span<double> v) {
            double m = 0.0;
            for (int k = 0; k < n; ++k) m += v[k];
            m /= n;
            for (int k = 0; k < n; ++k) v[k] -= m;
        };
    }

    const int max_iter = p.solver.max_iter > 0 ? p.solver.max_iter : 10 * n;
    const CgResult cr = conjugate_gradient(
        apply_schur, std::span<const double>(b.data(), static_cast<std::size_t>(n)),
        std::span<double>(x.data(), static_cast<std::size_t>(n)), p.solver.rel_tol,
        max_iter, project);
    if (!cr.converged)
        throw NonConvergence(cr.iterations, cr.residual, "step_phi_mu (outer CG)");
    rep.outer_iterations += cr.iterations;

    ScalarField phi_new = x;
    if (singular) {
        double* pp = phi_new.data();
        for (int k = 0; k < n; ++k) pp[k] += mean_target;
    }

    // recover mu from the second equation
    ScalarField mu_rhs = r_b;
    axpy(mu_rhs, -1.0 / dt, phi_new);
    ScalarField mu_new(g);
    inner_.solve(mu_rhs, mu_new);
    ++inner_count;
    if (singular) {
        double* pm = mu_new.data();
        for (int k = 0; k < n; ++k) pm[k] += c_mu;
    }
    rep.inner_solves += inner_count;

    // material derivative for forces, dissipation and the budget
    rep.phi_dot_material = adv;
    {
        double* pd = rep.phi_dot_material.data();
        const double* pn = phi_new.data();
        const double* po = s.phi.data();
        for (int k = 0; k < n; ++k) pd[k] += (pn[k] - po[k]) / dt;
    }

    check_blowup(t_new, phi_new, "phi");
    check_blowup(t_new, mu_new, "mu");
    return {std::move(phi_new), std::move(mu_new)};
}

// ---------------------------------------------------------------------------
// Momentum predictor + projection
// ---------------------------------------------------------------------------

namespace {

/// CG solve of ((1/dt) I - nu lap) on one MAC component lattice. Dirichlet
/// zeros (paper) and periodic duplicates are excluded from the unknown set by
/// identity rows; ghosts odd-reflect across walls.
struct ComponentHelmholtz {
    const Grid& g;
    bool is_u; // else v-component
    double inv_dt, nu;

    int ncols() const { return is_u ? g.nx + 1 : g.nx; }
    int nrows() const { return is_u ? g.ny : g.ny + 1; }
    std::size_t size() const { return static_cast<std::size_t>(ncols()) * nrows(); }

    bool unknown(int i, int j) const {
        if (g.bc == BcMode::periodic)
            return is_u ? (i < g.nx) : (j < g.ny);
        return is_u ? (i >= 1 && i <= g.nx - 1) : (j >= 1 && j <= g.ny - 1);
    }

    void apply(std::span<const double> x, std::span<double> out) const {
        const int nc = ncols(), nr = nrows();
        const int nx = g.nx, ny = g.ny;
        const double ix2 = 1.0 / (g.dx() * g.dx());
        const double iy2 = 1.0 / (g.dy() * g.dy());
        const bool wrap = g.bc == BcMode::periodic;
        auto at = [&](int i, int j) -> double {
            return x[static_cast<std::size_t>(j) * nc + i];
        };
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < nc; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * nc + i;
                if (!unknown(i, j)) {
                    out[k] = x[k];
                    continue;
                }
                const double c = at(i, j);
                double xm, xp, ym, yp;
                if (is_u) {
                    if (wrap) {
                        xm = at((i - 1 + nx) % nx, j);
                        xp = at((i + 1) % nx, j);
                        ym = at(i, (j - 1 + ny) % ny);
                        yp = at(i, (j + 1) % ny);
                    } else {
                        xm = at(i - 1, j); // walls are stored zeros
                        xp = at(i + 1, j);
                        ym = (j > 0) ? at(i, j - 1) : -c;
                        yp = (j < ny - 1) ? at(i, j + 1) : -c;
                    }
                } else {
                    if (wrap) {
                        xm = at((i - 1 + nx) % nx, j);
                        xp = at((i + 1) % nx, j);
                        ym = at(i, (j - 1 + ny) % ny);
                        yp = at(i, (j + 1) % ny);
                    } else {
                        ym = at(i, j - 1);
                        yp = at(i, j + 1);
                        xm = (i > 0) ? at(i - 1, j) : -c;
                        xp = (i < nx - 1) ? at(i + 1, j) : -c;
                    }
                }
                const double lap = (xm - 2.0 * c + xp) * ix2 + (ym - 2.0 * c + yp) * iy2;
                out[k] = inv_dt * c - nu * lap;
            }
    }
};

} // namespace

std::pair<VectorField, ScalarField> Stepper::step_momentum(const State& s,
                                                           const ScalarField& phi_new,
                                                           const ScalarField& mu_new,
                                                           StepReport& rep) {
    const Grid& g = grid_;
    const SimParams& p = params_;
    const double dt = p.dt;
    const double t_new = s.t + dt;

    const VectorField adv_v = advect(s.v, s.v);
    const VectorField f_cap = capillary_force(phi_new, mu_new, p);
    const VectorField f_con =
        constitutive_force(phi_new, rep.phi_dot_material, s.v, p);

    VectorField f_ext(g);
    const bool has_force = !p.force.is_zero();
    if (has_force) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                f_ext.u(i, j) = p.force.eval(g.xf(i), g.yc(j), t_new, g.lx, g.ly).x;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f_ext.v(i, j) = p.force.eval(g.xc(i), g.yf(j), t_new, g.lx, g.ly).y;
        f_ext.enforce_bc();
    }

    VectorField src_v(g);
    if (source_) {
        ScalarField dummy_a(g), dummy_b(g);
        source_(t_new, dummy_a, dummy_b, src_v);
    }

    // predictor rhs on each lattice
    VectorField rhs(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            rhs.u(i, j) = s.v.u(i, j) / dt - adv_v.u(i, j) + f_cap.u(i, j) +
                          f_con.u(i, j) + f_ext.u(i, j) + src_v.u(i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            rhs.v(i, j) = s.v.v(i, j) / dt - adv_v.v(i, j) + f_cap.v(i, j) +
                          f_con.v(i, j) + f_ext.v(i, j) + src_v.v(i, j);

    VectorField vstar = s.v; // warm start
    const int max_iter = p.solver.max_iter > 0 ? p.solver.max_iter : 10 * g.cell_count();

    for (const bool is_u : {true, false}) {
        ComponentHelmholtz op{g, is_u, 1.0 / dt, p.nu};
        double* xd = is_u ? vstar.u_data() : vstar.v_data();
        double* bd = is_u ? rhs.u_data() : rhs.v_data();
        const std::size_t m = op.size();
        // zero the non-unknown entries of b and x so identity rows stay exact
        for (int j = 0; j < op.nrows(); ++j)
            for (int i = 0; i < op.ncols(); ++i)
                if (!op.unknown(i, j)) {
                    bd[static_cast<std::size_t>(j) * op.ncols() + i] = 0.0;
                    xd[static_cast<std::size_t>(j) * op.ncols() + i] = 0.0;
                }
        auto apply = [&op](std::span<const double> x, std::span<double> out) {
            op.apply(x, out);
        };
        const CgResult cr = conjugate_gradient(
            apply, std::span<const double>(bd, m), std::span<double>(xd, m),
            p.solver.rel_tol, max_iter);
        if (!cr.converged)
            throw NonConvergence(cr.iterations, cr.residual, "step_momentum predictor");
        rep.momentum_iterations += cr.iterations;
    }
    vstar.enforce_bc();

    // projection
    ScalarField p_new = project_divergence_free(vstar, pressure_, dt);
    rep.pressure_solves += 1;
    VectorField v_new = std::move(vstar);

    if (has_force) rep.force_power = field_dot(f_ext, v_new);

    check_blowup(t_new, v_new, "v");
    return {std::move(v_new), std::move(p_new)};
}

// ---------------------------------------------------------------------------
// Full step
// ---------------------------------------------------------------------------

DiagnosticsRecord Stepper::advance(State& s) {
    const double vmax = linf(s.v);
    const double h = std::min(grid_.dx(), grid_.dy());
    const double bound = kCflFraction * h / std::max(vmax, 1e-12);
    if (params_.dt > bound) throw CflViolation(params_.dt, bound);

    const State prev = s;
    StepReport rep;
    auto [phi_new, mu_new] = step_phi_mu(s, rep);
    auto [v_new, p_new] = step_momentum(s, phi_new, mu_new, rep);

    s.phi = std::move(phi_new);
    s.mu = std::move(mu_new);
    s.v = std::move(v_new);
    s.p = std::move(p_new);
    s.t = prev.t + params_.dt;

    return make_record(prev, s, rep, params_, acc_);
}

} // namespace chns
