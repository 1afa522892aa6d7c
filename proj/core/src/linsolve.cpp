#include "chns/linsolve.hpp"

#include <cmath>
#include <cstring>
#include <fftw3.h>

namespace chns {

// ---------------------------------------------------------------------------
// Generic CG
// ---------------------------------------------------------------------------

CgResult conjugate_gradient(
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    std::span<const double> b, std::span<double> x, double rel_tol, int max_iter,
    const std::function<void(std::span<double>)>& project,
    const std::function<void(int, std::span<const double>)>& probe) {
    const std::size_t n = b.size();
    CgResult res;

    double bnorm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) bnorm2 += b[k] * b[k];
    const double bnorm = std::sqrt(bnorm2);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    const double tol = rel_tol * bnorm;

    std::vector<double> r(n), p(n), Ap(n);
    apply(x, std::span<double>(Ap));
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - Ap[k];
    if (project) project(std::span<double>(r));
    p = r;

    double rr = 0.0;
    for (std::size_t k = 0; k < n; ++k) rr += r[k] * r[k];

    int it = 0;
    while (it < max_iter && std::sqrt(rr) > tol) {
        apply(std::span<const double>(p), std::span<double>(Ap));
        double pAp = 0.0;
        for (std::size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
        if (pAp <= 0.0) break; // lost positive definiteness (round-off); bail to contract check
        const double alpha = rr / pAp;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        if (project) project(std::span<double>(r));
        double rr_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) rr_new += r[k] * r[k];
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        ++it;
        if (probe) probe(it, std::span<const double>(x));
    }

    res.iterations = it;
    res.residual = std::sqrt(rr);
    res.converged = res.residual <= tol;
    return res;
}

// ---------------------------------------------------------------------------
// Spectral Helmholtz
// ---------------------------------------------------------------------------

SpectralHelmholtz::SpectralHelmholtz(const Grid& g, double a, double b)
    : grid_(g), a_(a), b_(b) {
    const int nx = g.nx, ny = g.ny;
    eig_x_.resize(nx);
    eig_y_.resize(ny);
    real_buf_ = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    if (g.bc == BcMode::paper) {
        for (int k = 0; k < nx; ++k)
            eig_x_[k] = 2.0 / (g.dx() * g.dx()) * (1.0 - std::cos(M_PI * k / nx));
        for (int k = 0; k < ny; ++k)
            eig_y_[k] = 2.0 / (g.dy() * g.dy()) * (1.0 - std::cos(M_PI * k / ny));
        // FFTW_ESTIMATE keeps planning deterministic (bit-reproducible runs)
        fwd_ = fftw_plan_r2r_2d(ny, nx, real_buf_, real_buf_,
                                FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
        bwd_ = fftw_plan_r2r_2d(ny, nx, real_buf_, real_buf_,
                                FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    } else {
        for (int k = 0; k < nx; ++k)
            eig_x_[k] = 2.0 / (g.dx() * g.dx()) * (1.0 - std::cos(2.0 * M_PI * k / nx));
        for (int k = 0; k < ny; ++k)
            eig_y_[k] = 2.0 / (g.dy() * g.dy()) * (1.0 - std::cos(2.0 * M_PI * k / ny));
        // r2c layout: ny rows of (nx/2 + 1) complex values
        spec_buf_ = fftw_alloc_real(static_cast<std::size_t>(ny) * (nx / 2 + 1) * 2);
        fwd_ = fftw_plan_dft_r2c_2d(ny, nx, real_buf_,
                                    reinterpret_cast<fftw_complex*>(spec_buf_),
                                    FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(ny, nx, reinterpret_cast<fftw_complex*>(spec_buf_),
                                    real_buf_, FFTW_ESTIMATE);
    }
}

SpectralHelmholtz::~SpectralHelmholtz() {
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    if (real_buf_) fftw_free(real_buf_);
    if (spec_buf_) fftw_free(spec_buf_);
}

void SpectralHelmholtz::solve(const ScalarField& rhs, ScalarField& x) const {
    const int nx = grid_.nx, ny = grid_.ny;
    std::memcpy(real_buf_, rhs.data(), sizeof(double) * nx * ny);
    if (grid_.bc == BcMode::paper) {
        fftw_execute(static_cast<fftw_plan>(fwd_));
        const double scale = 1.0 / (4.0 * nx * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double den = a_ + b_ * (eig_x_[i] + eig_y_[j]);
                double& c = real_buf_[static_cast<std::size_t>(j) * nx + i];
                c = (den > 0.0) ? c * scale / den : 0.0; // drop the zero mode when a = 0
            }
        fftw_execute(static_cast<fftw_plan>(bwd_));
    } else {
        const int ncx = nx / 2 + 1;
        fftw_execute(static_cast<fftw_plan>(fwd_));
        const double scale = 1.0 / (static_cast<double>(nx) * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < ncx; ++i) {
                const double den = a_ + b_ * (eig_x_[i] + eig_y_[j]);
                const std::size_t k = 2 * (static_cast<std::size_t>(j) * ncx + i);
                if (den > 0.0) {
                    spec_buf_[k] *= scale / den;
                    spec_buf_[k + 1] *= scale / den;
                } else {
                    spec_buf_[k] = spec_buf_[k + 1] = 0.0;
                }
            }
        fftw_execute(static_cast<fftw_plan>(bwd_));
    }
    std::memcpy(x.data(), real_buf_, sizeof(double) * nx * ny);
}

// ---------------------------------------------------------------------------
// Public solves
// ---------------------------------------------------------------------------

namespace detail {

double helmholtz_residual_l2(double a, double b, const ScalarField& x,
                             const ScalarField& rhs) {
    ScalarField lap(x.grid());
    laplacian_into(x, lap);
    double s = 0.0;
    const int n = x.size();
    const double* px = x.data();
    const double* pl = lap.data();
    const double* pr = rhs.data();
    for (int k = 0; k < n; ++k) {
        const double r = a * px[k] - b * pl[k] - pr[k];
        s += r * r;
    }
    return std::sqrt(s * x.grid().cell_area());
}

} // namespace detail

ScalarField solve_helmholtz(double a, double b, const ScalarField& rhs, BcMode bc,
                            const SolverConfig& cfg) {
    if (a < 0.0) throw ValidationError("solver", "helmholtz coefficient a must be >= 0");
    if (!(b > 0.0)) throw ValidationError("solver", "helmholtz coefficient b must be > 0");
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
        throw ValidationError("solver.rel_tol", "must lie in (0, 1)");

    Grid g = rhs.grid();
    g.bc = bc;
    ScalarField f(g);
    std::memcpy(f.data(), rhs.data(), sizeof(double) * rhs.size());

    const int n = g.cell_count();
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * n;
    const bool singular = a == 0.0;

    double rhs_l2 = 0.0;
    for (int k = 0; k < n; ++k) rhs_l2 += f.data()[k] * f.data()[k];
    rhs_l2 = std::sqrt(rhs_l2 * g.cell_area());

    if (singular) {
        const double m = field_mean(f);
        if (std::abs(m) > cfg.rel_tol * std::max(rhs_l2, 1e-300))
            throw IncompatibleRhs(m, cfg.rel_tol * rhs_l2);
        for (int k = 0; k < n; ++k) f.data()[k] -= m;
    }

    ScalarField x(g);

    if (cfg.engine == SolverEngine::spectral) {
        SpectralHelmholtz sp(g, a, b);
        sp.solve(f, x);
    } else {
        ScalarField tmp_in(g), tmp_lap(g);
        auto apply = [&](std::span<const double> in, std::span<double> out) {
            std::memcpy(tmp_in.data(), in.data(), sizeof(double) * n);
            laplacian_into(tmp_in, tmp_lap);
            const double* pi = tmp_in.data();
            const double* pl = tmp_lap.data();
            for (int k = 0; k < n; ++k) out[k] = a * pi[k] - b * pl[k];
        };
        std::function<void(std::span<double>)> project;
        if (singular && cfg.nullspace_fix == NullspaceFix::project_mean_zero) {
            project = [n](std::span<double> v) {
                double m = 0.0;
                for (int k = 0; k < n; ++k) m += v[k];
                m /= n;
                for (int k = 0; k < n; ++k) v[k] -= m;
            };
        }
        const CgResult cr = conjugate_gradient(
            apply, std::span<const double>(f.data(), static_cast<std::size_t>(n)),
            std::span<double>(x.data(), static_cast<std::size_t>(n)), cfg.rel_tol,
            max_iter, project);
        cfg.total_iterations += cr.iterations;
        if (!cr.converged)
            throw NonConvergence(cr.iterations, cr.residual, "solve_helmholtz");
    }

    if (singular) {
        if (cfg.nullspace_fix == NullspaceFix::project_mean_zero) {
            const double m = field_mean(x);
            for (int k = 0; k < n; ++k) x.data()[k] -= m;
        } else {
            const double pin = x.data()[0];
            for (int k = 0; k < n; ++k) x.data()[k] -= pin;
        }
    }

    // residual contract: verify against an independently recomputed residual
    const double resid = detail::helmholtz_residual_l2(a, b, x, f);
    if (resid > 10.0 * cfg.rel_tol * std::max(rhs_l2, 1e-300) && rhs_l2 > 0.0)
        throw NonConvergence(max_iter, resid, "solve_helmholtz (post-check)");
    return x;
}

ScalarField solve_pressure_poisson(const ScalarField& rhs, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.nullspace_fix = NullspaceFix::project_mean_zero;
    // lap(p) = rhs: flip the sign to match the (a I - b lap) convention
    ScalarField neg(rhs.grid());
    const double* pr = rhs.data();
    for (int k = 0; k < rhs.size(); ++k) neg.data()[k] = -pr[k];
    ScalarField p = solve_helmholtz(0.0, 1.0, neg, rhs.grid().bc, c);
    cfg.total_iterations += c.total_iterations;
    return p;
}

} // namespace chns
