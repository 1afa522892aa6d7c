#pragma once

/// Symmetric positive-(semi)definite solves used by the stepper: Helmholtz
/// operators (a I - b Lap) and the pressure Poisson equation, with Neumann
/// nullspace handling. Default engine is unpreconditioned conjugate
/// gradients; a spectral engine (DCT/FFT diagonalization, exact on the
/// uniform rectangular grids this library uses) is available as a fast path
/// and is validated against the CG/dense oracles in the test suite.

#include <functional>
#include <span>
#include <vector>

#include "chns/grid.hpp"

namespace chns {

enum class NullspaceFix { project_mean_zero, pin_one_cell };
enum class SolverEngine { cg, spectral };

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iter = 0; // 0 -> auto: 10 * nx * ny
    NullspaceFix nullspace_fix = NullspaceFix::project_mean_zero;
    SolverEngine engine = SolverEngine::cg;
    // tracks work across calls; purely informational
    mutable long total_iterations = 0;
};

struct CgResult {
    int iterations = 0;
    double residual = 0.0; // |Ax - b| in the plain euclidean norm
    bool converged = false;
};

/// Unpreconditioned CG on a generic SPD operator given as a callable
/// apply(x, out). Optional projector runs on the residual every iteration
/// (nullspace removal); optional probe observes iterates (used by tests to
/// check the energy-norm monotonicity of the error).
CgResult conjugate_gradient(
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    std::span<const double> b, std::span<double> x, double rel_tol, int max_iter,
    const std::function<void(std::span<double>)>& project = nullptr,
    const std::function<void(int, std::span<const double>)>& probe = nullptr);

/// Solves (a I - b Lap) x = rhs with the grid's boundary mode.
///
/// a = 0 makes the operator singular on Neumann/periodic grids: the rhs mean
/// must satisfy |mean| <= rel_tol * |rhs|_L2 (IncompatibleRhs otherwise), the
/// mean is removed before solving, and the solution is normalized per
/// cfg.nullspace_fix. Throws NonConvergence when max_iter is exhausted.
ScalarField solve_helmholtz(double a, double b, const ScalarField& rhs, BcMode bc,
                            const SolverConfig& cfg);

/// Solves lap(p) = rhs: a thin wrapper over solve_helmholtz(a = 0, b = 1)
/// with the sign flipped and mean-zero normalization; Neumann in paper mode.
ScalarField solve_pressure_poisson(const ScalarField& rhs, const SolverConfig& cfg);

/// Exact inverse of (a I - b Lap) on a uniform rectangular grid, via DCT-II
/// (Neumann) or real FFT (periodic) diagonalization. For a = 0 the zero mode
/// is dropped: input mean removed, output mean zero.
class SpectralHelmholtz {
public:
    SpectralHelmholtz(const Grid& g, double a, double b);
    ~SpectralHelmholtz();
    SpectralHelmholtz(const SpectralHelmholtz&) = delete;
    SpectralHelmholtz& operator=(const SpectralHelmholtz&) = delete;

    void solve(const ScalarField& rhs, ScalarField& x) const;
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    double a_, b_;
    std::vector<double> eig_x_, eig_y_;
    double* real_buf_ = nullptr; // fftw-aligned planning buffers
    double* spec_buf_ = nullptr;
    void* fwd_ = nullptr; // fftw plans
    void* bwd_ = nullptr;
};

namespace detail {
/// Residual of (a I - b Lap) x - rhs, recomputed independently of the solve
/// path; shared by the residual-contract checks.
double helmholtz_residual_l2(double a, double b, const ScalarField& x,
                             const ScalarField& rhs);
} // namespace detail

} // namespace chns
