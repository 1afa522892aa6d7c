#pragma once

/// Discrete geometry, field storage and finite-difference operators on a
/// uniform rectangular MAC grid: scalars (phi, mu, p) at cell centers,
/// velocity components at face centers. Two boundary modes:
///
///   paper    — homogeneous Neumann for scalars (ghost-cell mirror),
///              no-slip Dirichlet for velocity (normal faces pinned to 0,
///              tangential ghosts odd-reflected),
///   periodic — all fields wrap; the duplicate face layers u(nx,.) and
///              v(.,ny) are kept in sync with u(0,.) / v(.,0).
///
/// All operators are pure: they never mutate their inputs and hold no state,
/// so concurrent calls on distinct fields are safe.

#include <cstddef>
#include <string>
#include <vector>

#include "chns/errors.hpp"

namespace chns {

enum class BcMode { paper, periodic };

const char* to_string(BcMode bc);
BcMode bc_from_string(const std::string& s); // throws ValidationError

struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    BcMode bc = BcMode::paper;

    Grid() = default;
    Grid(int nx, int ny, double lx, double ly, BcMode bc);

    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double cell_area() const { return dx() * dy(); }
    double area() const { return lx * ly; }

    int cell_count() const { return nx * ny; }
    int u_count() const { return (nx + 1) * ny; } // x-face values
    int v_count() const { return nx * (ny + 1); } // y-face values

    // coordinates: cell centers and face positions
    double xc(int i) const { return (i + 0.5) * dx(); }
    double yc(int j) const { return (j + 0.5) * dy(); }
    double xf(int i) const { return i * dx(); }
    double yf(int j) const { return j * dy(); }

    bool same_layout(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly && bc == o.bc;
    }
};

/// Cell-centered scalar field. Row-major storage, y outer / x inner.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid_(g), data_(static_cast<std::size_t>(g.cell_count()), fill) {}

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(data_.size()); }

    double& operator()(int i, int j) { return data_[idx(i, j)]; }
    double operator()(int i, int j) const { return data_[idx(i, j)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    void fill(double v) { data_.assign(data_.size(), v); }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * grid_.nx + i;
    }
    Grid grid_;
    std::vector<double> data_;
};

/// MAC vector field: u on x-faces ((nx+1) x ny), v on y-faces (nx x (ny+1)).
/// Invariants enforced by enforce_bc():
///   paper:    u(0,j) = u(nx,j) = 0 and v(i,0) = v(i,ny) = 0 (no penetration),
///   periodic: u(nx,j) = u(0,j) and v(i,ny) = v(i,0) (duplicate layer).
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g)
        : grid_(g),
          u_(static_cast<std::size_t>(g.u_count()), 0.0),
          v_(static_cast<std::size_t>(g.v_count()), 0.0) {}

    const Grid& grid() const { return grid_; }

    double& u(int i, int j) { return u_[uidx(i, j)]; }
    double u(int i, int j) const { return u_[uidx(i, j)]; }
    double& v(int i, int j) { return v_[vidx(i, j)]; }
    double v(int i, int j) const { return v_[vidx(i, j)]; }

    double* u_data() { return u_.data(); }
    const double* u_data() const { return u_.data(); }
    double* v_data() { return v_.data(); }
    const double* v_data() const { return v_.data(); }

    int u_size() const { return static_cast<int>(u_.size()); }
    int v_size() const { return static_cast<int>(v_.size()); }

    void fill(double a) {
        u_.assign(u_.size(), a);
        v_.assign(v_.size(), a);
    }

    /// Re-establish the boundary invariant for the grid's bc mode.
    void enforce_bc();

private:
    std::size_t uidx(int i, int j) const {
        return static_cast<std::size_t>(j) * (grid_.nx + 1) + i;
    }
    std::size_t vidx(int i, int j) const {
        return static_cast<std::size_t>(j) * grid_.nx + i;
    }
    Grid grid_;
    std::vector<double> u_, v_;
};

struct FieldNorms {
    double l2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
};

// ---------------------------------------------------------------------------
// Differential operators
// ---------------------------------------------------------------------------

/// 5-point Laplacian. paper: Neumann ghost mirror; periodic: wrap.
ScalarField laplacian(const ScalarField& f);
void laplacian_into(const ScalarField& f, ScalarField& out);

/// Face-centered gradient (cell-to-cell difference across each face).
/// paper: zero normal gradient on boundary faces.
VectorField gradient(const ScalarField& f);

/// Cell-centered MAC divergence; exact adjoint of gradient up to sign,
/// and divergence(gradient(f)) == laplacian(f) as a stencil identity.
ScalarField divergence(const VectorField& w);

/// Cell-centered transport term w . grad(f): the product w * (face difference
/// of f) is formed on faces and averaged to centers. Centered and
/// conservative: the cell sum equals -(div_h w, f), so it vanishes to solver
/// tolerance for projected velocities, and advect(w, const) = 0 exactly.
ScalarField advect(const VectorField& w, const ScalarField& f);

/// Transport of a MAC velocity field by itself/another velocity (the (w.grad)a
/// term of the momentum equation). Same face-product construction applied on
/// each component's shifted lattice; exactly energy-neutral when div_h w = 0.
VectorField advect(const VectorField& w, const VectorField& a);

/// Discrete L2 / H1 / H2 norms. H1 adds the face-gradient seminorm, H2 adds
/// the Laplacian surrogate (norm equivalence on Neumann/periodic domains).
FieldNorms norms(const ScalarField& f);
FieldNorms norms(const VectorField& w);

// ---------------------------------------------------------------------------
// Quadrature, reductions and helpers used across modules
// ---------------------------------------------------------------------------

/// Componentwise 5-point Laplacian of a MAC velocity field. paper mode uses
/// the wall ghosts: normal components are Dirichlet points on the boundary,
/// tangential components odd-reflect so the interpolated wall value is 0.
VectorField vector_laplacian(const VectorField& w);

double field_dot(const ScalarField& a, const ScalarField& b); // sum a*b*dA
double field_dot(const VectorField& a, const VectorField& b); // unique faces
double field_sum(const ScalarField& f);                       // sum f*dA
double field_mean(const ScalarField& f);                      // sum f*dA / |Omega|
double linf(const ScalarField& f);
double linf(const VectorField& w);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& w);

/// Face-gradient seminorm squared: sum over faces of |grad f|^2 dA. Exact
/// summation-by-parts counterpart of the cell Laplacian: equals -(f, lap f).
double grad_norm_sq(const ScalarField& f);

/// Velocity-gradient seminorm squared, the SBP dual of vector_laplacian
/// (includes the 2*(u/dy)^2 wall terms produced by the no-slip ghosts).
double grad_norm_sq(const VectorField& w);

/// Average of the squared face values of each component, at cell centers.
/// This is the adjoint of face-averaging, which is what makes the
/// lambda-coupling terms of the discrete energy budget cancel.
ScalarField center_speed_squared(const VectorField& w);

/// Sum over faces of w . grad(f) dA (equals the cell sum of advect(w, f)).
double transport_dot(const VectorField& w, const ScalarField& f);

} // namespace chns
