#include "chns/grid.hpp"

#include <cmath>

namespace chns {

const char* to_string(BcMode bc) {
    return bc == BcMode::paper ? "paper" : "periodic";
}

BcMode bc_from_string(const std::string& s) {
    if (s == "paper") return BcMode::paper;
    if (s == "periodic") return BcMode::periodic;
    throw ValidationError("grid.bc", "expected 'paper' or 'periodic', got '" + s + "'");
}

Grid::Grid(int nx_, int ny_, double lx_, double ly_, BcMode bc_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_), bc(bc_) {
    if (nx < 4 || ny < 4)
        throw ValidationError("grid", "nx, ny must be >= 4 (minimum stencil support)");
    if (!(lx > 0.0) || !(ly > 0.0))
        throw ValidationError("grid", "lx, ly must be positive");
}

void VectorField::enforce_bc() {
    const int nx = grid_.nx, ny = grid_.ny;
    if (grid_.bc == BcMode::paper) {
        for (int j = 0; j < ny; ++j) {
            u(0, j) = 0.0;
            u(nx, j) = 0.0;
        }
        for (int i = 0; i < nx; ++i) {
            v(i, 0) = 0.0;
            v(i, ny) = 0.0;
        }
    } else {
        for (int j = 0; j < ny; ++j) u(nx, j) = u(0, j);
        for (int i = 0; i < nx; ++i) v(i, ny) = v(i, 0);
    }
}

// ---------------------------------------------------------------------------
// Laplacian
// ---------------------------------------------------------------------------

void laplacian_into(const ScalarField& f, ScalarField& out) {
    const Grid& g = f.grid();
    const int nx = g.nx, ny = g.ny;
    const double ix2 = 1.0 / (g.dx() * g.dx());
    const double iy2 = 1.0 / (g.dy() * g.dy());
    const bool wrap = g.bc == BcMode::periodic;

    for (int j = 0; j < ny; ++j) {
        // Neumann ghost mirror clamps the neighbor index to the cell itself,
        // which zeroes the boundary-face contribution.
        const int jm = (j > 0) ? j - 1 : (wrap ? ny - 1 : j);
        const int jp = (j < ny - 1) ? j + 1 : (wrap ? 0 : j);
        for (int i = 0; i < nx; ++i) {
            const int im = (i > 0) ? i - 1 : (wrap ? nx - 1 : i);
            const int ip = (i < nx - 1) ? i + 1 : (wrap ? 0 : i);
            const double c = f(i, j);
            out(i, j) = (f(im, j) - 2.0 * c + f(ip, j)) * ix2 +
                        (f(i, jm) - 2.0 * c + f(i, jp)) * iy2;
        }
    }
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid());
    laplacian_into(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Gradient / divergence
// ---------------------------------------------------------------------------

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid();
    const int nx = g.nx, ny = g.ny;
    const double idx = 1.0 / g.dx();
    const double idy = 1.0 / g.dy();
    VectorField out(g);

    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            out.u(i, j) = (f(i, j) - f(i - 1, j)) * idx;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.v(i, j) = (f(i, j) - f(i, j - 1)) * idy;

    if (g.bc == BcMode::periodic) {
        for (int j = 0; j < ny; ++j) {
            out.u(0, j) = (f(0, j) - f(nx - 1, j)) * idx;
            out.u(nx, j) = out.u(0, j);
        }
        for (int i = 0; i < nx; ++i) {
            out.v(i, 0) = (f(i, 0) - f(i, ny - 1)) * idy;
            out.v(i, ny) = out.v(i, 0);
        }
    }
    // paper mode: boundary faces stay 0 (homogeneous Neumann)
    return out;
}

ScalarField divergence(const VectorField& w) {
    const Grid& g = w.grid();
    const int nx = g.nx, ny = g.ny;
    const double idx = 1.0 / g.dx();
    const double idy = 1.0 / g.dy();
    ScalarField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = (w.u(i + 1, j) - w.u(i, j)) * idx +
                        (w.v(i, j + 1) - w.v(i, j)) * idy;
    return out;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

ScalarField advect(const VectorField& w, const ScalarField& f) {
    const Grid& g = f.grid();
    const int nx = g.nx, ny = g.ny;
    const VectorField df = gradient(f);
    ScalarField out(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = 0.5 * (w.u(i, j) * df.u(i, j) + w.u(i + 1, j) * df.u(i + 1, j)) +
                        0.5 * (w.v(i, j) * df.v(i, j) + w.v(i, j + 1) * df.v(i, j + 1));
    return out;
}

VectorField advect(const VectorField& w, const VectorField& a) {
    const Grid& g = a.grid();
    const int nx = g.nx, ny = g.ny;
    const double idx = 1.0 / g.dx();
    const double idy = 1.0 / g.dy();
    const bool wrap = g.bc == BcMode::periodic;
    VectorField out(g);

    // u-component lattice: x-flux points at cell centers, y-flux points at nodes.
    auto uval = [&](int i, int j) { // periodic wrap in both directions
        if (wrap) {
            i = (i % nx + nx) % nx;
            j = (j % ny + ny) % ny;
        }
        return a.u(i, j);
    };
    auto qx_u = [&](int ci, int j) { // ci indexes the cell between u(ci) and u(ci+1)
        const double W = 0.5 * (w.u(ci, j) + w.u(ci + 1, j));
        const double d = (a.u(ci + 1, j) - a.u(ci, j)) * idx;
        return W * d;
    };
    auto qy_u = [&](int i, int jn) { // node (i, jn); jn in 0..ny
        double W, d;
        if (wrap) {
            const int jm = (jn % ny + ny) % ny;
            const int il = (i - 1 + nx) % nx;
            W = 0.5 * (w.v(il, jm) + w.v(i % nx, jm));
            d = (uval(i, jn) - uval(i, jn - 1)) * idy;
        } else {
            W = 0.5 * (w.v(i - 1, jn) + w.v(i, jn));
            if (jn == 0)
                d = 2.0 * a.u(i, 0) * idy; // no-slip ghost: u(-1/2) = -u(+1/2)
            else if (jn == ny)
                d = -2.0 * a.u(i, ny - 1) * idy;
            else
                d = (a.u(i, jn) - a.u(i, jn - 1)) * idy;
        }
        return W * d;
    };

    const int iu0 = wrap ? 0 : 1;
    const int iu1 = wrap ? nx - 1 : nx - 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = iu0; i <= iu1; ++i) {
            const int cl = wrap ? (i - 1 + nx) % nx : i - 1;
            out.u(i, j) = 0.5 * (qx_u(cl, j) + qx_u(i, j)) +
                          0.5 * (qy_u(i, j) + qy_u(i, j + 1));
        }
    }

    // v-component lattice: mirrored construction.
    auto vval = [&](int i, int j) {
        if (wrap) {
            i = (i % nx + nx) % nx;
            j = (j % ny + ny) % ny;
        }
        return a.v(i, j);
    };
    auto qy_v = [&](int i, int cj) { // cell between v(cj) and v(cj+1)
        const double W = 0.5 * (w.v(i, cj) + w.v(i, cj + 1));
        const double d = (a.v(i, cj + 1) - a.v(i, cj)) * idy;
        return W * d;
    };
    auto qx_v = [&](int in, int j) { // node (in, j); in in 0..nx
        double W, d;
        if (wrap) {
            const int im = (in % nx + nx) % nx;
            const int jl = (j - 1 + ny) % ny;
            W = 0.5 * (w.u(im, jl) + w.u(im, j % ny));
            d = (vval(in, j) - vval(in - 1, j)) * idx;
        } else {
            W = 0.5 * (w.u(in, j - 1) + w.u(in, j));
            if (in == 0)
                d = 2.0 * a.v(0, j) * idx;
            else if (in == nx)
                d = -2.0 * a.v(nx - 1, j) * idx;
            else
                d = (a.v(in, j) - a.v(in - 1, j)) * idx;
        }
        return W * d;
    };

    const int jv0 = wrap ? 0 : 1;
    const int jv1 = wrap ? ny - 1 : ny - 1;
    for (int j = jv0; j <= jv1; ++j) {
        const int cl = wrap ? (j - 1 + ny) % ny : j - 1;
        for (int i = 0; i < nx; ++i) {
            out.v(i, j) = 0.5 * (qy_v(i, cl) + qy_v(i, j)) +
                          0.5 * (qx_v(i, j) + qx_v(i + 1, j));
        }
    }

    out.enforce_bc();
    return out;
}

// ---------------------------------------------------------------------------
// Reductions and quadrature
// ---------------------------------------------------------------------------

double field_dot(const ScalarField& a, const ScalarField& b) {
    const double dA = a.grid().cell_area();
    const double* pa = a.data();
    const double* pb = b.data();
    double s = 0.0;
    const int n = a.size();
    for (int k = 0; k < n; ++k) s += pa[k] * pb[k];
    return s * dA;
}

double field_dot(const VectorField& a, const VectorField& b) {
    const Grid& g = a.grid();
    const int nx = g.nx, ny = g.ny;
    // count each physical face once: skip the periodic duplicate layer
    const int iu_end = (g.bc == BcMode::periodic) ? nx : nx + 1;
    const int jv_end = (g.bc == BcMode::periodic) ? ny : ny + 1;
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < iu_end; ++i) s += a.u(i, j) * b.u(i, j);
    for (int j = 0; j < jv_end; ++j)
        for (int i = 0; i < nx; ++i) s += a.v(i, j) * b.v(i, j);
    return s * g.cell_area();
}

double field_sum(const ScalarField& f) {
    const double* p = f.data();
    double s = 0.0;
    const int n = f.size();
    for (int k = 0; k < n; ++k) s += p[k];
    return s * f.grid().cell_area();
}

double field_mean(const ScalarField& f) { return field_sum(f) / f.grid().area(); }

double linf(const ScalarField& f) {
    const double* p = f.data();
    double m = 0.0;
    const int n = f.size();
    for (int k = 0; k < n; ++k) m = std::max(m, std::abs(p[k]));
    return m;
}

double linf(const VectorField& w) {
    double m = 0.0;
    const double* pu = w.u_data();
    for (int k = 0; k < w.u_size(); ++k) m = std::max(m, std::abs(pu[k]));
    const double* pv = w.v_data();
    for (int k = 0; k < w.v_size(); ++k) m = std::max(m, std::abs(pv[k]));
    return m;
}

bool all_finite(const ScalarField& f) {
    const double* p = f.data();
    for (int k = 0; k < f.size(); ++k)
        if (!std::isfinite(p[k])) return false;
    return true;
}

bool all_finite(const VectorField& w) {
    const double* pu = w.u_data();
    for (int k = 0; k < w.u_size(); ++k)
        if (!std::isfinite(pu[k])) return false;
    const double* pv = w.v_data();
    for (int k = 0; k < w.v_size(); ++k)
        if (!std::isfinite(pv[k])) return false;
    return true;
}

double grad_norm_sq(const ScalarField& f) {
    const VectorField g = gradient(f);
    return field_dot(g, g);
}

double grad_norm_sq(const VectorField& w) {
    const Grid& g = w.grid();
    const int nx = g.nx, ny = g.ny;
    const double ix2 = 1.0 / (g.dx() * g.dx());
    const double iy2 = 1.0 / (g.dy() * g.dy());
    const bool wrap = g.bc == BcMode::periodic;
    double s = 0.0;

    // u-component: x-pairs span cells, y-pairs span nodes (+ wall terms)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = w.u(i + 1, j) - w.u(i, j);
            s += d * d * ix2;
        }
    if (wrap) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double d = w.u(i, j) - w.u(i, (j - 1 + ny) % ny);
                s += d * d * iy2;
            }
    } else {
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                const double d = w.u(i, j) - w.u(i, j - 1);
                s += d * d * iy2;
            }
        for (int i = 0; i <= nx; ++i) {
            s += 2.0 * w.u(i, 0) * w.u(i, 0) * iy2;
            s += 2.0 * w.u(i, ny - 1) * w.u(i, ny - 1) * iy2;
        }
    }

    // v-component
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = w.v(i, j + 1) - w.v(i, j);
            s += d * d * iy2;
        }
    if (wrap) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double d = w.v(i, j) - w.v((i - 1 + nx) % nx, j);
                s += d * d * ix2;
            }
    } else {
        for (int j = 0; j <= ny; ++j)
            for (int i = 1; i < nx; ++i) {
                const double d = w.v(i, j) - w.v(i - 1, j);
                s += d * d * ix2;
            }
        for (int j = 0; j <= ny; ++j) {
            s += 2.0 * w.v(0, j) * w.v(0, j) * ix2;
            s += 2.0 * w.v(nx - 1, j) * w.v(nx - 1, j) * ix2;
        }
    }
    return s * g.cell_area();
}

VectorField vector_laplacian(const VectorField& w) {
    const Grid& g = w.grid();
    const int nx = g.nx, ny = g.ny;
    const double ix2 = 1.0 / (g.dx() * g.dx());
    const double iy2 = 1.0 / (g.dy() * g.dy());
    const bool wrap = g.bc == BcMode::periodic;
    VectorField out(g);

    if (wrap) {
        for (int j = 0; j < ny; ++j) {
            const int jm = (j - 1 + ny) % ny, jp = (j + 1) % ny;
            for (int i = 0; i < nx; ++i) {
                const int im = (i - 1 + nx) % nx, ip = (i + 1) % nx;
                out.u(i, j) = (w.u(im, j) - 2.0 * w.u(i, j) + w.u(ip, j)) * ix2 +
                              (w.u(i, jm) - 2.0 * w.u(i, j) + w.u(i, jp)) * iy2;
                out.v(i, j) = (w.v(im, j) - 2.0 * w.v(i, j) + w.v(ip, j)) * ix2 +
                              (w.v(i, jm) - 2.0 * w.v(i, j) + w.v(i, jp)) * iy2;
            }
        }
        // fill the remaining v row (j = ny handled by duplicate)
        out.enforce_bc();
        return out;
    }

    // paper: normal components are Dirichlet data at walls (output 0 there),
    // tangential ghosts odd-reflect so the interpolated wall value vanishes.
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double c = w.u(i, j);
            double lap = (w.u(i - 1, j) - 2.0 * c + w.u(i + 1, j)) * ix2;
            const double yn = (j > 0) ? w.u(i, j - 1) : -c;
            const double yp = (j < ny - 1) ? w.u(i, j + 1) : -c;
            lap += (yn - 2.0 * c + yp) * iy2;
            out.u(i, j) = lap;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = w.v(i, j);
            double lap = (w.v(i, j - 1) - 2.0 * c + w.v(i, j + 1)) * iy2;
            const double xn = (i > 0) ? w.v(i - 1, j) : -c;
            const double xp = (i < nx - 1) ? w.v(i + 1, j) : -c;
            lap += (xn - 2.0 * c + xp) * ix2;
            out.v(i, j) = lap;
        }
    }
    return out;
}

ScalarField center_speed_squared(const VectorField& w) {
    const Grid& g = w.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double uu = 0.5 * (w.u(i, j) * w.u(i, j) + w.u(i + 1, j) * w.u(i + 1, j));
            const double vv = 0.5 * (w.v(i, j) * w.v(i, j) + w.v(i, j + 1) * w.v(i, j + 1));
            out(i, j) = uu + vv;
        }
    return out;
}

double transport_dot(const VectorField& w, const ScalarField& f) {
    const VectorField g = gradient(f);
    return field_dot(w, g);
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

FieldNorms norms(const ScalarField& f) {
    FieldNorms n;
    const double l2sq = field_dot(f, f);
    const double h1sq = l2sq + grad_norm_sq(f);
    const ScalarField lap = laplacian(f);
    const double h2sq = h1sq + field_dot(lap, lap);
    n.l2 = std::sqrt(l2sq);
    n.h1 = std::sqrt(h1sq);
    n.h2 = std::sqrt(h2sq);
    return n;
}

FieldNorms norms(const VectorField& w) {
    FieldNorms n;
    const double l2sq = field_dot(w, w);
    const double h1sq = l2sq + grad_norm_sq(w);
    const VectorField lap = vector_laplacian(w);
    const double h2sq = h1sq + field_dot(lap, lap);
    n.l2 = std::sqrt(l2sq);
    n.h1 = std::sqrt(h1sq);
    n.h2 = std::sqrt(h2sq);
    return n;
}

} // namespace chns
