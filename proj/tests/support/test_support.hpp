#pragma once

// Shared oracles and builders for the unit suites. Everything here is kept
// independent of the implementation paths it is used to check: the dense
// solver is plain Gaussian elimination on an explicitly assembled matrix, the
// stencil oracles are re-derived loops.

#include <cstdint>
#include <vector>

#include "chns/grid.hpp"

namespace chns::test {

/// Dense (a I - b Lap) matrix in row-major cell ordering, ghost-mirror
/// Neumann or periodic wrap. Assembled entry by entry, no reuse of grid.cpp.
std::vector<double> assemble_helmholtz_dense(const Grid& g, double a, double b);

/// Gaussian elimination with partial pivoting; A is n x n row-major.
/// Returns x with A x = rhs. For the singular a = 0 operator, pass
/// pin_constant = true to replace the last row with the mean constraint.
std::vector<double> dense_solve(std::vector<double> A, std::vector<double> rhs,
                                bool pin_constant = false);

/// Uniform [-1, 1] random cell field from a fixed seed.
ScalarField random_scalar(const Grid& g, std::uint64_t seed, double amplitude = 1.0);

/// Random MAC field with the grid's boundary invariant enforced.
VectorField random_vector(const Grid& g, std::uint64_t seed, double amplitude = 1.0);

/// Exactly divergence-free MAC field: discrete curl of a random node-centered
/// stream function (zeroed on the boundary nodes in paper mode, so the normal
/// components vanish identically).
VectorField random_solenoidal(const Grid& g, std::uint64_t seed, double amplitude = 1.0);

} // namespace chns::test
