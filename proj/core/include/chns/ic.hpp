#pragma once

/// Initial-condition families and the construction of a fully initialized
/// State (phi0, v0 projected to the discrete divergence-free space, p = 0,
/// mu0 from its Helmholtz problem).

#include <cstdint>
#include <string>

#include "chns/grid.hpp"
#include "chns/model.hpp"
#include "chns/stepper.hpp"

namespace chns {

struct IcSpec {
    enum class Kind { uniform_noise, tanh_stripe, tanh_disk } kind = Kind::uniform_noise;
    enum class VKind { zero, shear, taylor_green } v_kind = VKind::zero;
    double amplitude = 0.01;
    double mean = 0.0;
    std::uint64_t seed = 1;
};

IcSpec::Kind ic_kind_from_string(const std::string& s);
IcSpec::VKind v_kind_from_string(const std::string& s);

/// phi0 builder. uniform_noise draws SplitMix64 uniforms in [-1, 1] cell by
/// cell (row-major) and is mean-corrected to hit ic.mean exactly; the tanh
/// profiles use the equilibrium width sqrt(2 kappa).
ScalarField build_phi0(const Grid& g, const IcSpec& ic, const SimParams& p);

/// v0 per ic.v_kind (taylor_green requires periodic bc; validated upstream).
VectorField build_v0(const Grid& g, const IcSpec& ic);

/// Mean-zero, unit-L2-norm noise field (perturbation studies).
ScalarField build_unit_noise(const Grid& g, std::uint64_t seed);

/// Assembles the initial State: builds phi0 and v0, projects v0 onto the
/// discrete divergence-free space, and solves for mu0.
State build_initial_state(const Grid& g, const IcSpec& ic, const SimParams& p);

} // namespace chns
