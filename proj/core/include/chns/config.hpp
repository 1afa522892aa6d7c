#pragma once

/// Flat key=value run configuration. '#' starts a comment, blank lines are
/// ignored, keys are dotted (grid.nx, phys.kappa, ...). Unknown and duplicate
/// keys are hard errors; every SimParams constraint is re-validated on load.

#include <cstdint>
#include <string>

#include "chns/grid.hpp"
#include "chns/ic.hpp"
#include "chns/model.hpp"

namespace chns {

struct OutputSpec {
    std::string dir = "out";
    int snapshot_every = 0; // 0: final snapshot only
    int series_every = 1;
    bool render = false;
};

struct RunSetup {
    SimParams params;
    Grid grid;
    IcSpec ic;
    OutputSpec output;
    double t_end = 1.0;
    int total_steps() const { return static_cast<int>(std::llround(t_end / params.dt)); }
};

/// Parses and validates config text. Throws ParseError / ValidationError.
RunSetup parse_config_text(const std::string& text);

struct LoadedRun {
    SimParams params;
    Grid grid;
    State state;
    IcSpec ic;
    OutputSpec output;
    double t_end = 1.0;
    int total_steps() const { return static_cast<int>(std::llround(t_end / params.dt)); }
};

/// Reads, validates and materializes a run: config -> (SimParams, Grid,
/// initial State). Throws IoError on unreadable files.
LoadedRun load_config(const std::string& path);

/// Materializes the initial state for an already parsed setup.
LoadedRun materialize(const RunSetup& setup);

} // namespace chns
