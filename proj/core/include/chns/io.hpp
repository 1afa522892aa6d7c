#pragma once

/// Persistence: raw little-endian float64 snapshots with JSON sidecars,
/// the fixed-schema time-series CSV, and PGM rendering.
///
/// Snapshot contract: payload is row-major (y outer, x inner), no header;
/// the sidecar (same basename, .json) holds
///   {field, nx, ny, lx, ly, time, bc, layout}
/// with layout one of cell_center | x_face | y_face. Round-trips are
/// bit-exact; vector fields are stored as two snapshots.

#include <cstdint>
#include <string>
#include <vector>

#include "chns/diagnostics.hpp"
#include "chns/grid.hpp"
#include "chns/stepper.hpp"

namespace chns {

struct SnapshotMeta {
    std::string field;
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double time = 0.0;
    std::string bc;
    std::string layout; // cell_center | x_face | y_face
};

struct Snapshot {
    SnapshotMeta meta;
    std::vector<double> data;
};

/// Writes base.raw + base.json. Scalar fields use layout cell_center.
void write_snapshot(const ScalarField& f, const std::string& field_name,
                    double time, const std::string& base);

/// Writes the two component snapshots base_u / base_v (x_face, y_face).
void write_snapshot(const VectorField& w, const std::string& u_base,
                    const std::string& v_base, double time);

/// Loads one snapshot from base (or base.raw / base.json paths).
/// Throws FormatError on payload/sidecar mismatch.
Snapshot read_snapshot(const std::string& base);

ScalarField to_scalar_field(const Snapshot& s);
/// Reassembles a MAC field from its two component snapshots.
VectorField to_vector_field(const Snapshot& u_snap, const Snapshot& v_snap);

/// Writes phi/mu/p/u/v snapshots for one step under dir (phi_000042, ...).
void write_state_snapshot(const State& s, const std::string& dir, int step);
/// Reads them back. Throws FormatError if any sidecar disagrees with g.
State read_state_snapshot(const std::string& dir, int step, const Grid& g);

/// Time-series CSV with the fixed 13-column header, 17 significant digits.
class SeriesWriter {
public:
    explicit SeriesWriter(const std::string& path);
    ~SeriesWriter();
    void write(const DiagnosticsRecord& r);
    void flush();
    static const char* header();

private:
    void* file_ = nullptr;
    bool header_written_ = false;
};

/// Binary PGM (P5), 8-bit, phi mapped linearly from [-1.2, 1.2] (clamped)
/// to [0, 255] with round-half-away-from-zero; row 0 is the top of the
/// domain.
void render_pgm(const ScalarField& phi, const std::string& path);

/// Creates dir (and parents) if needed; throws IoError on failure.
void ensure_directory(const std::string& dir);

} // namespace chns
