#include "chns/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace chns {

namespace {

using nlohmann::json;

std::string strip_known_extension(const std::string& base) {
    if (base.size() > 4 && base.substr(base.size() - 4) == ".raw")
        return base.substr(0, base.size() - 4);
    if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
        return base.substr(0, base.size() - 5);
    return base;
}

std::size_t expected_count(const SnapshotMeta& m) {
    if (m.layout == "cell_center") return static_cast<std::size_t>(m.nx) * m.ny;
    if (m.layout == "x_face") return static_cast<std::size_t>(m.nx + 1) * m.ny;
    if (m.layout == "y_face") return static_cast<std::size_t>(m.nx) * (m.ny + 1);
    throw FormatError("unknown layout '" + m.layout + "'");
}

void write_payload(const std::string& path, const double* data, std::size_t count) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw IoError("short write to '" + path + "'");
}

void write_sidecar(const std::string& path, const SnapshotMeta& m) {
    json j;
    j["field"] = m.field;
    j["nx"] = m.nx;
    j["ny"] = m.ny;
    j["lx"] = m.lx;
    j["ly"] = m.ly;
    j["time"] = m.time;
    j["bc"] = m.bc;
    j["layout"] = m.layout;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to '" + path + "'");
}

SnapshotMeta meta_for(const Grid& g, const std::string& field, double time,
                      const std::string& layout) {
    SnapshotMeta m;
    m.field = field;
    m.nx = g.nx;
    m.ny = g.ny;
    m.lx = g.lx;
    m.ly = g.ly;
    m.time = time;
    m.bc = to_string(g.bc);
    m.layout = layout;
    return m;
}

std::string step_base(const std::string& dir, const std::string& field, int step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%06d", step);
    return dir + "/" + field + buf;
}

} // namespace

void write_snapshot(const ScalarField& f, const std::string& field_name,
                    double time, const std::string& base) {
    const SnapshotMeta m = meta_for(f.grid(), field_name, time, "cell_center");
    write_payload(base + ".raw", f.data(), expected_count(m));
    write_sidecar(base + ".json", m);
}

void write_snapshot(const VectorField& w, const std::string& u_base,
                    const std::string& v_base, double time) {
    const Grid& g = w.grid();
    const SnapshotMeta mu_ = meta_for(g, "u", time, "x_face");
    write_payload(u_base + ".raw", w.u_data(), expected_count(mu_));
    write_sidecar(u_base + ".json", mu_);
    const SnapshotMeta mv_ = meta_for(g, "v", time, "y_face");
    write_payload(v_base + ".raw", w.v_data(), expected_count(mv_));
    write_sidecar(v_base + ".json", mv_);
}

Snapshot read_snapshot(const std::string& path) {
    const std::string base = strip_known_extension(path);
    Snapshot s;

    std::ifstream side(base + ".json");
    if (!side) throw IoError("cannot read sidecar '" + base + ".json'");
    json j;
    try {
        side >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad sidecar json: " + std::string(e.what()));
    }
    try {
        s.meta.field = j.at("field").get<std::string>();
        s.meta.nx = j.at("nx").get<int>();
        s.meta.ny = j.at("ny").get<int>();
        s.meta.lx = j.at("lx").get<double>();
        s.meta.ly = j.at("ly").get<double>();
        s.meta.time = j.at("time").get<double>();
        s.meta.bc = j.at("bc").get<std::string>();
        s.meta.layout = j.at("layout").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError("sidecar missing field: " + std::string(e.what()));
    }

    const std::size_t count = expected_count(s.meta);
    std::ifstream raw(base + ".raw", std::ios::binary | std::ios::ate);
    if (!raw) throw IoError("cannot read payload '" + base + ".raw'");
    const std::streamsize bytes = raw.tellg();
    const std::streamsize want = static_cast<std::streamsize>(count * sizeof(double));
    if (bytes != want)
        throw FormatError("payload '" + base + ".raw' holds " + std::to_string(bytes) +
                          " bytes, expected " + std::to_string(want));
    raw.seekg(0);
    s.data.resize(count);
    raw.read(reinterpret_cast<char*>(s.data.data()), want);
    if (!raw) throw IoError("short read from '" + base + ".raw'");
    return s;
}

ScalarField to_scalar_field(const Snapshot& s) {
    if (s.meta.layout != "cell_center")
        throw FormatError("snapshot '" + s.meta.field + "' is not cell-centered");
    Grid g(s.meta.nx, s.meta.ny, s.meta.lx, s.meta.ly, bc_from_string(s.meta.bc));
    ScalarField f(g);
    std::memcpy(f.data(), s.data.data(), s.data.size() * sizeof(double));
    return f;
}

VectorField to_vector_field(const Snapshot& u_snap, const Snapshot& v_snap) {
    if (u_snap.meta.layout != "x_face" || v_snap.meta.layout != "y_face")
        throw FormatError("vector snapshots must be (x_face, y_face)");
    if (u_snap.meta.nx != v_snap.meta.nx || u_snap.meta.ny != v_snap.meta.ny)
        throw FormatError("u/v snapshots disagree on the grid");
    Grid g(u_snap.meta.nx, u_snap.meta.ny, u_snap.meta.lx, u_snap.meta.ly,
           bc_from_string(u_snap.meta.bc));
    VectorField w(g);
    std::memcpy(w.u_data(), u_snap.data.data(), u_snap.data.size() * sizeof(double));
    std::memcpy(w.v_data(), v_snap.data.data(), v_snap.data.size() * sizeof(double));
    return w;
}

void write_state_snapshot(const State& s, const std::string& dir, int step) {
    write_snapshot(s.phi, "phi", s.t, step_base(dir, "phi", step));
    write_snapshot(s.mu, "mu", s.t, step_base(dir, "mu", step));
    write_snapshot(s.p, "p", s.t, step_base(dir, "p", step));
    write_snapshot(s.v, step_base(dir, "u", step), step_base(dir, "v", step), s.t);
}

namespace {

void check_grid(const SnapshotMeta& m, const Grid& g, const char* what) {
    if (m.nx != g.nx || m.ny != g.ny || m.lx != g.lx || m.ly != g.ly ||
        m.bc != to_string(g.bc))
        throw FormatError(std::string(what) + " sidecar disagrees with the grid");
}

} // namespace

State read_state_snapshot(const std::string& dir, int step, const Grid& g) {
    State s;
    const Snapshot sp = read_snapshot(step_base(dir, "phi", step));
    check_grid(sp.meta, g, "phi");
    const Snapshot sm = read_snapshot(step_base(dir, "mu", step));
    check_grid(sm.meta, g, "mu");
    const Snapshot spr = read_snapshot(step_base(dir, "p", step));
    check_grid(spr.meta, g, "p");
    const Snapshot su = read_snapshot(step_base(dir, "u", step));
    check_grid(su.meta, g, "u");
    const Snapshot sv = read_snapshot(step_base(dir, "v", step));
    check_grid(sv.meta, g, "v");
    s.phi = to_scalar_field(sp);
    s.mu = to_scalar_field(sm);
    s.p = to_scalar_field(spr);
    s.v = to_vector_field(su, sv);
    s.t = sp.meta.time;
    return s;
}

// ---------------------------------------------------------------------------
// Series CSV
// ---------------------------------------------------------------------------

const char* SeriesWriter::header() {
    return "t,mass,energy,dissipation,budget_residual,div_max,l2_v,h1_phi,"
           "h2_phi,l2_grad_mu,acc62,acc63,acc64";
}

SeriesWriter::SeriesWriter(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open series file '" + path + "'");
    file_ = f;
}

SeriesWriter::~SeriesWriter() {
    if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

void SeriesWriter::write(const DiagnosticsRecord& r) {
    std::FILE* f = static_cast<std::FILE*>(file_);
    if (!header_written_) {
        std::fprintf(f, "%s\n", header());
        header_written_ = true;
    }
    const double cols[] = {r.t,      r.mass,  r.energy, r.dissipation,
                           r.budget_residual, r.div_max, r.l2_v, r.h1_phi,
                           r.h2_phi, r.l2_grad_mu, r.acc62, r.acc63, r.acc64};
    for (std::size_t k = 0; k < std::size(cols); ++k)
        std::fprintf(f, k == 0 ? "%.17g" : ",%.17g", cols[k]);
    std::fprintf(f, "\n");
}

void SeriesWriter::flush() {
    if (file_) std::fflush(static_cast<std::FILE*>(file_));
}

// ---------------------------------------------------------------------------
// PGM rendering
// ---------------------------------------------------------------------------

void render_pgm(const ScalarField& phi, const std::string& path) {
    const Grid& g = phi.grid();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "P5\n" << g.nx << " " << g.ny << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(g.nx));
    for (int r = 0; r < g.ny; ++r) {
        const int j = g.ny - 1 - r; // row 0 = top of the domain
        for (int i = 0; i < g.nx; ++i) {
            double x = (phi(i, j) + 1.2) / 2.4 * 255.0;
            x = std::min(255.0, std::max(0.0, x));
            row[static_cast<std::size_t>(i)] =
                static_cast<unsigned char>(std::lround(x));
        }
        out.write(reinterpret_cast<const char*>(row.data()), g.nx);
    }
    if (!out) throw IoError("short write to '" + path + "'");
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

} // namespace chns
