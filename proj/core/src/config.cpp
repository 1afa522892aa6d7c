#include "chns/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace chns {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class KeyTable {
public:
    explicit KeyTable(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            const auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError(lineno, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError(lineno, "empty key");
            if (val.empty()) throw ParseError(lineno, "empty value for '" + key + "'");
            if (entries_.count(key))
                throw ValidationError(key, "duplicate key (first at line " +
                                               std::to_string(entries_[key].line) + ")");
            entries_[key] = Entry{val, lineno, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(it->second.value.c_str(), &end);
        if (errno != 0 || end == it->second.value.c_str() || *end != '\0')
            throw ValidationError(key, "not a number: '" + it->second.value + "'");
        return v;
    }

    int get_int(const std::string& key, int dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        char* end = nullptr;
        errno = 0;
        const long v = std::strtol(it->second.value.c_str(), &end, 10);
        if (errno != 0 || end == it->second.value.c_str() || *end != '\0')
            throw ValidationError(key, "not an integer: '" + it->second.value + "'");
        return static_cast<int>(v);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(it->second.value.c_str(), &end, 10);
        if (errno != 0 || end == it->second.value.c_str() || *end != '\0')
            throw ValidationError(key, "not an unsigned integer: '" + it->second.value + "'");
        return static_cast<std::uint64_t>(v);
    }

    bool get_bool(const std::string& key, bool dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        if (it->second.value == "true") return true;
        if (it->second.value == "false") return false;
        throw ValidationError(key, "expected true or false");
    }

    void reject_unconsumed() const {
        for (const auto& [key, e] : entries_)
            if (!e.consumed) throw ValidationError(key, "unknown key");
    }

private:
    std::map<std::string, Entry> entries_;
};

} // namespace

RunSetup parse_config_text(const std::string& text) {
    KeyTable kt(text);
    RunSetup r;

    const int nx = kt.get_int("grid.nx", 64);
    const int ny = kt.get_int("grid.ny", 64);
    const double lx = kt.get_double("grid.lx", 1.0);
    const double ly = kt.get_double("grid.ly", 1.0);
    const BcMode bc = bc_from_string(kt.get_string("grid.bc", "paper"));
    r.grid = Grid(nx, ny, lx, ly, bc);

    SimParams& p = r.params;
    p.kappa = kt.get_double("phys.kappa", p.kappa);
    p.beta = kt.get_double("phys.beta", p.beta);
    p.gamma = kt.get_double("phys.gamma", p.gamma);
    p.nu = kt.get_double("phys.nu", p.nu);
    p.lambda = kt.get_double("phys.lambda", p.lambda);
    p.u = kt.get_double("phys.u", p.u);
    p.epsilon = kt.get_double("phys.epsilon", p.epsilon);
    const std::string stab = kt.get_string("phys.stab_S", "auto");
    if (stab == "auto") {
        p.stab_auto = true;
    } else {
        p.stab_auto = false;
        char* end = nullptr;
        p.stab_s = std::strtod(stab.c_str(), &end);
        if (end == stab.c_str() || *end != '\0')
            throw ValidationError("phys.stab_S", "expected a number or 'auto'");
    }

    p.dt = kt.get_double("time.dt", p.dt);
    r.t_end = kt.get_double("time.t_end", r.t_end);
    if (!(r.t_end > 0.0)) throw ValidationError("time.t_end", "must be > 0");

    r.ic.kind = ic_kind_from_string(kt.get_string("ic.kind", "uniform_noise"));
    r.ic.amplitude = kt.get_double("ic.amplitude", r.ic.amplitude);
    r.ic.mean = kt.get_double("ic.mean", r.ic.mean);
    r.ic.seed = kt.get_u64("ic.seed", r.ic.seed);
    r.ic.v_kind = v_kind_from_string(kt.get_string("ic.v_kind", "zero"));
    if (r.ic.v_kind == IcSpec::VKind::taylor_green && bc != BcMode::periodic)
        throw ValidationError("ic.v_kind", "taylor_green requires grid.bc = periodic");

    const std::string fk = kt.get_string("force.kind", "zero");
    if (fk == "zero") {
        p.force.kind = ForceSpec::Kind::zero;
    } else if (fk == "constant") {
        p.force.kind = ForceSpec::Kind::constant;
        p.force.fx = kt.get_double("force.fx", 0.0);
        p.force.fy = kt.get_double("force.fy", 0.0);
    } else if (fk == "trig") {
        p.force.kind = ForceSpec::Kind::trig;
        p.force.amplitude = kt.get_double("force.amplitude", 0.0);
        p.force.kx = kt.get_double("force.kx", 1.0);
        p.force.ky = kt.get_double("force.ky", 1.0);
        p.force.omega = kt.get_double("force.omega", 0.0);
    } else {
        throw ValidationError("force.kind", "expected zero, constant or trig");
    }

    r.output.dir = kt.get_string("output.dir", r.output.dir);
    r.output.snapshot_every = kt.get_int("output.snapshot_every", r.output.snapshot_every);
    r.output.series_every = kt.get_int("output.series_every", r.output.series_every);
    r.output.render = kt.get_bool("output.render", r.output.render);
    if (r.output.snapshot_every < 0)
        throw ValidationError("output.snapshot_every", "must be >= 0");
    if (r.output.series_every < 1)
        throw ValidationError("output.series_every", "must be >= 1");

    p.solver.rel_tol = kt.get_double("solver.rel_tol", p.solver.rel_tol);
    p.solver.max_iter = kt.get_int("solver.max_iter", p.solver.max_iter);
    if (!(p.solver.rel_tol > 0.0 && p.solver.rel_tol < 1.0))
        throw ValidationError("solver.rel_tol", "must lie in (0, 1)");
    if (p.solver.max_iter < 0)
        throw ValidationError("solver.max_iter", "must be >= 0 (0 = auto)");

    kt.reject_unconsumed();
    p.validate();
    if (r.total_steps() < 1)
        throw ValidationError("time.t_end", "shorter than one time step");
    return r;
}

LoadedRun materialize(const RunSetup& setup) {
    LoadedRun run;
    run.params = setup.params;
    run.grid = setup.grid;
    run.ic = setup.ic;
    run.output = setup.output;
    run.t_end = setup.t_end;
    run.state = build_initial_state(setup.grid, setup.ic, setup.params);
    return run;
}

LoadedRun load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return materialize(parse_config_text(buf.str()));
}

} // namespace chns
