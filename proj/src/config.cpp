#include "chemflow/config.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class KeyTree {
public:
    explicit KeyTree(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (!entries_.emplace(key, value).second)
                throw ConfigError("duplicate key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return parse_number(key, take(key));
    }
    int integer(const std::string& key, int fallback) {
        const double v = number(key, fallback);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw ConfigError(key + ": expected an integer");
        return i;
    }
    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const std::string v = take(key);
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
        }
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = take(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError(key + ": expected true or false, got '" + v + "'");
    }
    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return take(key);
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const std::string v = take(key);
        std::vector<double> out;
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) out.push_back(parse_number(key, trim(item)));
        if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
        return out;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : entries_)
            if (!consumed_.count(k)) throw ConfigError("unknown key '" + k + "'");
    }

private:
    std::string take(const std::string& key) {
        consumed_.insert(key);
        return entries_.at(key);
    }
    static double parse_number(const std::string& key, const std::string& v) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError(key + ": expected a number, got '" + v + "'");
        return x;
    }

    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
};

std::array<double, 3> vector_of(KeyTree& t, const std::string& key, int dim,
                                std::array<double, 3> fallback) {
    if (!t.has(key)) return fallback;
    const auto v = t.numbers(key, {});
    if (static_cast<int>(v.size()) != dim)
        throw ConfigError(key + ": expected " + std::to_string(dim) + " entries");
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) out[a] = v[a];
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    KeyTree t(text);
    RunConfig rc;
    SimParams& p = rc.params;

    const int dim = t.integer("domain.dim", 2);
    if (dim != 2 && dim != 3) throw ConfigError("domain.dim: must be 2 or 3");
    std::vector<double> def_len(dim, 1.0);
    std::vector<double> lengths = t.numbers("domain.lengths", def_len);
    std::vector<double> def_cells(dim, 16.0);
    std::vector<double> cells_d = t.numbers("domain.cells", def_cells);
    std::vector<int> cells;
    for (double v : cells_d) {
        const int c = static_cast<int>(v);
        if (static_cast<double>(c) != v) throw ConfigError("domain.cells: expected integers");
        cells.push_back(c);
    }
    p.domain = make_domain(dim, lengths, cells);

    p.reaction.chi = t.number("reaction.chi", 0.0);
    p.reaction.kappa = t.number("reaction.kappa", 0.0);
    p.reaction.mu = t.number("reaction.mu", 1.0);
    p.reaction.eps = t.number("reaction.eps", 1e-3);
    p.reaction.pos_tol = t.number("reaction.pos_tol", 0.0);

    {
        const std::string phi = t.text("forcing.phi", "zero");
        if (phi == "zero")
            p.forcing.potential = ForcingSpec::Potential::Zero;
        else if (phi == "linear")
            p.forcing.potential = ForcingSpec::Potential::Linear;
        else
            throw ConfigError("forcing.phi: expected zero or linear, got '" + phi + "'");
        p.forcing.gravity = vector_of(t, "forcing.phi.g", dim, {0.0, 0.0, 0.0});

        const std::string f = t.text("forcing.f", "zero");
        if (f == "zero")
            p.forcing.force = ForcingSpec::Force::Zero;
        else if (f == "exp_sine")
            p.forcing.force = ForcingSpec::Force::ExpSine;
        else
            throw ConfigError("forcing.f: expected zero or exp_sine, got '" + f + "'");
        p.forcing.force_amplitude = vector_of(t, "forcing.f.amplitude", dim, {0.0, 0.0, 0.0});
        p.forcing.force_lambda = t.number("forcing.f.lambda", 1.0);
    }

    auto init_spec = [&](const std::string& key) {
        InitSpec s;
        const std::string kind = t.text(key, "constant");
        if (kind == "constant")
            s.kind = InitSpec::Kind::Constant;
        else if (kind == "bump")
            s.kind = InitSpec::Kind::Bump;
        else if (kind == "perturbed")
            s.kind = InitSpec::Kind::Perturbed;
        else
            throw ConfigError(key + ": expected constant, bump or perturbed, got '" + kind + "'");
        s.value = t.number(key + ".value", 1.0);
        s.amplitude = t.number(key + ".amplitude", 0.0);
        return s;
    };
    p.n0 = init_spec("init.n0");
    p.c0 = init_spec("init.c0");
    {
        const std::string kind = t.text("init.u0", "zero");
        if (kind == "zero")
            p.u0.kind = VelocityInitSpec::Kind::Zero;
        else if (kind == "perturbed")
            p.u0.kind = VelocityInitSpec::Kind::Perturbed;
        else
            throw ConfigError("init.u0: expected zero or perturbed, got '" + kind + "'");
        p.u0.max_norm = t.number("init.u0.max_norm", 0.0);
    }

    p.t_end = t.number("time.t_end", 1.0);
    p.dt_max = t.number("time.dt_max", 0.1);
    p.cfl_safety = t.number("time.cfl_safety", 0.4);
    p.sample_every = t.number("time.sample_every", 0.1);

    p.solver.rel_tol = t.number("solver.rel_tol", 1e-10);
    p.solver.max_iter = t.integer("solver.max_iter", 50000);

    p.seed = t.unsigned64("run.seed", 1);
    rc.scenario = t.text("run.scenario", "run");

    rc.output_dir = t.text("output.dir", "out");
    rc.snapshot_every = t.number("output.snapshot_every", 0.0);
    rc.checkpoint_every = t.number("output.checkpoint_every", 0.0);

    p.y_exponent = t.number("diagnostics.y_exponent", 2.0);
    p.p_norms = t.numbers("diagnostics.p_norms", {2.0, 4.0});
    p.diag_K = t.number("diagnostics.K", 1.0);
    p.y_slack = t.number("diagnostics.y_slack", 1.05);
    p.mass_slack = t.number("diagnostics.mass_slack", 0.5);

    p.flags.implicit_diffusion = t.boolean("flags.implicit_diffusion", false);
    p.flags.buoyancy_demeaned = t.boolean("flags.buoyancy_demeaned", false);
    p.flags.disable_reaction = t.boolean("flags.disable_reaction", false);

    t.reject_unknown();

    if (rc.snapshot_every < 0.0) throw ConfigError("output.snapshot_every: must be > 0 when set");
    if (rc.checkpoint_every < 0.0)
        throw ConfigError("output.checkpoint_every: must be > 0 when set");
    validate(p);
    return rc;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize(const RunConfig& rc) {
    const SimParams& p = rc.params;
    std::ostringstream out;
    const int dim = p.domain.dim;
    auto list = [&](const double* v, int n) {
        std::string s;
        for (int a = 0; a < n; ++a) {
            if (a) s += ", ";
            s += fmt(v[a]);
        }
        return s;
    };
    auto ilist = [&](const int* v, int n) {
        std::string s;
        for (int a = 0; a < n; ++a) {
            if (a) s += ", ";
            s += std::to_string(v[a]);
        }
        return s;
    };
    out << "domain.dim = " << dim << "\n";
    out << "domain.lengths = " << list(p.domain.length.data(), dim) << "\n";
    out << "domain.cells = " << ilist(p.domain.cells.data(), dim) << "\n";
    out << "reaction.chi = " << fmt(p.reaction.chi) << "\n";
    out << "reaction.kappa = " << fmt(p.reaction.kappa) << "\n";
    out << "reaction.mu = " << fmt(p.reaction.mu) << "\n";
    out << "reaction.eps = " << fmt(p.reaction.eps) << "\n";
    out << "reaction.pos_tol = " << fmt(p.reaction.pos_tol) << "\n";
    out << "forcing.phi = "
        << (p.forcing.potential == ForcingSpec::Potential::Linear ? "linear" : "zero") << "\n";
    out << "forcing.phi.g = " << list(p.forcing.gravity.data(), dim) << "\n";
    out << "forcing.f = " << (p.forcing.force == ForcingSpec::Force::ExpSine ? "exp_sine" : "zero")
        << "\n";
    out << "forcing.f.amplitude = " << list(p.forcing.force_amplitude.data(), dim) << "\n";
    out << "forcing.f.lambda = " << fmt(p.forcing.force_lambda) << "\n";
    auto init_kind = [](const InitSpec& s) {
        switch (s.kind) {
        case InitSpec::Kind::Bump: return "bump";
        case InitSpec::Kind::Perturbed: return "perturbed";
        default: return "constant";
        }
    };
    out << "init.n0 = " << init_kind(p.n0) << "\n";
    out << "init.n0.value = " << fmt(p.n0.value) << "\n";
    out << "init.n0.amplitude = " << fmt(p.n0.amplitude) << "\n";
    out << "init.c0 = " << init_kind(p.c0) << "\n";
    out << "init.c0.value = " << fmt(p.c0.value) << "\n";
    out << "init.c0.amplitude = " << fmt(p.c0.amplitude) << "\n";
    out << "init.u0 = " << (p.u0.kind == VelocityInitSpec::Kind::Perturbed ? "perturbed" : "zero")
        << "\n";
    out << "init.u0.max_norm = " << fmt(p.u0.max_norm) << "\n";
    out << "time.t_end = " << fmt(p.t_end) << "\n";
    out << "time.dt_max = " << fmt(p.dt_max) << "\n";
    out << "time.cfl_safety = " << fmt(p.cfl_safety) << "\n";
    out << "time.sample_every = " << fmt(p.sample_every) << "\n";
    out << "solver.rel_tol = " << fmt(p.solver.rel_tol) << "\n";
    out << "solver.max_iter = " << p.solver.max_iter << "\n";
    out << "run.seed = " << p.seed << "\n";
    out << "run.scenario = " << rc.scenario << "\n";
    out << "output.dir = " << rc.output_dir << "\n";
    out << "output.snapshot_every = " << fmt(rc.snapshot_every) << "\n";
    out << "output.checkpoint_every = " << fmt(rc.checkpoint_every) << "\n";
    out << "diagnostics.y_exponent = " << fmt(p.y_exponent) << "\n";
    out << "diagnostics.p_norms = " << list(p.p_norms.data(), static_cast<int>(p.p_norms.size()))
        << "\n";
    out << "diagnostics.K = " << fmt(p.diag_K) << "\n";
    out << "diagnostics.y_slack = " << fmt(p.y_slack) << "\n";
    out << "diagnostics.mass_slack = " << fmt(p.mass_slack) << "\n";
    out << "flags.implicit_diffusion = " << (p.flags.implicit_diffusion ? "true" : "false") << "\n";
    out << "flags.buoyancy_demeaned = " << (p.flags.buoyancy_demeaned ? "true" : "false") << "\n";
    out << "flags.disable_reaction = " << (p.flags.disable_reaction ? "true" : "false") << "\n";
    return out.str();
}

} // namespace chemflow
