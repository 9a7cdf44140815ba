#include "hopflab/io/config.hpp"
#include "hopflab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace hopflab::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ValidationError("config: " + key + ": " + why);
}

double plain_number(const std::string& key, const std::string& t) {
    if (t.empty()) bad(key, "expected a number");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) bad(key, "cannot parse '" + t + "' as a number");
    return v;
}

long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) bad(key, "expected an integer, got '" + t + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad(key, "expected true/false, got '" + t + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct KeyDef {
    const char* key;
    const char* def;
    Setter set;
};

#define REAL(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_real(k, v); }
#define INT(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = static_cast<int>(parse_int(k, v)); }
#define BOOL(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }
#define TEXT(field) [](RunConfig& c, const std::string&, const std::string& v) { c.field = trim(v); }
#define LIST(field) [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_real_list(k, v); }

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> t = {
        {"model.chi", "-3", REAL(model.chi)},
        {"model.lambda", "0", REAL(model.lambda)},
        {"model.eta", "0", REAL(model.eta)},
        {"model.omega", "10", REAL(model.omega)},
        {"output_dir", "out", TEXT(output_dir)},
        {"seed", "20240101",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const long s = parse_int(k, v);
             if (s < 0) bad(k, "must be >= 0");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"gapmap.kz", "-pi/2, 0, pi/2", LIST(gapmap.kz)},
        {"gapmap.nx", "96", INT(gapmap.nx)},
        {"gapmap.ny", "96", INT(gapmap.ny)},
        {"gapmap.window", "-pi/2, pi/2, -pi/2, pi/2",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto w = parse_real_list(k, v);
             if (w.size() != 4) bad(k, "expected kx0, kx1, ky0, ky1");
             c.gapmap.window = {w[0], w[1], w[2], w[3]};
         }},
        {"nodal.slices", "128", INT(nodal.slices)},
        {"nodal.seed_res", "96", INT(nodal.seed_res)},
        {"nodal.tol", "1e-9", REAL(nodal.tol)},
        {"nodal.max_refine_depth", "12", INT(nodal.max_refine_depth)},
        {"topology.family", "A", TEXT(topology.family)},
        {"topology.kx0_min", "0.6", REAL(topology.kx0_min)},
        {"topology.kx0_max", "1.4", REAL(topology.kx0_max)},
        {"topology.kx0_step", "0.02", REAL(topology.kx0_step)},
        {"topology.wilson_n", "256", INT(topology.wilson_n)},
        {"topology.link", "true", BOOL(topology.link)},
        {"topology.lambdas", "", LIST(topology.lambdas)},
        {"topology.embed_R", "4", REAL(topology.embed_R)},
        {"topology.recenter", "0, 0",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto w = parse_real_list(k, v);
             if (w.size() != 2) bad(k, "expected dkx, dky");
             c.topology.recenter_kx = w[0];
             c.topology.recenter_ky = w[1];
         }},
        {"topology.link_segments", "400", INT(topology.link_segments)},
        {"adiabatic.sweep", "lambda1", TEXT(adiabatic.sweep)},
        {"adiabatic.sweep_min", "-2", REAL(adiabatic.sweep_min)},
        {"adiabatic.sweep_max", "2", REAL(adiabatic.sweep_max)},
        {"adiabatic.sweep_step", "0.25", REAL(adiabatic.sweep_step)},
        {"adiabatic.map_lambda", "0", REAL(adiabatic.map_lambda)},
        {"adiabatic.theta", "pi/4", REAL(adiabatic.theta)},
        {"adiabatic.lambda2", "1", REAL(adiabatic.lambda2)},
        {"adiabatic.omega_drive", "50*pi", REAL(adiabatic.omega_drive)},
        {"adiabatic.path_samples", "1024", INT(adiabatic.path_samples)},
        {"adiabatic.t_pre", "0.3", REAL(adiabatic.timings.t_pre)},
        {"adiabatic.t_ramp", "0.4", REAL(adiabatic.timings.t_ramp)},
        {"adiabatic.dt", "1e-4", REAL(adiabatic.timings.dt)},
        {"adiabatic.minus_first", "false", BOOL(adiabatic.minus_first)},
    };
    return t;
}

#undef REAL
#undef INT
#undef BOOL
#undef TEXT
#undef LIST

void validate(const RunConfig& c) {
    c.model.validate();
    if (c.output_dir.empty()) bad("output_dir", "must not be empty");

    const auto& g = c.gapmap;
    if (g.kz.empty()) bad("gapmap.kz", "needs at least one slice");
    for (double v : g.kz)
        if (!std::isfinite(v)) bad("gapmap.kz", "values must be finite");
    if (g.nx < 2) bad("gapmap.nx", "must be >= 2");
    if (g.ny < 2) bad("gapmap.ny", "must be >= 2");
    const double eps = 1e-12;
    if (!(g.window.x1 > g.window.x0) || !(g.window.y1 > g.window.y0)) bad("gapmap.window", "zero area");
    if (g.window.x0 < -kPi - eps || g.window.x1 > kPi + eps || g.window.y0 < -kPi - eps || g.window.y1 > kPi + eps)
        bad("gapmap.window", "must lie within [-pi, pi)^2");

    const auto& n = c.nodal;
    if (n.slices < 32) bad("nodal.slices", "must be >= 32");
    if (n.seed_res < 16) bad("nodal.seed_res", "must be >= 16");
    if (!(n.tol > 0) || !std::isfinite(n.tol)) bad("nodal.tol", "must be > 0");
    if (n.max_refine_depth < 0 || n.max_refine_depth > 20) bad("nodal.max_refine_depth", "must be in [0, 20]");

    const auto& t = c.topology;
    if (t.family != "A" && t.family != "B" && t.family != "none") bad("topology.family", "expected A, B or none");
    if (!(t.kx0_step > 0)) bad("topology.kx0_step", "must be > 0");
    if (!(t.kx0_max >= t.kx0_min)) bad("topology.kx0_max", "must be >= kx0_min");
    if (!(t.kx0_max < 2.0)) bad("topology.kx0_max", "must be < 2 (rectangle right edge)");
    if (t.wilson_n < 64) bad("topology.wilson_n", "must be >= 64");
    for (double v : t.lambdas)
        if (!std::isfinite(v)) bad("topology.lambdas", "values must be finite");
    if (!(t.embed_R > kPi)) bad("topology.embed_R", "must exceed pi");
    if (!std::isfinite(t.recenter_kx) || !std::isfinite(t.recenter_ky)) bad("topology.recenter", "must be finite");
    if (t.link_segments < 16) bad("topology.link_segments", "must be >= 16");

    const auto& a = c.adiabatic;
    if (a.sweep != "lambda1" && a.sweep != "kx") bad("adiabatic.sweep", "expected lambda1 or kx");
    if (!(a.sweep_step > 0)) bad("adiabatic.sweep_step", "must be > 0");
    if (!(a.sweep_max >= a.sweep_min)) bad("adiabatic.sweep_max", "must be >= sweep_min");
    if (!(a.omega_drive > 0)) bad("adiabatic.omega_drive", "must be > 0");
    if (a.path_samples < 256) bad("adiabatic.path_samples", "must be >= 256");
    if (!std::isfinite(a.theta) || !std::isfinite(a.lambda2) || !std::isfinite(a.map_lambda))
        bad("adiabatic.theta", "path parameters must be finite");
    try {
        a.timings.validate();
    } catch (const ValidationError& e) {
        bad("adiabatic.t_ramp/dt/t_pre", e.what());
    }
}

}  // namespace

std::vector<double> AdiabaticBlock::sweep_values() const {
    std::vector<double> v;
    const int n = static_cast<int>(std::floor((sweep_max - sweep_min) / sweep_step + 1e-9));
    for (int i = 0; i <= n; ++i) v.push_back(sweep_min + sweep_step * i);
    return v;
}

double parse_real(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    double v;
    const auto p = t.find("pi");
    if (p == std::string::npos) {
        v = plain_number(key, t);
    } else {
        std::string left = trim(t.substr(0, p));
        std::string right = trim(t.substr(p + 2));
        if (!left.empty() && left.back() == '*') left = trim(left.substr(0, left.size() - 1));
        double coef = 1.0;
        if (left == "-")
            coef = -1.0;
        else if (left == "+" || left.empty())
            coef = 1.0;
        else
            coef = plain_number(key, left);
        double div = 1.0;
        if (!right.empty()) {
            if (right[0] != '/') bad(key, "cannot parse '" + t + "'");
            div = plain_number(key, trim(right.substr(1)));
            if (div == 0.0) bad(key, "division by zero");
        }
        v = coef * kPi / div;
    }
    if (!std::isfinite(v)) bad(key, "value must be finite");
    return v;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    return out;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> k;
    for (const auto& d : key_table()) k.emplace_back(d.key);
    return k;
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    const auto keys = known_keys();
    std::stringstream ss(text);
    std::string line;
    int no = 0;
    while (std::getline(ss, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: " + origin + ":" + std::to_string(no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ValidationError("config: " + origin + ":" + std::to_string(no) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

RunConfig build_config(const std::vector<std::map<std::string, std::string>>& layers) {
    std::map<std::string, std::string> merged;
    for (const auto& d : key_table()) merged[d.key] = d.def;
    for (const auto& layer : layers)
        for (const auto& [k, v] : layer) {
            if (!merged.count(k)) throw ValidationError("config: unknown key '" + k + "'");
            merged[k] = v;
        }
    RunConfig c;
    for (const auto& d : key_table()) d.set(c, d.key, merged[d.key]);
    validate(c);
    c.values = merged;
    return c;
}

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> p = {
        {"fig2a", "model.chi = -3\ngapmap.kz = -pi/2, 0, pi/2\ngapmap.nx = 96\ngapmap.ny = 96\n"
                  "gapmap.window = -pi/2, pi/2, -pi/2, pi/2\n"},
        {"fig2b-chi-3", "model.chi = -3\n"},
        {"fig2b-chi0", "model.chi = 0\ngapmap.window = -pi, pi, -pi, pi\ntopology.link = false\n"},
        {"fig2b-chi2", "model.chi = 2\ngapmap.window = -pi, pi, -pi, pi\ntopology.recenter = pi, pi\n"},
        {"fig3a-lambda0.5", "model.chi = -3\nmodel.lambda = 0.5\n"},
        {"fig3a-lambda1", "model.chi = -3\nmodel.lambda = 1\n"},
        {"fig3a-lambda1.5", "model.chi = -3\nmodel.lambda = 1.5\n"},
        {"fig3a-link-sweep", "model.chi = -3\ntopology.family = none\ntopology.link = false\n"
                             "topology.lambdas = 0, 0.5, 1, 1.5\n"},
        {"fig3b-eta-0.5", "model.chi = -3\nmodel.eta = -0.5\n"},
        {"fig3b-eta0.5", "model.chi = -3\nmodel.eta = 0.5\n"},
        {"fig3b-eta1.5", "model.chi = -3\nmodel.eta = 1.5\n"},
        {"fig4-kx-sweep", "model.chi = -3\ntopology.family = A\ntopology.kx0_min = 0.6\ntopology.kx0_max = 1.4\n"
                          "topology.kx0_step = 0.02\n"},
        {"fig4-strands", "model.chi = -3\ntopology.family = B\n"},
        {"fig4-adiabatic", "adiabatic.sweep = lambda1\nadiabatic.sweep_min = -2\nadiabatic.sweep_max = 2\n"
                           "adiabatic.sweep_step = 0.25\nadiabatic.theta = pi/4\nadiabatic.lambda2 = 1\n"
                           "adiabatic.omega_drive = 50*pi\nadiabatic.t_ramp = 0.4\n"},
    };
    return p;
}

std::map<std::string, std::string> preset_values(const std::string& name) {
    const auto& p = presets();
    const auto it = p.find(name);
    if (it == p.end()) throw ValidationError("unknown preset '" + name + "'");
    return parse_config_text(it->second, "preset " + name);
}

}  // namespace hopflab::io
