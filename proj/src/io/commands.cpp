#include "hopflab/io/commands.hpp"
#include "hopflab/errors.hpp"
#include "hopflab/parallel.hpp"
#include "hopflab/topology.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hopflab::io {

using ordered_json = nlohmann::ordered_json;

namespace {

double round9(double v) {
    if (!std::isfinite(v)) return v;
    return std::stod(fmt(v));
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

TraceOptions trace_options(const RunConfig& cfg) {
    TraceOptions o;
    o.n_slices = cfg.nodal.slices;
    o.seed_res = cfg.nodal.seed_res;
    o.tol = cfg.nodal.tol;
    o.max_refine_depth = cfg.nodal.max_refine_depth;
    return o;
}

ordered_json link_entry(const std::vector<NodalCurve>& curves, const RunConfig& cfg, std::vector<std::string>& warnings,
                        const std::string& label) {
    ordered_json j;
    j["raw"] = nullptr;
    j["linking"] = nullptr;
    j["method"] = "gauss-midpoint";
    const CurveMetrics m = curve_metrics(curves);
    j["min_pair_distance"] = m.min_pair_distance ? ordered_json(round9(*m.min_pair_distance)) : ordered_json(nullptr);
    std::string reject;
    if (curves.size() != 2) {
        reject = "expected 2 curves, found " + std::to_string(curves.size());
    } else if (m.min_pair_distance && *m.min_pair_distance < 0.05) {
        reject = "disjointness precondition failed: curves closer than 0.05 (min_pair_distance " +
                 fmt(*m.min_pair_distance) + ")";
    } else {
        try {
            const LinkingReport r = curve_linking(curves[0], curves[1], cfg.topology.embed_R, cfg.topology.recenter_kx,
                                                  cfg.topology.recenter_ky, cfg.topology.link_segments);
            j["raw"] = round9(r.raw);
            j["linking"] = r.linking;
            j["method"] = r.method;
            if (!r.accepted) reject = "raw value not within 0.05 of an integer";
        } catch (const NumericalError& e) {
            reject = e.what();
        }
    }
    if (!reject.empty()) {
        j["rejected"] = reject;
        warnings.push_back("linking " + label + ": " + reject);
    }
    return j;
}

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    if (std::string(buf) == "-0") return "0";
    return buf;
}

RunOutputs cmd_gapmap(const RunConfig& cfg) {
    const auto& g = cfg.gapmap;
    const auto grids = parallel_map<GapGrid>(g.kz.size(), [&](std::size_t i) {
        return gap_grid(g.kz[i], cfg.model, g.nx, g.ny, g.window);
    });
    RunOutputs out;
    for (const GapGrid& grid : grids) {
        std::string s = "kx,ky,kz,gap_mhz\n";
        s.reserve(static_cast<std::size_t>(grid.nx) * grid.ny * 48);
        const std::string kz = fmt(grid.kz);
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                s += fmt(grid.kx_at(i)) + "," + fmt(grid.ky_at(j)) + "," + kz + "," + fmt(grid.at(i, j)) + "\n";
        out.files.push_back({"gapmap_kz=" + kz + ".csv", std::move(s)});
    }
    return out;
}

RunOutputs cmd_nodal(const RunConfig& cfg) {
    const auto curves = trace_nodal_curves(cfg.model, trace_options(cfg));
    std::string s = "curve_id,point_index,kx,ky,kz,residual\n";
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (std::size_t i = 0; i < curves[c].points.size(); ++i) {
            const auto& q = curves[c].points[i];
            s += std::to_string(c) + "," + std::to_string(i) + "," + fmt(q.k.kx) + "," + fmt(q.k.ky) + "," +
                 fmt(q.k.kz) + "," + fmt(q.residual) + "\n";
        }
    const CurveMetrics m = curve_metrics(curves);
    ordered_json j;
    j["curve_count"] = m.curve_count;
    j["windings"] = ordered_json::array();
    for (const auto& w : m.windings) j["windings"].push_back({w[0], w[1], w[2]});
    j["min_pair_distance"] = m.min_pair_distance ? ordered_json(round9(*m.min_pair_distance)) : ordered_json(nullptr);
    RunOutputs out;
    out.files.push_back({"nodal_curves.csv", std::move(s)});
    out.files.push_back({"nodal_metrics.json", dump(j)});
    return out;
}

RunOutputs cmd_topology(const RunConfig& cfg) {
    const auto& t = cfg.topology;
    RunOutputs out;
    if (t.family != "none") {
        const LoopFamily fam = t.family == "A" ? family_a(t.kx0_min, t.kx0_max, t.kx0_step) : family_b();
        const auto rows = berry_sweep(fam, cfg.model, t.wilson_n);
        std::string s = "sweep_param,winding,phase_mod,signed_phase\n";
        for (const auto& r : rows) {
            if (r.result) {
                s += fmt(r.param) + "," + std::to_string(r.result->winding) + "," + fmt(r.result->phase_mod) + "," +
                     fmt(r.result->signed_phase) + "\n";
            } else {
                s += fmt(r.param) + ",nan,nan,nan\n";
                out.warnings.push_back("family " + t.family + " param " + fmt(r.param) + ": " + r.flag);
            }
        }
        out.files.push_back({"berry_sweep.csv", std::move(s)});
    }
    if (t.link || !t.lambdas.empty()) {
        ordered_json j;
        if (t.link) {
            const auto curves = trace_nodal_curves(cfg.model, trace_options(cfg));
            j = link_entry(curves, cfg, out.warnings, "model");
        } else {
            j["raw"] = nullptr;
            j["linking"] = nullptr;
            j["method"] = "gauss-midpoint";
        }
        if (!t.lambdas.empty()) {
            ordered_json sweep = ordered_json::array();
            for (double lam : t.lambdas) {
                ModelParams p = cfg.model;
                p.lambda = lam;
                const auto curves = trace_nodal_curves(p, trace_options(cfg));
                ordered_json e;
                e["lambda"] = round9(lam);
                e.update(link_entry(curves, cfg, out.warnings, "lambda=" + fmt(lam)));
                sweep.push_back(std::move(e));
            }
            j["sweep"] = std::move(sweep);
        }
        out.files.push_back({"linking.json", dump(j)});
    }
    return out;
}

RunOutputs cmd_adiabatic(const RunConfig& cfg) {
    const auto& a = cfg.adiabatic;
    const auto values = a.sweep_values();
    struct Row {
        double param, lambda1;
        ProtocolResult r;
    };
    const auto rows = parallel_map<Row>(values.size(), [&](std::size_t i) {
        const double l1 = a.sweep == "lambda1" ? values[i] : lambda1_from_kx(values[i], a.map_lambda);
        const DrivePath path = drive_loop(a.theta, l1, a.lambda2, a.omega_drive, a.path_samples);
        return Row{values[i], l1, ramsey_echo_protocol(path, a.timings, a.minus_first)};
    });
    RunOutputs out;
    std::string s = "sweep_param,lambda1,phi_total,gamma_tracked,min_fidelity\n";
    for (const auto& row : rows) {
        s += fmt(row.param) + "," + fmt(row.lambda1) + "," + fmt(row.r.phi_total) + "," + fmt(row.r.gamma_tracked) +
             "," + fmt(row.r.min_adiabatic_fidelity) + "\n";
        if (row.r.adiabatic_warning)
            out.warnings.push_back("adiabatic " + a.sweep + "=" + fmt(row.param) + ": fidelity below 0.95 (loop " +
                                   fmt(row.r.min_adiabatic_fidelity) + ", ramps " + fmt(row.r.min_ramp_fidelity) + ")");
    }
    out.files.push_back({"adiabatic.csv", std::move(s)});
    return out;
}

RunOutputs run_command(const std::string& verb, const RunConfig& cfg) {
    if (verb == "gapmap") return cmd_gapmap(cfg);
    if (verb == "nodal") return cmd_nodal(cfg);
    if (verb == "topology") return cmd_topology(cfg);
    if (verb == "adiabatic") return cmd_adiabatic(cfg);
    throw ValidationError("unknown command '" + verb + "'");
}

}  // namespace hopflab::io
