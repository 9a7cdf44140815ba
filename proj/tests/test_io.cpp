#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "hopflab/errors.hpp"
#include "hopflab/io/commands.hpp"
#include "hopflab/io/config.hpp"

using namespace hopflab;
using namespace hopflab::io;
namespace fs = std::filesystem;

namespace {

RunConfig preset_cfg(const std::string& name, std::map<std::string, std::string> extra = {}) {
    return build_config({preset_values(name), extra});
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::vector<double> split(const std::string& l) {
    std::vector<double> v;
    std::stringstream ss(l);
    for (std::string c; std::getline(ss, c, ',');) v.push_back(std::stod(c));
    return v;
}

fs::path temp_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("hopflab_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("real values accept pi expressions") {
    CHECK(parse_real("k", "0.5") == 0.5);
    CHECK(parse_real("k", " -pi/2 ") == doctest::Approx(-kPi / 2));
    CHECK(parse_real("k", "2*pi/3") == doctest::Approx(2 * kPi / 3));
    CHECK(parse_real("k", "pi") == doctest::Approx(kPi));
    CHECK(parse_real("k", "50*pi") == doctest::Approx(kTwoPi * 25));
    CHECK(parse_real_list("k", "-pi/2, 0, pi/2").size() == 3);
    CHECK_THROWS_AS(parse_real("k", "abc"), ValidationError);
    CHECK_THROWS_AS(parse_real("k", "pi/0"), ValidationError);
    CHECK_THROWS_AS(parse_real("k", "1e999"), ValidationError);
}

TEST_CASE("config text parsing and layering") {
    const auto m = parse_config_text("# comment\nmodel.chi = 2  # trailing\n\nnodal.slices=64\n", "t");
    CHECK(m.at("model.chi") == "2");
    CHECK(m.at("nodal.slices") == "64");
    CHECK_THROWS_AS(parse_config_text("model.kappa = 1\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_config_text("model.chi\n", "t"), ValidationError);

    const RunConfig c = build_config({{{"model.chi", "0"}}, {{"model.chi", "2"}, {"model.lambda", "0.5"}}});
    CHECK(c.model.chi == 2.0);
    CHECK(c.model.lambda == 0.5);
    CHECK(c.nodal.slices == 128);
    CHECK(c.values.at("model.chi") == "2");
    CHECK(c.values.size() == known_keys().size());
}

TEST_CASE("validation errors name the field") {
    auto msg = [](const std::map<std::string, std::string>& m) {
        try {
            build_config({m});
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(msg({{"nodal.slices", "8"}}).find("nodal.slices") != std::string::npos);
    CHECK(msg({{"gapmap.nx", "x"}}).find("gapmap.nx") != std::string::npos);
    CHECK(msg({{"topology.family", "C"}}).find("topology.family") != std::string::npos);
    CHECK(msg({{"model.omega", "-1"}}).find("model.omega") != std::string::npos);
    CHECK(msg({{"adiabatic.dt", "0.01"}}).find("adiabatic") != std::string::npos);
    CHECK(msg({{"gapmap.window", "-4, 0, 0, 1"}}).find("gapmap.window") != std::string::npos);
}

TEST_CASE("every documented preset builds") {
    for (const char* name : {"fig2a", "fig2b-chi-3", "fig2b-chi0", "fig2b-chi2", "fig3a-lambda0.5", "fig3a-lambda1",
                             "fig3a-lambda1.5", "fig3b-eta-0.5", "fig3b-eta0.5", "fig3b-eta1.5", "fig4-kx-sweep",
                             "fig4-strands", "fig4-adiabatic"})
        CHECK_NOTHROW(preset_cfg(name));
    CHECK_THROWS_AS(preset_values("fig9"), ValidationError);
}

TEST_CASE("number formatting") {
    CHECK(fmt(-0.0) == "0");
    CHECK(fmt(kPi) == "3.14159265");
    CHECK(fmt(1e-20) == "1e-20");
    CHECK(fmt(std::nan("")) == "nan");
}

TEST_CASE("gapmap files: names, row counts and minimum near the node") {
    const RunOutputs out = cmd_gapmap(preset_cfg("fig2a"));
    REQUIRE(out.files.size() == 3);
    CHECK(out.files[0].name == "gapmap_kz=-1.57079633.csv");
    CHECK(out.files[1].name == "gapmap_kz=0.csv");
    for (const auto& f : out.files) {
        const auto ls = lines(f.content);
        CHECK(ls.front() == "kx,ky,kz,gap_mhz");
        CHECK(ls.size() == 9217);
        CHECK(f.content.find('\r') == std::string::npos);
    }
    // (pi/3, 0) and its mirror (-pi/3, 0) tie for the minimum
    const auto ls = lines(out.files[1].content);
    double best = 1e9, at_node = 1e9;
    const double cell = kPi / 96;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto v = split(ls[i]);
        best = std::min(best, v[3]);
        if (std::abs(v[0] - kPi / 3) <= cell / 2 && std::abs(v[1]) <= cell / 2) at_node = v[3];
    }
    CHECK(at_node < 1e-6);
    CHECK(at_node <= best + 1e-9);
    // row-major: the second data row steps kx
    const auto r1 = split(ls[1]), r2 = split(ls[2]);
    CHECK(r1[1] == r2[1]);
    CHECK(r2[0] > r1[0]);
}

TEST_CASE("nodal outputs for the helix and an empty model") {
    const RunOutputs out = cmd_nodal(preset_cfg("fig2b-chi-3"));
    REQUIRE(out.files.size() == 2);
    CHECK(lines(out.files[0].content).front() == "curve_id,point_index,kx,ky,kz,residual");
    const auto j = nlohmann::json::parse(out.files[1].content);
    CHECK(j["curve_count"] == 2);
    CHECK(j["windings"].size() == 2);
    CHECK(j["min_pair_distance"].is_number());

    const RunOutputs empty = cmd_nodal(build_config({{{"model.chi", "-10"}}}));
    CHECK(lines(empty.files[0].content).size() == 1);
    const auto je = nlohmann::json::parse(empty.files[1].content);
    CHECK(je["curve_count"] == 0);
    CHECK(je["min_pair_distance"].is_null());
}

TEST_CASE("topology outputs") {
    const RunOutputs a = cmd_topology(preset_cfg("fig4-kx-sweep"));
    REQUIRE(a.files.size() == 2);
    CHECK(a.files[0].name == "berry_sweep.csv");
    const auto ls = lines(a.files[0].content);
    CHECK(ls.front() == "sweep_param,winding,phase_mod,signed_phase");
    CHECK(ls.size() == 42);
    const auto link = nlohmann::json::parse(a.files[1].content);
    CHECK(std::abs(link["linking"].get<int>()) == 1);

    const RunOutputs s = cmd_topology(preset_cfg("fig3a-link-sweep"));
    REQUIRE(s.files.size() == 1);
    const auto j = nlohmann::json::parse(s.files[0].content);
    REQUIRE(j["sweep"].size() == 4);
    CHECK(std::abs(j["sweep"][0]["linking"].get<int>()) == 1);
    CHECK(std::abs(j["sweep"][1]["linking"].get<int>()) == 1);
    CHECK(j["sweep"][2]["linking"].is_null());
    CHECK(j["sweep"][2].contains("rejected"));
    CHECK(j["sweep"][3]["linking"] == 0);
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("adiabatic output rows") {
    const RunOutputs out = cmd_adiabatic(preset_cfg("fig4-adiabatic"));
    const auto ls = lines(out.files.at(0).content);
    CHECK(ls.front() == "sweep_param,lambda1,phi_total,gamma_tracked,min_fidelity");
    REQUIRE(ls.size() == 18);
    const auto mid = split(ls[9]), last = split(ls[17]);
    CHECK(mid[0] == 0.0);
    CHECK(std::abs(mid[3] - kPi) < 0.05);
    CHECK(last[0] == 2.0);
    CHECK(std::abs(last[3]) < 0.05);

    const RunOutputs kx = cmd_adiabatic(build_config({{{"adiabatic.sweep", "kx"}, {"adiabatic.sweep_min", "0"},
                                                       {"adiabatic.sweep_max", "0"}}}));
    const auto r = split(lines(kx.files[0].content)[1]);
    CHECK(r[1] == doctest::Approx(1.0));
}

TEST_CASE("writing outputs: manifest lists every file with its checksum") {
    const fs::path dir = temp_dir("manifest");
    fs::create_directories(dir);
    { std::ofstream(dir / "stale.txt") << "left over\n"; }
    RunConfig cfg = preset_cfg("fig4-strands", {{"output_dir", dir.string()}});
    prepare_output_dir(cfg.output_dir);
    const RunOutputs out = cmd_topology(cfg);
    write_outputs("topology", "fig4-strands", cfg, out, utc_timestamp());
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& f : m["files"]) {
        listed.insert(f["file"].get<std::string>());
        CHECK(f["sha256"] == sha256_hex(slurp(dir / f["file"].get<std::string>())));
    }
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") CHECK(listed.count(e.path().filename().string()) == 1);
    CHECK(m["config"]["topology.family"] == "B");
    CHECK(m["command"] == "topology");
    fs::remove_all(dir);
}

TEST_CASE("sha256 known answer") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("unwritable output directory is an I/O error") {
    const fs::path dir = temp_dir("blocked");
    { std::ofstream(dir.string()) << "x"; }
    CHECK_THROWS_AS(prepare_output_dir((dir / "sub").string()), IoError);
    fs::remove(dir);
}

TEST_CASE("identical configs give byte-identical outputs") {
    for (const char* verb : {"gapmap", "nodal", "topology", "adiabatic"}) {
        const RunConfig cfg = preset_cfg(std::string(verb) == "gapmap" ? "fig2a" : "fig3b-eta0.5");
        const RunOutputs a = run_command(verb, cfg), b = run_command(verb, cfg);
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].content == b.files[i].content);
    }
}
