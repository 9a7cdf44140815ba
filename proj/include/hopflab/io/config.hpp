#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hopflab/adiabatic.hpp"
#include "hopflab/core_model.hpp"
#include "hopflab/nodal_geometry.hpp"

namespace hopflab::io {

struct GapmapBlock {
    std::vector<double> kz{-kPi / 2, 0.0, kPi / 2};
    int nx = 96, ny = 96;
    Window window{-kPi / 2, kPi / 2, -kPi / 2, kPi / 2};
};

struct NodalBlock {
    int slices = 128;
    int seed_res = 96;
    double tol = 1e-9;
    int max_refine_depth = 12;
};

struct TopologyBlock {
    std::string family = "A";  // A | B | none
    double kx0_min = 0.6, kx0_max = 1.4, kx0_step = 0.02;
    int wilson_n = 256;
    bool link = true;             // link the configured model's two curves
    std::vector<double> lambdas;  // optional link-unlink sweep
    double embed_R = 4.0;
    double recenter_kx = 0.0, recenter_ky = 0.0;
    int link_segments = 400;
};

struct AdiabaticBlock {
    std::string sweep = "lambda1";  // lambda1 | kx
    double sweep_min = -2.0, sweep_max = 2.0, sweep_step = 0.25;
    double map_lambda = 0.0;  // lambda in (2 cos kx - lambda) / 2 when sweep = kx
    double theta = kPi / 4;
    double lambda2 = 1.0;
    double omega_drive = kTwoPi * 25.0;
    int path_samples = 1024;
    PulseTimings timings;
    bool minus_first = false;

    std::vector<double> sweep_values() const;
};

struct RunConfig {
    ModelParams model;
    GapmapBlock gapmap;
    NodalBlock nodal;
    TopologyBlock topology;
    AdiabaticBlock adiabatic;
    std::string output_dir = "out";
    std::uint64_t seed = 20240101;

    std::map<std::string, std::string> values;  // effective key = value, for the manifest
};

/// Parses `key = value` lines ('#' comments, blank lines ignored) into a map.
/// Throws ValidationError on malformed lines or unknown keys.
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);

/// Merge layers (later wins) over defaults and build a validated RunConfig.
RunConfig build_config(const std::vector<std::map<std::string, std::string>>& layers);

/// Scalar with optional pi: "0.5", "-pi/2", "2*pi/3", "pi".
double parse_real(const std::string& key, const std::string& text);
std::vector<double> parse_real_list(const std::string& key, const std::string& text);

std::vector<std::string> known_keys();

const std::map<std::string, std::string>& presets();
std::map<std::string, std::string> preset_values(const std::string& name);

}  // namespace hopflab::io
