#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopflab/core_model.hpp"
#include "hopflab/nodal_geometry.hpp"

namespace hopflab {

struct KLoop {
    std::vector<Momentum> points;  // closed; last connects back to first
    std::string description;
};

/// Throws ValidationError unless the loop has >= 16 points with torus spacing < 0.5
/// and, when curves are given, stays farther than 1e-6 from every nodal point.
void validate_loop(const KLoop& loop, const std::vector<NodalCurve>* curves = nullptr);

KLoop reversed(const KLoop& loop);

/// Closed loop resampled to n points uniformly in arclength (torus-unwrapped).
KLoop resample_loop(const KLoop& loop, int n);

struct WindingDetail {
    int winding = 0;
    double total_angle = 0;  // accumulated atan2(a1, a3), radians
    int samples = 0;         // after dyadic refinement
};

WindingDetail winding_detail(const KLoop& loop, const ModelParams& p);
int winding_number(const KLoop& loop, const ModelParams& p);

struct BerryResult {
    int winding = 0;
    double phase_mod = 0;     // (-pi, pi]
    double signed_phase = 0;  // winding * pi
};

BerryResult berry_phase_wilson(const KLoop& loop, const ModelParams& p, int n = 256);

using Vec3 = std::array<double, 3>;

struct EmbeddedCurve {
    std::vector<Vec3> points;  // closed
};

EmbeddedCurve embed_torus(const NodalCurve& curve, double R = 4.0, double dkx = 0.0, double dky = 0.0);
EmbeddedCurve resample_curve(const EmbeddedCurve& c, int n);

struct LinkingReport {
    double raw = 0;
    int linking = 0;
    std::string method;
    bool accepted = false;
};

double min_separation(const EmbeddedCurve& a, const EmbeddedCurve& b);

/// Gauss double sum over segment midpoints. Throws NumericalError when the
/// curves come closer than 0.05.
LinkingReport gauss_linking(const EmbeddedCurve& a, const EmbeddedCurve& b);

/// Embed, resample to `segments` points each and link.
LinkingReport curve_linking(const NodalCurve& a, const NodalCurve& b, double R = 4.0, double dkx = 0.0,
                            double dky = 0.0, int segments = 400);

struct LoopFamily {
    std::string name;
    std::vector<double> params;
    std::function<KLoop(double)> make;
};

/// Rectangle [kx0, 2] x [-0.5, 0.5] at kz = 0, clockwise seen from +kz; kx0 over [0.6, 1.4] step 0.02.
LoopFamily family_a(double kx0_min = 0.6, double kx0_max = 1.4, double step = 0.02);
KLoop family_a_loop(double kx0, int per_side = 32);

/// Circles of radius 0.35 in the kx = 0 plane around (ky, kz) = (pi/3, c), c in {-pi/2, pi/2},
/// counter-clockwise in (ky, kz). Parameter is c.
LoopFamily family_b();
KLoop family_b_loop(double kz_center, int n = 128);

struct SweepRow {
    double param = 0;
    std::optional<BerryResult> result;
    std::string flag;  // empty when result is present
};

std::vector<SweepRow> berry_sweep(const LoopFamily& family, const ModelParams& p, int wilson_n = 256);

}  // namespace hopflab
