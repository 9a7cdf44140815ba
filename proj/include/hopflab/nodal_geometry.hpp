#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hopflab/core_model.hpp"

namespace hopflab {

/// Half-open rectangle [x0, x1) x [y0, y1) in (kx, ky).
struct Window {
    double x0 = -kPi, x1 = kPi, y0 = -kPi, y1 = kPi;
};

struct GapGrid {
    double kz = 0;
    int nx = 0, ny = 0;
    Window window;
    std::vector<double> values;  // row-major: ky is the row, kx runs fastest

    double kx_at(int i) const { return window.x0 + (window.x1 - window.x0) * i / nx; }
    double ky_at(int j) const { return window.y0 + (window.y1 - window.y0) * j / ny; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

GapGrid gap_grid(double kz, const ModelParams& p, int nx, int ny, const Window& w = {});

struct NodalPoint {
    Momentum k;
    double residual = 0;  // max(|a1|, |a3|)
};

using Winding = std::array<int, 3>;

struct NodalCurve {
    std::vector<NodalPoint> points;
    bool closed = false;
    Winding winding{0, 0, 0};
};

struct CurveMetrics {
    int curve_count = 0;
    std::vector<Winding> windings;
    std::optional<double> min_pair_distance;
};

struct SliceOptions {
    int seed_res = 96;
    double tol = 1e-9;
    int max_iter = 50;
    double arc_spacing = 0.04;  // max gap between consecutive points on a degenerate arc
};

/// Everything found in one kz slice. In a degenerate slice a whole arc of the
/// a3 = 0 contour is nodal; `points` then holds only the strands crossing it.
struct SliceResult {
    double kz = 0;
    std::vector<NodalPoint> points;
    std::vector<std::vector<NodalPoint>> arcs;
    std::vector<bool> arc_closed;
    bool degenerate = false;
    int discarded_seeds = 0;
};

SliceResult analyze_slice(double kz, const ModelParams& p, const SliceOptions& opt = {});

std::vector<NodalPoint> nodal_points_slice(double kz, const ModelParams& p, int seed_res = 96,
                                           double tol = 1e-9);

struct TraceOptions {
    int n_slices = 128;
    int seed_res = 96;
    double tol = 1e-9;
    int max_refine_depth = 12;
};

std::vector<NodalCurve> trace_nodal_curves(const ModelParams& p, const TraceOptions& opt = {});
std::vector<NodalCurve> trace_nodal_curves(const ModelParams& p, int n_slices, int seed_res, double tol);

CurveMetrics curve_metrics(const std::vector<NodalCurve>& curves);

/// Minimum torus distance between points of two curves.
double curve_distance(const NodalCurve& a, const NodalCurve& b);

}  // namespace hopflab
