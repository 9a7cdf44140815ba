#pragma once

#include <random>
#include <vector>

#include "hopflab/core_model.hpp"
#include "hopflab/topology.hpp"
#include "oracles.hpp"

namespace support {

inline oracle::Params op(const hopflab::ModelParams& p) { return {p.chi, p.lambda, p.eta, p.omega}; }

inline std::vector<oracle::P3> pts(const hopflab::KLoop& l) {
    std::vector<oracle::P3> out;
    for (const auto& k : l.points) out.push_back({k.kx, k.ky, k.kz});
    return out;
}

inline hopflab::KLoop kloop(const std::vector<oracle::P3>& v) {
    hopflab::KLoop l;
    for (const auto& q : v) l.points.emplace_back(q[0], q[1], q[2]);
    return l;
}

inline oracle::P3 unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        oracle::P3 v{g(rng), g(rng), g(rng)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 1e-3) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

// Circles in random planes: the even ones around closed-form nodes of the
// chi = -3 model, the odd ones anywhere. Loops passing within 0.05 (in |a|)
// of a node are redrawn.
inline std::vector<hopflab::KLoop> random_loops(int count, std::uint64_t seed, const hopflab::ModelParams& p) {
    const double t = oracle::pi / 3, h = oracle::pi / 2;
    const std::vector<oracle::P3> nodes{{t, 0, 0}, {-t, 0, 0}, {0, t, h}, {0, -t, -h}, {0, -t, h}, {0, t, -h}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-oracle::pi, oracle::pi), rad(0.2, 1.0);
    std::vector<hopflab::KLoop> out;
    while (static_cast<int>(out.size()) < count) {
        const bool around = out.size() % 2 == 0;
        const oracle::P3 c = around ? nodes[out.size() / 2 % nodes.size()] : oracle::P3{u(rng), u(rng), u(rng)};
        const double r = around ? 0.3 : rad(rng);
        const oracle::P3 a = unit(rng);
        oracle::P3 b = unit(rng);
        const double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        b = {b[0] - d * a[0], b[1] - d * a[1], b[2] - d * a[2]};
        const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
        if (nb < 0.1) continue;
        b = {b[0] / nb, b[1] / nb, b[2] / nb};
        const auto circ = oracle::circle(c, a, b, r, 128);
        if (oracle::min_norm_along(circ, op(p)) < 0.05) continue;
        out.push_back(kloop(circ));
    }
    return out;
}

}  // namespace support
