#pragma once
// Test-side reference computations. Nothing here calls into the library's
// numerical routines; only plain data types are shared.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

constexpr double pi = 3.14159265358979323846;

struct Params {
    double chi = -3, lambda = 0, eta = 0, omega = 10;
};

struct A {
    double a1, a3;
};

inline A coeffs(double kx, double ky, double kz, const Params& p) {
    return {std::sin(ky) * std::cos(kz) - std::sin(kx) * std::sin(kz) + p.lambda * std::sin(ky),
            2 * std::cos(kx) + 2 * std::cos(ky) + p.chi + p.eta};
}

// Eigenvalue split of the 2x2 Hermitian matrix built entry by entry.
inline double gap(double kx, double ky, double kz, const Params& p) {
    const A a = coeffs(kx, ky, kz, p);
    const std::complex<double> h00 = 0.5 * p.omega * a.a3, h11 = -0.5 * p.omega * a.a3;
    const std::complex<double> h01 = 0.5 * p.omega * a.a1;
    const double tr = (h00 + h11).real();
    const double det = (h00 * h11 - h01 * std::conj(h01)).real();
    return std::sqrt(std::max(0.0, tr * tr - 4 * det));
}

inline double wrap(double x) {
    x = std::fmod(x + pi, 2 * pi);
    if (x < 0) x += 2 * pi;
    return x - pi;
}

using P3 = std::array<double, 3>;

// Linear interpolation along a closed torus loop, `total` samples overall.
inline std::vector<P3> dense_loop(const std::vector<P3>& pts, int total) {
    const std::size_t n = pts.size();
    const int per = std::max(1, total / static_cast<int>(n));
    std::vector<P3> out;
    for (std::size_t i = 0; i < n; ++i) {
        const P3& a = pts[i];
        const P3& b = pts[(i + 1) % n];
        P3 d{wrap(b[0] - a[0]), wrap(b[1] - a[1]), wrap(b[2] - a[2])};
        for (int s = 0; s < per; ++s) {
            const double t = static_cast<double>(s) / per;
            out.push_back({a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]});
        }
    }
    return out;
}

// Winding of atan2(a1, a3) by brute angle accumulation.
inline int winding(const std::vector<P3>& pts, const Params& p, int total = 10000) {
    const auto d = dense_loop(pts, total);
    double acc = 0, prev = 0;
    for (std::size_t i = 0; i <= d.size(); ++i) {
        const P3& k = d[i % d.size()];
        const A a = coeffs(k[0], k[1], k[2], p);
        const double ang = std::atan2(a.a1, a.a3);
        if (i > 0) acc += wrap(ang - prev);
        prev = ang;
    }
    return static_cast<int>(std::lround(acc / (2 * pi)));
}

inline double min_norm_along(const std::vector<P3>& pts, const Params& p, int total = 4000) {
    double m = 1e300;
    for (const auto& k : dense_loop(pts, total)) {
        const A a = coeffs(k[0], k[1], k[2], p);
        m = std::min(m, std::hypot(a.a1, a.a3));
    }
    return m;
}

// Gauge-randomised Wilson loop of the lower band; returns arg of the product.
inline double wilson_phase(const std::vector<P3>& pts, const Params& p, int total, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ph(-pi, pi);
    const auto d = dense_loop(pts, total);
    std::vector<std::array<std::complex<double>, 2>> v;
    for (const auto& k : d) {
        const A a = coeffs(k[0], k[1], k[2], p);
        const double r = std::hypot(a.a1, a.a3);
        std::array<double, 2> u1{-a.a1, a.a3 + r}, u2{r - a.a3, -a.a1};
        const auto& u = std::hypot(u1[0], u1[1]) > std::hypot(u2[0], u2[1]) ? u1 : u2;
        const double nu = std::hypot(u[0], u[1]);
        const std::complex<double> g = std::polar(1.0, ph(rng));
        v.push_back({g * (u[0] / nu), g * (u[1] / nu)});
    }
    std::complex<double> prod = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& x = v[i];
        const auto& y = v[(i + 1) % v.size()];
        const std::complex<double> ov = std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
        prod *= ov / std::abs(ov);
    }
    return std::arg(prod);
}

// Solid angle seen from +z: sum of (1 - cos theta) dphi along a finely sampled closed path.
template <class F>
double solid_angle_quadrature(F&& field, int n = 200000) {
    double acc = 0;
    auto dir = [&](double s) {
        const auto f = field(s);
        const double r = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
        return std::array<double, 3>{f[0] / r, f[1] / r, f[2] / r};
    };
    for (int i = 0; i < n; ++i) {
        const auto a = dir(static_cast<double>(i) / n), b = dir(static_cast<double>(i + 1) / n),
                   m = dir((i + 0.5) / n);
        const double dphi = wrap(std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]));
        acc += (1 - m[2]) * dphi;
    }
    return acc;
}

using M2 = std::array<std::array<std::complex<double>, 2>, 2>;

inline M2 mmul(const M2& a, const M2& b) {
    M2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

// exp(-i dt/2 w.sigma) by scaled Taylor series and repeated squaring.
inline M2 expm_step(const std::array<double, 3>& w, double dt) {
    const std::complex<double> I(0, 1);
    int sq = 0;
    double scale = 0.5 * dt * std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    while (scale > 0.01) {
        scale /= 2;
        ++sq;
    }
    const double f = 0.5 * dt / std::pow(2.0, sq);
    M2 x{};
    x[0][0] = -I * f * w[2];
    x[1][1] = I * f * w[2];
    x[0][1] = -I * f * (w[0] - I * w[1]);
    x[1][0] = -I * f * (w[0] + I * w[1]);
    M2 sum{}, term{};
    sum[0][0] = sum[1][1] = term[0][0] = term[1][1] = 1;
    for (int k = 1; k < 20; ++k) {
        term = mmul(term, x);
        for (auto& r : term)
            for (auto& e : r) e /= k;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) sum[i][j] += term[i][j];
    }
    for (int s = 0; s < sq; ++s) sum = mmul(sum, sum);
    return sum;
}

// Gauss linking of two closed polylines in R^3, midpoint rule on a brute grid.
inline double gauss_link(const std::vector<P3>& a, const std::vector<P3>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const P3& a0 = a[i];
        const P3& a1 = a[(i + 1) % a.size()];
        const P3 da{a1[0] - a0[0], a1[1] - a0[1], a1[2] - a0[2]};
        const P3 ma{(a0[0] + a1[0]) / 2, (a0[1] + a1[1]) / 2, (a0[2] + a1[2]) / 2};
        for (std::size_t j = 0; j < b.size(); ++j) {
            const P3& b0 = b[j];
            const P3& b1 = b[(j + 1) % b.size()];
            const P3 db{b1[0] - b0[0], b1[1] - b0[1], b1[2] - b0[2]};
            const P3 r{ma[0] - (b0[0] + b1[0]) / 2, ma[1] - (b0[1] + b1[1]) / 2, ma[2] - (b0[2] + b1[2]) / 2};
            const double rn = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
            const P3 c{da[1] * db[2] - da[2] * db[1], da[2] * db[0] - da[0] * db[2], da[0] * db[1] - da[1] * db[0]};
            acc += (r[0] * c[0] + r[1] * c[1] + r[2] * c[2]) / (rn * rn * rn);
        }
    }
    return acc / (4 * pi);
}

inline std::vector<P3> circle(const P3& c, const P3& u, const P3& v, double r, int n) {
    std::vector<P3> out;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * pi * i / n;
        out.push_back({c[0] + r * (std::cos(t) * u[0] + std::sin(t) * v[0]),
                       c[1] + r * (std::cos(t) * u[1] + std::sin(t) * v[1]),
                       c[2] + r * (std::cos(t) * u[2] + std::sin(t) * v[2])});
    }
    return out;
}

}  // namespace oracle
