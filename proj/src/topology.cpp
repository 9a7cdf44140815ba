#include "hopflab/topology.hpp"
#include "hopflab/errors.hpp"
#include "hopflab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hopflab {

namespace {

struct U3 {
    double x, y, z;
};

// Loop vertices lifted off the torus so consecutive differences are minimal images.
std::vector<U3> unwrap(const KLoop& loop) {
    std::vector<U3> u;
    u.reserve(loop.points.size());
    for (std::size_t i = 0; i < loop.points.size(); ++i) {
        const Momentum& k = loop.points[i];
        if (i == 0) {
            u.push_back({k.kx, k.ky, k.kz});
            continue;
        }
        const Momentum& q = loop.points[i - 1];
        const U3& b = u.back();
        u.push_back({b.x + wrap_angle(k.kx - q.kx), b.y + wrap_angle(k.ky - q.ky), b.z + wrap_angle(k.kz - q.kz)});
    }
    return u;
}

U3 closing_delta(const KLoop& loop) {
    const Momentum &a = loop.points.back(), &b = loop.points.front();
    return {wrap_angle(b.kx - a.kx), wrap_angle(b.ky - a.ky), wrap_angle(b.kz - a.kz)};
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace

void validate_loop(const KLoop& loop, const std::vector<NodalCurve>* curves) {
    const std::size_t n = loop.points.size();
    if (n < 16) throw ValidationError("loop needs at least 16 points");
    for (std::size_t i = 0; i < n; ++i)
        if (torus_distance(loop.points[i], loop.points[(i + 1) % n]) >= 0.5)
            throw ValidationError("loop spacing must stay below 0.5");
    if (!curves) return;
    for (const auto& c : *curves)
        for (const auto& q : c.points)
            for (const auto& k : loop.points)
                if (torus_distance(q.k, k) < 1e-6) throw ValidationError("loop passes through a nodal point");
}

KLoop reversed(const KLoop& loop) {
    KLoop r = loop;
    std::reverse(r.points.begin(), r.points.end());
    return r;
}

KLoop resample_loop(const KLoop& loop, int n) {
    const std::vector<U3> u = unwrap(loop);
    const U3 cd = closing_delta(loop);
    std::vector<U3> v = u;
    v.push_back({u.back().x + cd.x, u.back().y + cd.y, u.back().z + cd.z});
    std::vector<double> s(v.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i)
        s[i] = s[i - 1] + std::sqrt((v[i].x - v[i - 1].x) * (v[i].x - v[i - 1].x) +
                                    (v[i].y - v[i - 1].y) * (v[i].y - v[i - 1].y) +
                                    (v[i].z - v[i - 1].z) * (v[i].z - v[i - 1].z));
    KLoop out;
    out.description = loop.description;
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double t = s.back() * k / n;
        while (seg + 2 < s.size() && s[seg + 1] <= t) ++seg;
        const double len = s[seg + 1] - s[seg];
        const double f = len > 0 ? (t - s[seg]) / len : 0.0;
        out.points.emplace_back(v[seg].x + f * (v[seg + 1].x - v[seg].x), v[seg].y + f * (v[seg + 1].y - v[seg].y),
                                v[seg].z + f * (v[seg + 1].z - v[seg].z));
    }
    return out;
}

WindingDetail winding_detail(const KLoop& loop, const ModelParams& p) {
    const std::size_t n = loop.points.size();
    if (n < 3) throw ValidationError("loop needs at least 3 points");
    const std::vector<U3> u = unwrap(loop);
    std::vector<U3> d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = {u[i + 1].x - u[i].x, u[i + 1].y - u[i].y, u[i + 1].z - u[i].z};
    d[n - 1] = closing_delta(loop);

    const std::size_t cap = std::size_t{1} << 16;
    std::vector<double> ang;
    double max_step = 0.0;
    for (std::size_t m = 1;; m *= 2) {
        ang.clear();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < m; ++t) {
                const double f = static_cast<double>(t) / m;
                const CoeffVector a = coeffs(Momentum(u[i].x + f * d[i].x, u[i].y + f * d[i].y, u[i].z + f * d[i].z), p);
                if (std::hypot(a.a1, a.a3) < 1e-9) throw NumericalError("winding: loop hits a node (|a| < 1e-9)");
                ang.push_back(std::atan2(a.a1, a.a3));
            }
        max_step = 0.0;
        for (std::size_t k = 0; k < ang.size(); ++k)
            max_step = std::max(max_step, std::abs(wrap_angle(ang[(k + 1) % ang.size()] - ang[k])));
        if (max_step < kPi / 4 || n * m * 2 > cap) break;
    }
    if (max_step > kPi / 2) throw NumericalError("winding: loop too coarse, refinement required");
    WindingDetail w;
    for (std::size_t k = 0; k < ang.size(); ++k) w.total_angle += wrap_angle(ang[(k + 1) % ang.size()] - ang[k]);
    w.winding = static_cast<int>(std::lround(w.total_angle / kTwoPi));
    w.samples = static_cast<int>(ang.size());
    if (std::abs(w.total_angle - kTwoPi * w.winding) > 1e-9) throw NumericalError("winding: non-integral total angle");
    return w;
}

int winding_number(const KLoop& loop, const ModelParams& p) { return winding_detail(loop, p).winding; }

BerryResult berry_phase_wilson(const KLoop& loop, const ModelParams& p, int n) {
    if (n < 64) throw ValidationError("berry_phase_wilson: n must be >= 64");
    BerryResult r;
    r.winding = winding_number(loop, p);
    r.signed_phase = r.winding * kPi;
    const KLoop s = resample_loop(loop, n);
    std::vector<Spinor> v;
    v.reserve(s.points.size());
    for (const auto& k : s.points) {
        const CoeffVector a = coeffs(k, p);
        v.push_back(lower_real_gauge(a.a1, a.a3));
    }
    cplx prod(1.0, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Spinor &x = v[i], &y = v[(i + 1) % v.size()];
        const cplx ov = std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
        prod *= ov / std::abs(ov);
    }
    double ph = -std::arg(prod);
    if (ph <= -kPi) ph += kTwoPi;
    if (ph == 0.0) ph = 0.0;  // no -0 in outputs
    r.phase_mod = ph;
    return r;
}

EmbeddedCurve embed_torus(const NodalCurve& curve, double R, double dkx, double dky) {
    if (!(R > kPi)) throw ValidationError("embed_torus: R must exceed pi");
    EmbeddedCurve e;
    e.points.reserve(curve.points.size());
    for (const auto& q : curve.points) {
        const double kx = wrap_angle(q.k.kx + dkx), ky = wrap_angle(q.k.ky + dky);
        if (std::abs(kx) > kPi - 0.1 || std::abs(ky) > kPi - 0.1) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "embed_torus: point (%.6g, %.6g, %.6g) outside the embedding margin",
                          q.k.kx, q.k.ky, q.k.kz);
            throw NumericalError(buf);
        }
        e.points.push_back({(R + kx) * std::cos(q.k.kz), (R + kx) * std::sin(q.k.kz), ky});
    }
    return e;
}

EmbeddedCurve resample_curve(const EmbeddedCurve& c, int n) {
    const std::size_t m = c.points.size();
    std::vector<double> s(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) s[i + 1] = s[i] + norm3(sub(c.points[(i + 1) % m], c.points[i]));
    EmbeddedCurve out;
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double t = s[m] * k / n;
        while (seg + 1 < m && s[seg + 1] <= t) ++seg;
        const double len = s[seg + 1] - s[seg];
        const double f = len > 0 ? (t - s[seg]) / len : 0.0;
        const Vec3 &a = c.points[seg], &b = c.points[(seg + 1) % m];
        out.points.push_back({a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2])});
    }
    return out;
}

double min_separation(const EmbeddedCurve& a, const EmbeddedCurve& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : a.points)
        for (const auto& v : b.points) best = std::min(best, norm3(sub(u, v)));
    return best;
}

LinkingReport gauss_linking(const EmbeddedCurve& a, const EmbeddedCurve& b) {
    if (a.points.size() < 3 || b.points.size() < 3) throw ValidationError("gauss_linking: curves need >= 3 points");
    const double sep = min_separation(a, b);
    if (sep <= 0.05) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "gauss_linking: curves too close (separation %.3g <= 0.05)", sep);
        throw NumericalError(buf);
    }
    const std::size_t na = a.points.size(), nb = b.points.size();
    std::vector<Vec3> ma(na), da(na), mb(nb), db(nb);
    for (std::size_t i = 0; i < na; ++i) {
        const Vec3 &p = a.points[i], &q = a.points[(i + 1) % na];
        ma[i] = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])};
        da[i] = sub(q, p);
    }
    for (std::size_t j = 0; j < nb; ++j) {
        const Vec3 &p = b.points[j], &q = b.points[(j + 1) % nb];
        mb[j] = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])};
        db[j] = sub(q, p);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const Vec3 r = sub(ma[i], mb[j]);
            const Vec3 c = {da[i][1] * db[j][2] - da[i][2] * db[j][1], da[i][2] * db[j][0] - da[i][0] * db[j][2],
                            da[i][0] * db[j][1] - da[i][1] * db[j][0]};
            const double d = norm3(r);
            sum += (r[0] * c[0] + r[1] * c[1] + r[2] * c[2]) / (d * d * d);
        }
    LinkingReport rep;
    rep.raw = sum / (4.0 * kPi);
    rep.linking = static_cast<int>(std::lround(rep.raw));
    rep.method = "gauss-midpoint";
    rep.accepted = std::abs(rep.raw - rep.linking) < 0.05;
    return rep;
}

LinkingReport curve_linking(const NodalCurve& a, const NodalCurve& b, double R, double dkx, double dky, int segments) {
    const EmbeddedCurve ea = resample_curve(embed_torus(a, R, dkx, dky), segments);
    const EmbeddedCurve eb = resample_curve(embed_torus(b, R, dkx, dky), segments);
    LinkingReport r = gauss_linking(ea, eb);
    r.method = "gauss-midpoint-torus-R" + std::to_string(static_cast<int>(R)) + "-n" + std::to_string(segments);
    return r;
}

KLoop family_a_loop(double kx0, int per_side) {
    KLoop L;
    char buf[64];
    std::snprintf(buf, sizeof buf, "family-A kx0=%.9g", kx0);
    L.description = buf;
    const double x1 = 2.0, y0 = -0.5, y1 = 0.5;
    const double cx[4] = {kx0, x1, x1, kx0}, cy[4] = {y1, y1, y0, y0};
    for (int s = 0; s < 4; ++s) {
        const int e = (s + 1) % 4;
        for (int t = 0; t < per_side; ++t) {
            const double f = static_cast<double>(t) / per_side;
            L.points.emplace_back(cx[s] + f * (cx[e] - cx[s]), cy[s] + f * (cy[e] - cy[s]), 0.0);
        }
    }
    return L;
}

LoopFamily family_a(double kx0_min, double kx0_max, double step) {
    LoopFamily f;
    f.name = "family-A";
    const int n = static_cast<int>(std::floor((kx0_max - kx0_min) / step + 1e-9));
    for (int i = 0; i <= n; ++i) f.params.push_back(kx0_min + step * i);
    f.make = [](double kx0) { return family_a_loop(kx0); };
    return f;
}

KLoop family_b_loop(double kz_center, int n) {
    KLoop L;
    char buf[64];
    std::snprintf(buf, sizeof buf, "family-B kz=%.9g", kz_center);
    L.description = buf;
    const double r = 0.35, cy = kPi / 3;
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        L.points.emplace_back(0.0, cy + r * std::cos(t), kz_center + r * std::sin(t));
    }
    return L;
}

LoopFamily family_b() {
    LoopFamily f;
    f.name = "family-B";
    f.params = {-kPi / 2, kPi / 2};
    f.make = [](double c) { return family_b_loop(c); };
    return f;
}

std::vector<SweepRow> berry_sweep(const LoopFamily& family, const ModelParams& p, int wilson_n) {
    return parallel_map<SweepRow>(family.params.size(), [&](std::size_t i) {
        SweepRow row;
        row.param = family.params[i];
        try {
            row.result = berry_phase_wilson(family.make(row.param), p, wilson_n);
        } catch (const NumericalError& e) {
            row.flag = e.what();
        }
        return row;
    });
}

}  // namespace hopflab
