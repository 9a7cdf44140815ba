#include "hopflab/nodal_geometry.hpp"
#include "hopflab/errors.hpp"
#include "hopflab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace hopflab {

namespace {

struct P2 {
    double x, y;
};

double dist2(double x1, double y1, double x2, double y2) {
    const double dx = wrap_angle(x1 - x2), dy = wrap_angle(y1 - y2);
    return std::sqrt(dx * dx + dy * dy);
}

double residual_at(double kx, double ky, double kz, const ModelParams& p) {
    const CoeffVector a = coeffs(Momentum(kx, ky, kz), p);
    return std::max(std::abs(a.a1), std::abs(a.a3));
}

NodalPoint make_point(double kx, double ky, double kz, const ModelParams& p) {
    NodalPoint n;
    n.k = Momentum(kx, ky, kz);
    n.residual = residual_at(n.k.kx, n.k.ky, n.k.kz, p);
    return n;
}

bool lex_less(const Momentum& a, const Momentum& b) {
    return std::tie(a.kx, a.ky, a.kz) < std::tie(b.kx, b.ky, b.kz);
}

// Newton on (a1, a3) = 0 at fixed kz. Singular Jacobian -> damped least squares.
bool newton_slice(double kz, const ModelParams& p, double& x, double& y, double clamp, int max_iter,
                  double tol) {
    const double sz = std::sin(kz), cz = std::cos(kz);
    for (int it = 0; it < max_iter; ++it) {
        const double sx = std::sin(x), sy = std::sin(y), cx = std::cos(x), cy = std::cos(y);
        const double f1 = sy * cz - sx * sz + p.lambda * sy;
        const double f3 = 2 * cx + 2 * cy + p.chi + p.eta;
        if (f1 == 0.0 && f3 == 0.0) break;
        const double j11 = -cx * sz, j12 = cy * cz + p.lambda * cy;
        const double j31 = -2 * sx, j32 = -2 * sy;
        const double det = j11 * j32 - j12 * j31;
        double dx, dy;
        if (std::abs(det) >= 1e-8) {
            dx = -(j32 * f1 - j12 * f3) / det;
            dy = -(-j31 * f1 + j11 * f3) / det;
        } else {
            const double a = j11 * j11 + j31 * j31, b = j11 * j12 + j31 * j32, c = j12 * j12 + j32 * j32;
            const double mu = 1e-12 * (1.0 + a + c);
            const double g1 = j11 * f1 + j31 * f3, g2 = j12 * f1 + j32 * f3;
            const double d = (a + mu) * (c + mu) - b * b;
            dx = -((c + mu) * g1 - b * g2) / d;
            dy = -(-b * g1 + (a + mu) * g2) / d;
        }
        const double n = std::hypot(dx, dy);
        if (!std::isfinite(n)) return false;
        if (n > clamp) {
            dx *= clamp / n;
            dy *= clamp / n;
        }
        x += dx;
        y += dy;
        if (n < 1e-13) break;
    }
    x = wrap_angle(x);
    y = wrap_angle(y);
    return residual_at(x, y, kz, p) <= tol;
}

// Gradient projection onto the a3 = 0 contour.
bool project_a3(const ModelParams& p, double& x, double& y, double clamp) {
    const double c0 = p.chi + p.eta;
    for (int it = 0; it < 40; ++it) {
        const double f = 2 * std::cos(x) + 2 * std::cos(y) + c0;
        const double gx = -2 * std::sin(x), gy = -2 * std::sin(y);
        const double gg = gx * gx + gy * gy;
        if (gg < 1e-20) return false;
        double dx = -f * gx / gg, dy = -f * gy / gg;
        const double n = std::hypot(dx, dy);
        if (n > clamp) {
            dx *= clamp / n;
            dy *= clamp / n;
        }
        x += dx;
        y += dy;
        if (n < 1e-15) break;
    }
    x = wrap_angle(x);
    y = wrap_angle(y);
    return true;
}

void dedupe(std::vector<P2>& pts, double radius) {
    std::vector<P2> out;
    for (const auto& q : pts) {
        bool dup = false;
        for (const auto& o : out)
            if (dist2(q.x, q.y, o.x, o.y) < radius) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(q);
    }
    pts.swap(out);
}

// Roots whose connecting segment is itself nodal within tol are one root seen
// through a flat residual (saddle or near-tangent contact); keep the best one.
void merge_roots(std::vector<P2>& roots, double kz, const ModelParams& p, double tol, double reach) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dist2(roots[i].x, roots[i].y, roots[j].x, roots[j].y) > reach) continue;
            const double dx = wrap_angle(roots[j].x - roots[i].x), dy = wrap_angle(roots[j].y - roots[i].y);
            bool flat = true;
            for (double t : {0.25, 0.5, 0.75})
                if (residual_at(roots[i].x + t * dx, roots[i].y + t * dy, kz, p) > tol) {
                    flat = false;
                    break;
                }
            if (flat) parent[find(j)] = find(i);
        }
    std::vector<P2> out;
    std::vector<double> best;
    std::vector<std::size_t> rep(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        const double res = residual_at(roots[i].x, roots[i].y, kz, p);
        if (rep[r] == n) {
            rep[r] = out.size();
            out.push_back(roots[i]);
            best.push_back(res);
        } else if (res < best[rep[r]]) {
            out[rep[r]] = roots[i];
            best[rep[r]] = res;
        }
    }
    roots.swap(out);
}

struct SeedField {
    int n;
    double h;
    std::vector<double> a1, a3;  // at corners (-pi + (i + 1/2) h), periodic
};

SeedField seed_field(double kz, const ModelParams& p, int n) {
    SeedField f{n, kTwoPi / n, {}, {}};
    f.a1.resize(static_cast<std::size_t>(n) * n);
    f.a3.resize(f.a1.size());
    std::vector<double> s(n), c(n);
    for (int i = 0; i < n; ++i) {
        const double k = -kPi + (i + 0.5) * f.h;
        s[i] = std::sin(k);
        c[i] = std::cos(k);
    }
    const double sz = std::sin(kz), cz = std::cos(kz);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const std::size_t id = static_cast<std::size_t>(j) * n + i;
            f.a1[id] = s[j] * cz - s[i] * sz + p.lambda * s[j];
            f.a3[id] = 2 * c[i] + 2 * c[j] + p.chi + p.eta;
        }
    return f;
}

bool straddles(const std::vector<double>& v, int n, int i, int j, double eps) {
    const int i1 = (i + 1) % n, j1 = (j + 1) % n;
    const double q[4] = {v[static_cast<std::size_t>(j) * n + i], v[static_cast<std::size_t>(j) * n + i1],
                         v[static_cast<std::size_t>(j1) * n + i], v[static_cast<std::size_t>(j1) * n + i1]};
    const double lo = std::min({q[0], q[1], q[2], q[3]}), hi = std::max({q[0], q[1], q[2], q[3]});
    return lo <= eps && hi >= -eps;
}

std::vector<P2> isolated_roots(double kz, const ModelParams& p, const SliceOptions& opt, const SeedField& f,
                               int& discarded) {
    std::vector<P2> roots;
    for (int j = 0; j < f.n; ++j)
        for (int i = 0; i < f.n; ++i) {
            if (!straddles(f.a1, f.n, i, j, 1e-12) || !straddles(f.a3, f.n, i, j, 1e-12)) continue;
            double x = -kPi + (i + 1) * f.h, y = -kPi + (j + 1) * f.h;
            if (newton_slice(kz, p, x, y, 0.5 * f.h, opt.max_iter, opt.tol))
                roots.push_back({x, y});
            else
                ++discarded;
        }
    dedupe(roots, 1e-6);
    merge_roots(roots, kz, p, opt.tol, 0.5 * f.h);
    return roots;
}

struct Arc {
    std::vector<P2> pts;
    bool closed = false;
};

// Samples of a3 = 0 on which a1 also vanishes, chained into polylines.
std::vector<Arc> find_arcs(double kz, const ModelParams& p, const SliceOptions& opt, const SeedField& f) {
    std::vector<P2> samples;
    for (int j = 0; j < f.n; ++j)
        for (int i = 0; i < f.n; ++i) {
            if (!straddles(f.a3, f.n, i, j, 1e-12)) continue;
            const double cx = -kPi + (i + 1) * f.h, cy = -kPi + (j + 1) * f.h;
            double x = cx, y = cy;
            if (!project_a3(p, x, y, 0.5 * f.h)) continue;
            if (dist2(x, y, cx, cy) > f.h) continue;
            if (residual_at(x, y, kz, p) <= opt.tol) samples.push_back({x, y});
        }
    if (samples.size() < 4) return {};
    dedupe(samples, 0.25 * f.h);

    const double link = 2.5 * f.h;
    std::vector<bool> used(samples.size(), false);
    auto nearest = [&](const P2& q) {
        int best = -1;
        double bd = link;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            if (used[k]) continue;
            const double d = dist2(q.x, q.y, samples[k].x, samples[k].y);
            if (d <= bd) {
                bd = d;
                best = static_cast<int>(k);
            }
        }
        return best;
    };
    std::vector<Arc> arcs;
    for (std::size_t s0 = 0; s0 < samples.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        std::vector<P2> fwd{samples[s0]}, bwd;
        for (int k; (k = nearest(fwd.back())) >= 0;) {
            used[k] = true;
            fwd.push_back(samples[k]);
        }
        for (int k; (k = nearest(bwd.empty() ? samples[s0] : bwd.back())) >= 0;) {
            used[k] = true;
            bwd.push_back(samples[k]);
        }
        Arc a;
        a.pts.assign(bwd.rbegin(), bwd.rend());
        a.pts.insert(a.pts.end(), fwd.begin(), fwd.end());
        if (a.pts.size() < 4) continue;
        const P2 &u = a.pts.front(), &v = a.pts.back();
        a.closed = dist2(u.x, u.y, v.x, v.y) <= link;
        arcs.push_back(std::move(a));
    }
    return arcs;
}

void densify(Arc& a, double kz, const ModelParams& p, double spacing, double clamp, double tol) {
    std::vector<P2> out;
    const std::size_t n = a.pts.size();
    const std::size_t segs = a.closed ? n : n - 1;
    for (std::size_t s = 0; s < n; ++s) {
        out.push_back(a.pts[s]);
        if (s >= segs) continue;
        const P2 &u = a.pts[s], &v = a.pts[(s + 1) % n];
        const double dx = wrap_angle(v.x - u.x), dy = wrap_angle(v.y - u.y);
        const int m = static_cast<int>(std::ceil(std::hypot(dx, dy) / spacing));
        for (int t = 1; t < m; ++t) {
            double x = u.x + dx * t / m, y = u.y + dy * t / m;
            if (project_a3(p, x, y, clamp) && residual_at(x, y, kz, p) <= tol) out.push_back({x, y});
        }
    }
    a.pts.swap(out);
}

void insert_junction(Arc& a, const P2& q, double reach) {
    const std::size_t n = a.pts.size();
    auto d = [&](std::size_t k) { return dist2(q.x, q.y, a.pts[k].x, a.pts[k].y); };
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        nearest = std::min(nearest, d(k));
        if (d(k) < 1e-9) {
            a.pts[k] = q;
            return;
        }
    }
    if (nearest > reach) return;
    // cheapest place to splice q in, counting extension past either end
    std::size_t pos = 0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t segs = a.closed ? n : n - 1;
    for (std::size_t k = 0; k < segs; ++k) {
        const P2 &u = a.pts[k], &v = a.pts[(k + 1) % n];
        const double c = d(k) + d((k + 1) % n) - dist2(u.x, u.y, v.x, v.y);
        if (c < best) {
            best = c;
            pos = k + 1;
        }
    }
    if (!a.closed) {
        if (d(0) < best) {
            best = d(0);
            pos = 0;
        }
        if (d(n - 1) < best) pos = n;
    }
    a.pts.insert(a.pts.begin() + static_cast<std::ptrdiff_t>(pos), q);
}

// Open arcs that end on a shared junction are pieces of one contour.
void join_arcs(std::vector<Arc>& arcs) {
    auto same = [](const P2& u, const P2& v) { return dist2(u.x, u.y, v.x, v.y) < 1e-9; };
    for (bool merged = true; merged;) {
        merged = false;
        for (std::size_t i = 0; i < arcs.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < arcs.size() && !merged; ++j) {
                Arc &a = arcs[i], &b = arcs[j];
                if (a.closed || b.closed) continue;
                if (same(a.pts.front(), b.pts.front()) || same(a.pts.front(), b.pts.back()))
                    std::reverse(a.pts.begin(), a.pts.end());
                if (!same(a.pts.back(), b.pts.front()) && same(a.pts.back(), b.pts.back()))
                    std::reverse(b.pts.begin(), b.pts.end());
                if (!same(a.pts.back(), b.pts.front())) continue;
                a.pts.insert(a.pts.end(), b.pts.begin() + 1, b.pts.end());
                arcs.erase(arcs.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
    }
    for (auto& a : arcs)
        if (!a.closed && a.pts.size() > 2 && same(a.pts.front(), a.pts.back())) {
            a.pts.pop_back();
            a.closed = true;
        }
}

}  // namespace

GapGrid gap_grid(double kz, const ModelParams& p, int nx, int ny, const Window& w) {
    if (nx < 2 || ny < 2) throw ValidationError("gap_grid: nx and ny must be >= 2");
    if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw ValidationError("gap_grid: window has zero area");
    const double eps = 1e-12;
    if (w.x0 < -kPi - eps || w.x1 > kPi + eps || w.y0 < -kPi - eps || w.y1 > kPi + eps)
        throw ValidationError("gap_grid: window must lie within [-pi, pi)^2");
    GapGrid g;
    g.kz = kz;
    g.nx = nx;
    g.ny = ny;
    g.window = w;
    g.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            g.values[static_cast<std::size_t>(j) * nx + i] =
                eigensystem(Momentum(g.kx_at(i), g.ky_at(j), kz), p).gap;
    return g;
}

SliceResult analyze_slice(double kz, const ModelParams& p, const SliceOptions& opt) {
    if (opt.seed_res < 16) throw ValidationError("seed_res must be >= 16");
    if (!(opt.tol > 0)) throw ValidationError("tol must be > 0");
    SliceResult r;
    r.kz = wrap_angle(kz);
    const SeedField f = seed_field(r.kz, p, opt.seed_res);
    std::vector<Arc> arcs = find_arcs(r.kz, p, opt, f);

    std::vector<P2> roots;
    if (arcs.empty()) {
        roots = isolated_roots(r.kz, p, opt, f, r.discarded_seeds);
    } else {
        // strands crossing the arc: solve just off the slice, then pull back
        r.degenerate = true;
        const double off = r.kz + 1e-7;
        const SeedField g = seed_field(off, p, opt.seed_res);
        int dummy = 0;
        for (P2 q : isolated_roots(off, p, opt, g, dummy)) {
            if (newton_slice(r.kz, p, q.x, q.y, 0.5 * f.h, opt.max_iter, opt.tol))
                roots.push_back(q);
            else
                ++r.discarded_seeds;
        }
        dedupe(roots, 1e-6);
        merge_roots(roots, r.kz, p, opt.tol, 0.5 * f.h);
        for (auto& a : arcs)
            for (const auto& q : roots) insert_junction(a, q, 2.5 * f.h);
        join_arcs(arcs);
        for (auto& a : arcs) densify(a, r.kz, p, opt.arc_spacing, 0.5 * f.h, opt.tol);
    }
    std::sort(roots.begin(), roots.end(), [](const P2& a, const P2& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    for (const auto& q : roots) r.points.push_back(make_point(q.x, q.y, r.kz, p));
    for (const auto& a : arcs) {
        std::vector<NodalPoint> pts;
        for (const auto& q : a.pts) pts.push_back(make_point(q.x, q.y, r.kz, p));
        r.arcs.push_back(std::move(pts));
        r.arc_closed.push_back(a.closed);
    }
    return r;
}

std::vector<NodalPoint> nodal_points_slice(double kz, const ModelParams& p, int seed_res, double tol) {
    SliceOptions opt;
    opt.seed_res = seed_res;
    opt.tol = tol;
    return analyze_slice(kz, p, opt).points;
}

namespace {

Winding winding_of(const std::vector<NodalPoint>& pts, bool closed) {
    double acc[3] = {0, 0, 0};
    const std::size_t n = pts.size();
    if (n < 2) return {0, 0, 0};
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t s = 0; s < segs; ++s) {
        const Momentum &u = pts[s].k, &v = pts[(s + 1) % n].k;
        acc[0] += wrap_angle(v.kx - u.kx);
        acc[1] += wrap_angle(v.ky - u.ky);
        acc[2] += wrap_angle(v.kz - u.kz);
    }
    return {static_cast<int>(std::lround(acc[0] / kTwoPi)), static_cast<int>(std::lround(acc[1] / kTwoPi)),
            static_cast<int>(std::lround(acc[2] / kTwoPi))};
}

// Rotate a closed loop to its lexicographically smallest point, heading toward
// the smaller of its two neighbours.
void canonical_start(std::vector<NodalPoint>& pts, bool closed) {
    if (pts.size() < 2) return;
    if (!closed) {
        if (lex_less(pts.back().k, pts.front().k)) std::reverse(pts.begin(), pts.end());
        return;
    }
    std::size_t m = 0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (lex_less(pts[k].k, pts[m].k)) m = k;
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(m), pts.end());
    if (lex_less(pts.back().k, pts[1].k)) std::reverse(pts.begin() + 1, pts.end());
}

class Tracer {
public:
    Tracer(const ModelParams& p, const TraceOptions& opt) : p_(p), opt_(opt) {
        sopt_.seed_res = opt.seed_res;
        sopt_.tol = opt.tol;
        delta_ = kTwoPi / opt.n_slices;
        sopt_.arc_spacing = 0.9 * delta_;
    }

    std::vector<NodalCurve> run() {
        const int n = opt_.n_slices;
        slices_ = parallel_map<SliceResult>(static_cast<std::size_t>(n), [&](std::size_t j) {
            return analyze_slice(-kPi + delta_ * static_cast<double>(j), p_, sopt_);
        });
        adj_.resize(slices_.size());
        for (std::size_t s = 0; s < slices_.size(); ++s) adj_[s].resize(slices_[s].points.size());
        for (int j = 0; j < n; ++j) link(j, (j + 1) % n, delta_, 0);
        return collect();
    }

private:
    struct Node {
        int slice, idx;
        bool operator==(const Node& o) const { return slice == o.slice && idx == o.idx; }
    };

    const Momentum& at(Node v) const { return slices_[v.slice].points[v.idx].k; }

    void connect(Node a, Node b) {
        adj_[a.slice][a.idx].push_back(b);
        adj_[b.slice][b.idx].push_back(a);
    }

    int add_slice(double kz) {
        slices_.push_back(analyze_slice(kz, p_, sopt_));
        adj_.emplace_back(slices_.back().points.size());
        return static_cast<int>(slices_.size()) - 1;
    }

    // Mutual-nearest bijection with a 10% ambiguity margin.
    bool try_match(int sa, int sb, std::vector<std::pair<int, int>>& pairs) const {
        const auto &A = slices_[sa].points, &B = slices_[sb].points;
        if (A.size() != B.size()) return false;
        const std::size_t n = A.size();
        std::vector<int> na(n), nb(n);
        auto pick = [&](const std::vector<NodalPoint>& X, const std::vector<NodalPoint>& Y, std::size_t i,
                        int& out) {
            double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
            for (std::size_t j = 0; j < Y.size(); ++j) {
                const double d = torus_distance(X[i].k, Y[j].k);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    out = static_cast<int>(j);
                } else if (d < d2) {
                    d2 = d;
                }
            }
            return d1 <= 2.0 * delta_ && (Y.size() < 2 || d2 > 1.1 * d1);
        };
        for (std::size_t i = 0; i < n; ++i)
            if (!pick(A, B, i, na[i]) || !pick(B, A, i, nb[i])) return false;
        for (std::size_t i = 0; i < n; ++i)
            if (nb[na[i]] != static_cast<int>(i)) return false;
        for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(static_cast<int>(i), na[i]);
        return true;
    }

    void link(int sa, int sb, double gap, int depth) {
        std::vector<std::pair<int, int>> pairs;
        if (try_match(sa, sb, pairs)) {
            for (auto [i, j] : pairs) connect({sa, i}, {sb, j});
            return;
        }
        if (depth < opt_.max_refine_depth) {
            const int sm = add_slice(slices_[sa].kz + 0.5 * gap);
            link(sa, sm, 0.5 * gap, depth + 1);
            link(sm, sb, 0.5 * gap, depth + 1);
            return;
        }
        resolve_caps(sa, sb);
    }

    // Last resort at the depth cap: plain close pairs across the gap, then
    // leftover points inside one slice joined as turning caps.
    void resolve_caps(int sa, int sb) {
        const auto &A = slices_[sa].points, &B = slices_[sb].points;
        std::vector<bool> ua(A.size(), false), ub(B.size(), false);
        struct Cand {
            double d;
            int s1, i1, s2, i2;
        };
        std::vector<Cand> c;
        for (std::size_t i = 0; i < A.size(); ++i)
            for (std::size_t j = 0; j < B.size(); ++j)
                c.push_back({torus_distance(A[i].k, B[j].k), sa, (int)i, sb, (int)j});
        for (std::size_t i = 0; i < A.size(); ++i)
            for (std::size_t j = i + 1; j < A.size(); ++j)
                c.push_back({torus_distance(A[i].k, A[j].k), sa, (int)i, sa, (int)j});
        for (std::size_t i = 0; i < B.size(); ++i)
            for (std::size_t j = i + 1; j < B.size(); ++j)
                c.push_back({torus_distance(B[i].k, B[j].k), sb, (int)i, sb, (int)j});
        std::stable_sort(c.begin(), c.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });
        auto used = [&](int s, int i) -> std::vector<bool>::reference { return s == sa ? ua[i] : ub[i]; };
        for (const auto& e : c) {
            if (e.d > 2.0 * delta_) break;
            if (used(e.s1, e.i1) || used(e.s2, e.i2)) continue;
            used(e.s1, e.i1) = true;
            used(e.s2, e.i2) = true;
            connect({e.s1, e.i1}, {e.s2, e.i2});
        }
        for (std::size_t i = 0; i < ua.size(); ++i)
            if (!ua[i]) fail(sa, sb);
        for (std::size_t i = 0; i < ub.size(); ++i)
            if (!ub[i]) fail(sa, sb);
    }

    [[noreturn]] void fail(int sa, int sb) const {
        char buf[160];
        std::snprintf(buf, sizeof buf, "trace: unresolved strand matching between kz=%.9g and kz=%.9g",
                      slices_[sa].kz, slices_[sb].kz);
        throw NumericalError(buf);
    }

    std::vector<NodalCurve> collect() {
        std::vector<Node> order;
        for (std::size_t s = 0; s < slices_.size(); ++s)
            for (std::size_t i = 0; i < slices_[s].points.size(); ++i)
                order.push_back({static_cast<int>(s), static_cast<int>(i)});
        std::sort(order.begin(), order.end(), [&](Node a, Node b) {
            const Momentum &u = at(a), &v = at(b);
            return std::tie(u.kz, u.kx, u.ky) < std::tie(v.kz, v.kx, v.ky);
        });
        std::vector<std::vector<bool>> seen(slices_.size());
        for (std::size_t s = 0; s < slices_.size(); ++s) seen[s].assign(slices_[s].points.size(), false);

        std::vector<NodalCurve> curves;
        for (Node start : order) {
            if (seen[start.slice][start.idx]) continue;
            const auto& nb0 = adj_[start.slice][start.idx];
            Node next{-1, -1};
            for (Node q : nb0)
                if (wrap_angle(at(q).kz - at(start).kz) > 0) {
                    next = q;
                    break;
                }
            if (next.slice < 0 && !nb0.empty()) next = nb0.front();
            NodalCurve c;
            Node prev{-1, -1}, cur = start;
            bool closed = false;
            while (true) {
                seen[cur.slice][cur.idx] = true;
                c.points.push_back(slices_[cur.slice].points[cur.idx]);
                if (next.slice < 0) break;
                if (next == start) {
                    closed = true;
                    break;
                }
                if (seen[next.slice][next.idx]) break;
                prev = cur;
                cur = next;
                next = {-1, -1};
                for (Node q : adj_[cur.slice][cur.idx])
                    if (!(q == prev)) {
                        next = q;
                        break;
                    }
            }
            c.closed = closed;
            c.winding = winding_of(c.points, c.closed);
            if (c.winding[2] == 0) canonical_start(c.points, c.closed);
            curves.push_back(std::move(c));
        }

        std::vector<NodalCurve> arcs;
        for (const auto& s : slices_)
            for (std::size_t a = 0; a < s.arcs.size(); ++a) {
                NodalCurve c;
                c.points = s.arcs[a];
                c.closed = s.arc_closed[a];
                canonical_start(c.points, c.closed);
                c.winding = winding_of(c.points, c.closed);
                arcs.push_back(std::move(c));
            }
        std::sort(arcs.begin(), arcs.end(), [](const NodalCurve& x, const NodalCurve& y) {
            const Momentum &u = x.points.front().k, &v = y.points.front().k;
            return std::tie(u.kz, u.kx, u.ky) < std::tie(v.kz, v.kx, v.ky);
        });
        for (auto& c : arcs) curves.push_back(std::move(c));
        return curves;
    }

    ModelParams p_;
    TraceOptions opt_;
    SliceOptions sopt_;
    double delta_;
    std::vector<SliceResult> slices_;
    std::vector<std::vector<std::vector<Node>>> adj_;
};

}  // namespace

std::vector<NodalCurve> trace_nodal_curves(const ModelParams& p, const TraceOptions& opt) {
    if (opt.n_slices < 32) throw ValidationError("n_slices must be >= 32");
    if (opt.seed_res < 16) throw ValidationError("seed_res must be >= 16");
    if (!(opt.tol > 0)) throw ValidationError("tol must be > 0");
    p.validate();
    return Tracer(p, opt).run();
}

std::vector<NodalCurve> trace_nodal_curves(const ModelParams& p, int n_slices, int seed_res, double tol) {
    TraceOptions opt;
    opt.n_slices = n_slices;
    opt.seed_res = seed_res;
    opt.tol = tol;
    return trace_nodal_curves(p, opt);
}

double curve_distance(const NodalCurve& a, const NodalCurve& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : a.points)
        for (const auto& v : b.points) best = std::min(best, torus_distance(u.k, v.k));
    return best;
}

CurveMetrics curve_metrics(const std::vector<NodalCurve>& curves) {
    CurveMetrics m;
    m.curve_count = static_cast<int>(curves.size());
    for (const auto& c : curves) m.windings.push_back(c.winding);
    if (curves.size() >= 2) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < curves.size(); ++i)
            for (std::size_t j = i + 1; j < curves.size(); ++j) best = std::min(best, curve_distance(curves[i], curves[j]));
        m.min_pair_distance = best;
    }
    return m;
}

}  // namespace hopflab
