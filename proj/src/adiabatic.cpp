#include "hopflab/adiabatic.hpp"
#include "hopflab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hopflab {

namespace {

double norm(const Field& f) { return std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]); }

Field lerp(const Field& a, const Field& b, double s) {
    return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
}

Spinor act(const Matrix2& m, const Spinor& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Matrix2 mul(const Matrix2& a, const Matrix2& b) {
    Matrix2 c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Matrix2 identity() { return {{{cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(1, 0)}}}; }

cplx inner(const Spinor& a, const Spinor& b) { return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]; }

Field path_field(const DrivePath& p, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return {p.omega_drive * (std::sin(p.theta) * c + p.lambda1), p.omega_drive * p.lambda2 * s,
            p.omega_drive * (std::cos(p.theta) * c + p.lambda1)};
}

struct Segment {
    Matrix2 u = identity();
    double min_fid = 1.0;
    double geo_phase = 0.0;
};

// Evolve over one segment starting from the instantaneous lower state; tracks
// fidelity to the moving lower state and the unwrapped phase of that overlap
// with the dynamical part removed.
Segment run_segment(const std::function<Field(double)>& f, double duration, double dt) {
    Segment s;
    const int n = std::max(1, static_cast<int>(std::lround(duration / dt)));
    const double h = duration / n;
    const Spinor v0 = lower_state(f(0.0));
    double prev = 0.0, acc = 0.0, dyn = 0.0;
    for (int i = 0; i < n; ++i) {
        const Field mid = f((i + 0.5) / n);
        s.u = mul(step_unitary(mid, h), s.u);
        dyn += 0.5 * norm(mid) * h;
        const cplx ov = inner(lower_state(f(static_cast<double>(i + 1) / n)), act(s.u, v0));
        s.min_fid = std::min(s.min_fid, std::norm(ov));
        const double a = std::arg(ov);
        acc += wrap_angle(a - prev);
        prev = a;
    }
    s.geo_phase = acc - dyn;
    return s;
}

}  // namespace

Field DrivePath::at(double phi) const { return path_field(*this, phi); }

DrivePath drive_loop(double theta, double lambda1, double lambda2, double omega_drive, int n) {
    if (n < 256) throw ValidationError("drive_loop: n must be >= 256");
    if (!std::isfinite(theta) || !std::isfinite(lambda1) || !std::isfinite(lambda2) || !(omega_drive > 0))
        throw ValidationError("drive_loop: parameters must be finite with omega_drive > 0");
    DrivePath p;
    p.theta = theta;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    p.omega_drive = omega_drive;
    for (int i = 0; i <= n; ++i) {
        const double phi = kTwoPi * i / n;
        p.phi.push_back(phi);
        p.samples.push_back(path_field(p, phi));
    }
    p.samples.back() = p.samples.front();
    return p;
}

double lambda1_from_kx(double kx, double lambda) { return (2.0 * std::cos(kx) - lambda) / 2.0; }

double solid_angle(const DrivePath& path) {
    const std::size_t n = path.samples.size();
    if (n < 3) throw ValidationError("solid_angle: path too short");
    std::vector<Field> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = norm(path.samples[i]);
        if (r < 1e-6 * path.omega_drive) throw NumericalError("solid_angle: path passes within 1e-6 of the origin");
        u[i] = {path.samples[i][0] / r, path.samples[i][1] / r, path.samples[i][2] / r};
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Field &a = u[i], &b = u[i + 1];
        const double triple = a[0] * b[1] - a[1] * b[0];  // z . (a x b)
        const double den = 1.0 + a[2] + b[2] + a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        total += 2.0 * std::atan2(triple, den);
    }
    return total;
}

void PulseTimings::validate() const {
    if (!(t_pre > 0) || !(t_ramp > 0) || !(dt > 0)) throw ValidationError("timings must be positive");
    if (dt > t_ramp / 1000.0 * (1 + 1e-12)) throw ValidationError("timings: dt must be <= t_ramp/1000");
}

Matrix2 step_unitary(const Field& omega, double dt) {
    const double w = norm(omega);
    if (w == 0.0) return identity();
    const double c = std::cos(0.5 * w * dt), s = std::sin(0.5 * w * dt);
    const double nx = omega[0] / w, ny = omega[1] / w, nz = omega[2] / w;
    // cos(a) 1 - i sin(a) n.sigma
    return {{{cplx(c, -s * nz), cplx(-s * ny, -s * nx)}, {cplx(s * ny, -s * nx), cplx(c, s * nz)}}};
}

Spinor lower_state(const Field& omega) {
    const double w = norm(omega);
    if (w == 0.0) return {cplx(0, 0), cplx(1, 0)};
    const double t = std::acos(std::clamp(omega[2] / w, -1.0, 1.0));
    const double ph = std::atan2(omega[1], omega[0]);
    return {-std::polar(std::sin(0.5 * t), -ph), cplx(std::cos(0.5 * t), 0)};
}

std::vector<TrajectoryPoint> propagate(const Waveform& field, double duration, const Spinor& psi0, double dt) {
    const int n = std::max(1, static_cast<int>(std::lround(duration / dt)));
    const double h = duration / n;
    std::vector<TrajectoryPoint> traj;
    traj.reserve(static_cast<std::size_t>(n));
    Spinor psi = psi0;
    for (int i = 0; i < n; ++i) {
        psi = act(step_unitary(field((i + 0.5) * h), h), psi);
        const double t = (i + 1) * h;
        traj.push_back({t, psi, std::norm(inner(lower_state(field(t)), psi))});
    }
    return traj;
}

std::vector<TrajectoryPoint> propagate(const std::vector<Field>& samples, const Spinor& psi0, double dt) {
    std::vector<TrajectoryPoint> traj;
    traj.reserve(samples.size());
    Spinor psi = psi0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        psi = act(step_unitary(samples[i], dt), psi);
        traj.push_back({(i + 1) * dt, psi, std::norm(inner(lower_state(samples[i]), psi))});
    }
    return traj;
}

ProtocolResult ramsey_echo_protocol(const DrivePath& path, const PulseTimings& timings, bool minus_first) {
    timings.validate();
    const Field p0 = path.at(0.0);
    const Field z0 = {0.0, 0.0, p0[2]};
    auto ramp_in = [&](double s) { return lerp(z0, p0, s); };
    auto ramp_out = [&](double s) { return lerp(p0, z0, s); };
    auto c_plus = [&](double s) { return path.at(kTwoPi * s); };
    auto c_minus = [&](double s) { return path.at(kTwoPi * (1.0 - s)); };

    const Matrix2 pi_x = {{{cplx(0, 0), cplx(0, -1)}, {cplx(0, -1), cplx(0, 0)}}};
    ProtocolResult r;
    Matrix2 u = identity();
    for (int k = 0; k < 2; ++k) {
        const bool plus = (k == 0) != minus_first;
        const Segment a = run_segment(ramp_in, timings.t_pre, timings.dt);
        const Segment l = plus ? run_segment(c_plus, timings.t_ramp, timings.dt)
                               : run_segment(c_minus, timings.t_ramp, timings.dt);
        const Segment b = run_segment(ramp_out, timings.t_pre, timings.dt);
        u = mul(b.u, mul(l.u, mul(a.u, u)));
        if (k == 0) u = mul(pi_x, u);
        r.loop_phases[k] = l.geo_phase;
        r.min_adiabatic_fidelity = std::min(r.min_adiabatic_fidelity, l.min_fid);
        r.min_ramp_fidelity = std::min({r.min_ramp_fidelity, a.min_fid, b.min_fid});
    }
    const double s2 = 1.0 / std::sqrt(2.0);
    const Spinor psi = act(u, Spinor{cplx(s2, 0), cplx(s2, 0)});  // after pi_y/2 on |up>
    const cplx ab = std::conj(psi[0]) * psi[1];
    r.bloch = {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(psi[0]) - std::norm(psi[1])};
    r.norm_drift = std::abs(std::norm(psi[0]) + std::norm(psi[1]) - 1.0);
    r.phi_total = std::atan2(r.bloch[1], r.bloch[0]);
    r.gamma_tracked = 0.5 * (r.loop_phases[0] - r.loop_phases[1]);
    r.adiabatic_warning = r.min_adiabatic_fidelity < 0.95 || r.min_ramp_fidelity < 0.95;
    return r;
}

}  // namespace hopflab
