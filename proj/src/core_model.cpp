#include "hopflab/core_model.hpp"
#include "hopflab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hopflab {

double wrap_angle(double x) {
    double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r += kTwoPi;
    return r;
}

void ModelParams::validate() const {
    auto finite = [](double v, const char* name) {
        if (!std::isfinite(v)) throw ValidationError(std::string("model.") + name + " must be finite");
    };
    finite(chi, "chi");
    finite(lambda, "lambda");
    finite(eta, "eta");
    finite(omega, "omega");
    if (!(omega > 0)) throw ValidationError("model.omega must be > 0");
}

Momentum::Momentum(double x, double y, double z)
    : kx(wrap_angle(x)), ky(wrap_angle(y)), kz(wrap_angle(z)) {}

bool Momentum::operator==(const Momentum& o) const { return torus_distance(*this, o) < 1e-12; }

double torus_distance(const Momentum& a, const Momentum& b) {
    double dx = wrap_angle(a.kx - b.kx);
    double dy = wrap_angle(a.ky - b.ky);
    double dz = wrap_angle(a.kz - b.kz);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double CoeffVector::norm() const { return std::sqrt(a1 * a1 + a2 * a2 + a3 * a3); }

CoeffVector coeffs(const Momentum& k, const ModelParams& p) {
    const double sx = std::sin(k.kx), sy = std::sin(k.ky);
    CoeffVector a;
    a.a1 = sy * std::cos(k.kz) - sx * std::sin(k.kz) + p.lambda * sy;
    a.a2 = 0.0;
    a.a3 = 2.0 * std::cos(k.kx) + 2.0 * std::cos(k.ky) + p.chi + p.eta;
    return a;
}

SliceJacobian slice_jacobian(const Momentum& k, const ModelParams& p) {
    const double cy = std::cos(k.ky);
    return {-std::cos(k.kx) * std::sin(k.kz), cy * std::cos(k.kz) + p.lambda * cy,
            -2.0 * std::sin(k.kx), -2.0 * std::sin(k.ky)};
}

Matrix2 hamiltonian(const CoeffVector& a, double omega) {
    const double h = 0.5 * omega;
    Matrix2 m;
    m[0][0] = cplx(h * a.a3, 0.0);
    m[1][1] = cplx(-h * a.a3, 0.0);
    m[0][1] = cplx(h * a.a1, -h * a.a2);
    m[1][0] = cplx(h * a.a1, h * a.a2);
    return m;
}

Matrix2 hamiltonian(const Momentum& k, const ModelParams& p) { return hamiltonian(coeffs(k, p), p.omega); }

Spinor lower_real_gauge(double a1, double a3) {
    const double al = std::atan2(a1, a3);
    return {cplx(-std::sin(0.5 * al), 0.0), cplx(std::cos(0.5 * al), 0.0)};
}

EigenPair eigensystem(const CoeffVector& a, double omega) {
    EigenPair e;
    const double n = a.norm();
    e.e_plus = 0.5 * omega * n;
    e.e_minus = -e.e_plus;
    e.gap = omega * n;
    if (n < 1e-12) {
        e.degenerate = true;
        e.v_minus = {cplx(0, 0), cplx(1, 0)};
        e.v_plus = {cplx(1, 0), cplx(0, 0)};
        return e;
    }
    if (a.a2 == 0.0) {
        const double al = std::atan2(a.a1, a.a3);
        const double s = std::sin(0.5 * al), c = std::cos(0.5 * al);
        e.v_minus = {cplx(-s, 0), cplx(c, 0)};
        e.v_plus = {cplx(c, 0), cplx(s, 0)};
        return e;
    }
    // general Bloch vector; not reached by this family but kept total
    const double th = std::acos(std::clamp(a.a3 / n, -1.0, 1.0));
    const double ph = std::atan2(a.a2, a.a1);
    const cplx eph = std::polar(1.0, ph);
    e.v_plus = {cplx(std::cos(0.5 * th), 0), eph * std::sin(0.5 * th)};
    e.v_minus = {-std::conj(eph) * std::sin(0.5 * th), cplx(std::cos(0.5 * th), 0)};
    return e;
}

EigenPair eigensystem(const Momentum& k, const ModelParams& p) { return eigensystem(coeffs(k, p), p.omega); }

double frobenius_norm(const Matrix2& m) {
    double s = 0;
    for (const auto& r : m)
        for (const auto& v : r) s += std::norm(v);
    return std::sqrt(s);
}

SymmetryReport symmetry_report(const ModelParams& p, const std::vector<Momentum>& samples) {
    if (samples.empty()) throw ValidationError("symmetry_report: samples must be non-empty");
    SymmetryReport r;
    r.p_witness = {samples.front(), -1.0};
    r.t_witness = {samples.front(), -1.0};
    for (const auto& k : samples) {
        const Matrix2 h = hamiltonian(k, p);
        const Matrix2 hm = hamiltonian(-k, p);
        Matrix2 dp, dt;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                r.max_imag = std::max(r.max_imag, std::abs(h[i][j].imag()));
                dp[i][j] = hm[i][j] - h[i][j];
                dt[i][j] = hm[i][j] - std::conj(h[i][j]);
            }
        const double np = frobenius_norm(dp), nt = frobenius_norm(dt);
        if (np > r.p_witness.deviation) r.p_witness = {k, np};
        if (nt > r.t_witness.deviation) r.t_witness = {k, nt};
    }
    r.pt_holds = r.max_imag < 1e-12;
    return r;
}

}  // namespace hopflab
