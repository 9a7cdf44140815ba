#pragma once

#include <array>
#include <complex>
#include <vector>

namespace hopflab {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

using cplx = std::complex<double>;
using Spinor = std::array<cplx, 2>;
using Matrix2 = std::array<std::array<cplx, 2>, 2>;

/// Reduce an angle into [-pi, pi).
double wrap_angle(double x);

struct ModelParams {
    double chi = -3.0;
    double lambda = 0.0;
    double eta = 0.0;
    double omega = 10.0;  // MHz

    void validate() const;  // throws ValidationError
};

struct Momentum {
    double kx = 0, ky = 0, kz = 0;

    Momentum() = default;
    Momentum(double x, double y, double z);

    Momentum operator-() const { return {-kx, -ky, -kz}; }
    bool operator==(const Momentum& o) const;
};

/// Distance on the 3-torus (per-axis minimal image, Euclidean norm).
double torus_distance(const Momentum& a, const Momentum& b);

struct CoeffVector {
    double a1 = 0, a2 = 0, a3 = 0;
    double norm() const;
};

struct EigenPair {
    double e_minus = 0, e_plus = 0, gap = 0;
    Spinor v_minus{}, v_plus{};
    bool degenerate = false;
};

struct Witness {
    Momentum k;
    double deviation = 0;
};

struct SymmetryReport {
    bool pt_holds = false;
    double max_imag = 0;
    Witness p_witness;
    Witness t_witness;
};

CoeffVector coeffs(const Momentum& k, const ModelParams& p);

/// Analytic partial derivatives of (a1, a3) in (kx, ky) at fixed kz.
struct SliceJacobian {
    double d1x, d1y, d3x, d3y;
};
SliceJacobian slice_jacobian(const Momentum& k, const ModelParams& p);

Matrix2 hamiltonian(const Momentum& k, const ModelParams& p);
Matrix2 hamiltonian(const CoeffVector& a, double omega);

EigenPair eigensystem(const Momentum& k, const ModelParams& p);
EigenPair eigensystem(const CoeffVector& a, double omega);

/// Lower-band vector in the fixed real gauge (-sin(a/2), cos(a/2)), a = atan2(a1, a3).
Spinor lower_real_gauge(double a1, double a3);

SymmetryReport symmetry_report(const ModelParams& p, const std::vector<Momentum>& samples);

double frobenius_norm(const Matrix2& m);

}  // namespace hopflab
