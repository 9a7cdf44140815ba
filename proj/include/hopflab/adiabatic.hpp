#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hopflab/core_model.hpp"

namespace hopflab {

using Field = std::array<double, 3>;  // Omega-vector, rad/us

struct DrivePath {
    double theta = kPi / 4;
    double lambda1 = 0.0;
    double lambda2 = 1.0;
    double omega_drive = kTwoPi * 25.0;
    std::vector<double> phi;     // uniform on [0, 2pi], both ends included
    std::vector<Field> samples;  // Omega-vector at each phi

    Field at(double phi) const;
};

DrivePath drive_loop(double theta, double lambda1, double lambda2, double omega_drive, int n = 1024);

/// Convenience mapping from the lattice momentum, taken literally as (2 cos kx - lambda) / 2.
double lambda1_from_kx(double kx, double lambda);

/// Signed solid angle of the normalised path, measured from +z (spherical
/// triangles with apex +z). Throws NumericalError near the origin.
double solid_angle(const DrivePath& path);

struct PulseTimings {
    double t_pre = 0.3;   // us, linear ramp in and out
    double t_ramp = 0.4;  // us, one loop traversal
    double dt = 1e-4;     // us

    void validate() const;
};

/// exp(-i dt Omega.sigma / 2).
Matrix2 step_unitary(const Field& omega, double dt);

/// Lower eigenvector of Omega.sigma in the gauge (-e^{-i phi} sin(t/2), cos(t/2)); smooth except at -z.
Spinor lower_state(const Field& omega);

struct TrajectoryPoint {
    double t = 0;
    Spinor psi{};
    double fidelity = 0;  // |<lower(Omega(t))|psi(t)>|^2
};

using Waveform = std::function<Field(double)>;

/// Midpoint-rule propagation of psi0 over [0, duration] with the field given as
/// a function of time. Records the state after every step.
std::vector<TrajectoryPoint> propagate(const Waveform& field, double duration, const Spinor& psi0, double dt);

/// Same with a sampled waveform; samples[i] is the field at the middle of step i.
std::vector<TrajectoryPoint> propagate(const std::vector<Field>& samples, const Spinor& psi0, double dt);

struct ProtocolResult {
    std::array<double, 3> bloch{};  // <sx>, <sy>, <sz>
    double phi_total = 0;
    double gamma_tracked = 0;
    double min_adiabatic_fidelity = 1;  // over the loop traversals
    double min_ramp_fidelity = 1;
    double norm_drift = 0;
    std::array<double, 2> loop_phases{};  // geometric part of each traversal, in run order
    bool adiabatic_warning = false;
};

/// pi_y/2, ramp-in, C+, ramp-out, pi_x, ramp-in, C-, ramp-out, tomography.
/// With minus_first the two traversals swap order.
ProtocolResult ramsey_echo_protocol(const DrivePath& path, const PulseTimings& timings, bool minus_first = false);

}  // namespace hopflab
