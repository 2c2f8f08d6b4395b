#pragma once

#include "kickrot/common.hpp"

#include <optional>

namespace kr {

// An approximate amplitude together with where it sits relative to its regime.
struct Approx {
    cd value;
    Validity validity = Validity::in;
};

struct PlanarOptions {
    // Outer radius of the initial disk; 2 reproduces a disk of area 4 pi.
    double radius = 2.0;
    // Replace the hard edge by a smooth cutoff placed beyond every stationary point.
    bool unbounded = false;
    double abs_tol = 1e-10;
};

// Planar model amplitude
//   psi = e^{i(P + theta^2/2tau)} / (i tau sqrt(4 pi)) * int_0^L t J0(theta t/tau) e^{i F(t)} dt,
//   F(t) = P t^4/24 + (1/tau - P) t^2 / 2.
cd planar_psi(double theta, double tau, double P, const PlanarOptions& opt = {});

// |psi(0, 1/P)|^2 of the planar model from 1F1(1/2; 3/2; i P L^4/24).
double planar_focus_density(double P, double L = 2.0);
// Large-P expansion of the same value including the edge correction.
double planar_focus_density_asymptotic(double P, double L = 2.0);

// 2D cusp: one image (psi tilde) and the sum over theta and 2 pi - theta.
cd pearcey_focus_2d_single(double theta, double tau, double P);
Approx pearcey_focus_2d(double theta, double tau, double P);
// The P tau = 1 image summed as a single series in beta.
cd pearcey_focus_2d_single_sum(double theta, double P);

// 3D cusp via the azimuthally reduced double series; |psi(0, 1/P)|^2 = 3P/8.
Approx pearcey_cusp_3d(double theta, double tau, double P);
// Same amplitude from quadrature over the azimuth of the half-line Pearcey derivative.
cd pearcey_cusp_3d_azimuthal(double theta, double tau, double P);

// 2D rainbow from the two Airy images at theta_r and 2 pi - theta_r.
Approx airy_rainbow_2d(double theta, double tau, double P);
// One Airy image, lit for theta < theta_r.
cd airy_rainbow_2d_single(double theta, double tau, double P);

struct UniformAiryTerms {
    double A = 0.0;
    double xi = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double theta02 = 0.0;
    double theta03 = 0.0;
    bool limit_form = false;  // theta >= theta_r uses the pure Airy limit
};

UniformAiryTerms uniform_airy_terms(double theta, double tau, double P);
Approx uniform_airy_3d(double theta, double tau, double P);
// Stationary-phase reduction over the azimuth followed by direct quadrature in theta0.
cd uniform_airy_branch_oracle(double theta, double tau, double P);

struct UniformBesselTerms {
    double a = 0.0;
    double b = 0.0;
    double p_plus = 0.0;
    double p_minus = 0.0;
    double theta01 = 0.0;
    double theta02 = 0.0;
};

UniformBesselTerms uniform_bessel_terms(double theta, double tau, double P);
Approx uniform_bessel_glory(double theta, double tau, double P);
Approx ford_wheeler_glory(double theta, double tau, double P);

// Glory angle of the quartic phase, sqrt(6 (P tau - 1) / (P tau)).
double quartic_glory_angle(double s);
// Largest theta reached by the phi0 = pi branch of the quartic phase.
double quartic_rainbow_angle(double s);

struct StationaryPointSet3D {
    std::optional<double> theta01;  // phi0 = 0
    std::optional<double> theta02;  // phi0 = pi, outer
    std::optional<double> theta03;  // phi0 = pi, inner
    std::optional<double> phase01;
    std::optional<double> phase02;
    std::optional<double> phase03;
};

// Real roots of P t^3/6 + (1/tau - P) t -/+ theta/tau = 0 with t >= 0.
StationaryPointSet3D stationary_points_3d(double theta, double tau, double P);

// Exact 2D amplitude from the free propagator on the line applied to e^{i P cos u}.
cd propagator_psi_2d(double theta, double tau, double P);

}  // namespace kr
