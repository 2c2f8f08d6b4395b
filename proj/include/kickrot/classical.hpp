#pragma once

#include "kickrot/common.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace kr {

struct MapParams {
    double s = 0.0;  // P * tau
    Coupling coupling = Coupling::dipole;
    Geometry geometry = Geometry::planar2D;
};

// Every initial angle theta0 that lands on a given theta, with the folded map slope there.
struct BranchSet {
    std::vector<double> roots;
    std::vector<double> derivative;
};

// Unfolded map theta0 - s sin(theta0) or theta0 - s sin(2 theta0).
double map_raw(double theta0, const MapParams& params);
double map_raw_derivative(double theta0, const MapParams& params);

// Planar result in [0, 2 pi); sphere result reflected into [0, pi].
double map_forward(double theta0, const MapParams& params);

// theta in [0, 2 pi) for the plane, [0, pi] for the sphere.  On the sphere, roots
// strictly inside (0, pi) that reach a pole are listed once per azimuthal branch.
BranchSet invert_map(double theta, const MapParams& params);

struct ClassicalDensity {
    double value = 0.0;  // +infinity when singular
    bool singular = false;
};

// Planar: density per radian.  Sphere: density per unit solid angle.
ClassicalDensity density_classical(double theta, const MapParams& params);

// Sphere density weighted by 2 pi sin(theta); integrates to 1 over [0, pi].
ClassicalDensity density_classical_weighted(double theta, const MapParams& params);

// theta_r = -arccos(1/s) + sqrt(s^2 - 1) as an unreduced angle (dipole coupling).
double rainbow_angle(double s);
// The same angle folded into [0, pi] (the representative for either geometry).
double rainbow_angle_folded(double s);

struct FoldSingularity {
    double theta_r = 0.0;     // folded rainbow angle
    double theta0_bar = 0.0;  // coalescing initial angle, cos = 1/s
    // density ~ coefficient * |theta - theta_r|^(-1/2) on the lit side
    double coefficient = 0.0;
};

FoldSingularity fold_singularity(double s, Geometry geometry);

struct GloryAngles {
    std::optional<double> forward;
    std::optional<std::pair<double, double>> backward;
    double s_f_prime = 0.0;  // strength at which the backward glory appears
};

GloryAngles glory_angles(double s);

double focal_times(double P, Coupling coupling);

}  // namespace kr
