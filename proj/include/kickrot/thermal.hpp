#pragma once

#include "kickrot/common.hpp"

#include <cstdint>
#include <vector>

namespace kr {

// Dimensionless momenta are measured in units of the thermal momentum.
struct ThermalParticle {
    double theta = 0.0;
    double phi = 0.0;
    double p_theta = 0.0;
    double p_phi = 0.0;
};

struct ThermalEnsemble {
    std::vector<ThermalParticle> particles;
    double kick_strength = 0.0;  // P'
    std::uint64_t seed = 0;
};

// Isotropic canonical ensemble.  momentum_scale multiplies the sampled momenta;
// 0 gives the zero-temperature ensemble (use P' = 1 and read times as P' t').
ThermalEnsemble sample_ensemble(std::size_t n, std::uint64_t seed, double kick_strength = 0.0,
                                double momentum_scale = 1.0);

// p_theta -= P' sin(theta) (dipole) or P' sin(2 theta) (polarization).
ThermalEnsemble kick(const ThermalEnsemble& ensemble, Coupling coupling = Coupling::dipole);

// Free flight on great circles for dt' >= 0.
ThermalEnsemble evolve(const ThermalEnsemble& ensemble, double dt_prime);
ThermalParticle evolve_particle(const ThermalParticle& p, double dt_prime);
double cos_theta_after(const ThermalParticle& p, double dt_prime);

// Kinetic energy (p_theta^2 + p_phi^2 / sin^2 theta) / 2.
double particle_energy(const ThermalParticle& p);

// Density in theta with sum(density * dtheta) = 1 (no 1/sin(theta) factor).
DensityProfile angular_histogram(const ThermalEnsemble& ensemble, int bins);

struct OrientationAlignment {
    double O = 0.0;  // <1 - cos theta>
    double A = 0.0;  // <1 - cos^2 theta>
};

OrientationAlignment orientation_alignment(const ThermalEnsemble& ensemble);

// <1 - cos theta> (dipole) or <1 - cos^2 theta> (polarization) after free flight dt'.
double spread_after(const ThermalEnsemble& ensemble, Coupling coupling, double dt_prime);

struct SpreadMinimum {
    double dt_prime = 0.0;
    double value = 0.0;
};

// First local minimum of the spread measure in free flight.  The scan advances in
// steps of scan_step / P' and the bracket is refined by golden section to tol / P'.
SpreadMinimum first_spread_minimum(const ThermalEnsemble& ensemble, Coupling coupling, double scan_step = 0.01,
                                   double tol = 1e-6, double max_scaled_time = 50.0);

}  // namespace kr
