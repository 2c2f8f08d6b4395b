#pragma once

#include "kickrot/common.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kr {

// u = <x^2>, w = <p^2>/P at a moment of extreme squeezing.
struct MomentState {
    double u = 1.0;
    double w = 1.0;
    bool mixed_zero = true;
};

struct SqueezeRecord {
    int k = 0;
    double u = 0.0;
    double w = 0.0;
    double dtau = 0.0;    // scaled delay to the next minimum
    double spread = 0.0;  // O_k or A_k for the Monte Carlo driver
};

struct SqueezeTrace {
    double P = 1.0;
    Coupling coupling = Coupling::dipole;
    std::vector<SqueezeRecord> records;
};

// One kick at zero mixed moment followed by free flight to the next minimum.
std::pair<MomentState, double> kick_cycle(const MomentState& state, double P = 1.0);

// records[k-1] holds (u_k, w_k) after k cycles and the delay that produced them.
SqueezeTrace run_accumulative(double u0, double w0, int kicks, double P = 1.0);

double ode_invariant(double u, double w);

struct OdePoint {
    double k = 0.0;
    double u = 0.0;
    double w = 0.0;
};

// Classical RK4 for du/dk = -u^2/(w+u), dw/dk = u.
std::vector<OdePoint> ode_integrate(double u0, double w0, double k_end, double h = 1e-3, int record_every = 1000);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Kicks a thermal ensemble at successive minima of O (dipole) or A (polarization).
// P_prime = infinity selects the zero-temperature ensemble.
SqueezeTrace classical_accumulative_3d(std::size_t n_particles, double P_prime, int kicks, std::uint64_t seed,
                                       Coupling coupling);

}  // namespace kr
