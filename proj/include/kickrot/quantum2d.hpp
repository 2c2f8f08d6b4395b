#pragma once

#include "kickrot/common.hpp"

#include <span>
#include <vector>

namespace kr {

// Planar rotor state  Psi(theta) = sum_n c_n e^{i n theta} / sqrt(2 pi).
class FourierPacket2D {
public:
    FourierPacket2D() = default;
    FourierPacket2D(int n_max, std::vector<cd> coeffs, double time);

    int n_max() const { return n_max_; }
    double time() const { return time_; }
    // Coefficient c_n, zero outside [-n_max, n_max].
    cd c(int n) const;
    const std::vector<cd>& coeffs() const { return coeffs_; }
    double norm() const;
    cd psi(double theta) const;

private:
    int n_max_ = 0;
    std::vector<cd> coeffs_;  // index n + n_max
    double time_ = 0.0;
};

struct KickSpec {
    double strength = 0.0;
    Coupling coupling = Coupling::dipole;
};

FourierPacket2D ground_packet(int n_max);
FourierPacket2D apply_kick(const FourierPacket2D& packet, const KickSpec& kick);
FourierPacket2D free_evolve(const FourierPacket2D& packet, double dtau);

// |Psi|^2 on arbitrary theta in [0, 2 pi).  With check_norm the grid must be the
// uniform grid k*2pi/N, N >= 4 n_max, and the trapezoidal norm is stored.
DensityProfile density(const FourierPacket2D& packet, std::span<const double> grid, bool check_norm = false);

// Uniform grid k*2pi/N convenient for normalization checks.
std::vector<double> uniform_circle_grid(int n);

}  // namespace kr
