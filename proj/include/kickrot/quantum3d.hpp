#pragma once

#include "kickrot/common.hpp"

#include <memory>
#include <span>
#include <vector>

namespace kr {

// Axially symmetric rotor state  psi(theta) = sum_l c_l Y_l^0(theta).
struct LegendrePacket3D {
    int l_max = 0;
    std::vector<cd> coeffs;  // index l
    double time = 0.0;

    double norm() const;
    cd psi(double theta) const;
};

// Expansion P_l(cos 2 theta) = sum_L d_{L,l} P_L(cos theta).
class RecurrenceTable {
public:
    explicit RecurrenceTable(int L_max);
    int L_max() const { return L_max_; }
    // d_{L,l} for 0 <= l <= L_max and 0 <= L <= 2 L_max.  Entries with L > 2l vanish.
    double d(int L, int l) const { return d_[static_cast<std::size_t>(l) * width_ + L]; }

private:
    int L_max_;
    int width_ = 0;
    std::vector<double> d_;
};

RecurrenceTable build_recurrence(int L_max);
// Shared immutable table for at least the requested size.
std::shared_ptr<const RecurrenceTable> cached_recurrence(int L_max);

LegendrePacket3D ground_packet_3d(int l_max);
LegendrePacket3D dipole_kick_ground(double P, int l_max);
LegendrePacket3D polarization_kick_ground(double P, int l_max);
LegendrePacket3D free_evolve_3d(const LegendrePacket3D& packet, double dtau);

// |psi|^2 and 2 pi sin(theta) |psi|^2 on theta in [0, pi].  With check_norm the grid
// must be uniform on [0, pi] with at least 4 l_max + 1 points; the weighted density
// is then integrated exactly for cosine polynomials into DensityProfile::norm.
DensityProfile density_3d(const LegendrePacket3D& packet, std::span<const double> grid, bool check_norm = false);

// Coefficient of Y_l^0 in exp(i P f(cos theta)) / sqrt(4 pi) by direct quadrature;
// f = x for the dipole coupling and x^2 for the polarization coupling.
cd projection_coefficient(double P, Coupling coupling, int l);

}  // namespace kr
