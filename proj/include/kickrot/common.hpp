#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kr {

using cd = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

// Input outside an operation's stated domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A series, quadrature or root search failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Basis truncation lost more probability than allowed.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid too coarse for a requested normalization check.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Coupling { dipole, polarization };
enum class Geometry { planar2D, sphere3D };

// Where an asymptotic formula sits relative to its trusted regime.
enum class Validity { in, near, outside };

std::string to_string(Coupling c);
std::string to_string(Geometry g);
std::string to_string(Validity v);

struct DensityProfile {
    Geometry geometry = Geometry::planar2D;
    std::vector<double> theta;
    std::vector<double> value;
    // Solid-angle weighted density 2*pi*sin(theta)*|psi|^2, filled for the sphere.
    std::vector<double> weighted;
    // Trapezoidal norm, set when a normalization check was requested.
    double norm = -1.0;
};

// Truncation order used after a kick of strength P.
int kick_truncation(double P);

std::vector<double> linspace(double a, double b, int n);

}  // namespace kr
