#include "kickrot/quantum2d.hpp"
#include "kickrot/parallel.hpp"
#include "kickrot/specfun.hpp"

#include <cmath>
#include <sstream>

namespace kr {

namespace {

// i^k for any integer k.
cd ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

void check_kept_norm(double before, double after, const char* what) {
    if (std::abs(before - after) > 1e-10 * std::max(before, 1.0)) {
        std::ostringstream s;
        s << what << ": truncation lost " << (before - after) << " of the norm";
        throw TruncationError(s.str());
    }
}

}  // namespace

FourierPacket2D::FourierPacket2D(int n_max, std::vector<cd> coeffs, double time)
    : n_max_(n_max), coeffs_(std::move(coeffs)), time_(time) {
    if (n_max < 0 || coeffs_.size() != static_cast<std::size_t>(2 * n_max + 1)) {
        throw DomainError("FourierPacket2D: coefficient count must be 2*n_max+1");
    }
}

cd FourierPacket2D::c(int n) const {
    if (n < -n_max_ || n > n_max_) return 0.0;
    return coeffs_[static_cast<std::size_t>(n + n_max_)];
}

double FourierPacket2D::norm() const {
    double s = 0.0;
    for (const cd& z : coeffs_) s += std::norm(z);
    return s;
}

cd FourierPacket2D::psi(double theta) const {
    // e^{i n theta} by repeated rotation from n = -n_max.
    const cd step = std::polar(1.0, theta);
    cd e = std::polar(1.0, -n_max_ * theta);
    cd s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        s += coeffs_[k] * e;
        e *= step;
        if (k % 64 == 63) e = std::polar(1.0, (static_cast<double>(k) + 1 - n_max_) * theta);
    }
    return s / std::sqrt(2 * pi);
}

FourierPacket2D ground_packet(int n_max) {
    if (n_max < 0) throw DomainError("ground_packet: n_max must be >= 0");
    std::vector<cd> c(static_cast<std::size_t>(2 * n_max + 1), 0.0);
    c[static_cast<std::size_t>(n_max)] = 1.0;
    return {n_max, std::move(c), 0.0};
}

FourierPacket2D apply_kick(const FourierPacket2D& packet, const KickSpec& kick) {
    const double P = kick.strength;
    if (!(P >= 0.0) || !std::isfinite(P)) throw DomainError("apply_kick: strength must be finite and >= 0");
    if (P == 0.0) return packet;
    const int old = packet.n_max();
    const int grow = kick_truncation(P);
    const int nn = old + grow;
    std::vector<cd> out(static_cast<std::size_t>(2 * nn + 1), 0.0);
    if (kick.coupling == Coupling::dipole) {
        // c'_n = sum_m i^{n-m} J_{n-m}(P) c_m
        const auto J = bessel_j_sequence(nn + old, P);
        auto jk = [&](int k) { return (k >= 0) ? J[k] : ((k % 2) ? -J[-k] : J[-k]); };
        parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t idx = b; idx < e; ++idx) {
                int n = static_cast<int>(idx) - nn;
                cd s = 0.0;
                for (int m = -old; m <= old; ++m) {
                    cd cm = packet.c(m);
                    if (cm == 0.0) continue;
                    s += ipow(n - m) * jk(n - m) * cm;
                }
                out[idx] = s;
            }
        });
    } else {
        // exp(i P cos^2) = e^{iP/2} sum_k i^k J_k(P/2) e^{2ik theta}
        const int kmax = (nn + old) / 2 + 1;
        const auto J = bessel_j_sequence(kmax, 0.5 * P);
        auto jk = [&](int k) { return (k >= 0) ? J[k] : ((k % 2) ? -J[-k] : J[-k]); };
        const cd global = std::exp(I * (0.5 * P));
        parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t idx = b; idx < e; ++idx) {
                int n = static_cast<int>(idx) - nn;
                cd s = 0.0;
                for (int m = -old; m <= old; ++m) {
                    if ((n - m) % 2 != 0) continue;
                    cd cm = packet.c(m);
                    if (cm == 0.0) continue;
                    int k = (n - m) / 2;
                    s += ipow(k) * jk(k) * cm;
                }
                out[idx] = global * s;
            }
        });
    }
    FourierPacket2D res(nn, std::move(out), packet.time());
    check_kept_norm(packet.norm(), res.norm(), "apply_kick");
    return res;
}

FourierPacket2D free_evolve(const FourierPacket2D& packet, double dtau) {
    if (!std::isfinite(dtau)) throw DomainError("free_evolve: dtau must be finite");
    const int nm = packet.n_max();
    std::vector<cd> out(packet.coeffs());
    for (int n = -nm; n <= nm; ++n) {
        // n^2 dtau / 2 reduced mod 2 pi in long double to keep long runs accurate.
        long double ph = std::fmod(0.5L * n * n * static_cast<long double>(dtau), 2.0L * std::numbers::pi_v<long double>);
        out[static_cast<std::size_t>(n + nm)] *= std::polar(1.0, -static_cast<double>(ph));
    }
    return {nm, std::move(out), packet.time() + dtau};
}

std::vector<double> uniform_circle_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[k] = 2 * pi * k / n;
    return g;
}

DensityProfile density(const FourierPacket2D& packet, std::span<const double> grid, bool check_norm) {
    DensityProfile out;
    out.geometry = Geometry::planar2D;
    out.theta.assign(grid.begin(), grid.end());
    out.value.resize(grid.size());
    for (double t : grid) {
        if (!(t >= 0.0 && t < 2 * pi)) throw DomainError("density: theta must lie in [0, 2 pi)");
    }
    if (check_norm) {
        const std::size_t N = grid.size();
        if (N < static_cast<std::size_t>(4 * std::max(packet.n_max(), 1))) {
            throw ResolutionError("density: normalization check needs at least 4*n_max uniform points");
        }
        for (std::size_t k = 0; k < N; ++k) {
            if (std::abs(grid[k] - 2 * pi * k / N) > 1e-12) {
                throw ResolutionError("density: normalization check needs the uniform grid k*2pi/N");
            }
        }
    }
    parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out.value[i] = std::norm(packet.psi(grid[i]));
    });
    if (check_norm) out.norm = pairwise_sum(out.value) * 2 * pi / grid.size();
    return out;
}

}  // namespace kr
