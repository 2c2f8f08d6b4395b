#include "kickrot/quantum3d.hpp"
#include "kickrot/parallel.hpp"
#include "kickrot/quadrature.hpp"
#include "kickrot/specfun.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace kr {

namespace {

cd ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

void require_tail(const LegendrePacket3D& p, const char* what) {
    double n = p.norm();
    if (std::abs(n - 1.0) > 1e-10) {
        std::ostringstream s;
        s << what << ": truncated norm deviates from 1 by " << (n - 1.0);
        throw TruncationError(s.str());
    }
}

// Integral of sin(theta) cos(k theta) over [0, pi].
double sin_cos_moment(int k) {
    if (k == 1) return 0.0;
    return (k % 2 == 0) ? 2.0 / (1.0 - static_cast<double>(k) * k) : 0.0;
}

}  // namespace

double LegendrePacket3D::norm() const {
    double s = 0.0;
    for (const cd& z : coeffs) s += std::norm(z);
    return s;
}

cd LegendrePacket3D::psi(double theta) const {
    const double x = std::cos(theta);
    double p0 = 1.0, p1 = x;
    cd s = 0.0;
    for (int l = 0; l <= l_max; ++l) {
        double pl;
        if (l == 0) {
            pl = p0;
        } else if (l == 1) {
            pl = p1;
        } else {
            pl = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = pl;
        }
        s += coeffs[static_cast<std::size_t>(l)] * (std::sqrt((2.0 * l + 1.0) / (4 * pi)) * pl);
    }
    return s;
}

RecurrenceTable::RecurrenceTable(int L_max) : L_max_(L_max) {
    if (L_max < 2 || L_max % 2) throw DomainError("build_recurrence: L_max must be even and >= 2");
    // Rows l = 0..L_max need L up to 2 l; store the full width.
    const int W = 2 * L_max + 1;
    auto N = [](int L, int Lp) -> double {
        if (Lp == L) {
            double t = static_cast<double>(L + 1) * (L + 1) / (2.0 * L + 3.0);
            if (L > 0) t += static_cast<double>(L) * L / (2.0 * L - 1.0);
            return 2.0 / ((2.0 * L + 1) * (2.0 * L + 1)) * t;
        }
        if (Lp == L + 2) return 2.0 * (L + 1) * (L + 2) / ((2.0 * L + 1) * (2.0 * L + 3) * (2.0 * L + 5));
        if (Lp == L - 2 && L >= 2) return 2.0 * L * (L - 1) / ((2.0 * L - 3) * (2.0 * L - 1) * (2.0 * L + 1));
        return 0.0;
    };
    std::vector<double> rows(static_cast<std::size_t>(L_max + 1) * W, 0.0);
    auto at = [&](int L, int l) -> double& { return rows[static_cast<std::size_t>(l) * W + L]; };
    at(0, 0) = 1.0;
    for (int l = 0; l < L_max; ++l) {
        for (int L = 0; L < W; L += 2) {
            double s = 0.0;
            for (int Lp = std::max(0, L - 2); Lp <= std::min(W - 1, L + 2); Lp += 2) s += at(Lp, l) * N(L, Lp);
            double v = (2.0 * l + 1) * (2.0 * L + 1) / (l + 1.0) * s - (2.0 * l + 1) / (l + 1.0) * at(L, l);
            if (l > 0) v -= static_cast<double>(l) / (l + 1.0) * at(L, l - 1);
            at(L, l + 1) = v;
        }
    }
    d_.swap(rows);
    L_max_ = L_max;
    width_ = W;
}

RecurrenceTable build_recurrence(int L_max) { return RecurrenceTable(L_max); }

std::shared_ptr<const RecurrenceTable> cached_recurrence(int L_max) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const RecurrenceTable>> cache;
    if (L_max % 2) ++L_max;
    L_max = std::max(L_max, 2);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.lower_bound(L_max);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const RecurrenceTable>(L_max);
    cache[L_max] = t;
    return t;
}

LegendrePacket3D ground_packet_3d(int l_max) {
    if (l_max < 0) throw DomainError("ground_packet_3d: l_max must be >= 0");
    LegendrePacket3D p;
    p.l_max = l_max;
    p.coeffs.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    p.coeffs[0] = 1.0;
    return p;
}

LegendrePacket3D dipole_kick_ground(double P, int l_max) {
    if (!(P >= 0.0) || !std::isfinite(P)) throw DomainError("dipole_kick_ground: P must be finite and >= 0");
    if (P == 0.0) return ground_packet_3d(std::max(l_max, 0));
    l_max = std::max(l_max, kick_truncation(P));
    const auto j = spherical_j_sequence(l_max, P);
    LegendrePacket3D p;
    p.l_max = l_max;
    p.coeffs.resize(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) p.coeffs[l] = ipow(l) * std::sqrt(2.0 * l + 1.0) * j[l];
    require_tail(p, "dipole_kick_ground");
    return p;
}

LegendrePacket3D polarization_kick_ground(double P, int l_max) {
    if (!(P >= 0.0) || !std::isfinite(P)) throw DomainError("polarization_kick_ground: P must be finite and >= 0");
    if (P == 0.0) return ground_packet_3d(std::max(l_max, 0));
    int lj = kick_truncation(0.5 * P);
    lj += lj % 2;
    l_max = std::max(l_max, 2 * lj);
    const auto table = cached_recurrence(lj);
    const auto j = spherical_j_sequence(lj, 0.5 * P);
    const cd global = std::exp(I * (0.5 * P));
    LegendrePacket3D p;
    p.l_max = l_max;
    p.coeffs.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    for (int L = 0; L <= 2 * lj; L += 2) {
        cd s = 0.0;
        for (int l = L / 2; l <= lj; ++l) s += ipow(l) * (2.0 * l + 1.0) * j[l] * table->d(L, l);
        p.coeffs[L] = global * s / std::sqrt(2.0 * L + 1.0);
    }
    require_tail(p, "polarization_kick_ground");
    return p;
}

LegendrePacket3D free_evolve_3d(const LegendrePacket3D& packet, double dtau) {
    if (!std::isfinite(dtau)) throw DomainError("free_evolve_3d: dtau must be finite");
    LegendrePacket3D out = packet;
    for (int l = 0; l <= packet.l_max; ++l) {
        long double ph = std::fmod(0.5L * l * (l + 1) * static_cast<long double>(dtau),
                                   2.0L * std::numbers::pi_v<long double>);
        out.coeffs[l] *= std::polar(1.0, -static_cast<double>(ph));
    }
    out.time += dtau;
    return out;
}

DensityProfile density_3d(const LegendrePacket3D& packet, std::span<const double> grid, bool check_norm) {
    DensityProfile out;
    out.geometry = Geometry::sphere3D;
    out.theta.assign(grid.begin(), grid.end());
    out.value.resize(grid.size());
    out.weighted.resize(grid.size());
    for (double t : grid) {
        if (!(t >= 0.0 && t <= pi)) throw DomainError("density_3d: theta must lie in [0, pi]");
    }
    const std::size_t N = grid.empty() ? 0 : grid.size() - 1;
    if (check_norm) {
        if (N < static_cast<std::size_t>(4 * std::max(packet.l_max, 1))) {
            throw ResolutionError("density_3d: normalization check needs at least 4*l_max+1 uniform points");
        }
        for (std::size_t k = 0; k <= N; ++k) {
            if (std::abs(grid[k] - pi * k / N) > 1e-12) {
                throw ResolutionError("density_3d: normalization check needs the uniform grid k*pi/N");
            }
        }
    }
    parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out.value[i] = std::norm(packet.psi(grid[i]));
            out.weighted[i] = 2 * pi * std::sin(grid[i]) * out.value[i];
        }
    });
    if (check_norm) {
        // |psi|^2 is a cosine polynomial in theta; integrate its DCT against sin(theta) exactly.
        std::vector<double> terms(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            if (k % 2) {
                terms[k] = 0.0;
                continue;
            }
            double a = 0.0;
            for (std::size_t j = 0; j <= N; ++j) {
                double w = (j == 0 || j == N) ? 0.5 : 1.0;
                a += w * out.value[j] * std::cos(pi * static_cast<double>(k * j % (2 * N)) / N);
            }
            a *= 2.0 / N;
            if (k == 0 || k == N) a *= 0.5;
            terms[k] = a * sin_cos_moment(static_cast<int>(k));
        }
        out.norm = 2 * pi * pairwise_sum(terms);
    }
    return out;
}

cd projection_coefficient(double P, Coupling coupling, int l) {
    if (l < 0) throw DomainError("projection_coefficient: l must be >= 0");
    QuadOptions o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-13;
    o.initial_panels = static_cast<std::size_t>(16 + 2 * P + l);
    auto f = [&](double x) {
        double ph = coupling == Coupling::dipole ? P * x : P * x * x;
        return std::exp(I * ph) * legendre_p(l, x);
    };
    return 0.5 * std::sqrt(2.0 * l + 1.0) * integrate(f, -1.0, 1.0, o).value;
}

}  // namespace kr
