#include "kickrot/squeeze.hpp"
#include "kickrot/thermal.hpp"

#include <cmath>
#include <limits>

namespace kr {

std::pair<MomentState, double> kick_cycle(const MomentState& s, double P) {
    if (!(s.u > 0.0) || !(s.w > 0.0)) throw DomainError("kick_cycle: u and w must be > 0");
    if (!(P > 0.0)) throw DomainError("kick_cycle: P must be > 0");
    if (!s.mixed_zero) throw DomainError("kick_cycle: kick must be applied at zero mixed moment");
    const double dtau = s.u / (s.u + s.w);
    MomentState n;
    n.u = s.u - s.u * s.u / (s.u + s.w);
    n.w = s.w + s.u;
    return {n, dtau};
}

SqueezeTrace run_accumulative(double u0, double w0, int kicks, double P) {
    if (kicks < 1) throw DomainError("run_accumulative: kicks must be >= 1");
    SqueezeTrace t;
    t.P = P;
    MomentState s{u0, w0, true};
    t.records.reserve(static_cast<std::size_t>(kicks));
    for (int k = 1; k <= kicks; ++k) {
        auto [n, dtau] = kick_cycle(s, P);
        if (!(n.u < s.u) || !(n.w > s.w)) {
            throw ConvergenceError("run_accumulative: moments stopped changing in double precision");
        }
        t.records.push_back({k, n.u, n.w, dtau, 0.0});
        s = n;
    }
    return t;
}

double ode_invariant(double u, double w) {
    if (!(u > 0.0) || !(w > 0.0)) throw DomainError("ode_invariant: u and w must be > 0");
    return u * u + 2.0 * w * u;
}

std::vector<OdePoint> ode_integrate(double u0, double w0, double k_end, double h, int record_every) {
    if (!(h > 0.0) || !(k_end >= 0.0) || record_every < 1) throw DomainError("ode_integrate: bad step or range");
    auto rhs = [](double u, double w, double& du, double& dw) {
        du = -u * u / (w + u);
        dw = u;
    };
    std::vector<OdePoint> out{{0.0, u0, w0}};
    double u = u0, w = w0;
    const long steps = std::lround(k_end / h);
    for (long i = 1; i <= steps; ++i) {
        double a1, b1, a2, b2, a3, b3, a4, b4;
        rhs(u, w, a1, b1);
        rhs(u + 0.5 * h * a1, w + 0.5 * h * b1, a2, b2);
        rhs(u + 0.5 * h * a2, w + 0.5 * h * b2, a3, b3);
        rhs(u + h * a3, w + h * b3, a4, b4);
        u += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        w += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        if (i % record_every == 0 || i == steps) out.push_back({static_cast<double>(i) * h, u, w});
    }
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more paired points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SqueezeTrace classical_accumulative_3d(std::size_t n_particles, double P_prime, int kicks, std::uint64_t seed,
                                       Coupling coupling) {
    if (kicks < 1) throw DomainError("classical_accumulative_3d: kicks must be >= 1");
    if (!(P_prime > 0.0)) throw DomainError("classical_accumulative_3d: P' must be > 0");
    const bool cold = std::isinf(P_prime);
    ThermalEnsemble e = sample_ensemble(n_particles, seed, cold ? 1.0 : P_prime, cold ? 0.0 : 1.0);
    SqueezeTrace t;
    t.P = P_prime;
    t.coupling = coupling;
    for (int k = 1; k <= kicks; ++k) {
        e = kick(e, coupling);
        const SpreadMinimum m = first_spread_minimum(e, coupling);
        e = evolve(e, m.dt_prime);
        SqueezeRecord r;
        r.k = k;
        r.dtau = m.dt_prime * e.kick_strength;
        r.spread = m.value;
        r.u = std::numeric_limits<double>::quiet_NaN();
        r.w = std::numeric_limits<double>::quiet_NaN();
        t.records.push_back(r);
    }
    return t;
}

}  // namespace kr
