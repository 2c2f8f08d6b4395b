#include "kickrot/thermal.hpp"
#include "kickrot/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace kr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) keyed by (seed, particle, draw).
double uniform01(std::uint64_t seed, std::uint64_t index, unsigned draw) {
    std::uint64_t key = splitmix64(seed ^ splitmix64(index * 4 + draw));
    return (static_cast<double>(key >> 11) + 0.5) * 0x1.0p-53;
}

struct Cartesian {
    double r[3];
    double v[3];
};

Cartesian to_cartesian(const ThermalParticle& p) {
    const double st = std::sin(p.theta), ct = std::cos(p.theta);
    const double sp = std::sin(p.phi), cp = std::cos(p.phi);
    const double vphi = st > 0.0 ? p.p_phi / st : 0.0;
    Cartesian c;
    c.r[0] = st * cp;
    c.r[1] = st * sp;
    c.r[2] = ct;
    c.v[0] = p.p_theta * ct * cp - vphi * sp;
    c.v[1] = p.p_theta * ct * sp + vphi * cp;
    c.v[2] = -p.p_theta * st;
    return c;
}

double angular_speed(const ThermalParticle& p) {
    const double st = std::sin(p.theta);
    const double vphi = st > 0.0 ? p.p_phi / st : 0.0;
    return std::hypot(p.p_theta, vphi);
}

template <class F>
double pairwise_mean(const ThermalEnsemble& e, F&& f) {
    std::vector<double> v(e.particles.size());
    parallel_for(v.size(), [&](std::size_t b, std::size_t en) {
        for (std::size_t i = b; i < en; ++i) v[i] = f(e.particles[i]);
    });
    return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace

ThermalEnsemble sample_ensemble(std::size_t n, std::uint64_t seed, double kick_strength, double momentum_scale) {
    if (n < 1) throw DomainError("sample_ensemble: n must be >= 1");
    if (!(momentum_scale >= 0.0) || !std::isfinite(kick_strength)) {
        throw DomainError("sample_ensemble: momentum_scale must be >= 0 and P' finite");
    }
    ThermalEnsemble e;
    e.kick_strength = kick_strength;
    e.seed = seed;
    e.particles.resize(n);
    parallel_for(n, [&](std::size_t b, std::size_t en) {
        for (std::size_t i = b; i < en; ++i) {
            ThermalParticle& p = e.particles[i];
            p.theta = std::acos(1.0 - 2.0 * uniform01(seed, i, 0));
            p.phi = 2 * pi * uniform01(seed, i, 1);
            const double rad = std::sqrt(-2.0 * std::log(uniform01(seed, i, 2)));
            const double ang = 2 * pi * uniform01(seed, i, 3);
            p.p_theta = momentum_scale * rad * std::cos(ang);
            p.p_phi = momentum_scale * rad * std::sin(ang) * std::sin(p.theta);
        }
    });
    return e;
}

ThermalEnsemble kick(const ThermalEnsemble& ensemble, Coupling coupling) {
    ThermalEnsemble out = ensemble;
    const double P = ensemble.kick_strength;
    if (P == 0.0) return out;
    parallel_for(out.particles.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto& p = out.particles[i];
            p.p_theta -= P * (coupling == Coupling::dipole ? std::sin(p.theta) : std::sin(2 * p.theta));
        }
    });
    return out;
}

double cos_theta_after(const ThermalParticle& p, double dt) {
    const double w = angular_speed(p);
    const double ct = std::cos(p.theta);
    if (w == 0.0) return ct;
    const double vz = -p.p_theta * std::sin(p.theta);
    return std::clamp(ct * std::cos(w * dt) + vz * std::sin(w * dt) / w, -1.0, 1.0);
}

ThermalParticle evolve_particle(const ThermalParticle& p, double dt) {
    const double w = angular_speed(p);
    if (w == 0.0 || dt == 0.0) return p;
    const Cartesian c = to_cartesian(p);
    const double cw = std::cos(w * dt), sw = std::sin(w * dt);
    double r[3], v[3];
    for (int k = 0; k < 3; ++k) {
        r[k] = c.r[k] * cw + c.v[k] * sw / w;
        v[k] = -c.r[k] * w * sw + c.v[k] * cw;
    }
    ThermalParticle q;
    const double rho = std::hypot(r[0], r[1]);
    q.theta = std::atan2(rho, r[2]);
    q.phi = std::atan2(r[1], r[0]);
    if (q.phi < 0) q.phi += 2 * pi;
    const double st = std::sin(q.theta), ct = std::cos(q.theta);
    const double sp = std::sin(q.phi), cp = std::cos(q.phi);
    q.p_theta = v[0] * ct * cp + v[1] * ct * sp - v[2] * st;
    q.p_phi = p.p_phi;
    return q;
}

ThermalEnsemble evolve(const ThermalEnsemble& ensemble, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw DomainError("evolve: dt' must be finite and >= 0");
    ThermalEnsemble out = ensemble;
    parallel_for(out.particles.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out.particles[i] = evolve_particle(ensemble.particles[i], dt);
    });
    return out;
}

double particle_energy(const ThermalParticle& p) {
    const double w = angular_speed(p);
    return 0.5 * w * w;
}

DensityProfile angular_histogram(const ThermalEnsemble& ensemble, int bins) {
    if (bins < 2) throw DomainError("angular_histogram: bins must be >= 2");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    std::mutex mu;
    parallel_for(ensemble.particles.size(), [&](std::size_t b, std::size_t e) {
        std::vector<std::uint64_t> local(counts.size(), 0);
        for (std::size_t i = b; i < e; ++i) {
            int k = static_cast<int>(ensemble.particles[i].theta / pi * bins);
            ++local[static_cast<std::size_t>(std::clamp(k, 0, bins - 1))];
        }
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += local[k];
    });
    DensityProfile d;
    d.geometry = Geometry::sphere3D;
    const double width = pi / bins;
    const double n = static_cast<double>(ensemble.particles.size());
    for (int k = 0; k < bins; ++k) {
        d.theta.push_back((k + 0.5) * width);
        d.value.push_back(static_cast<double>(counts[k]) / (n * width));
    }
    d.weighted = d.value;
    return d;
}

OrientationAlignment orientation_alignment(const ThermalEnsemble& e) {
    OrientationAlignment r;
    r.O = pairwise_mean(e, [](const ThermalParticle& p) { return 1.0 - std::cos(p.theta); });
    r.A = pairwise_mean(e, [](const ThermalParticle& p) {
        const double s = std::sin(p.theta);
        return s * s;
    });
    return r;
}

double spread_after(const ThermalEnsemble& e, Coupling coupling, double dt) {
    if (coupling == Coupling::dipole) {
        return pairwise_mean(e, [dt](const ThermalParticle& p) { return 1.0 - cos_theta_after(p, dt); });
    }
    return pairwise_mean(e, [dt](const ThermalParticle& p) {
        const double c = cos_theta_after(p, dt);
        return 1.0 - c * c;
    });
}

SpreadMinimum first_spread_minimum(const ThermalEnsemble& e, Coupling coupling, double scan_step, double tol,
                                   double max_scaled_time) {
    if (!(scan_step > 0.0) || !(tol > 0.0)) throw DomainError("first_spread_minimum: step and tolerance must be > 0");
    const double unit = e.kick_strength > 0.0 ? 1.0 / e.kick_strength : 1.0;
    const double h = scan_step * unit;
    auto f = [&](double t) { return spread_after(e, coupling, t); };
    double prev = f(0.0), cur = f(h);
    int k = 1;
    double lo = 0.0, hi = 0.0;
    if (cur >= prev) {
        hi = h;
    } else {
        for (;;) {
            if ((k + 1) * scan_step > max_scaled_time) {
                throw ConvergenceError("first_spread_minimum: no minimum within the scan window");
            }
            double next = f((k + 1) * h);
            if (next >= cur) {
                lo = (k - 1) * h;
                hi = (k + 1) * h;
                break;
            }
            prev = cur;
            cur = next;
            ++k;
        }
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol * unit) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    SpreadMinimum m;
    m.dt_prime = 0.5 * (a + b);
    m.value = f(m.dt_prime);
    return m;
}

}  // namespace kr
