#include "kickrot/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kr {

namespace {

constexpr double two_pi = 2 * pi;
constexpr double slope_floor = 1e-9;

void check_params(const MapParams& p) {
    if (!(p.s >= 0.0) || !std::isfinite(p.s)) throw DomainError("map parameters: s must be finite and >= 0");
}

double domain_end(const MapParams& p) { return p.geometry == Geometry::planar2D ? two_pi : pi; }

double fold_sphere(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0) r += two_pi;
    return r > pi ? two_pi - r : r;
}

// Bisection on a bracket; runs until the bracket stops shrinking in floating point.
template <class F>
double bisect(F&& g, double a, double b, double ga) {
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0) == (ga < 0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Breakpoints of the monotone pieces of the raw map on [0, end].
std::vector<double> monotone_breaks(const MapParams& p) {
    const double end = domain_end(p);
    std::vector<double> b{0.0};
    std::vector<double> crit;
    if (p.coupling == Coupling::dipole) {
        if (p.s > 1.0) {
            double a = std::acos(1.0 / p.s);
            crit = {a, two_pi - a};
        }
    } else if (p.s > 0.5) {
        double a = 0.5 * std::acos(1.0 / (2.0 * p.s));
        crit = {a, pi - a, pi + a, two_pi - a};
    }
    for (double c : crit) {
        if (c > 0.0 && c < end) b.push_back(c);
    }
    b.push_back(end);
    std::sort(b.begin(), b.end());
    return b;
}

struct RootHit {
    double root;
    double slope;
};

void roots_for_target(const MapParams& p, double target, const std::vector<double>& breaks,
                      std::vector<RootHit>& out, double sign) {
    const bool planar = p.geometry == Geometry::planar2D;
    auto g = [&](double t) { return map_raw(t, p) - target; };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double ga = g(a), gb = g(b);
        if (ga * gb > 0.0) continue;
        if (gb == 0.0 && (i + 2 < breaks.size() || planar)) continue;
        double r = ga == 0.0 ? a : (gb == 0.0 ? b : bisect(g, a, b, ga));
        out.push_back({r, sign * map_raw_derivative(r, p)});
    }
}

}  // namespace

double map_raw(double theta0, const MapParams& p) {
    return p.coupling == Coupling::dipole ? theta0 - p.s * std::sin(theta0) : theta0 - p.s * std::sin(2 * theta0);
}

double map_raw_derivative(double theta0, const MapParams& p) {
    return p.coupling == Coupling::dipole ? 1.0 - p.s * std::cos(theta0) : 1.0 - 2.0 * p.s * std::cos(2 * theta0);
}

double map_forward(double theta0, const MapParams& p) {
    check_params(p);
    const double x = map_raw(theta0, p);
    if (p.geometry == Geometry::sphere3D) return fold_sphere(x);
    double r = std::fmod(x, two_pi);
    if (r < 0) r += two_pi;
    return r >= two_pi ? 0.0 : r;
}

BranchSet invert_map(double theta, const MapParams& p) {
    check_params(p);
    const bool planar = p.geometry == Geometry::planar2D;
    if (planar ? !(theta >= 0.0 && theta < two_pi) : !(theta >= 0.0 && theta <= pi)) {
        throw DomainError("invert_map: theta outside the geometry's domain");
    }
    const auto breaks = monotone_breaks(p);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double b : breaks) {
        double v = map_raw(b, p);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<RootHit> hits;
    const int signs = planar ? 1 : 2;
    for (int si = 0; si < signs; ++si) {
        const double sg = si == 0 ? 1.0 : -1.0;
        const double t = sg * theta;
        const int k0 = static_cast<int>(std::floor((lo - t) / two_pi)) - 1;
        const int k1 = static_cast<int>(std::ceil((hi - t) / two_pi)) + 1;
        for (int k = k0; k <= k1; ++k) roots_for_target(p, t + two_pi * k, breaks, hits, sg);
    }
    std::sort(hits.begin(), hits.end(), [](const RootHit& a, const RootHit& b) { return a.root < b.root; });
    if (!planar) {
        // A pole root reached from both azimuthal branches is one trajectory.
        std::vector<RootHit> kept;
        for (const auto& h : hits) {
            bool pole = h.root < 1e-13 || h.root > pi - 1e-13;
            if (pole && !kept.empty() && std::abs(kept.back().root - h.root) < 1e-13) continue;
            kept.push_back(h);
        }
        hits.swap(kept);
    }
    BranchSet out;
    for (const auto& h : hits) {
        out.roots.push_back(h.root);
        out.derivative.push_back(h.slope);
    }
    return out;
}

ClassicalDensity density_classical(double theta, const MapParams& p) {
    const auto br = invert_map(theta, p);
    constexpr double inf = std::numeric_limits<double>::infinity();
    ClassicalDensity d;
    if (p.geometry == Geometry::planar2D) {
        for (double slope : br.derivative) {
            if (std::abs(slope) < slope_floor) return {inf, true};
            d.value += 1.0 / (two_pi * std::abs(slope));
        }
        return d;
    }
    const double st = std::sin(theta);
    const bool pole_target = theta < 1e-13 || theta > pi - 1e-13;
    for (std::size_t i = 0; i < br.roots.size(); ++i) {
        const double r = br.roots[i];
        const double slope = std::abs(br.derivative[i]);
        if (slope < slope_floor) return {inf, true};
        const bool pole_root = r < 1e-13 || r > pi - 1e-13;
        if (pole_target) {
            if (!pole_root) return {inf, true};
            d.value += 1.0 / (4 * pi * slope * slope);
        } else {
            d.value += std::sin(r) / (4 * pi * slope * st);
        }
    }
    return d;
}

ClassicalDensity density_classical_weighted(double theta, const MapParams& p) {
    if (p.geometry != Geometry::sphere3D) throw DomainError("density_classical_weighted: sphere geometry only");
    const auto br = invert_map(theta, p);
    ClassicalDensity d;
    for (std::size_t i = 0; i < br.roots.size(); ++i) {
        const double slope = std::abs(br.derivative[i]);
        if (slope < slope_floor) return {std::numeric_limits<double>::infinity(), true};
        d.value += 0.5 * std::sin(br.roots[i]) / slope;
    }
    return d;
}

double rainbow_angle(double s) {
    if (!(s >= 1.0) || !std::isfinite(s)) throw DomainError("rainbow_angle: s must be >= 1");
    return -std::acos(1.0 / s) + std::sqrt(s * s - 1.0);
}

double rainbow_angle_folded(double s) { return fold_sphere(rainbow_angle(s)); }

FoldSingularity fold_singularity(double s, Geometry geometry) {
    if (!(s > 1.0)) throw DomainError("fold_singularity: s must be > 1");
    FoldSingularity f;
    f.theta0_bar = std::acos(1.0 / s);
    f.theta_r = rainbow_angle_folded(s);
    const double curvature = s * std::sin(f.theta0_bar);
    const double root = std::sqrt(2.0 / curvature);
    if (geometry == Geometry::planar2D) {
        f.coefficient = root / two_pi;
    } else {
        const double st = std::sin(f.theta_r);
        f.coefficient = st > 0.0 ? std::sin(f.theta0_bar) * root / (4 * pi * st)
                                 : std::numeric_limits<double>::infinity();
    }
    return f;
}

GloryAngles glory_angles(double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("glory_angles: s must be finite and >= 0");
    static const double s_f = [] {
        auto g = [](double x) { return rainbow_angle(x) - pi; };
        return bisect(g, 1.0, 10.0, g(1.0));
    }();
    GloryAngles out;
    out.s_f_prime = s_f;
    if (s == 1.0) {
        out.forward = 0.0;
    } else if (s > 1.0) {
        auto g = [s](double t) { return t - s * std::sin(t); };
        const double a = std::acos(1.0 / s);
        out.forward = bisect(g, a, pi, g(a));
    }
    if (s >= s_f) {
        auto g = [s](double t) { return t - s * std::sin(t) + pi; };
        const double a = std::acos(1.0 / s);
        double r1 = g(a) >= 0.0 ? a : bisect(g, 0.0, a, g(0.0));
        double r2 = g(a) >= 0.0 ? a : bisect(g, a, pi, g(a));
        out.backward = std::make_pair(r1, r2);
    }
    return out;
}

double focal_times(double P, Coupling coupling) {
    if (!(P > 0.0) || !std::isfinite(P)) throw DomainError("focal_times: P must be > 0");
    return coupling == Coupling::dipole ? 1.0 / P : 1.0 / (2.0 * P);
}

}  // namespace kr
