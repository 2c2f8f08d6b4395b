#include "kickrot/semiclassical.hpp"
#include "kickrot/quadrature.hpp"
#include "kickrot/specfun.hpp"
#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kr {

namespace {

constexpr double two_pi = 2 * pi;

void check_common(double theta, double tau, double P, const char* what) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError(std::string(what) + ": tau must be > 0");
    if (!(P > 0.0) || !std::isfinite(P)) throw DomainError(std::string(what) + ": P must be > 0");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError(std::string(what) + ": theta must be >= 0");
}

template <class F>
double bisect(F&& g, double a, double b) {
    double ga = g(a);
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

// Smooth step: 0 for x <= 0, 1 for x >= 1, all derivatives continuous.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// Ai and Ai' with the leading oscillatory asymptotics below the tabulated range
// and zero far on the decaying side.
AiryValue airy_extended(double x) {
    if (x > 20.0) return {0.0, 0.0};
    if (x >= -60.0) return airy(x);
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    const double r = std::pow(z, 0.25);
    return {std::sin(zeta + pi / 4) / (std::sqrt(pi) * r), -r * std::cos(zeta + pi / 4) / std::sqrt(pi)};
}

// Quartic planar phase pieces; q(t) = -tau F'(t).
double quartic_F(double t, double tau, double P) { return P * t * t * t * t / 24.0 + 0.5 * (1.0 / tau - P) * t * t; }
double quartic_q(double t, double s) { return (s - 1.0) * t - s * t * t * t / 6.0; }

// Smallest t > lo with q(t) <= target on the decreasing part of q.
double quartic_root_descending(double target, double s, double lo) {
    double hi = std::max(lo, 1.0) * 2.0;
    while (quartic_q(hi, s) > target) hi *= 2.0;
    return bisect([&](double t) { return quartic_q(t, s) - target; }, lo, hi);
}

cd planar_prefactor(double theta, double tau, double P) {
    return std::exp(I * (P + theta * theta / (2 * tau))) / (I * tau * std::sqrt(4 * pi));
}

// Prefactor of the phi0 = pi branch after the azimuthal stationary-phase step.
cd airy_branch_prefactor(double theta, double tau) {
    return std::sqrt(two_pi * tau / theta) * std::exp(-I * (pi / 4)) / (4.0 * I * tau * std::pow(pi, 1.5));
}

struct CosineFold {
    double s, theta0_bar, theta_r, c;
};

CosineFold cosine_fold(double tau, double P) {
    const double s = P * tau;
    CosineFold f;
    f.s = s;
    f.theta0_bar = std::acos(1.0 / s);
    f.theta_r = s * std::sin(f.theta0_bar) - f.theta0_bar;
    f.c = std::cbrt(2.0 / (P * std::sin(f.theta0_bar)));
    return f;
}

Validity by_distance(double d, double in_limit, double near_limit) {
    if (d <= in_limit) return Validity::in;
    if (d <= near_limit) return Validity::near;
    return Validity::outside;
}

template <class T>
T log_abs_pow(double a, int k) {
    if (k == 0) return T(0);
    if (a == 0.0) return detail::log_zero<T>();
    return T(k) * detail::s_log(T(std::abs(a)));
}

// sum x^m/m! beta^{2n}/(4^n n!^2) Gamma((n+m+1)/2) e^{i pi (5n+3m+3)/4}
template <class T>
detail::SeriesResult cusp_series(double x, double beta) {
    using detail::s_lgamma;
    const T tol = std::is_same_v<T, detail::quad> ? T(1e-34L) : T(1e-19L);
    const T log4 = detail::s_log(T(4));
    return detail::double_series<T>(
        [&](int n, int m) {
            return log_abs_pow<T>(x, m) - s_lgamma(T(m + 1)) + log_abs_pow<T>(beta, 2 * n) - T(n) * log4 -
                   2 * s_lgamma(T(n + 1)) + s_lgamma(T(n + m + 1) / 2);
        },
        [&](int, int m) { return (x < 0 && (m % 2)) ? -1 : 1; }, [](int n, int m) { return 2 * (5 * n + 3 * m + 3); },
        beta == 0.0, x == 0.0, "pearcey_cusp_3d", tol);
}

struct CuspVars {
    double x, beta;
};

CuspVars cusp_vars(double theta, double tau, double P) {
    return {std::sqrt(6.0 / P) * (1.0 / tau - P), std::sqrt(2.0) * (theta / tau) * std::pow(6.0 / P, 0.25)};
}

}  // namespace

cd planar_psi(double theta, double tau, double P, const PlanarOptions& opt) {
    check_common(theta, tau, P, "planar_psi");
    const double s = P * tau;
    double L = opt.radius, L1 = opt.radius;
    constexpr double taper = 1.5;
    if (opt.unbounded) {
        const double start = std::max(2.5, s > 1.0 ? std::sqrt(2.0 * (s - 1.0) / s) : 0.0);
        L1 = quartic_q(start, s) <= -(theta + 2.0) ? start : quartic_root_descending(-(theta + 2.0), s, start);
        L = L1 + taper;
    } else if (!(L > 0.0)) {
        throw DomainError("planar_psi: radius must be > 0");
    }
    const bool unbounded = opt.unbounded;
    auto f = [&](double t) -> cd {
        double w = unbounded ? 1.0 - smooth_step((t - L1) / taper) : 1.0;
        if (w == 0.0) return 0.0;
        return w * t * bessel_j(0, theta * t / tau) * std::exp(I * quartic_F(t, tau, P));
    };
    QuadOptions q;
    q.abs_tol = opt.abs_tol;
    q.rel_tol = 1e-12;
    const double phase = std::abs(quartic_F(L, tau, P)) + theta * L / tau;
    q.initial_panels = static_cast<std::size_t>(std::max(16.0, 2.0 * phase / pi));
    return planar_prefactor(theta, tau, P) * integrate(f, 0.0, L, q).value;
}

double planar_focus_density(double P, double L) {
    if (!(P > 0.0) || !(L > 0.0)) throw DomainError("planar_focus_density: P and L must be > 0");
    const double L4 = L * L * L * L;
    return P * P * L4 * std::norm(hyp1f1_focus(P * L4 / 24.0)) / (16 * pi);
}

double planar_focus_density_asymptotic(double P, double L) {
    if (!(P > 0.0) || !(L > 0.0)) throw DomainError("planar_focus_density_asymptotic: P and L must be > 0");
    const double z = P * L * L * L * L / 24.0;
    return 3.0 * P / (8.0 * pi) * (pi + 1.0 / z + 2.0 * std::sqrt(pi / z) * std::cos(z - 3.0 * pi / 4));
}

cd pearcey_focus_2d_single(double theta, double tau, double P) {
    check_common(theta, tau, P, "pearcey_focus_2d");
    const double x = std::sqrt(6.0 / P) * (1.0 / tau - P);
    const double beta = std::sqrt(2.0) * (theta / tau) * std::pow(6.0 / P, 0.25);
    const cd pre = std::pow(6.0 / P, 0.25) / (pi * std::sqrt(2.0 * I * tau)) *
                   std::exp(I * (theta * theta / (2 * tau) + P));
    return pre * pearcey(x, beta);
}

Approx pearcey_focus_2d(double theta, double tau, double P) {
    if (!(theta >= 0.0 && theta < two_pi)) throw DomainError("pearcey_focus_2d: theta must lie in [0, 2 pi)");
    cd v = pearcey_focus_2d_single(theta, tau, P) + pearcey_focus_2d_single(two_pi - theta, tau, P);
    return {v, by_distance(std::abs(P * tau - 1.0), 0.15, 0.4)};
}

cd pearcey_focus_2d_single_sum(double theta, double P) {
    const double tau = 1.0 / P;
    check_common(theta, tau, P, "pearcey_focus_2d_single_sum");
    const double beta = std::sqrt(2.0) * (theta / tau) * std::pow(6.0 / P, 0.25);
    const cd pre = std::pow(6.0 / P, 0.25) / (pi * std::sqrt(2.0 * I * tau)) *
                   std::exp(I * (theta * theta / (2 * tau) + P));
    return pre * pearcey_x0_single_sum(beta);
}

Approx pearcey_cusp_3d(double theta, double tau, double P) {
    check_common(theta, tau, P, "pearcey_cusp_3d");
    if (theta > pi) throw DomainError("pearcey_cusp_3d: theta must lie in [0, pi]");
    const double s = P * tau;
    const Validity val = (s >= 1.0 && s <= 1.4) ? Validity::in
                                                : by_distance(std::min(std::abs(s - 1.0), std::abs(s - 1.4)), 0.0, 0.4);
    const auto v = cusp_vars(theta, tau, P);
    auto good = [](const detail::SeriesResult& res, long double rel) {
        return res.rounding <= rel * std::max<long double>(std::abs(res.value), 1e-3L);
    };
    const auto r = cusp_series<long double>(v.x, v.beta);
    cd sum = r.value;
    if (!good(r, 1e-13L)) {
        const auto rq = cusp_series<detail::quad>(v.x, v.beta);
        if (!good(rq, 1e-12L)) return {pearcey_cusp_3d_azimuthal(theta, tau, P), val};
        sum = rq.value;
    }
    const cd pre = -std::sqrt(6.0 / P) * std::exp(I * (P + theta * theta / (2 * tau))) / (4.0 * std::sqrt(pi) * tau);
    return {pre * sum, val};
}

cd pearcey_cusp_3d_azimuthal(double theta, double tau, double P) {
    check_common(theta, tau, P, "pearcey_cusp_3d_azimuthal");
    const auto v = cusp_vars(theta, tau, P);
    QuadOptions q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    q.initial_panels = static_cast<std::size_t>(std::max(8.0, std::abs(v.beta)));
    auto f = [&](double phi0) { return -I * pearcey_half_dy(v.x, -v.beta * std::cos(phi0)); };
    const cd avg = integrate(f, 0.0, pi, q).value / pi;
    return planar_prefactor(theta, tau, P) * std::sqrt(24.0 / P) * avg;
}

cd airy_rainbow_2d_single(double theta, double tau, double P) {
    check_common(theta, tau, P, "airy_rainbow_2d");
    if (!(P * tau > 1.0)) throw DomainError("airy_rainbow_2d: requires P tau > 1");
    const CosineFold f = cosine_fold(tau, P);
    const double eta = f.c * (theta - f.theta_r) / tau;
    const double ph = (2.0 + (theta + f.theta0_bar) * (theta + f.theta0_bar)) / (2 * tau);
    return f.c / std::sqrt(I * tau) * std::exp(I * ph) * airy_extended(eta).ai;
}

Approx airy_rainbow_2d(double theta, double tau, double P) {
    if (!(theta >= 0.0 && theta < two_pi)) throw DomainError("airy_rainbow_2d: theta must lie in [0, 2 pi)");
    cd v = airy_rainbow_2d_single(theta, tau, P) + airy_rainbow_2d_single(two_pi - theta, tau, P);
    const CosineFold f = cosine_fold(tau, P);
    const double width = tau / f.c;
    const double d = std::min(std::abs(theta - f.theta_r), std::abs(two_pi - theta - f.theta_r)) / width;
    return {v, by_distance(d, 3.0, 8.0)};
}

UniformAiryTerms uniform_airy_terms(double theta, double tau, double P) {
    check_common(theta, tau, P, "uniform_airy_3d");
    if (!(P * tau > 1.0)) throw DomainError("uniform_airy_3d: requires P tau > 1");
    if (!(theta > 0.0)) throw DomainError("uniform_airy_3d: diverges at theta = 0");
    const CosineFold f = cosine_fold(tau, P);
    auto Phi = [&](double t) { return (theta + t) * (theta + t) / (2 * tau) + P * std::cos(t); };
    UniformAiryTerms u;
    if (theta >= f.theta_r) {
        u.limit_form = true;
        u.A = Phi(f.theta0_bar);
        u.xi = f.c * (theta - f.theta_r) / tau;
        // g2 tends to a finite value at the fold, so both coefficients are carried
        // over from the lit side to keep the amplitude continuous.
        const UniformAiryTerms edge = uniform_airy_terms(f.theta_r - 1e-6, tau, P);
        u.g1 = edge.g1;
        u.g2 = edge.g2;
        u.theta02 = u.theta03 = f.theta0_bar;
        return u;
    }
    auto m = [&](double t) { return f.s * std::sin(t) - t - theta; };
    u.theta03 = bisect(m, 0.0, f.theta0_bar);
    u.theta02 = bisect(m, f.theta0_bar, pi);
    QuadOptions q;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-14;
    const double dPhi = integrate_real(m, u.theta03, u.theta02, q) / tau;
    u.A = 0.5 * (Phi(u.theta03) + Phi(u.theta02));
    u.xi = -std::pow(0.75 * dPhi, 2.0 / 3.0);
    auto amp = [&](double t) {
        const double D = 2.0 * std::abs(std::sin(0.5 * (t + f.theta0_bar)) * std::sin(0.5 * (t - f.theta0_bar)));
        return std::sqrt(t / D);
    };
    const double a2 = amp(u.theta02), a3 = amp(u.theta03);
    const double k = pi * std::sqrt(2.0 / P);
    const double r = std::pow(std::abs(u.xi), 0.25);
    u.g1 = k * r * (a2 + a3);
    u.g2 = k / r * (a2 - a3);
    return u;
}

Approx uniform_airy_3d(double theta, double tau, double P) {
    const UniformAiryTerms u = uniform_airy_terms(theta, tau, P);
    const CosineFold f = cosine_fold(tau, P);
    cd J;
    if (u.xi < -60.0) {
        // Deep in the lit region the two saddles separate; use them directly.
        auto Phi = [&](double t) { return (theta + t) * (theta + t) / (2 * tau) + P * std::cos(t); };
        auto amp = [&](double t) {
            const double D = 2.0 * std::abs(std::sin(0.5 * (t + f.theta0_bar)) * std::sin(0.5 * (t - f.theta0_bar)));
            return std::sqrt(t / D);
        };
        J = std::sqrt(two_pi / P) * (amp(u.theta02) * std::exp(I * (Phi(u.theta02) + pi / 4)) +
                                     amp(u.theta03) * std::exp(I * (Phi(u.theta03) - pi / 4)));
    } else {
        const AiryValue a = airy_extended(u.xi);
        J = std::exp(I * u.A) * (u.g1 * a.ai - I * u.g2 * a.ai_prime);
    }
    const double width = tau / f.c;
    Validity v;
    if (theta < 2.0 * width) {
        v = Validity::near;
    } else {
        v = by_distance(std::max(0.0, theta - f.theta_r) / width, 5.0, 10.0);
    }
    return {airy_branch_prefactor(theta, tau) * J, v};
}

cd uniform_airy_branch_oracle(double theta, double tau, double P) {
    check_common(theta, tau, P, "uniform_airy_branch_oracle");
    if (!(theta > 0.0)) throw DomainError("uniform_airy_branch_oracle: theta must be > 0");
    // theta0 = v^2 removes the square-root endpoint.
    auto f = [&](double v) {
        const double t = v * v;
        return 2.0 * v * v * std::exp(I * ((theta + t) * (theta + t) / (2 * tau) + P * std::cos(t)));
    };
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-11;
    const double phase = (theta + pi) * (theta + pi) / (2 * tau) + 2 * P;
    q.initial_panels = static_cast<std::size_t>(std::max(32.0, 2.0 * phase / pi));
    return airy_branch_prefactor(theta, tau) * integrate(f, 0.0, std::sqrt(pi), q).value;
}

double quartic_glory_angle(double s) {
    if (!(s >= 1.0)) throw DomainError("quartic_glory_angle: requires P tau >= 1");
    return std::sqrt(6.0 * (s - 1.0) / s);
}

double quartic_rainbow_angle(double s) {
    if (!(s > 1.0)) throw DomainError("quartic_rainbow_angle: requires P tau > 1");
    return quartic_q(std::sqrt(2.0 * (s - 1.0) / s), s);
}

StationaryPointSet3D stationary_points_3d(double theta, double tau, double P) {
    check_common(theta, tau, P, "stationary_points_3d");
    const double s = P * tau;
    StationaryPointSet3D r;
    auto phase = [&](double t, double sign) { return quartic_F(t, tau, P) - sign * theta * t / tau; };
    if (s <= 1.0) {
        const double t1 = theta == 0.0 ? 0.0 : quartic_root_descending(-theta, s, 0.0);
        r.theta01 = t1;
        r.phase01 = phase(t1, 1.0);
        return r;
    }
    const double tbar = std::sqrt(2.0 * (s - 1.0) / s);
    const double tg = quartic_glory_angle(s);
    const double t1 = theta == 0.0 ? tg : quartic_root_descending(-theta, s, tg);
    r.theta01 = t1;
    r.phase01 = phase(t1, 1.0);
    const double qmax = quartic_q(tbar, s);
    if (theta <= qmax) {
        double t2, t3;
        if (theta == 0.0) {
            t2 = tg;
            t3 = 0.0;
        } else if (theta == qmax) {
            t2 = t3 = tbar;
        } else {
            auto g = [&](double t) { return quartic_q(t, s) - theta; };
            t3 = bisect(g, 0.0, tbar);
            t2 = bisect(g, tbar, tg);
        }
        r.theta02 = t2;
        r.theta03 = t3;
        r.phase02 = phase(t2, -1.0);
        r.phase03 = phase(t3, -1.0);
    }
    return r;
}

UniformBesselTerms uniform_bessel_terms(double theta, double tau, double P) {
    check_common(theta, tau, P, "uniform_bessel_glory");
    const double s = P * tau;
    if (!(s > 1.0)) throw DomainError("uniform_bessel_glory: requires P tau > 1");
    if (theta >= quartic_rainbow_angle(s)) {
        throw DomainError("uniform_bessel_glory: theta at or beyond the rainbow angle, glory pair absent");
    }
    auto D = [&](double t) { return std::abs((1.0 - s) + 0.5 * s * t * t); };
    UniformBesselTerms u;
    if (theta == 0.0) {
        const double tg = quartic_glory_angle(s);
        u.theta01 = u.theta02 = tg;
        u.a = quartic_F(tg, tau, P);
        u.b = 0.0;
        u.p_plus = tg / std::sqrt(D(tg));
        u.p_minus = 0.0;
        return u;
    }
    const auto sp = stationary_points_3d(theta, tau, P);
    const double t1 = *sp.theta01, t2 = *sp.theta02;
    u.theta01 = t1;
    u.theta02 = t2;
    const double phi1 = *sp.phase01, phi2 = *sp.phase02;
    u.a = 0.5 * (phi2 + phi1);
    u.b = 0.5 * ((quartic_F(t2, tau, P) - quartic_F(t1, tau, P)) + theta * (t1 + t2) / tau);
    const double k = 0.5 * std::sqrt(u.b * tau / theta);
    const double r1 = std::sqrt(t1 / D(t1)), r2 = std::sqrt(t2 / D(t2));
    u.p_plus = k * (r1 + r2);
    u.p_minus = k * (r1 - r2);
    return u;
}

Approx uniform_bessel_glory(double theta, double tau, double P) {
    const UniformBesselTerms u = uniform_bessel_terms(theta, tau, P);
    const double s = P * tau;
    const cd bracket = u.p_plus * bessel_j(0, u.b) - I * u.p_minus * bessel_j(1, u.b);
    const cd v = std::exp(I * (P + theta * theta / (2 * tau))) * std::exp(I * (u.a + pi / 4)) * bracket /
                 (I * std::sqrt(2.0 * tau));
    const double tbar = std::sqrt(2.0 * (s - 1.0) / s);
    const double width = tau * std::cbrt(P * tbar / 2.0);
    const double gap = (quartic_rainbow_angle(s) - theta) / width;
    return {v, gap >= 3.0 ? Validity::in : Validity::near};
}

Approx ford_wheeler_glory(double theta, double tau, double P) {
    check_common(theta, tau, P, "ford_wheeler_glory");
    const double s = P * tau;
    if (!(s > 1.0)) throw DomainError("ford_wheeler_glory: requires P tau > 1");
    const double tg = quartic_glory_angle(s);
    const double Dg = 2.0 * (s - 1.0);
    const cd v = std::exp(I * (P + theta * theta / (2 * tau) + quartic_F(tg, tau, P) + pi / 4)) * tg *
                 bessel_j(0, tg * theta / tau) / (I * std::sqrt(2.0 * tau) * std::sqrt(Dg));
    const double first_zero = 2.404825557695773 * tau / tg;
    Validity val = Validity::outside;
    if (s - 1.0 <= 0.3 && theta <= first_zero) {
        val = Validity::in;
    } else if (s - 1.0 <= 1.0 && theta <= 2.3 * first_zero) {
        val = Validity::near;
    }
    return {v, val};
}

cd propagator_psi_2d(double theta, double tau, double P) {
    check_common(theta, tau, P, "propagator_psi_2d");
    const double inner = P * tau + 3.0, outer = P * tau + 6.0;
    auto f = [&](double u) -> cd {
        const double d = std::abs(u - theta);
        const double w = 1.0 - smooth_step((d - inner) / (outer - inner));
        if (w == 0.0) return 0.0;
        return w * std::exp(I * ((theta - u) * (theta - u) / (2 * tau) + P * std::cos(u)));
    };
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-11;
    const double phase = outer * outer / (2 * tau) + 2 * P;
    q.initial_panels = static_cast<std::size_t>(std::max(32.0, 2.0 * phase / pi));
    const cd integral = integrate(f, theta - outer, theta + outer, q).value;
    return integral / (std::sqrt(two_pi * I * tau) * std::sqrt(two_pi));
}

}  // namespace kr
