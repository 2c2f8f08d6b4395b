#include "kickrot/quadrature.hpp"
#include "kickrot/specfun.hpp"
#include "series.hpp"

#include <cmath>
#include <limits>

namespace kr {

namespace {

using detail::quad;
using detail::SeriesResult;

template <class T>
T log_pow(double a, int k) {
    if (k == 0) return T(0);
    if (a == 0.0) return detail::log_zero<T>();
    return T(k) * detail::s_log(T(std::abs(a)));
}

int sign_pow(double a, int k) { return (a < 0 && (k % 2)) ? -1 : 1; }

template <class T>
T tol() {
    return std::is_same_v<T, quad> ? T(1e-34L) : T(1e-19L);
}

template <class T>
SeriesResult full_series(double x, double beta) {
    using detail::s_lgamma;
    const T half = T(0.5L);
    return detail::double_series<T>(
        [&](int n, int m) {
            return detail::s_log(half) + log_pow<T>(x, m) - s_lgamma(T(m + 1)) + log_pow<T>(beta, 2 * n) -
                   s_lgamma(T(2 * n + 1)) + s_lgamma(T(2 * n + 2 * m + 1) / 4);
        },
        [&](int, int m) { return sign_pow(x, m); }, [](int n, int m) { return 10 * n + 6 * m + 1; },
        beta == 0.0, x == 0.0, "pearcey", tol<T>());
}

// Half-line series in (x, y); derivative selects the d/dy form.
template <class T>
SeriesResult half_series(double x, double y, bool derivative) {
    using detail::s_lgamma;
    const int shift = derivative ? 1 : 0;
    const T quarter = T(0.25L);
    return detail::double_series<T>(
        [&](int k, int m) {
            return detail::s_log(quarter) + log_pow<T>(x, m) - s_lgamma(T(m + 1)) + log_pow<T>(y, k) -
                   s_lgamma(T(k + 1)) + s_lgamma(T(k + 2 * m + 1 + shift) / 4);
        },
        [&](int k, int m) { return sign_pow(x, m) * sign_pow(y, k); },
        [&](int k, int m) { return 5 * (k + shift) + 6 * m + 1; }, y == 0.0, x == 0.0,
        derivative ? "pearcey_half_dy" : "pearcey_half", tol<T>());
}

bool accurate(const SeriesResult& r, long double rel) {
    return r.rounding <= rel * std::max<long double>(std::abs(r.value), 1e-3L);
}

// Long double first, quadruple precision when cancellation eats the margin.
template <class F>
cd precise_series(F eval) {
    SeriesResult r = eval(static_cast<long double*>(nullptr));
    if (accurate(r, 1e-13L)) return r.value;
    SeriesResult q = eval(static_cast<quad*>(nullptr));
    if (!accurate(q, 1e-12L)) throw ConvergenceError("series cancellation exceeds quadruple precision");
    return q.value;
}

const cd omega = std::exp(I * (pi / 8));

double contour_radius(double x, double y) {
    return std::max({3.0, 1.5 * std::cbrt(std::abs(y)), 1.5 * std::sqrt(std::abs(x))});
}

// Rounding in a phase of size Phi limits the segment to about eps * Phi * U absolute.
double segment_tol(double U, double x, double y) {
    double phase = std::pow(U, 4) + std::abs(x) * U * U + std::abs(y) * U;
    return std::max(1e-13, 8.0 * std::numeric_limits<double>::epsilon() * phase * U);
}

std::size_t oscillation_panels(double U, double x, double y) {
    double phase = std::pow(U, 4) + std::abs(x) * U * U + std::abs(y) * U;
    return static_cast<std::size_t>(std::max(16.0, std::ceil(phase / pi)));
}

QuadOptions contour_options(std::size_t panels, double tol = 1e-13) {
    QuadOptions o;
    o.max_panels = 200'000;
    o.abs_tol = tol;
    o.rel_tol = tol;
    o.initial_panels = panels;
    return o;
}

cd quartic(cd u, double x, double y) { return std::exp(I * (u * u * u * u + x * u * u + y * u)); }

// Along the tilted tails the imaginary part of the exponent grows at least like r^4.
constexpr double kTail = 3.2;

bool in_series_box(double x, double y) { return std::abs(x) <= 12.0 && std::abs(y) <= 12.0; }

}  // namespace

cd pearcey_series(double x, double beta) {
    beta = std::abs(beta);
    return precise_series([&](auto* tag) { return full_series<std::remove_pointer_t<decltype(tag)>>(x, beta); });
}

cd pearcey_half_series(double x, double y) {
    return precise_series(
        [&](auto* tag) { return half_series<std::remove_pointer_t<decltype(tag)>>(x, y, false); });
}

cd pearcey_half_dy_series(double x, double y) {
    return precise_series(
        [&](auto* tag) { return half_series<std::remove_pointer_t<decltype(tag)>>(x, y, true); });
}

cd pearcey_x0_single_sum(double beta) {
    beta = std::abs(beta);
    return precise_series([&](auto* tag) {
        using T = std::remove_pointer_t<decltype(tag)>;
        using detail::s_lgamma;
        return detail::double_series<T>(
            [&](int n, int) {
                return detail::s_log(T(0.5)) + log_pow<T>(beta, 2 * n) - s_lgamma(T(2 * n + 1)) +
                       s_lgamma(T(2 * n + 1) / 4);
            },
            [](int, int) { return 1; }, [](int n, int) { return 10 * n + 1; }, beta == 0.0, true,
            "pearcey_x0_single_sum", tol<T>());
    });
}

cd pearcey_contour(double x, double beta) {
    beta = std::abs(beta);
    const double U = contour_radius(x, beta);
    cd seg = integrate([&](double u) { return quartic(u, x, beta); }, -U, U,
                       contour_options(oscillation_panels(U, x, beta), segment_tol(U, x, beta)))
                 .value;
    auto tail = [&](double sgn) {
        return integrate([&](double r) { return quartic(sgn * (U + r * omega), x, beta); }, 0.0, kTail,
                         contour_options(64))
            .value;
    };
    return seg + omega * (tail(1.0) + tail(-1.0));
}

cd pearcey_half_contour(double x, double y) {
    const double U = contour_radius(x, y);
    cd seg = integrate([&](double u) { return quartic(u, x, y); }, 0.0, U,
                       contour_options(oscillation_panels(U, x, y), segment_tol(U, x, y)))
                 .value;
    cd tail = integrate([&](double r) { return quartic(U + r * omega, x, y); }, 0.0, kTail, contour_options(64))
                  .value;
    return seg + omega * tail;
}

cd pearcey_half_dy_contour(double x, double y) {
    const double U = contour_radius(x, y);
    cd seg = integrate([&](double u) { return I * u * quartic(u, x, y); }, 0.0, U,
                       contour_options(oscillation_panels(U, x, y), segment_tol(U, x, y)))
                 .value;
    cd tail = integrate(
                  [&](double r) {
                      cd u = U + r * omega;
                      return I * u * quartic(u, x, y);
                  },
                  0.0, kTail, contour_options(64))
                  .value;
    return seg + omega * tail;
}

cd pearcey_rotated_quadrature(double x, double beta) {
    auto f = [&](double r) { return quartic(r * omega, x, beta) + quartic(-r * omega, x, beta); };
    double R = 3.0 + std::sqrt(std::abs(x)) + std::cbrt(std::abs(beta));
    return omega * integrate(f, 0.0, R, contour_options(256, 1e-11)).value;
}

cd pearcey_half_dy_rotated_quadrature(double x, double y) {
    auto f = [&](double r) {
        cd u = r * omega;
        return I * u * quartic(u, x, y);
    };
    double R = 3.0 + std::sqrt(std::abs(x)) + std::cbrt(std::abs(y));
    return omega * integrate(f, 0.0, R, contour_options(256, 1e-11)).value;
}

cd pearcey(double x, double beta) {
    if (!std::isfinite(x) || !std::isfinite(beta)) throw DomainError("pearcey: non-finite argument");
    beta = std::abs(beta);
    if (in_series_box(x, beta)) {
        auto r = full_series<long double>(x, beta);
        if (accurate(r, 1e-12L)) return r.value;
    }
    return pearcey_contour(x, beta);
}

cd pearcey_half(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("pearcey_half: non-finite argument");
    if (in_series_box(x, y)) {
        auto r = half_series<long double>(x, y, false);
        if (accurate(r, 1e-12L)) return r.value;
    }
    return pearcey_half_contour(x, y);
}

cd pearcey_half_dy(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("pearcey_half_dy: non-finite argument");
    if (in_series_box(x, y)) {
        auto r = half_series<long double>(x, y, true);
        if (accurate(r, 1e-12L)) return r.value;
    }
    return pearcey_half_dy_contour(x, y);
}

}  // namespace kr
