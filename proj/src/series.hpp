#pragma once

#include "kickrot/common.hpp"

#include <cmath>
#include <quadmath.h>
#include <string>
#include <type_traits>

namespace kr::detail {

using quad = __float128;

inline long double s_exp(long double x) { return std::exp(x); }
inline long double s_log(long double x) { return std::log(x); }
inline long double s_lgamma(long double x) { return std::lgamma(x); }
inline long double s_abs(long double x) { return std::abs(x); }
inline long double s_hypot(long double a, long double b) { return std::hypot(a, b); }
inline quad s_exp(quad x) { return expq(x); }
inline quad s_log(quad x) { return logq(x); }
inline quad s_lgamma(quad x) { return lgammaq(x); }
inline quad s_abs(quad x) { return fabsq(x); }
inline quad s_hypot(quad a, quad b) { return hypotq(a, b); }

// Sentinel for log of a structurally zero term.
template <class T>
T log_zero() {
    return T(-1e40L);
}

template <class T>
bool is_neg_inf(T v) {
    return !(v > T(-1e30));
}

struct SeriesResult {
    cd value;
    // Compare against |value| to judge cancellation.
    long double max_term = 0;
    // Estimated absolute rounding error of the sum.
    long double rounding = 0;
};

// Cosine of k*pi/8 for k = 0..15.
template <class T>
T cos_eighth(int k) {
    static const T c[5] = {T(1), T(0.923879532511286756128183189396788933L), T(0.707106781186547524400844362104849039L),
                           T(0.382683432365089771728459984030398866L), T(0)};
    k = ((k % 16) + 16) % 16;
    if (k <= 4) return c[k];
    if (k <= 8) return -c[8 - k];
    if (k <= 12) return -c[k - 8];
    return c[16 - k];
}

// Sums  sum_{n,m >= 0} sign(n,m) exp(log_mag(n,m)) e^{i pi phase8(n,m)/8}
// row by row in the working type ld with Kahan compensation.  A row ends once ten
// consecutive terms past the row maximum fall below rel_tol of the running
// total; the outer loop ends after ten consecutive negligible rows.
// log_mag returns log_zero() for structurally zero terms.
template <class ld, class LogMag, class Sign, class Phase>
SeriesResult double_series(LogMag log_mag, Sign sign, Phase phase8, bool single_row, bool single_col,
                           const char* name, ld rel_tol, int n_budget = 4000, int m_budget = 4000) {
    ld re = 0, im = 0, cre = 0, cim = 0, max_term = 0;
    auto add = [&](ld v, ld& s, ld& c) {
        ld y = v - c, t = s + y;
        c = (t - s) - y;
        s = t;
    };
    int quiet_rows = 0;
    for (int n = 0;; ++n) {
        if (n > n_budget) throw ConvergenceError(std::string(name) + ": outer series budget exhausted");
        ld row_max = 0;
        int quiet = 0;
        for (int m = 0;; ++m) {
            if (m > m_budget) throw ConvergenceError(std::string(name) + ": inner series budget exhausted");
            ld lm = log_mag(n, m);
            ld t = is_neg_inf(lm) ? ld(0) : s_exp(lm);
            if (t > 0) {
                int k = phase8(n, m);
                ld s = ld(sign(n, m)) * t;
                add(s * cos_eighth<ld>(k), re, cre);
                add(s * cos_eighth<ld>(k - 4), im, cim);
            }
            if (t > row_max) row_max = t;
            if (t > max_term) max_term = t;
            ld scale = std::max(s_hypot(re, im), max_term * ld(1e-30));
            if (single_col) break;
            if (t >= row_max && t > 0) {
                quiet = 0;
            } else if (t <= rel_tol * scale) {
                if (++quiet >= 10) break;
            } else {
                quiet = 0;
            }
        }
        if (single_row) break;
        ld scale = std::max(s_hypot(re, im), max_term * ld(1e-30));
        if (row_max <= rel_tol * scale && n > 0) {
            if (++quiet_rows >= 10) break;
        } else {
            quiet_rows = 0;
        }
    }
    const ld eps = std::is_same_v<ld, long double> ? ld(1.1e-19L) : ld(2e-34L);
    return {cd(static_cast<double>(re), static_cast<double>(im)), static_cast<long double>(max_term),
            static_cast<long double>(max_term * eps * 16)};
}

}  // namespace kr::detail
