#pragma once

#include "kickrot/common.hpp"

#include <vector>

namespace kr {

// Bessel function of the first kind J_n(x), |n| <= 1e6, |x| <= 1e4.
double bessel_j(int n, double x);
// J_0(x) ... J_nmax(x) from one backward recurrence.
std::vector<double> bessel_j_sequence(int nmax, double x);

// Spherical Bessel function j_l(x), l >= 0, x >= 0.
double spherical_j(int l, double x);
std::vector<double> spherical_j_sequence(int lmax, double x);

struct AiryValue {
    double ai;
    double ai_prime;
};
// Ai(x) and Ai'(x) for -60 <= x <= 20.
AiryValue airy(double x);

// Gamma function for x > 0.
double gamma_fn(double x);

// Legendre polynomial P_l(x), -1 <= x <= 1.
double legendre_p(int l, double x);
std::vector<double> legendre_sequence(int lmax, double x);

// Pearcey integral  P(x,b) = int_{-inf}^{inf} exp[i(u^4 + x u^2 + b u)] du.
cd pearcey(double x, double beta);
// Half-line derivative  dP1/dy,  P1(x,y) = int_0^inf exp[i(u^4 + x u^2 + y u)] du.
cd pearcey_half_dy(double x, double y);
// The half-line integral P1(x,y) itself.
cd pearcey_half(double x, double y);

// x = 0 specialization summed as a single series in beta.  Throws ConvergenceError once
// the alternating terms cancel beyond quadruple precision (beta of roughly 40 and above).
cd pearcey_x0_single_sum(double beta);

// Evaluators exposed for cross-checking the series.
cd pearcey_series(double x, double beta);
cd pearcey_contour(double x, double beta);
cd pearcey_half_dy_series(double x, double y);
cd pearcey_half_dy_contour(double x, double y);
cd pearcey_half_series(double x, double y);
cd pearcey_half_contour(double x, double y);
// Straight ray u -> u e^{i pi/8}; only safe for moderate arguments.
cd pearcey_rotated_quadrature(double x, double beta);
cd pearcey_half_dy_rotated_quadrature(double x, double y);

// 1F1(1/2; 3/2; i z) = int_0^1 exp(i z t^2) dt.
cd hyp1f1_focus(double z);

}  // namespace kr
