#include "kickrot/classical.hpp"
#include "kickrot/quantum2d.hpp"
#include "kickrot/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace kr;

namespace {
FourierPacket2D kicked(double P, Coupling c = Coupling::dipole) { return apply_kick(ground_packet(0), KickSpec{P, c}); }

double peak_location(const FourierPacket2D& p, double a, double b, int n) {
    double best = -1.0, at = a;
    for (int i = 0; i <= n; ++i) {
        const double t = a + (b - a) * i / n;
        const double v = std::norm(p.psi(t));
        if (v > best) {
            best = v;
            at = t;
        }
    }
    return at;
}
}  // namespace

TEST_CASE("ground packet is normalized and uniform") {
    auto g = ground_packet(64);
    CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-15));
    for (double t : {0.0, 1.0, 4.0}) CHECK(std::norm(g.psi(t)) == doctest::Approx(1.0 / (2 * pi)));
    auto e = free_evolve(g, 3.7);
    CHECK(std::norm(e.psi(2.0)) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(ground_packet(-1), DomainError);
}

TEST_CASE("dipole kick produces i^n J_n(P) coefficients") {
    auto k = kicked(85.0);
    for (int n : {-7, 0, 3, 40, 85}) {
        CAPTURE(n);
        const cd expect = std::pow(I, n) * bessel_j(n, 85.0);
        CHECK(std::abs(k.c(n) - expect) < 1e-13);
    }
    CHECK(std::abs(k.norm() - 1.0) < 1e-10);
    CHECK(std::abs(k.c(k.n_max())) < 1e-12);
    CHECK(std::abs(k.c(-k.n_max())) < 1e-12);
}

TEST_CASE("zero kick is the identity and a kick alone is a pure phase") {
    auto g = free_evolve(kicked(3.0), 0.4);
    auto same = apply_kick(g, KickSpec{0.0, Coupling::dipole});
    CHECK(same.n_max() == g.n_max());
    for (int n = -g.n_max(); n <= g.n_max(); ++n) CHECK(same.c(n) == g.c(n));
    auto k = kicked(1.0);
    for (double t : {0.0, 0.7, 3.0, 5.5}) CHECK(std::norm(k.psi(t)) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-12));
    CHECK_THROWS_AS(apply_kick(g, KickSpec{-1.0, Coupling::dipole}), DomainError);
}

TEST_CASE("polarization kick conserves norm and keeps the even parity of n") {
    auto k = kicked(40.0, Coupling::polarization);
    CHECK(std::abs(k.norm() - 1.0) < 1e-10);
    CHECK(std::abs(k.c(3)) == 0.0);
    CHECK(std::abs(k.c(4) - std::exp(I * 20.0) * std::pow(I, 2) * bessel_j(2, 20.0)) < 1e-13);
}

TEST_CASE("free evolution: identity at zero and full revival at 4 pi") {
    auto k = free_evolve(kicked(85.0), 0.3);
    auto z = free_evolve(k, 0.0);
    for (int n = -k.n_max(); n <= k.n_max(); ++n) CHECK(z.c(n) == k.c(n));
    auto r = free_evolve(k, 4 * pi);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double t = 2 * pi * i / 500;
        worst = std::max(worst, std::abs(std::norm(r.psi(t)) - std::norm(k.psi(t))));
    }
    CHECK(worst < 1e-8);
    CHECK(std::abs(r.norm() - 1.0) < 1e-10);
    CHECK(r.time() == doctest::Approx(0.3 + 4 * pi));
}

TEST_CASE("focusing at tau = 1/P gives the 0.4078 sqrt(P) peak") {
    auto f = free_evolve(kicked(85.0), 1.0 / 85.0);
    const double peak = std::norm(f.psi(0.0));
    CHECK(peak == doctest::Approx(3.7836820359652643).epsilon(1e-10));
    CHECK(std::abs(peak / (0.4078 * std::sqrt(85.0)) - 1.0) < 0.05);
    CHECK(peak_location(f, 0.0, pi, 4000) == 0.0);
}

TEST_CASE("rainbow maxima sit within an Airy fringe of the classical rainbow") {
    const double P = 85.0, s = 2.0, tau = s / P;
    auto p = free_evolve(kicked(P), tau);
    const double theta_r = rainbow_angle_folded(s);
    const double w = std::cbrt(std::sqrt(s * s - 1.0) * tau * tau / 2.0);
    const double right = peak_location(p, 0.0, pi, 20000);
    const double left = peak_location(p, pi, 2 * pi - 1e-9, 20000);
    CHECK(std::abs(right - theta_r) < 2.23 * w);
    CHECK(std::abs(left - (2 * pi - right)) < 1e-3);
    CHECK(right < theta_r);
}

TEST_CASE("fractional revival at tau_f + T_rev/2 moves the focus to theta = pi") {
    auto p = free_evolve(kicked(85.0), 1.0 / 85.0 + 2 * pi);
    CHECK(std::norm(p.psi(pi)) == doctest::Approx(3.7836820115245).epsilon(1e-8));
    CHECK(std::norm(p.psi(0.0)) == doctest::Approx(0.0795774141805037).epsilon(1e-8));
    CHECK(std::norm(p.psi(2.0)) == doctest::Approx(0.10989867907962).epsilon(1e-8));
}

TEST_CASE("density grid evaluation and normalization check") {
    auto p = free_evolve(kicked(30.0), 0.05);
    auto grid = uniform_circle_grid(4 * p.n_max());
    auto d = density(p, grid, true);
    CHECK(std::abs(d.norm - 1.0) < 1e-8);
    CHECK(d.value.size() == grid.size());
    CHECK(d.value[5] == doctest::Approx(std::norm(p.psi(grid[5]))).epsilon(1e-14));
    auto coarse = uniform_circle_grid(4 * p.n_max() - 1);
    CHECK_THROWS_AS(density(p, coarse, true), ResolutionError);
    std::vector<double> bad{0.0, 7.0};
    CHECK_THROWS_AS(density(p, bad, false), DomainError);
    auto skew = grid;
    skew[3] += 1e-3;
    CHECK_THROWS_AS(density(p, skew, true), ResolutionError);
}

TEST_CASE("norm is conserved over a sequence of kicks and flights") {
    auto p = ground_packet(0);
    for (int k = 0; k < 5; ++k) {
        p = free_evolve(apply_kick(p, KickSpec{10.0, k % 2 ? Coupling::polarization : Coupling::dipole}), 0.1 * (k + 1));
        CHECK(std::abs(p.norm() - 1.0) < 1e-10);
    }
}
