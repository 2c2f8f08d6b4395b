#include "kickrot/quantum3d.hpp"
#include "kickrot/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace kr;

TEST_CASE("recurrence table: rows sum to one and odd L vanish") {
    auto t = build_recurrence(100);
    CHECK(t.d(0, 0) == 1.0);
    for (int L = 1; L <= 200; ++L) CHECK(t.d(L, 0) == 0.0);
    double worst = 0.0, odd = 0.0;
    for (int l = 0; l <= 100; ++l) {
        double sum = 0.0;
        for (int L = 0; L <= 2 * l; ++L) {
            sum += t.d(L, l);
            if (L % 2) odd = std::max(odd, std::abs(t.d(L, l)));
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst < 1e-10);
    CHECK(odd < 1e-10);
}

TEST_CASE("recurrence reproduces P_l(cos 2 theta) pointwise") {
    auto t = cached_recurrence(30);
    REQUIRE(t->L_max() >= 30);
    for (double th : {0.2, 1.1, 2.5}) {
        for (int l : {1, 7, 30}) {
            double s = 0.0;
            for (int L = 0; L <= 2 * l; ++L) s += t->d(L, l) * legendre_p(L, std::cos(th));
            CHECK(s == doctest::Approx(legendre_p(l, std::cos(2 * th))).epsilon(1e-11));
        }
    }
    CHECK(t->d(0, 1) == doctest::Approx(-1.0 / 3.0));
    CHECK(t->d(2, 1) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("dipole kick coefficients follow the spherical Bessel expansion") {
    auto z = dipole_kick_ground(0.0, 4);
    CHECK(std::abs(z.coeffs[0] - 1.0) < 1e-15);
    for (int l = 1; l <= 4; ++l) CHECK(std::abs(z.coeffs[l]) == 0.0);
    auto k = dipole_kick_ground(75.0, 0);
    CHECK(std::abs(k.norm() - 1.0) < 1e-10);
    CHECK(std::abs(k.coeffs[k.l_max]) < 1e-12);
    for (int l : {0, 5, 60}) {
        const cd expect = std::pow(I, l) * std::sqrt(2.0 * l + 1.0) * spherical_j(l, 75.0);
        CHECK(std::abs(k.coeffs[l] - expect) < 1e-12);
    }
    for (double th : {0.0, 1.0, 2.5}) CHECK(std::norm(k.psi(th)) == doctest::Approx(1.0 / (4 * pi)).epsilon(1e-10));
}

TEST_CASE("kick coefficients match direct projection for both couplings") {
    for (double P : {1.0, 7.5, 20.0}) {
        auto d = dipole_kick_ground(P, 0);
        auto q = polarization_kick_ground(P, 0);
        for (int l = 0; l <= 12; ++l) {
            CAPTURE(P);
            CAPTURE(l);
            CHECK(std::abs(d.coeffs[l] - projection_coefficient(P, Coupling::dipole, l)) < 1e-8);
            CHECK(std::abs(q.coeffs[l] - projection_coefficient(P, Coupling::polarization, l)) < 1e-8);
        }
        for (int l = 1; l <= q.l_max; l += 2) CHECK(std::abs(q.coeffs[l]) == 0.0);
        CHECK(std::abs(q.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("3D focusing peak near 3P/8") {
    auto f = free_evolve_3d(dipole_kick_ground(75.0, 0), 1.0 / 75.0);
    const double peak = std::norm(f.psi(0.0));
    CHECK(peak == doctest::Approx(27.4977385516139).epsilon(1e-9));
    CHECK(std::abs(peak / (3.0 * 75.0 / 8.0) - 1.0) < 0.15);
    for (double th : {0.05, 0.2, 1.0, 3.0}) CHECK(std::norm(f.psi(th)) < peak);
}

TEST_CASE("polarization focusing at theta = 0 and pi together, with mirror symmetry") {
    auto p = free_evolve_3d(polarization_kick_ground(75.0, 0), 1.0 / 150.0);
    const double a = std::norm(p.psi(0.0)), b = std::norm(p.psi(pi));
    CHECK(a == doctest::Approx(14.175).epsilon(1e-3));
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
    CHECK(std::norm(p.psi(pi / 2)) < 0.01 * a);
    for (double tau : {0.003, 0.02, 0.4}) {
        auto q = free_evolve_3d(polarization_kick_ground(75.0, 0), tau);
        for (double th : {0.1, 0.7, 1.3}) {
            CHECK(std::norm(q.psi(th)) == doctest::Approx(std::norm(q.psi(pi - th))).epsilon(1e-9));
        }
    }
}

TEST_CASE("3D glory snapshot at P tau = 4") {
    auto g = free_evolve_3d(dipole_kick_ground(75.0, 0), 4.0 / 75.0);
    CHECK(std::norm(g.psi(0.0)) == doctest::Approx(3.58677218546586).epsilon(1e-9));
    CHECK(std::norm(g.psi(0.3)) == doctest::Approx(0.170854808104074).epsilon(1e-9));
    CHECK(std::norm(g.psi(2.4)) == doctest::Approx(0.269333421941681).epsilon(1e-9));
}

TEST_CASE("3D revival at 2 pi and identity at zero") {
    auto k = free_evolve_3d(dipole_kick_ground(75.0, 0), 0.21);
    auto r = free_evolve_3d(k, 2 * pi);
    auto z = free_evolve_3d(k, 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = pi * i / 400;
        worst = std::max(worst, std::abs(std::norm(r.psi(t)) - std::norm(k.psi(t))));
        CHECK(std::norm(z.psi(t)) == std::norm(k.psi(t)));
    }
    CHECK(worst < 1e-8);
    CHECK(std::abs(r.norm() - 1.0) < 1e-10);
}

TEST_CASE("density_3d normalization and error handling") {
    auto p = free_evolve_3d(dipole_kick_ground(40.0, 0), 0.05);
    const int n = 4 * p.l_max + 1;
    auto grid = linspace(0.0, pi, n);
    auto d = density_3d(p, grid, true);
    CHECK(std::abs(d.norm - 1.0) < 1e-8);
    CHECK(d.weighted[7] == doctest::Approx(2 * pi * std::sin(grid[7]) * d.value[7]));
    auto g0 = density_3d(ground_packet_3d(3), grid, false);
    CHECK(g0.value[11] == doctest::Approx(1.0 / (4 * pi)));
    auto coarse = linspace(0.0, pi, n - 2);
    CHECK_THROWS_AS(density_3d(p, coarse, true), ResolutionError);
    std::vector<double> bad{-0.1};
    CHECK_THROWS_AS(density_3d(p, bad, false), DomainError);
}
