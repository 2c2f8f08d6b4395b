#include "kickrot/classical.hpp"
#include "kickrot/quantum2d.hpp"
#include "kickrot/quantum3d.hpp"
#include "kickrot/specfun.hpp"
#include "kickrot/thermal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace kr;

namespace {

double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

}  // namespace

TEST_CASE("property: Pearcey series and contour agree on random points of the series box") {
    std::mt19937_64 g(20240601);
    for (int i = 0; i < 40; ++i) {
        const double x = uniform(g, -8, 8), b = uniform(g, -8, 8);
        const cd s = pearcey_series(x, b), c = pearcey_contour(x, b);
        CHECK(std::abs(s - c) < 1e-8 * std::max(1.0, std::abs(c)));
        CHECK(std::abs(pearcey(x, b) - pearcey(x, -b)) < 1e-12 * std::max(1.0, std::abs(c)));
    }
}

TEST_CASE("property: Bessel and spherical Bessel sum rules at random arguments") {
    std::mt19937_64 g(7);
    for (int i = 0; i < 30; ++i) {
        const double x = uniform(g, 0, 300);
        const int n = static_cast<int>(x) + 60;
        auto J = bessel_j_sequence(n, x);
        double even = J[0], squares = J[0] * J[0];
        for (int k = 1; k <= n; ++k) {
            if (k % 2 == 0) even += 2 * J[k];
            squares += 2 * J[k] * J[k];
        }
        CHECK(even == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(squares == doctest::Approx(1.0).epsilon(1e-12));

        auto j = spherical_j_sequence(n, x);
        double sph = 0.0;
        for (int l = 0; l <= n; ++l) sph += (2 * l + 1) * j[l] * j[l];
        CHECK(sph == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("property: every inverse branch maps back onto its target") {
    std::mt19937_64 g(99);
    for (Geometry geo : {Geometry::planar2D, Geometry::sphere3D}) {
        for (Coupling cpl : {Coupling::dipole, Coupling::polarization}) {
            for (int i = 0; i < 60; ++i) {
                MapParams m{uniform(g, 0.0, 6.0), cpl, geo};
                const double hi = geo == Geometry::planar2D ? 2 * pi : pi;
                const double th = uniform(g, 0.0, hi);
                const auto b = invert_map(th, m);
                CHECK_FALSE(b.roots.empty());
                for (double r : b.roots) {
                    double d = std::abs(map_forward(r, m) - th);
                    if (geo == Geometry::planar2D) d = std::min(d, 2 * pi - d);
                    CHECK(d < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("property: free flight conserves energy and p_phi for random particles") {
    std::mt19937_64 g(3);
    auto e = kick(sample_ensemble(2000, 17, 5.0, 1.0));
    double worst_e = 0.0, worst_l = 0.0;
    for (const auto& p : e.particles) {
        const double dt = uniform(g, 0.0, 20.0);
        const auto q = evolve_particle(p, dt);
        worst_e = std::max(worst_e, std::abs(particle_energy(q) - particle_energy(p)) / std::max(1.0, particle_energy(p)));
        worst_l = std::max(worst_l, std::abs(q.p_phi - p.p_phi));
        CHECK(std::abs(std::cos(q.theta) - cos_theta_after(p, dt)) < 1e-9);
    }
    CHECK(worst_e < 1e-9);
    CHECK(worst_l < 1e-9);
}

TEST_CASE("property: random kick and flight sequences conserve the 2D norm") {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 5; ++trial) {
        auto p = ground_packet(0);
        for (int k = 0; k < 4; ++k) {
            const Coupling c = uniform(g, 0, 1) < 0.5 ? Coupling::dipole : Coupling::polarization;
            p = free_evolve(apply_kick(p, KickSpec{uniform(g, 0, 30), c}), uniform(g, 0, 3));
        }
        CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("property: revivals at random times") {
    std::mt19937_64 g(5);
    for (int i = 0; i < 6; ++i) {
        const double P = uniform(g, 5, 80), tau = uniform(g, 0, 1);
        auto k2 = apply_kick(ground_packet(0), KickSpec{P, Coupling::dipole});
        auto a = free_evolve(k2, tau), b = free_evolve(k2, tau + 4 * pi);
        auto k3 = dipole_kick_ground(P, 0);
        auto c = free_evolve_3d(k3, tau), d = free_evolve_3d(k3, tau + 2 * pi);
        for (double th : {0.0, 0.7, 1.9, 3.0}) {
            CHECK(std::abs(std::norm(a.psi(th)) - std::norm(b.psi(th))) < 1e-8);
            CHECK(std::abs(std::norm(c.psi(th)) - std::norm(d.psi(th))) < 1e-8);
        }
        CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("property: kick coefficients match projection for random P up to 20") {
    std::mt19937_64 g(13);
    for (int i = 0; i < 4; ++i) {
        const double P = uniform(g, 0, 20);
        auto d = dipole_kick_ground(P, 0), q = polarization_kick_ground(P, 0);
        for (int l = 0; l < 12; ++l) {
            CHECK(std::abs(d.coeffs[l] - projection_coefficient(P, Coupling::dipole, l)) < 1e-8);
            CHECK(std::abs(q.coeffs[l] - projection_coefficient(P, Coupling::polarization, l)) < 1e-8);
        }
    }
}
