#include "kickrot/squeeze.hpp"

#include <doctest.h>

#include <cmath>

using namespace kr;

TEST_CASE("kick cycle from u = w = 1") {
    auto [s, dt] = kick_cycle(MomentState{1.0, 1.0, true});
    CHECK(s.u == doctest::Approx(0.5));
    CHECK(s.w == doctest::Approx(2.0));
    CHECK(dt == doctest::Approx(0.5));
    auto [small, dts] = kick_cycle(MomentState{1e-4, 1.0, true});
    CHECK(small.u == doctest::Approx(1e-4 * (1 - 1e-4)).epsilon(1e-7));
    CHECK(dts > 0.0);
    CHECK(small.u > 0.0);
    CHECK(small.w > 0.0);
}

TEST_CASE("accumulative squeezing: monotone trace and asymptotics") {
    auto one = run_accumulative(1.0, 1.0, 1);
    REQUIRE(one.records.size() == 1);
    CHECK(one.records[0].u == doctest::Approx(0.5));
    auto tr = run_accumulative(1.0, 1.0, 1000);
    REQUIRE(tr.records.size() == 1000);
    std::vector<double> k, u;
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
        if (i > 0) {
            CHECK(tr.records[i].u < tr.records[i - 1].u);
            CHECK(tr.records[i].w > tr.records[i - 1].w);
        }
        if (tr.records[i].k >= 100) {
            k.push_back(tr.records[i].k);
            u.push_back(tr.records[i].u);
        }
    }
    const double slope = loglog_slope(k, u);
    CHECK(std::abs(slope + 0.5) < 0.05);
    CHECK(slope == doctest::Approx(-0.49695553239234075).epsilon(1e-9));
    double lo = 1e9, hi = 0.0;
    for (const auto& r : tr.records) {
        if (r.k < 100) continue;
        lo = std::min(lo, r.dtau * r.k);
        hi = std::max(hi, r.dtau * r.k);
    }
    CHECK(hi / lo - 1.0 < 0.10);
    CHECK_THROWS_AS(run_accumulative(1.0, 1.0, 0), DomainError);
}

TEST_CASE("moment invariant: conserved by the ODE, not by early recurrence") {
    CHECK(ode_invariant(1.0, 1.0) == 3.0);
    CHECK(ode_invariant(0.5, 2.0) == 2.25);
    auto pts = ode_integrate(1.0, 1.0, 1000.0);
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, std::abs(ode_invariant(p.u, p.w) - 3.0));
    CHECK(worst < 1e-9);
    const auto& last = pts.back();
    CHECK(last.k == doctest::Approx(1000.0));
    CHECK(last.u * last.w == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("log-log slope of an exact power law") {
    std::vector<double> x{1, 2, 4, 8, 16}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.7));
    CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-13));
}

TEST_CASE("classical driver squeezes monotonically") {
    auto cold = classical_accumulative_3d(100000, INFINITY, 10, 7, Coupling::dipole);
    REQUIRE(cold.records.size() == 10);
    const double frozen[] = {0.2487, 0.1940, 0.1539, 0.1284, 0.1114, 0.1000, 0.0919, 0.0859, 0.0810, 0.0767};
    for (std::size_t i = 0; i < cold.records.size(); ++i) {
        CAPTURE(i);
        CHECK(cold.records[i].spread == doctest::Approx(frozen[i]).epsilon(2e-3));
        if (i > 0) CHECK(cold.records[i].spread < cold.records[i - 1].spread);
        CHECK(cold.records[i].dtau > 0.0);
    }
    auto warm = classical_accumulative_3d(50000, 5.0, 6, 7, Coupling::dipole);
    for (std::size_t i = 1; i < warm.records.size(); ++i) CHECK(warm.records[i].spread < warm.records[i - 1].spread);
    auto hot = classical_accumulative_3d(50000, 1.0, 4, 7, Coupling::dipole);
    CHECK(hot.records.back().spread < hot.records.front().spread);
    CHECK(hot.records.back().spread > warm.records.back().spread);
    auto pol = classical_accumulative_3d(50000, INFINITY, 4, 7, Coupling::polarization);
    for (std::size_t i = 1; i < pol.records.size(); ++i) CHECK(pol.records[i].spread < pol.records[i - 1].spread);
    auto again = classical_accumulative_3d(50000, 5.0, 6, 7, Coupling::dipole);
    CHECK(again.records.back().spread == warm.records.back().spread);
}
