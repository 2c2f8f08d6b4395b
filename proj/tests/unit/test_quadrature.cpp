#include "kickrot/quadrature.hpp"
#include "kickrot/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace kr;

TEST_CASE("adaptive quadrature integrates smooth and oscillatory integrands") {
    CHECK(integrate_real([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    QuadOptions o;
    o.initial_panels = 64;
    auto r = integrate([](double x) { return std::exp(I * 200.0 * x); }, 0.0, 1.0, o);
    const cd expect = (std::exp(I * 200.0) - 1.0) / (I * 200.0);
    CHECK(std::abs(r.value - expect) < 1e-12);
    CHECK(r.panels >= 64);
}

TEST_CASE("quadrature reports exhaustion of the panel budget") {
    QuadOptions o;
    o.max_panels = 4;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-15;
    CHECK_THROWS_AS(integrate([](double x) { return cd(std::sin(1.0 / (x + 1e-6))); }, 0.0, 1.0, o), ConvergenceError);
}

TEST_CASE("pairwise sum is accurate and independent of the worker count") {
    std::vector<double> v(100001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    const double a = pairwise_sum(v);
    CHECK(a == doctest::Approx(12.090156129763429).epsilon(1e-14));
    set_worker_count(1);
    std::vector<double> w(1000, 0.0);
    parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) w[i] = static_cast<double>(i);
    });
    const double one = pairwise_sum(w);
    set_worker_count(0);
    parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) w[i] = static_cast<double>(i);
    });
    CHECK(pairwise_sum(w) == one);
    CHECK(one == 499500.0);
}

TEST_CASE("linspace and truncation helpers") {
    auto g = linspace(0.0, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(kick_truncation(0.0) >= 1);
    CHECK(kick_truncation(85.0) > 85);
    CHECK(kick_truncation(200.0) > kick_truncation(85.0));
}
