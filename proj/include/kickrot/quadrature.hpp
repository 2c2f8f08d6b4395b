#pragma once

#include "kickrot/common.hpp"

#include <cstddef>
#include <functional>

namespace kr {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_panels = 1'000'000;
    // Uniform panels laid down before adaptive refinement; oscillatory integrands
    // should get roughly one panel per oscillation.
    std::size_t initial_panels = 1;
};

struct QuadResult {
    cd value;
    double error = 0.0;
    std::size_t panels = 0;
};

// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand on [a,b].
// Throws ConvergenceError when the panel budget is exhausted.
QuadResult integrate(const std::function<cd(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const QuadOptions& opt = {});

}  // namespace kr
