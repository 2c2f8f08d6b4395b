#include "kickrot/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace kr {

namespace {

// Kronrod abscissae (positive half, descending) and weights; every odd index is a Gauss node.
constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cd value;
    double error;
    // Error estimate is at the rounding floor; splitting cannot help.
    bool settled = false;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<cd(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cd fc = f(c);
    cd rk = fc * wk[7];
    cd rg = fc * wg[3];
    double rabs = std::abs(fc) * wk[7];
    for (int j = 0; j < 7; ++j) {
        double dx = h * xk[j];
        cd f1 = f(c - dx), f2 = f(c + dx);
        rk += wk[j] * (f1 + f2);
        rabs += wk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) rg += wg[j / 2] * (f1 + f2);
    }
    double err = std::abs((rk - rg) * h);
    double floor = 50.0 * std::numeric_limits<double>::epsilon() * rabs * std::abs(h);
    return {a, b, rk * h, std::max(err, floor), err <= floor};
}

}  // namespace

QuadResult integrate(const std::function<cd(double)>& f, double a, double b, const QuadOptions& opt) {
    if (a == b) return {};
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: infinite limits");
    std::priority_queue<Panel> heap;
    cd total = 0.0;
    double err = 0.0, settled_err = 0.0;
    const std::size_t n0 = std::max<std::size_t>(1, opt.initial_panels);
    for (std::size_t i = 0; i < n0; ++i) {
        double x0 = a + (b - a) * static_cast<double>(i) / n0;
        double x1 = (i + 1 == n0) ? b : a + (b - a) * static_cast<double>(i + 1) / n0;
        Panel p = gk15(f, x0, x1);
        total += p.value;
        if (p.settled) {
            settled_err += p.error;
        } else {
            err += p.error;
            heap.push(p);
        }
    }
    std::size_t panels = n0;
    // Re-sum occasionally to keep the running totals free of drift.
    std::size_t since_resum = 0;
    while (!heap.empty() && err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (panels >= opt.max_panels) {
            std::ostringstream msg;
            msg << "integrate: panel budget " << opt.max_panels << " exhausted on [" << a << ", " << b
                << "], error estimate " << err;
            throw ConvergenceError(msg.str());
        }
        Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw ConvergenceError("integrate: panel width underflow");
        }
        Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err -= worst.error;
        for (const Panel& p : {l, r}) {
            if (p.settled) {
                settled_err += p.error;
            } else {
                err += p.error;
                heap.push(p);
            }
        }
        ++panels;
        if (++since_resum == (1u << 16)) {
            since_resum = 0;
            auto copy = heap;
            err = 0.0;
            while (!copy.empty()) {
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, err + settled_err, panels};
}

double integrate_real(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
    return integrate([&](double x) { return cd(f(x), 0.0); }, a, b, opt).value.real();
}

}  // namespace kr
