#include "kickrot/parallel.hpp"
#include "kickrot/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace kr {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_count(unsigned n) { g_workers = n; }

unsigned worker_count() {
    unsigned n = g_workers.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(worker_count(), (n + 255) / 256);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

std::string to_string(Coupling c) { return c == Coupling::dipole ? "dipole" : "polarization"; }
std::string to_string(Geometry g) { return g == Geometry::planar2D ? "2d" : "3d"; }
std::string to_string(Validity v) {
    switch (v) {
        case Validity::in: return "in";
        case Validity::near: return "near";
        default: return "outside";
    }
}

int kick_truncation(double P) {
    return static_cast<int>(std::ceil(P + 8.0 * std::cbrt(P) + 20.0));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
    if (n == 1) v[0] = a;
    for (int i = 0; i < n && n > 1; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace kr
