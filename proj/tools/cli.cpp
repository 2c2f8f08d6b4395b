#include "cli.hpp"

#include "kickrot/classical.hpp"
#include "kickrot/quantum2d.hpp"
#include "kickrot/quantum3d.hpp"
#include "kickrot/semiclassical.hpp"
#include "kickrot/squeeze.hpp"
#include "kickrot/thermal.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace kr::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

const std::vector<std::string> commands = {"quantum2d", "quantum3d",     "classical", "thermal",
                                           "semiclassical", "squeeze", "compare"};
const std::vector<std::string> method_names = {"exact",        "pearcey",        "airy",   "uniform-airy",
                                               "uniform-bessel", "ford-wheeler", "planar", "classical"};

bool contains(const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

double parse_real(const std::string& field, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) throw ConfigError(field, "not a number: '" + text + "'");
    return v;
}

Coupling coupling_of(const ScenarioConfig& c) {
    return c.coupling == "polarization" ? Coupling::polarization : Coupling::dipole;
}

bool sphere_only(const std::string& m) {
    return m == "uniform-airy" || m == "uniform-bessel" || m == "ford-wheeler" || m == "planar";
}

Geometry geometry_of(const ScenarioConfig& c) {
    if (c.geometry) return (*c.geometry == "3d" || *c.geometry == "sphere") ? Geometry::sphere3D : Geometry::planar2D;
    if (c.command == "quantum3d") return Geometry::sphere3D;
    if (c.command == "quantum2d") return Geometry::planar2D;
    for (const auto& m : c.methods) {
        if (sphere_only(m)) return Geometry::sphere3D;
    }
    return c.command == "classical" ? Geometry::sphere3D : Geometry::planar2D;
}

double tau_of(const ScenarioConfig& c) {
    if (c.tau) return *c.tau;
    return *c.s / *c.P;
}

double scaled_time(const ScenarioConfig& c) {
    if (c.s) return *c.s;
    return *c.tau * *c.P;
}

std::vector<double> theta_grid(const ScenarioConfig& c, Geometry g) {
    const int n = c.grid_points;
    const double lo = c.theta_min.value_or(0.0);
    if (c.theta_max) return linspace(lo, *c.theta_max, n);
    if (g == Geometry::sphere3D) return linspace(lo, pi, n);
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) t[k] = lo + (2 * pi - lo) * k / n;
    return t;
}

struct Evaluator {
    std::string name;
    std::function<std::pair<double, Validity>(double)> eval;
    bool has_validity = false;
    double norm = nan_v;
};

double abs2(cd z) { return std::norm(z); }

Evaluator make_evaluator(const std::string& method, const ScenarioConfig& c, Geometry g) {
    Evaluator ev;
    ev.name = method;
    const Coupling cp = coupling_of(c);
    if (method == "classical") {
        MapParams mp{scaled_time(c), cp, g};
        ev.eval = [mp](double th) { return std::pair{density_classical(th, mp).value, Validity::in}; };
        return ev;
    }
    const double P = *c.P;
    const double tau = tau_of(c);
    if (method == "exact") {
        if (g == Geometry::planar2D) {
            auto packet = free_evolve(apply_kick(ground_packet(0), KickSpec{P, cp}), tau);
            ev.norm = packet.norm();
            ev.eval = [packet = std::move(packet)](double th) {
                double t = std::fmod(th, 2 * pi);
                if (t < 0) t += 2 * pi;
                return std::pair{abs2(packet.psi(t)), Validity::in};
            };
        } else {
            auto kicked = cp == Coupling::dipole ? dipole_kick_ground(P, 0) : polarization_kick_ground(P, 0);
            auto packet = free_evolve_3d(kicked, tau);
            ev.norm = packet.norm();
            ev.eval = [packet = std::move(packet)](double th) {
                if (th < 0.0 || th > pi) throw DomainError("exact 3d density: theta must lie in [0, pi]");
                return std::pair{abs2(packet.psi(th)), Validity::in};
            };
        }
        return ev;
    }
    if (cp != Coupling::dipole) throw ConfigError("coupling", "method '" + method + "' supports the dipole coupling only");
    std::function<Approx(double)> f;
    if (method == "pearcey") {
        if (g == Geometry::planar2D) {
            // The 2 pi - theta image only carries the quartic phase's far tails, so the
            // nearer image alone is reported.
            const double d = std::abs(P * tau - 1.0);
            const Validity v = d <= 0.15 ? Validity::in : (d <= 0.4 ? Validity::near : Validity::outside);
            f = [=](double th) { return Approx{pearcey_focus_2d_single(std::min(th, 2 * pi - th), tau, P), v}; };
        } else {
            f = [=](double th) { return pearcey_cusp_3d(th, tau, P); };
        }
    } else if (method == "airy") {
        if (g != Geometry::planar2D) throw ConfigError("geometry", "method 'airy' is planar only");
        f = [=](double th) { return airy_rainbow_2d(th, tau, P); };
    } else if (g != Geometry::sphere3D) {
        throw ConfigError("geometry", "method '" + method + "' is spherical only");
    } else if (method == "uniform-airy") {
        f = [=](double th) { return uniform_airy_3d(th, tau, P); };
    } else if (method == "uniform-bessel") {
        f = [=](double th) { return uniform_bessel_glory(th, tau, P); };
    } else if (method == "ford-wheeler") {
        f = [=](double th) { return ford_wheeler_glory(th, tau, P); };
    } else if (method == "planar") {
        PlanarOptions opt;
        opt.unbounded = true;
        f = [=](double th) { return Approx{planar_psi(th, tau, P, opt), Validity::in}; };
    }
    ev.eval = [f](double th) {
        const Approx a = f(th);
        return std::pair{abs2(a.value), a.validity};
    };
    ev.has_validity = true;
    return ev;
}

// Evaluates on the grid.  Points outside a formula's domain give NaN; if every point
// fails the first error propagates.
std::vector<double> sample(const Evaluator& ev, const std::vector<double>& grid, std::vector<Validity>* validity) {
    std::vector<double> out(grid.size(), nan_v);
    if (validity) validity->assign(grid.size(), Validity::outside);
    std::exception_ptr first;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            const auto [v, reg] = ev.eval(grid[i]);
            out[i] = v;
            if (validity) (*validity)[i] = reg;
        } catch (const DomainError&) {
            if (!first) first = std::current_exception();
            ++failures;
        }
    }
    if (!grid.empty() && failures == grid.size()) std::rethrow_exception(first);
    return out;
}

void add_peak(ordered_json& summary, const std::vector<double>& theta, const std::vector<double>& v) {
    double best = -inf_v, at = nan_v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i]) && v[i] > best) {
            best = v[i];
            at = theta[i];
        }
    }
    if (std::isfinite(best)) {
        summary["peak_value"] = best;
        summary["peak_theta"] = at;
    }
}

ordered_json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

void run_profile(const ScenarioConfig& c, ResultEnvelope& r, const std::string& method) {
    const Geometry g = geometry_of(c);
    const auto grid = theta_grid(c, g);
    Evaluator ev = make_evaluator(method, c, g);
    std::vector<Validity> val;
    const bool with_validity = ev.has_validity;
    auto v = sample(ev, grid, with_validity ? &val : nullptr);
    r.columns = {"theta", "density"};
    r.data = {grid, v};
    if (g == Geometry::sphere3D && method != "classical") {
        std::vector<double> w(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) w[i] = 2 * pi * std::sin(grid[i]) * v[i];
        r.columns.push_back("weighted");
        r.data.push_back(std::move(w));
    }
    if (with_validity) {
        r.text_column_name = "validity";
        for (auto x : val) r.text_column.push_back(to_string(x));
    }
    add_peak(r.summary, grid, v);
    if (std::isfinite(ev.norm)) r.summary["norm"] = ev.norm;
    r.summary["geometry"] = to_string(g);
    if (method == "classical" && scaled_time(c) >= 1.0 && coupling_of(c) == Coupling::dipole) {
        r.summary["rainbow_angle"] = rainbow_angle_folded(scaled_time(c));
    }
}

void run_compare(const ScenarioConfig& c, ResultEnvelope& r) {
    const Geometry g = geometry_of(c);
    const auto grid = theta_grid(c, g);
    Evaluator a = make_evaluator(c.methods[0], c, g);
    Evaluator b = make_evaluator(c.methods[1], c, g);
    auto va = sample(a, grid, nullptr);
    auto vb = sample(b, grid, nullptr);
    double rel = 0.0, absd = 0.0, peak = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::isfinite(va[i])) peak = std::max(peak, va[i]);
        if (grid[i] < c.gap_min || grid[i] > c.gap_max) continue;
        if (!std::isfinite(va[i]) || !std::isfinite(vb[i])) continue;
        any = true;
        absd = std::max(absd, std::abs(va[i] - vb[i]));
        if (va[i] != 0.0) rel = std::max(rel, std::abs(va[i] - vb[i]) / std::abs(va[i]));
    }
    r.columns = {"theta", c.methods[0], c.methods[1]};
    r.data = {grid, va, vb};
    r.summary["geometry"] = to_string(g);
    r.summary["gap_window"] = {c.gap_min, c.gap_max};
    if (any) {
        r.summary["max_rel_gap"] = rel;
        r.summary["max_abs_gap"] = absd;
        if (peak > 0.0) r.summary["max_gap_over_peak"] = absd / peak;
    }
    if (std::isfinite(a.norm)) r.summary["norm"] = a.norm;
    add_peak(r.summary, grid, va);
}

void run_thermal(const ScenarioConfig& c, ResultEnvelope& r) {
    const double Pp = *c.P_prime;
    const bool cold = std::isinf(Pp);
    auto e = sample_ensemble(c.particles, c.seed, cold ? 1.0 : Pp, cold ? 0.0 : 1.0);
    const double dt = scaled_time(c) / (cold ? 1.0 : Pp);
    e = evolve(kick(e, coupling_of(c)), dt);
    const auto h = angular_histogram(e, c.grid_points);
    r.columns = {"theta", "density"};
    r.data = {h.theta, h.value};
    const auto oa = orientation_alignment(e);
    r.summary["O"] = oa.O;
    r.summary["A"] = oa.A;
    add_peak(r.summary, h.theta, h.value);
    r.summary["first_bin"] = h.value.front();
}

void run_squeeze(const ScenarioConfig& c, ResultEnvelope& r) {
    const std::string method = c.methods.empty() ? "exact" : c.methods[0];
    if (method == "classical") {
        const double Pp = c.P_prime.value_or(inf_v);
        auto tr = classical_accumulative_3d(c.particles, Pp, c.kicks, c.seed, coupling_of(c));
        std::vector<double> k, spread, dtau;
        bool decreasing = true;
        for (const auto& rec : tr.records) {
            if (!spread.empty() && !(rec.spread < spread.back())) decreasing = false;
            k.push_back(rec.k);
            spread.push_back(rec.spread);
            dtau.push_back(rec.dtau);
        }
        r.columns = {"k", "spread", "dtau"};
        r.data = {k, spread, dtau};
        r.summary["strictly_decreasing"] = decreasing;
        if (!spread.empty()) r.summary["final_spread"] = spread.back();
        return;
    }
    auto tr = run_accumulative(1.0, 1.0, c.kicks, c.P.value_or(1.0));
    std::vector<double> k, u, w, dtau;
    for (const auto& rec : tr.records) {
        k.push_back(rec.k);
        u.push_back(rec.u);
        w.push_back(rec.w);
        dtau.push_back(rec.dtau);
    }
    r.columns = {"k", "u", "w", "dtau"};
    r.data = {k, u, w, dtau};
    const std::size_t lo = static_cast<std::size_t>(std::max(1, c.kicks / 10)) - 1;
    if (k.size() - lo >= 2) {
        std::span<const double> ks(k.data() + lo, k.size() - lo), us(u.data() + lo, u.size() - lo);
        r.summary["slope"] = loglog_slope(ks, us);
        r.summary["slope_window"] = {k[lo], k.back()};
        double mn = inf_v, mx = -inf_v;
        for (std::size_t i = lo; i < k.size(); ++i) {
            mn = std::min(mn, dtau[i] * k[i]);
            mx = std::max(mx, dtau[i] * k[i]);
        }
        r.summary["dtau_k_min"] = mn;
        r.summary["dtau_k_max"] = mx;
    }
    if (!u.empty()) r.summary["invariant"] = ode_invariant(u.back(), w.back());
}

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::random_device rd;
    const fs::path tmp = p.string() + ".tmp" + std::to_string(rd());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("output", "cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw ConfigError("output", "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("output", "cannot rename into '" + path + "': " + ec.message());
    }
}

std::string output_dir() {
    const char* d = std::getenv("KICKROT_OUTPUT_DIR");
    return d && *d ? std::string(d) : std::string();
}

int report_exception(std::ostream& err, std::string* message) {
    int code = config_error;
    std::string msg;
    try {
        throw;
    } catch (const ConfigError& e) {
        msg = std::string("config error: ") + e.what();
    } catch (const DomainError& e) {
        msg = std::string("config error: ") + e.what();
    } catch (const ResolutionError& e) {
        msg = std::string("config error: ") + e.what();
    } catch (const ConvergenceError& e) {
        code = numerical_error;
        msg = std::string("numerical error: ") + e.what();
    } catch (const TruncationError& e) {
        code = numerical_error;
        msg = std::string("numerical error: ") + e.what();
    } catch (const json::exception& e) {
        msg = std::string("config error: ") + e.what();
    } catch (const std::exception& e) {
        code = numerical_error;
        msg = std::string("error: ") + e.what();
    }
    err << msg << '\n';
    if (message) *message = msg;
    return code;
}

}  // namespace

ConfigError::ConfigError(const std::string& f, const std::string& what)
    : std::runtime_error("field '" + f + "': " + what), field(f) {}

ordered_json config_to_json(const ScenarioConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    if (c.P) j["P"] = *c.P;
    if (c.tau) j["tau"] = *c.tau;
    if (c.s) j["s"] = *c.s;
    j["coupling"] = c.coupling;
    if (!c.methods.empty()) j["method"] = join(c.methods);
    if (c.geometry) j["geometry"] = *c.geometry;
    j["grid"] = c.grid_points;
    if (c.theta_min) j["theta_min"] = *c.theta_min;
    if (c.theta_max) j["theta_max"] = *c.theta_max;
    j["particles"] = c.particles;
    j["seed"] = c.seed;
    j["kicks"] = c.kicks;
    if (c.P_prime) j["P_prime"] = number_or_string(*c.P_prime);
    j["gap_min"] = c.gap_min;
    j["gap_max"] = c.gap_max;
    if (!c.output_path.empty()) j["output"] = c.output_path;
    return j;
}

ScenarioConfig config_from_json(const json& in) {
    if (!in.is_object()) throw ConfigError("config", "expected a JSON object");
    const json& j = in.contains("config") && in["config"].is_object() ? in["config"] : in;
    ScenarioConfig c;
    auto real = [&](const std::string& key) -> double {
        const json& v = j[key];
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return parse_real(key, v.get<std::string>());
        throw ConfigError(key, "expected a number");
    };
    auto integer = [&](const std::string& key) -> long long {
        const json& v = j[key];
        if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(key, "expected an integer");
        return v.get<long long>();
    };
    auto text = [&](const std::string& key) -> std::string {
        if (!j[key].is_string()) throw ConfigError(key, "expected a string");
        return j[key].get<std::string>();
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "command") c.command = text(k);
        else if (k == "P") c.P = real(k);
        else if (k == "tau") c.tau = real(k);
        else if (k == "s") c.s = real(k);
        else if (k == "coupling") c.coupling = text(k);
        else if (k == "method") c.methods = split_list(text(k));
        else if (k == "geometry") c.geometry = text(k);
        else if (k == "grid") c.grid_points = static_cast<int>(integer(k));
        else if (k == "theta_min") c.theta_min = real(k);
        else if (k == "theta_max") c.theta_max = real(k);
        else if (k == "particles") {
            const long long n = integer(k);
            if (n < 1) throw ConfigError(k, "must be >= 1");
            c.particles = static_cast<std::size_t>(n);
        } else if (k == "seed") {
            if (!j[k].is_number_unsigned() && !(j[k].is_number_integer() && j[k].get<long long>() >= 0)) {
                throw ConfigError(k, "expected a non-negative integer");
            }
            c.seed = j[k].get<std::uint64_t>();
        } else if (k == "kicks") c.kicks = static_cast<int>(integer(k));
        else if (k == "P_prime") c.P_prime = real(k);
        else if (k == "gap_min") c.gap_min = real(k);
        else if (k == "gap_max") c.gap_max = real(k);
        else if (k == "output") c.output_path = text(k);
        else throw ConfigError(k, "unknown field");
    }
    return c;
}

// Basis sizes grow linearly with P; beyond this the coefficient arrays no longer fit in memory.
constexpr double max_kick_strength = 1e7;

void validate(const ScenarioConfig& c) {
    if (!contains(commands, c.command)) throw ConfigError("command", "unknown command '" + c.command + "'");
    if (c.coupling != "dipole" && c.coupling != "polarization") {
        throw ConfigError("coupling", "must be 'dipole' or 'polarization'");
    }
    for (const auto& m : c.methods) {
        if (!contains(method_names, m)) throw ConfigError("method", "unknown method '" + m + "'");
    }
    if (c.geometry && !contains({"2d", "3d", "planar", "sphere"}, *c.geometry)) {
        throw ConfigError("geometry", "must be one of 2d, 3d, planar, sphere");
    }
    if (c.grid_points < 2) throw ConfigError("grid", "must be >= 2");
    if (c.P && !(std::isfinite(*c.P) && *c.P >= 0.0)) throw ConfigError("P", "must be finite and >= 0");
    if (c.P && *c.P > max_kick_strength) throw ConfigError("P", "must not exceed 1e7");
    if (c.tau && !(std::isfinite(*c.tau) && *c.tau >= 0.0)) throw ConfigError("tau", "must be finite and >= 0");
    if (c.s && !(std::isfinite(*c.s) && *c.s >= 0.0)) throw ConfigError("s", "must be finite and >= 0");
    if (c.tau && c.s) throw ConfigError("tau", "give either tau or s, not both");
    if (c.theta_min && c.theta_max && !(*c.theta_min < *c.theta_max)) {
        throw ConfigError("theta_max", "must exceed theta_min");
    }
    if (c.P_prime && !(*c.P_prime > 0.0)) throw ConfigError("P_prime", "must be > 0 or inf");

    auto need_P = [&] {
        if (!c.P) throw ConfigError("P", "required for command '" + c.command + "'");
    };
    auto need_time = [&] {
        if (!c.tau && !c.s) throw ConfigError("s", "tau or s is required for command '" + c.command + "'");
        if (c.tau && !c.P) throw ConfigError("P", "required to convert tau for command '" + c.command + "'");
        if (c.s && !c.tau && !c.P && c.command != "classical" && c.command != "thermal") {
            throw ConfigError("P", "required for command '" + c.command + "'");
        }
    };
    const std::string& cmd = c.command;
    if (cmd == "quantum2d" || cmd == "quantum3d") {
        need_P();
        need_time();
        if (!c.methods.empty() && c.methods != std::vector<std::string>{"exact"}) {
            throw ConfigError("method", "command '" + cmd + "' supports method 'exact' only");
        }
    } else if (cmd == "classical") {
        if (!c.s && !c.tau) throw ConfigError("s", "required for command 'classical'");
        need_time();
        if (!c.methods.empty() && c.methods != std::vector<std::string>{"classical"}) {
            throw ConfigError("method", "command 'classical' supports method 'classical' only");
        }
    } else if (cmd == "thermal") {
        if (!c.P_prime) throw ConfigError("P_prime", "required for command 'thermal'");
        if (!c.s) throw ConfigError("s", "P' t' is required for command 'thermal'");
    } else if (cmd == "semiclassical") {
        need_P();
        need_time();
        if (c.methods.size() != 1) throw ConfigError("method", "exactly one method is required");
        if (c.methods[0] == "exact" || c.methods[0] == "classical") {
            throw ConfigError("method", "use quantum2d, quantum3d or classical for method '" + c.methods[0] + "'");
        }
    } else if (cmd == "squeeze") {
        if (c.kicks < 1) throw ConfigError("kicks", "must be >= 1");
        if (c.methods.size() > 1 || (!c.methods.empty() && c.methods[0] != "exact" && c.methods[0] != "classical")) {
            throw ConfigError("method", "squeeze supports 'exact' or 'classical'");
        }
    } else if (cmd == "compare") {
        if (c.methods.size() != 2) throw ConfigError("method", "compare needs exactly two methods");
        need_time();
        const bool classical_only = c.methods[0] == "classical" && c.methods[1] == "classical";
        if (!classical_only) need_P();
    }
}

std::string resolve_output_path(const ScenarioConfig& c) {
    std::string p = c.output_path.empty() ? c.command + ".csv" : c.output_path;
    const std::string dir = output_dir();
    if (!dir.empty() && fs::path(p).is_relative()) p = (fs::path(dir) / p).string();
    return p;
}

std::string sidecar_path(const std::string& csv_path) {
    fs::path p(csv_path);
    if (p.extension() == ".csv") return p.replace_extension(".json").string();
    return csv_path + ".json";
}

ResultEnvelope run(const ScenarioConfig& c) {
    validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    ResultEnvelope r;
    r.config = c;
    const std::string& cmd = c.command;
    if (cmd == "quantum2d" || cmd == "quantum3d") {
        run_profile(c, r, "exact");
    } else if (cmd == "classical") {
        run_profile(c, r, "classical");
    } else if (cmd == "semiclassical") {
        run_profile(c, r, c.methods[0]);
    } else if (cmd == "thermal") {
        run_thermal(c, r);
    } else if (cmd == "squeeze") {
        run_squeeze(c, r);
    } else {
        run_compare(c, r);
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string format_csv(const ResultEnvelope& r) {
    std::string s;
    for (std::size_t i = 0; i < r.columns.size(); ++i) s += (i ? "," : "") + r.columns[i];
    if (!r.text_column_name.empty()) s += "," + r.text_column_name;
    s += '\n';
    const std::size_t rows = r.data.empty() ? 0 : r.data[0].size();
    for (std::size_t k = 0; k < rows; ++k) {
        for (std::size_t i = 0; i < r.data.size(); ++i) s += (i ? "," : "") + format_value(r.data[i][k]);
        if (!r.text_column_name.empty()) s += "," + r.text_column[k];
        s += '\n';
    }
    return s;
}

ordered_json sidecar_json(const ResultEnvelope& r) {
    ordered_json j;
    j["tool"] = "kickrot";
    j["version"] = tool_version;
    j["config"] = config_to_json(r.config);
    j["runtime_ms"] = r.runtime_ms;
    auto cols = r.columns;
    if (!r.text_column_name.empty()) cols.push_back(r.text_column_name);
    j["columns"] = cols;
    j["rows"] = r.data.empty() ? 0 : r.data[0].size();
    ordered_json summary;
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it) {
        summary[it.key()] = it.value().is_number_float() ? number_or_string(it.value().get<double>()) : it.value();
    }
    j["summary"] = summary;
    return j;
}

int run_and_write(const ScenarioConfig& in, std::ostream& out, std::ostream& err) {
    try {
        ScenarioConfig c = in;
        c.output_path = resolve_output_path(in);
        auto r = run(c);
        write_atomic(c.output_path, format_csv(r));
        write_atomic(sidecar_path(c.output_path), sidecar_json(r).dump(2) + "\n");
        out << c.output_path << '\n' << r.summary.dump() << '\n';
        return ok;
    } catch (...) {
        return report_exception(err, nullptr);
    }
}

int run_batch(const std::string& file, const std::string& index_path, std::ostream& out, std::ostream& err) {
    std::ifstream f(file);
    if (!f) {
        err << "config error: field 'file': cannot open '" << file << "'\n";
        return config_error;
    }
    struct Entry {
        int line = 0;
        std::optional<ScenarioConfig> config;
        std::string output;
        int status = ok;
        std::string message;
        ordered_json summary;
    };
    std::vector<Entry> entries;
    std::string text;
    int lineno = 0;
    while (std::getline(f, text)) {
        ++lineno;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        Entry e;
        e.line = lineno;
        try {
            ScenarioConfig c = config_from_json(json::parse(text));
            validate(c);
            e.output = resolve_output_path(c);
            c.output_path = e.output;
            e.config = c;
        } catch (...) {
            std::ostringstream msg;
            msg << "line " << lineno << ": ";
            std::string m;
            e.status = report_exception(err, &m);
            e.message = msg.str() + m;
        }
        entries.push_back(std::move(e));
    }
    std::map<std::string, int> seen;
    for (const auto& e : entries) {
        if (!e.config) continue;
        const std::string key = fs::weakly_canonical(fs::absolute(e.output)).string();
        if (auto it = seen.find(key); it != seen.end()) {
            err << "config error: field 'output': line " << e.line << " repeats the output path of line "
                << it->second << " (" << e.output << ")\n";
            return config_error;
        }
        seen[key] = e.line;
    }
    int worst = ok;
    for (auto& e : entries) {
        if (e.config) {
            try {
                auto r = run(*e.config);
                write_atomic(e.output, format_csv(r));
                write_atomic(sidecar_path(e.output), sidecar_json(r).dump(2) + "\n");
                e.summary = sidecar_json(r)["summary"];
            } catch (...) {
                std::string m;
                e.status = report_exception(err, &m);
                e.message = "line " + std::to_string(e.line) + ": " + m;
            }
        }
        worst = std::max(worst, e.status);
    }
    ordered_json index;
    index["tool"] = "kickrot";
    index["version"] = tool_version;
    index["batch"] = file;
    index["scenarios"] = ordered_json::array();
    for (const auto& e : entries) {
        ordered_json s;
        s["line"] = e.line;
        s["command"] = e.config ? e.config->command : "";
        s["output"] = e.output;
        s["status"] = e.status == ok ? "ok" : "failed";
        s["exit_code"] = e.status;
        if (!e.message.empty()) s["message"] = e.message;
        if (!e.summary.is_null()) s["summary"] = e.summary;
        index["scenarios"].push_back(s);
    }
    try {
        write_atomic(index_path, index.dump(2) + "\n");
    } catch (...) {
        return report_exception(err, nullptr);
    }
    out << index_path << '\n';
    return worst;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kicked rotor focusing, rainbows and squeezing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    ScenarioConfig cfg;
    std::optional<double> P, tau, s, theta_min, theta_max;
    std::string method, geometry, p_prime, output;
    std::string batch_file, index_path;
    int grid = cfg.grid_points, kicks = cfg.kicks;
    std::size_t particles = cfg.particles;
    std::uint64_t seed = cfg.seed;
    double gap_min = cfg.gap_min, gap_max = cfg.gap_max;
    std::string coupling = cfg.coupling;

    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name, "Run a " + name + " scenario");
        sub->add_option("--P", P, "Kick strength P");
        sub->add_option("--tau", tau, "Free evolution time tau");
        sub->add_option("--s", s, "Scaled time P tau (thermal: P' t')");
        sub->add_option("--coupling", coupling, "dipole or polarization");
        sub->add_option("--method", method, "Method name, comma separated for compare");
        sub->add_option("--geometry", geometry, "2d or 3d");
        sub->add_option("--grid", grid, "Grid points (thermal: histogram bins)");
        sub->add_option("--theta-min", theta_min, "Grid start");
        sub->add_option("--theta-max", theta_max, "Grid end (inclusive)");
        sub->add_option("--particles", particles, "Monte Carlo particles");
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("--kicks", kicks, "Number of kicks");
        sub->add_option("--P-prime", p_prime, "Thermal kick strength P' (inf for zero temperature)");
        sub->add_option("--gap-min", gap_min, "Compare window start");
        sub->add_option("--gap-max", gap_max, "Compare window end");
        sub->add_option("--output", output, "CSV output path");
    }
    CLI::App* batch = app.add_subcommand("batch", "Run scenarios listed one JSON object per line");
    batch->add_option("file", batch_file, "Scenario file")->required();
    batch->add_option("--index", index_path, "Index file path");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "config error: " << e.what() << '\n';
        return config_error;
    }

    if (batch->parsed()) {
        if (index_path.empty()) {
            fs::path idx = fs::path(batch_file).filename();
            idx.replace_extension(".index.json");
            const std::string dir = output_dir();
            index_path = dir.empty() ? idx.string() : (fs::path(dir) / idx).string();
        }
        return run_batch(batch_file, index_path, out, err);
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    cfg.P = P;
    cfg.tau = tau;
    cfg.s = s;
    cfg.coupling = coupling;
    cfg.methods = split_list(method);
    if (!geometry.empty()) cfg.geometry = geometry;
    cfg.grid_points = grid;
    cfg.theta_min = theta_min;
    cfg.theta_max = theta_max;
    cfg.particles = particles;
    cfg.seed = seed;
    cfg.kicks = kicks;
    cfg.gap_min = gap_min;
    cfg.gap_max = gap_max;
    cfg.output_path = output;
    try {
        if (!p_prime.empty()) cfg.P_prime = parse_real("P_prime", p_prime);
        validate(cfg);
    } catch (...) {
        return report_exception(err, nullptr);
    }
    return run_and_write(cfg, out, err);
}

}  // namespace kr::cli
