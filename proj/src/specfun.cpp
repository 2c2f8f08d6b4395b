#include "kickrot/specfun.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace kr {

namespace {

constexpr double kBig = 1e250;
constexpr double kSmall = 1e-250;

int miller_start(int n, double x) {
    double top = std::max(static_cast<double>(n), x);
    int m = static_cast<int>(top + 20.0 + std::ceil(std::sqrt(40.0 * top)));
    return m + (m % 2);
}

std::string fmt_domain(const char* what, double a, double b) {
    std::ostringstream s;
    s << what << ": argument out of domain (" << a << ", " << b << ")";
    return s.str();
}

}  // namespace

std::vector<double> bessel_j_sequence(int nmax, double x) {
    if (nmax < 0) throw DomainError("bessel_j_sequence: negative order");
    if (std::abs(x) > 1e4 || nmax > 1'000'000) throw DomainError(fmt_domain("bessel_j_sequence", nmax, x));
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int m = miller_start(nmax, ax);
    // Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, seeded with J_{m+1}=0, J_m=1.
    double jp = 0.0, j = 1.0, sum = 0.0;
    for (int k = m; k >= 1; --k) {
        double jm = (2.0 * k / ax) * j - jp;
        jp = j;
        j = jm;
        if (k - 1 <= nmax) out[k - 1] = j;
        if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * j;
        if (std::abs(j) > kBig) {
            j *= kSmall;
            jp *= kSmall;
            sum *= kSmall;
            for (int i = k - 1; i <= std::min(nmax, m); ++i) out[i] *= kSmall;
        }
    }
    sum += j;
    for (int i = 0; i <= nmax; ++i) {
        out[i] /= sum;
        if (x < 0 && (i % 2 == 1)) out[i] = -out[i];
    }
    return out;
}

double bessel_j(int n, double x) {
    if (std::abs(n) > 1'000'000 || std::abs(x) > 1e4) throw DomainError(fmt_domain("bessel_j", n, x));
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (n % 2) sign = -sign;
    }
    if (x < 0) {
        x = -x;
        if (n % 2) sign = -sign;
    }
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const int m = miller_start(n, x);
    double jp = 0.0, j = 1.0, sum = 0.0, ans = 0.0;
    int ans_shift = 0;
    bool have = false;
    for (int k = m; k >= 1; --k) {
        double jm = (2.0 * k / x) * j - jp;
        jp = j;
        j = jm;
        if (k - 1 == n) {
            ans = j;
            have = true;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * j;
        if (std::abs(j) > kBig) {
            j *= kSmall;
            jp *= kSmall;
            sum *= kSmall;
            if (have) ++ans_shift;
        }
    }
    sum += j;
    double r = ans / sum;
    for (int i = 0; i < ans_shift && r != 0.0; ++i) r *= kSmall;
    return sign * r;
}

std::vector<double> spherical_j_sequence(int lmax, double x) {
    if (lmax < 0) throw DomainError("spherical_j: negative order");
    if (x < 0.0) throw DomainError("spherical_j: negative argument");
    std::vector<double> out(static_cast<std::size_t>(lmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int m = miller_start(lmax, x);
    std::vector<double> seq(static_cast<std::size_t>(m) + 2, 0.0);
    seq[m + 1] = 0.0;
    seq[m] = 1e-30;
    for (int l = m; l >= 1; --l) {
        seq[l - 1] = ((2.0 * l + 1.0) / x) * seq[l] - seq[l + 1];
        if (std::abs(seq[l - 1]) > kBig) {
            for (int i = l - 1; i <= m; ++i) seq[i] *= kSmall;
        }
    }
    // Normalize against whichever of j_0, j_1 is better conditioned.
    const double j0 = std::sin(x) / x;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    const double scale = std::abs(j0) >= std::abs(j1) ? j0 / seq[0] : j1 / seq[1];
    for (int l = 0; l <= lmax; ++l) out[l] = seq[l] * scale;
    return out;
}

double spherical_j(int l, double x) {
    if (l < 0) throw DomainError("spherical_j: negative order");
    return spherical_j_sequence(l, x)[l];
}

namespace {

AiryValue airy_series(double xd) {
    using ld = long double;
    const ld x = xd, x3 = x * x * x;
    const ld c1 = 0.355028053887817239260063186004183176L;
    const ld c2 = 0.258819403792806798405183560189203963L;
    ld f = 1, g = x, fp = 0, gp = 1;
    ld tf = 1, tg = x, tfp = x * x / 2, tgp = 1;
    fp = tfp;
    for (int k = 1; k < 400; ++k) {
        tf *= x3 / ((3 * k - 1) * (3 * k));
        tg *= x3 / ((3 * k) * (3 * k + 1));
        if (k >= 2) tfp *= x3 / ((3 * k - 1) * (3 * k - 3));
        tgp *= x3 / ((3 * k) * (3 * k - 2));
        f += tf;
        g += tg;
        if (k >= 2) fp += tfp;
        gp += tgp;
        ld scale = std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp);
        if (std::abs(tf) + std::abs(tg) + std::abs(tfp) + std::abs(tgp) < 1e-21L * scale) break;
    }
    return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp)};
}

// u_k and v_k coefficients of the Airy asymptotic expansions.
struct AiryCoeffs {
    std::array<double, 40> u{}, v{};
    AiryCoeffs() {
        u[0] = v[0] = 1.0;
        for (int k = 1; k < 40; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
            v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
        }
    }
};
const AiryCoeffs& airy_coeffs() {
    static const AiryCoeffs c;
    return c;
}

}  // namespace

AiryValue airy(double x) {
    if (!(x >= -60.0 && x <= 20.0)) throw DomainError(fmt_domain("airy", x, 0));
    if (std::abs(x) <= 9.0) return airy_series(x);
    const auto& c = airy_coeffs();
    const double sqpi = std::sqrt(pi);
    if (x > 0) {
        const double z = 2.0 / 3.0 * x * std::sqrt(x);
        double su = 0, sv = 0, p = 1;
        for (int k = 0; k < 40; ++k) {
            double tu = c.u[k] * p, tv = c.v[k] * p;
            su += tu;
            sv += tv;
            if (std::abs(tu) < 1e-18 && std::abs(tv) < 1e-18) break;
            p *= -1.0 / z;
        }
        const double e = std::exp(-z);
        const double q = std::pow(x, 0.25);
        return {e / (2 * sqpi * q) * su, -q * e / (2 * sqpi) * sv};
    }
    const double ax = -x;
    const double z = 2.0 / 3.0 * ax * std::sqrt(ax);
    double ue = 0, uo = 0, ve = 0, vo = 0;
    double p = 1;
    for (int k = 0; k < 40; ++k) {
        // p = z^{-k}; even k carry (-1)^{k/2}, odd k carry (-1)^{(k-1)/2}.
        double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            ue += sgn * c.u[k] * p;
            ve += sgn * c.v[k] * p;
        } else {
            uo += sgn * c.u[k] * p;
            vo += sgn * c.v[k] * p;
        }
        if (c.u[k] * p < 1e-18 && std::abs(c.v[k]) * p < 1e-18) break;
        p /= z;
    }
    const double q = std::pow(ax, 0.25);
    const double ph = z - pi / 4;
    const double s = std::sin(ph), co = std::cos(ph);
    return {(co * ue + s * uo) / (sqpi * q), q / sqpi * (s * ve - co * vo)};
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError(fmt_domain("gamma_fn", x, 0));
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    if (x > 20.0) {
        // Stirling series in long double; the Lanczos sum loses digits this far out.
        using ld = long double;
        static constexpr std::array<ld, 8> b = {1.0L / 12,       -1.0L / 360,     1.0L / 1260,     -1.0L / 1680,
                                                1.0L / 1188,     -691.0L / 360360, 1.0L / 156,     -3617.0L / 122400};
        const ld z = x, z2 = z * z;
        ld corr = 0, p = z;
        for (ld c : b) {
            corr += c / p;
            p *= z2;
        }
        const ld lg = (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2.0L * std::numbers::pi_v<ld>) + corr;
        return static_cast<double>(std::exp(lg));
    }
    static constexpr std::array<double, 9> g = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    using ld = long double;
    const ld xm = static_cast<ld>(x) - 1.0L;
    ld a = g[0];
    const ld t = xm + 7.5L;
    for (int i = 1; i < 9; ++i) a += g[i] / (xm + i);
    const ld half = std::pow(t, 0.5L * (xm + 0.5L));
    return static_cast<double>(std::sqrt(2.0L * std::numbers::pi_v<long double>) * half * (half * std::exp(-t)) * a);
}

std::vector<double> legendre_sequence(int lmax, double x) {
    if (lmax < 0) throw DomainError("legendre_p: negative degree");
    if (!(x >= -1.0 && x <= 1.0)) throw DomainError(fmt_domain("legendre_p", lmax, x));
    std::vector<double> p(static_cast<std::size_t>(lmax) + 1);
    p[0] = 1.0;
    if (lmax >= 1) p[1] = x;
    for (int l = 1; l < lmax; ++l) p[l + 1] = ((2.0 * l + 1.0) * x * p[l] - l * p[l - 1]) / (l + 1.0);
    return p;
}

double legendre_p(int l, double x) { return legendre_sequence(l, x)[l]; }

cd hyp1f1_focus(double z) {
    if (!std::isfinite(z)) throw DomainError("hyp1f1_focus: non-finite argument");
    if (z < 0) return std::conj(hyp1f1_focus(-z));
    if (z <= 30.0) {
        using ld = long double;
        // sum_k (iz)^k / (k! (2k+1)) with Kahan compensation per component.
        ld re = 0, im = 0, cre = 0, cim = 0, a = 1;
        for (int k = 0; k < 400; ++k) {
            if (k > 0) a *= static_cast<ld>(z) / k;
            ld t = a / (2 * k + 1);
            ld dre = 0, dim = 0;
            switch (k % 4) {
                case 0: dre = t; break;
                case 1: dim = t; break;
                case 2: dre = -t; break;
                default: dim = -t; break;
            }
            ld y = dre - cre, s = re + y;
            cre = (s - re) - y;
            re = s;
            y = dim - cim;
            s = im + y;
            cim = (s - im) - y;
            im = s;
            if (k > z && t < 1e-22L) break;
        }
        return {static_cast<double>(re), static_cast<double>(im)};
    }
    // int_0^inf minus the tail int_1^inf, the latter expanded by repeated integration by parts.
    const cd head = 0.5 * std::sqrt(pi / z) * std::exp(I * (pi / 4));
    cd tail = 0.0, term_factor = I / z;
    double coeff = 1.0;  // binom(-1/2, k) * k!
    double prev = 1e300;
    for (int k = 0; k < 200; ++k) {
        cd t = coeff * term_factor;
        double mag = std::abs(t);
        if (mag > prev) break;
        tail += t;
        prev = mag;
        if (mag < 1e-18) break;
        coeff *= -(k + 0.5);
        term_factor *= I / z;
    }
    return head - 0.5 * std::exp(I * z) * tail;
}

}  // namespace kr
