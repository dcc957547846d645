#include "cyclores/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <quadmath.h>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/quadrature.hpp"

namespace cyclores {

namespace {

__extension__ typedef __float128 float128;

constexpr long double kLn2 = 0.693147180559945309417232121458L;
constexpr double kRescale = 0x1p500;   // renormalise mantissas beyond 2^500
constexpr long double kRescaleLog = 500 * kLn2;

void check_level(int s, const char* name) {
    if (s < 0) throw InvalidInput(std::string(name) + " must be non-negative");
}

void check_zeta(double zeta) {
    if (!std::isfinite(zeta)) throw InvalidInput("zeta must be finite");
    if (zeta < 0.0) throw InvalidInput("zeta must be non-negative");
}

// Mantissa/log-scale pair for the recurrences below: value = m * exp(log).
struct Scaled {
    float128 m = 0;
    float128 log = 0;

    float128 log_abs() const { return m == 0 ? -HUGE_VALQ : logq(fabsq(m)) + log; }
    double value() const {
        if (m == 0) return 0.0;
        return static_cast<double>(copysignq(expq(log_abs()), m));
    }
};

struct LogValueL {
    long double log_abs = 0.0L;
    int sign = 0;
};

LogValueL laguerre_log(int s, int s_prime, double zeta) {
    const int n = std::min(s, s_prime);
    const long double a = std::abs(s - s_prime);
    const long double x = zeta;
    if (x == 0.0L) return a == 0.0L ? LogValueL{0.0L, 1} : LogValueL{0.0L, 0};

    // l_k = sqrt(k!/(k+a)!) L_k^{(a)}(x), started from l_0 = 1/sqrt(a!).
    long double log_scale = -0.5L * std::lgamma(a + 1.0L);
    long double prev = 0.0L;
    long double cur = 1.0L;
    for (int k = 0; k < n; ++k) {
        const long double next = ((2.0L * k + 1.0L + a - x) * cur - std::sqrt(k * (k + a)) * prev) /
                                 std::sqrt((k + 1.0L) * (k + 1.0L + a));
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += kRescaleLog;
        }
    }
    if (cur == 0.0L) return {0.0L, 0};
    return {std::log(std::abs(cur)) + log_scale - 0.5L * x + 0.5L * a * std::log(x), cur > 0.0L ? 1 : -1};
}

}  // namespace

double hermite_function(int s, double xi) {
    check_level(s, "s");
    if (s > kMaxOscillatorLevel) throw InvalidInput("oscillator level above supported range");
    if (!std::isfinite(xi)) throw InvalidInput("coordinate must be finite");

    double log_scale = -0.5 * xi * xi - 0.25 * std::log(constants::pi);
    double prev = 0.0;
    double cur = 1.0;
    for (int n = 0; n < s; ++n) {
        const double next = std::sqrt(2.0 / (n + 1)) * xi * cur - std::sqrt(double(n) / (n + 1)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += kRescaleLog;
        }
    }
    return Scaled{cur, log_scale}.value();
}

double phi_eval(const OscillatorFunction& fn, double x) {
    if (!(fn.length_scale > 0.0) || !std::isfinite(fn.length_scale))
        throw InvalidInput("length scale must be positive");
    if (!std::isfinite(fn.center)) throw InvalidInput("center must be finite");
    return hermite_function(fn.s, (x - fn.center) / fn.length_scale) / std::sqrt(fn.length_scale);
}

double LogValue::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

LogValue laguerre_I_log(const LaguerreArgument& arg) {
    check_level(arg.s, "s");
    check_level(arg.s_prime, "s_prime");
    check_zeta(arg.zeta);
    const LogValueL v = laguerre_log(arg.s, arg.s_prime, arg.zeta);
    return {static_cast<double>(v.log_abs), v.sign};
}

double laguerre_I(const LaguerreArgument& arg) { return laguerre_I_log(arg).value(); }

LaguerreRow laguerre_row(int s, double zeta, double tail_cutoff) {
    check_level(s, "s");
    check_zeta(zeta);
    if (!(tail_cutoff > 0.0 && tail_cutoff < 1.0)) throw InvalidInput("tail cutoff must be in (0, 1)");

    LaguerreRow row{s, zeta, {}, {}};
    if (zeta == 0.0) {
        row.values.assign(s + 1, 0.0);
        row.values[s] = 1.0;
        row.squares.assign(s + 1, 0.0L);
        row.squares[s] = 1.0L;
        return row;
    }

    const double alpha = std::sqrt(zeta);
    const double root_s = std::sqrt(static_cast<double>(s));
    const double band = zeta + 10.0 * alpha;
    const double log_cutoff = std::log(tail_cutoff);

    // Last index that must be kept: beyond both the zeta_0 band and the cutoff.
    const int upper_turning = static_cast<int>(std::floor((root_s + alpha) * (root_s + alpha)));
    int keep = std::max(upper_turning, s) + 1;
    double step = std::max(4.0, std::ceil(std::sqrt(static_cast<double>(keep))));
    while (true) {
        const double d = std::sqrt(static_cast<double>(keep)) - root_s;
        if (d * d > band) {
            const LogValue v = laguerre_I_log({s, keep, zeta});
            if (v.sign == 0 || v.log_abs < log_cutoff) break;
        }
        keep += static_cast<int>(step);
        step *= 1.5;
    }
    const int top = keep + 16 + static_cast<int>(std::ceil(2.0 * std::cbrt(static_cast<double>(keep))));

    // Matching window just below the upper turning point, kept above the lower one.
    const int w_hi = std::min(upper_turning, top);
    int w_lo = std::max(0, w_hi - 24);
    if (root_s > alpha) {
        const int lower_turning = static_cast<int>(std::ceil((root_s - alpha) * (root_s - alpha)));
        w_lo = std::max(w_lo, std::min(lower_turning, w_hi));
    }

    // M_m = <m|D(alpha)|s> obeys
    //   alpha sqrt(m+1) M_{m+1} = (m - s + zeta) M_m - alpha sqrt(m) M_{m-1}.
    // Both sweeps run in quad precision so that rows with s ~ 1e4 stay unitary to
    // the last bit of a double.
    const float128 z = zeta;
    const float128 al = sqrtq(z);
    const float128 rescale = kRescale;
    const float128 rescale_log = 500 * logq(float128(2));

    std::vector<Scaled> fwd(w_hi + 1);
    {
        float128 log_scale = -z / 2 + s * logq(al) - lgammaq(float128(s) + 1) / 2;
        float128 prev = 0;
        float128 cur = (s % 2 == 0) ? 1 : -1;
        fwd[0] = {cur, log_scale};
        for (int m = 0; m < w_hi; ++m) {
            const float128 next = ((m - s + z) * cur - al * sqrtq(float128(m)) * prev) / (al * sqrtq(float128(m + 1)));
            prev = cur;
            cur = next;
            if (fabsq(cur) > rescale) {
                cur /= rescale;
                prev /= rescale;
                log_scale += rescale_log;
            }
            fwd[m + 1] = {cur, log_scale};
        }
    }

    std::vector<Scaled> bwd(top - w_lo + 1);
    {
        float128 log_scale = 0;
        float128 next = 0;
        float128 cur = 1;
        bwd[top - w_lo] = {cur, log_scale};
        for (int m = top; m > w_lo; --m) {
            const float128 prev = ((m - s + z) * cur - al * sqrtq(float128(m + 1)) * next) / (al * sqrtq(float128(m)));
            next = cur;
            cur = prev;
            if (fabsq(cur) > rescale) {
                cur /= rescale;
                next /= rescale;
                log_scale += rescale_log;
            }
            bwd[m - 1 - w_lo] = {cur, log_scale};
        }
    }

    // Least-squares scale of the backward sweep onto the forward one.
    float128 ref_f = -HUGE_VALQ;
    float128 ref_b = -HUGE_VALQ;
    for (int m = w_lo; m <= w_hi; ++m) {
        ref_f = fmaxq(ref_f, fwd[m].log_abs());
        ref_b = fmaxq(ref_b, bwd[m - w_lo].log_abs());
    }
    float128 fb = 0;
    float128 bb = 0;
    for (int m = w_lo; m <= w_hi; ++m) {
        const float128 f = copysignq(expq(fwd[m].log_abs() - ref_f), fwd[m].m);
        const float128 b = copysignq(expq(bwd[m - w_lo].log_abs() - ref_b), bwd[m - w_lo].m);
        fb += f * b;
        bb += b * b;
    }
    if (!(bb > 0)) throw Error("Laguerre row matching failed: empty overlap window");
    const float128 scale = fb / bb;

    row.values.resize(keep + 1);
    row.squares.resize(keep + 1);
    for (int m = 0; m <= keep; ++m) {
        Scaled v = fwd[std::min(m, w_hi)];
        if (m > w_hi) {
            const Scaled& b = bwd[m - w_lo];
            v = Scaled{b.m * scale, b.log - ref_b + ref_f};
        }
        // <m|D|s> carries (-1)^{s-m} relative to I_{s m} below the diagonal.
        if (m < s && (s - m) % 2 == 1) v.m = -v.m;
        row.values[m] = v.value();
        row.squares[m] = v.m == 0 ? 0.0L : static_cast<long double>(expq(2 * v.log_abs()));
    }
    return row;
}

OverlapOracle overlap_oracle(int s, int s_prime, double k, double b, double b_prime, double a) {
    check_level(s, "s");
    check_level(s_prime, "s_prime");
    if (s > kMaxOracleLevel || s_prime > kMaxOracleLevel)
        throw InvalidInput("overlap oracle supports levels up to " + std::to_string(kMaxOracleLevel));
    for (double v : {k, b, b_prime, a})
        if (!std::isfinite(v)) throw InvalidInput("overlap oracle arguments must be finite");
    if (!(a > 0.0)) throw InvalidInput("length scale must be positive");

    // In xi = x / a the integrand is e^{-i q xi} psi_s(xi + u) psi_s'(xi + u').
    const double q = k * a;
    const double u = a * b;
    const double u_p = a * b_prime;
    const double radius = std::sqrt(2.0 * std::max(s, s_prime) + 1.0) + 10.0;
    const double lo = std::min(-u, -u_p) - radius;
    const double hi = std::max(-u, -u_p) + radius;

    auto integrand = [&](double xi) {
        const double amp = hermite_function(s, xi + u) * hermite_function(s_prime, xi + u_p);
        return amp * std::complex<double>(std::cos(q * xi), -std::sin(q * xi));
    };
    quad::Options opt;
    opt.abs_tol = 1e-13;
    const double wavenumber = std::abs(q) + std::sqrt(2.0 * std::max(s, s_prime) + 1.0);
    opt.initial_panels = static_cast<std::size_t>(std::max(16.0, std::ceil((hi - lo) * wavenumber / 2.0)));
    const auto r = quad::integrate(integrand, lo, hi, opt);
    if (!r.converged)
        throw QuadratureError("overlap quadrature did not reach 1e-13", r.error);

    OverlapOracle out;
    out.quadrature = r.value;
    out.quadrature_error = r.error;
    out.zeta = 0.5 * (q * q + (u - u_p) * (u - u_p));
    out.mu = 0.5 * k * a * a * (b + b_prime);
    out.lambda = std::atan2(k, b_prime - b);
    const double magnitude = laguerre_I({s, s_prime, out.zeta});
    const double phase = out.mu + (s - s_prime) * out.lambda;
    out.analytic = magnitude * std::complex<double>(std::cos(phase), std::sin(phase));
    return out;
}

}  // namespace cyclores
