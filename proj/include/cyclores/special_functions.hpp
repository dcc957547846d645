#pragma once

// Landau eigenfunctions (Hermite functions) and the Laguerre functions
// I_{ss'}(zeta) that give the overlap of displaced oscillator states.

#include <complex>
#include <vector>

namespace cyclores {

/// Landau eigenfunction Phi_s centred on the guiding centre.
struct OscillatorFunction {
    int s = 0;
    double length_scale = 1.0;  // magnetic length l_B, cm
    double center = 0.0;        // guiding centre c p_y / (|e| H0), cm
};

inline constexpr int kMaxOscillatorLevel = 100000;

/// Unit-normalised Hermite function psi_s(xi), int psi_s^2 dxi = 1.
///
/// Upward three-term recurrence on the normalised functions with a running
/// power-of-two exponent, so neither the polynomial nor the Gaussian factor can
/// overflow. Values below the double range come back as 0.
double hermite_function(int s, double xi);

/// Phi_s(x) = psi_s((x - center)/l_B) / sqrt(l_B), in cm^(-1/2).
double phi_eval(const OscillatorFunction& fn, double x);

struct LaguerreArgument {
    int s = 0;
    int s_prime = 0;
    double zeta = 0.0;
};

/// Signed value held as sign * exp(log_abs); sign == 0 means exactly zero.
struct LogValue {
    double log_abs = 0.0;
    int sign = 0;

    double value() const;
};

/// I_{ss'}(zeta) = sqrt(s!/s'!) e^{-zeta/2} zeta^{(s'-s)/2} L_s^{(s'-s)}(zeta) for
/// s' >= s, and the same expression with the indices swapped otherwise.
///
/// Uses the degree recurrence for the normalised Laguerre polynomial
/// sqrt(k!/(k+a)!) L_k^{(a)} with log-gamma prefactors: O(min(s, s')) work,
/// no factorials anywhere.
double laguerre_I(const LaguerreArgument& arg);
LogValue laguerre_I_log(const LaguerreArgument& arg);

/// I_{s s'}(zeta) for every s' in [0, values.size()).
struct LaguerreRow {
    int s = 0;
    double zeta = 0.0;
    std::vector<double> values;
    std::vector<long double> squares;  // I^2 before rounding to double

    double operator[](int s_prime) const {
        return s_prime >= 0 && s_prime < static_cast<int>(values.size()) ? values[s_prime] : 0.0;
    }
    int last() const { return static_cast<int>(values.size()) - 1; }
};

/// Whole row of I_{ss'} in O(width) from the ladder recurrence in s'.
///
/// Forward recurrence from s' = 0 is stable through the lower forbidden region
/// and the oscillatory band; a Miller-type backward sweep from beyond the upper
/// turning point (sqrt(s) + sqrt(zeta))^2 covers the decaying tail. The two are
/// matched by least squares on an overlap window. The row extends until
/// |I| < tail_cutoff and (sqrt(s') - sqrt(s))^2 > zeta + 10 sqrt(zeta).
LaguerreRow laguerre_row(int s, double zeta, double tail_cutoff = 1e-20);

struct OverlapOracle {
    std::complex<double> quadrature;  // direct numerical integral
    double quadrature_error = 0.0;    // achieved error estimate
    std::complex<double> analytic;    // e^{i(mu + (s - s') lambda)} I_{ss'}(zeta)
    double zeta = 0.0;
    double mu = 0.0;
    double lambda = 0.0;
};

inline constexpr int kMaxOracleLevel = 60;

/// Brute-force check of the displaced-overlap identity
///   int e^{-ikx} Phi_s(x/a + a b) Phi_{s'}(x/a + a b') dx
///     = e^{i(mu + (s - s') lambda)} I_{ss'}(zeta),
/// mu = k a^2 (b + b')/2, lambda = atan2(k, b' - b), zeta = a^2 (k^2 + (b - b')^2)/2,
/// with Phi including the 1/sqrt(a) normalisation. Integrated by adaptive G7-K15
/// to 1e-13 absolute over the union of both functions' supports widened by
/// sqrt(2 max(s, s') + 1) + 10 oscillator lengths. The phase branch of lambda
/// is implementation defined; compare magnitudes.
OverlapOracle overlap_oracle(int s, int s_prime, double k, double b, double b_prime,
                             double a = 1.0);

}  // namespace cyclores
