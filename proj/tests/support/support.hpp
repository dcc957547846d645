#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace testing {

// Reference constants typed in independently of the library header.
namespace ref {
inline constexpr long double c = 29979245800.0L;
inline constexpr long double hbar = 1.054571817e-27L;
inline constexpr long double e = 1.602176634e-19L * 2997924580.0L;  // C -> esu
inline constexpr long double m_e = 9.1093837015e-28L;
inline constexpr long double eV = 1.602176634e-12L;
inline constexpr long double pi = 3.141592653589793238462643383279502884L;
}  // namespace ref

// Deterministic generator for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    int integer(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }
    bool coin() { return integer(0, 1) == 1; }

private:
    std::mt19937_64 engine_;
};

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Composite trapezoid rule; spectrally accurate for smooth integrands that decay
// to zero at both ends.
template <class F>
long double trapezoid(const F& f, double lo, double hi, int n) {
    const long double h = (static_cast<long double>(hi) - lo) / n;
    long double sum = 0.5L * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) sum += f(static_cast<double>(lo + i * h));
    return sum * h;
}

}  // namespace testing
