#include "cyclores/quadrature.hpp"

#include <cmath>

#include "cyclores/constants.hpp"

namespace cyclores::quad {

namespace {

constexpr int N = ChebyshevPanel::kOrder;

// cos(k * theta_j) with theta_j = pi j / N, for k = 0..N+1.
struct CosineTable {
    std::array<std::array<double, N + 2>, N + 1> v{};
    CosineTable() {
        for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N + 1; ++k)
                v[j][k] = std::cos(constants::pi * j * k / N);
    }
};

const CosineTable& cosines() {
    static const CosineTable table;
    return table;
}

// Chebyshev coefficients a_k of the interpolant through samples at the
// ascending nodes x_j = -cos(theta_j).
std::array<std::complex<double>, N + 1> coefficients(std::span<const std::complex<double>> f) {
    const auto& cs = cosines().v;
    std::array<std::complex<double>, N + 1> a{};
    for (int k = 0; k <= N; ++k) {
        std::complex<double> sum{};
        for (int j = 0; j <= N; ++j) {
            const double w = (j == 0 || j == N) ? 0.5 : 1.0;
            sum += w * f[j] * cs[j][k];
        }
        sum *= 2.0 / N;
        if (k == 0 || k == N) sum *= 0.5;
        a[k] = (k % 2 == 0) ? sum : -sum;
    }
    return a;
}

}  // namespace

ChebyshevPanel::ChebyshevPanel(double a, double b) : a_(a), b_(b) {
    const auto& cs = cosines().v;
    for (int j = 0; j <= N; ++j) nodes_[j] = 0.5 * (a + b) - 0.5 * (b - a) * cs[j][1];
    nodes_[0] = a;
    nodes_[N] = b;
}

std::array<std::complex<double>, ChebyshevPanel::kNodes> ChebyshevPanel::cumulative(
    std::span<const std::complex<double>> samples) const {
    const auto a = coefficients(samples);
    auto coef = [&a](int k) { return k <= N ? a[k] : std::complex<double>{}; };

    std::array<std::complex<double>, N + 2> B{};
    B[1] = a[0] - 0.5 * coef(2);
    for (int k = 2; k <= N + 1; ++k) B[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k);
    std::complex<double> at_left{};
    for (int k = 1; k <= N + 1; ++k) at_left += (k % 2 == 0) ? B[k] : -B[k];
    B[0] = -at_left;

    const auto& cs = cosines().v;
    const double half = 0.5 * (b_ - a_);
    std::array<std::complex<double>, kNodes> out{};
    for (int j = 0; j <= N; ++j) {
        std::complex<double> sum{};
        for (int k = 0; k <= N + 1; ++k) sum += ((k % 2 == 0) ? B[k] : -B[k]) * cs[j][k];
        out[j] = half * sum;
    }
    out[0] = 0.0;
    return out;
}

double ChebyshevPanel::tail(std::span<const std::complex<double>> samples) const {
    const auto a = coefficients(samples);
    return std::abs(a[N]) + std::abs(a[N - 1]);
}

}  // namespace cyclores::quad
