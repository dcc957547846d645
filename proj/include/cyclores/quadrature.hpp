#pragma once

// Adaptive Gauss-Kronrod integration and Chebyshev-Lobatto panels for
// cumulative (indefinite) integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cyclores::quad {

struct Options {
    double abs_tol = 1e-13;
    double rel_tol = 0.0;
    std::size_t initial_panels = 1;
    std::size_t max_panels = 200000;
};

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK abscissae).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
};

template <class T, class F>
Panel<T> gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const T sum = f(center - dx) + f(center + dx);
        kronrod += sum * kWgk[j];
        if (j % 2 == 1) gauss += sum * kWg[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive G7-K15 integration of f over [a, b]. Each sweep bisects every
/// panel whose error estimate exceeds its share of the target
/// max(abs_tol, rel_tol * |I|); stops when the summed estimate meets the
/// target or max_panels is reached (converged = false).
template <class F>
auto integrate(const F& f, double a, double b, const Options& opt = {}) {
    using T = std::decay_t<decltype(f(a))>;
    using Panel = detail::Panel<T>;

    std::vector<Panel> panels;
    const std::size_t n0 = std::max<std::size_t>(1, opt.initial_panels);
    for (std::size_t i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * static_cast<double>(i) / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * static_cast<double>(i + 1) / n0;
        panels.push_back(detail::gk15<T>(f, lo, hi));
    }

    Result<T> res;
    std::vector<Panel> next;
    while (true) {
        T value{};
        double error = 0.0;
        double worst = 0.0;
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
            worst = std::max(worst, p.error);
        }
        res.value = value;
        res.error = error;
        res.panels = panels.size();
        const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value));
        if (error <= target) {
            res.converged = true;
            break;
        }
        if (panels.size() >= opt.max_panels) break;

        const double share = std::min(worst, target / static_cast<double>(panels.size()));
        next.clear();
        for (const auto& p : panels) {
            const double mid = 0.5 * (p.a + p.b);
            if (p.error >= share && mid > p.a && mid < p.b) {
                next.push_back(detail::gk15<T>(f, p.a, mid));
                next.push_back(detail::gk15<T>(f, mid, p.b));
            } else {
                next.push_back(p);
            }
        }
        if (next.size() == panels.size()) break;  // nothing left to split
        panels.swap(next);
    }
    return res;
}

/// Chebyshev-Lobatto panel of fixed order on [a, b].
///
/// Samples taken at nodes() are turned into a Chebyshev series; cumulative()
/// returns the running integral from a to every node (exact for polynomials of
/// degree <= order) and tail() the magnitude of the two highest coefficients,
/// used as the resolution test.
class ChebyshevPanel {
public:
    static constexpr int kOrder = 16;
    static constexpr int kNodes = kOrder + 1;

    ChebyshevPanel(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    std::array<std::complex<double>, kNodes> cumulative(
        std::span<const std::complex<double>> samples) const;
    double tail(std::span<const std::complex<double>> samples) const;

private:
    double a_, b_;
    std::array<double, kNodes> nodes_{};
};

}  // namespace cyclores::quad
