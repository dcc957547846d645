#include "cyclores/pulse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/quadrature.hpp"

namespace cyclores {

namespace {

namespace k = constants;
using cplx = std::complex<double>;

constexpr double kGaussianHalfWidth = 9.5;  // in sigma; exp(-9.5^2/2) ~ 2.5e-20
constexpr double kClosedEnds = 1e-9;        // sampled end values relative to the peak
constexpr double kMinDoppler = 1e-12;
constexpr int kPointsPerPeriod = 20;

void require(bool ok, const char* what) {
    if (!ok) throw InvalidInput(what);
}

double sin2(double x) {
    const double v = std::sin(x);
    return v * v;
}

// Ingredients of the reduced phase integrand, fixed for one drift computation.
struct PhaseModel {
    double q;        // signed charge
    double H0;
    double E_tilde;  // E_par (1 - n v_z/c)
    double g;
    double omega;

    // Q(tau) for envelope value A and slowly varying khat = e^{-i g w tau} K.
    double operator()(double A, cplx khat, cplx khat_dot) const {
        const double qc = q / k::c;
        const double v2 = qc * qc * std::norm(g * A - k::hbar * H0 * khat);
        const double cross = -g * omega * std::norm(khat) - std::imag(std::conj(khat) * khat_dot);
        return k::c * k::c / (2.0 * E_tilde) *
               (v2 - q * E_tilde * k::hbar * k::hbar * H0 / (k::c * k::c * k::c) * cross);
    }
};

}  // namespace

PulseEnvelope PulseEnvelope::flat_top(double amplitude, double duration, double ramp, double start) {
    require(std::isfinite(amplitude) && amplitude >= 0.0, "envelope amplitude must be finite and >= 0");
    require(std::isfinite(duration) && duration > 0.0, "envelope duration must be positive");
    require(std::isfinite(ramp) && ramp >= 0.0, "envelope ramp must be >= 0");
    require(2.0 * ramp <= duration, "envelope ramps must satisfy 2 * ramp <= duration");
    require(std::isfinite(start), "envelope start must be finite");
    PulseEnvelope env;
    env.kind_ = Kind::FlatTopRamped;
    env.amplitude_ = amplitude;
    env.duration_ = duration;
    env.ramp_ = ramp;
    env.start_ = start;
    return env;
}

PulseEnvelope PulseEnvelope::gaussian(double amplitude, double duration, double start) {
    require(std::isfinite(amplitude) && amplitude >= 0.0, "envelope amplitude must be finite and >= 0");
    require(std::isfinite(duration) && duration > 0.0, "envelope duration must be positive");
    require(std::isfinite(start), "envelope start must be finite");
    PulseEnvelope env;
    env.kind_ = Kind::Gaussian;
    env.amplitude_ = amplitude;
    env.duration_ = duration;
    env.start_ = start;
    return env;
}

PulseEnvelope PulseEnvelope::sampled(std::vector<EnvelopeSample> samples) {
    require(samples.size() >= 2, "sampled envelope needs at least two samples");
    double peak = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        require(std::isfinite(samples[i].tau) && std::isfinite(samples[i].A),
                "sampled envelope values must be finite");
        require(samples[i].A >= 0.0, "sampled envelope amplitudes must be >= 0");
        if (i > 0) require(samples[i].tau > samples[i - 1].tau, "sampled envelope times must increase strictly");
        peak = std::max(peak, samples[i].A);
    }
    require(samples.front().A <= kClosedEnds * peak && samples.back().A <= kClosedEnds * peak,
            "sampled envelope must switch on and off adiabatically (A -> 0 at both ends)");
    PulseEnvelope env;
    env.kind_ = Kind::Sampled;
    env.amplitude_ = peak;
    env.start_ = samples.front().tau;
    env.duration_ = samples.back().tau - samples.front().tau;
    env.samples_ = std::move(samples);
    return env;
}

double PulseEnvelope::operator()(double tau) const {
    switch (kind_) {
        case Kind::FlatTopRamped: {
            const double t0 = start_ - 0.5 * ramp_;
            const double t3 = start_ + duration_ + 0.5 * ramp_;
            if (tau < t0 || tau > t3) return 0.0;
            if (ramp_ == 0.0) return amplitude_;
            const double t1 = t0 + ramp_;
            const double t2 = t3 - ramp_;
            if (tau < t1) return amplitude_ * sin2(0.5 * k::pi * (tau - t0) / ramp_);
            if (tau > t2) return amplitude_ * sin2(0.5 * k::pi * (t3 - tau) / ramp_);
            return amplitude_;
        }
        case Kind::Gaussian: {
            const double sigma = duration_ / std::sqrt(2.0 * k::pi);
            const double x = (tau - (start_ + 0.5 * duration_)) / sigma;
            if (std::abs(x) > kGaussianHalfWidth) return 0.0;
            return amplitude_ * std::exp(-0.5 * x * x);
        }
        case Kind::Sampled: {
            if (tau < samples_.front().tau || tau > samples_.back().tau) return 0.0;
            const auto it = std::upper_bound(samples_.begin(), samples_.end(), tau,
                [](double t, const EnvelopeSample& s) { return t < s.tau; });
            if (it == samples_.end()) return samples_.back().A;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (tau - lo.tau) / (hi.tau - lo.tau);
            return lo.A + w * (hi.A - lo.A);
        }
    }
    return 0.0;
}

std::pair<double, double> PulseEnvelope::support() const {
    switch (kind_) {
        case Kind::FlatTopRamped:
            return {start_ - 0.5 * ramp_, start_ + duration_ + 0.5 * ramp_};
        case Kind::Gaussian: {
            const double sigma = duration_ / std::sqrt(2.0 * k::pi);
            const double center = start_ + 0.5 * duration_;
            return {center - kGaussianHalfWidth * sigma, center + kGaussianHalfWidth * sigma};
        }
        case Kind::Sampled:
            return {samples_.front().tau, samples_.back().tau};
    }
    return {0.0, 0.0};
}

std::vector<double> PulseEnvelope::breakpoints() const {
    std::vector<double> pts;
    const auto [lo, hi] = support();
    switch (kind_) {
        case Kind::FlatTopRamped:
            pts = {lo, lo + ramp_, hi - ramp_, hi};
            break;
        case Kind::Gaussian:
            pts = {lo, start_ + 0.5 * duration_, hi};
            break;
        case Kind::Sampled:
            for (const auto& s : samples_) pts.push_back(s.tau);
            break;
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double PulseEnvelope::area() const {
    if (kind_ != Kind::Sampled) return amplitude_ * duration_;
    double sum = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i)
        sum += 0.5 * (samples_[i].A + samples_[i - 1].A) * (samples_[i].tau - samples_[i - 1].tau);
    return sum;
}

double PulseEnvelope::max_spacing() const {
    double h = 0.0;
    for (std::size_t i = 1; i < samples_.size(); ++i)
        h = std::max(h, samples_[i].tau - samples_[i - 1].tau);
    return h;
}

PulseEnvelope PulseEnvelope::shifted(double dt) const {
    require(std::isfinite(dt), "time shift must be finite");
    PulseEnvelope env = *this;
    env.start_ += dt;
    for (auto& s : env.samples_) s.tau += dt;
    return env;
}

PulseEnvelope PulseEnvelope::scaled(double factor) const {
    require(std::isfinite(factor) && factor >= 0.0, "amplitude factor must be finite and >= 0");
    PulseEnvelope env = *this;
    env.amplitude_ *= factor;
    for (auto& s : env.samples_) s.A *= factor;
    return env;
}

double retarded_duration(double T, const DerivedScales& scales) {
    return T * std::abs(scales.doppler_factor);
}

PulseEnvelope flat_top_for(const FieldConfig& f, const DerivedScales& scales, double ramp_fraction) {
    const double duration = retarded_duration(f.T, scales);
    return PulseEnvelope::flat_top(f.A_bar, duration, ramp_fraction * duration);
}

std::vector<DriftState> drift_integral(const ParticleState& p, const PulseEnvelope& env,
                                       const FieldConfig& f, const DerivedScales& scales,
                                       std::span<const double> tau_grid,
                                       const DriftOptions& options) {
    validate(p);
    validate(f);
    for (double t : tau_grid)
        if (!std::isfinite(t)) throw InvalidInput("tau grid values must be finite");
    if (!(options.rel_tol > 0.0)) throw InvalidInput("relative tolerance must be positive");
    if (std::abs(scales.doppler_factor) <= kMinDoppler)
        throw CherenkovDegenerate("E - c n p_z vanishes: drift integral undefined");
    if (env.kind() == PulseEnvelope::Kind::Sampled) {
        const double limit = 2.0 * k::pi / (kPointsPerPeriod * std::abs(scales.omega_prime));
        if (env.max_spacing() > limit)
            throw InvalidInput("sampled envelope must resolve the carrier with at least 20 points per 2 pi / |w'|");
    }

    const double q = p.signed_charge();
    const double g = sign(f.g);
    const double E_tilde = scales.E_par * scales.doppler_factor;
    const double Omega_tilde = q * k::c * f.H0 / E_tilde;
    const double Delta = g * f.omega + Omega_tilde;
    const cplx C = cplx(0.0, g * q * k::c / (k::hbar * E_tilde));
    const PhaseModel model{q, f.H0, E_tilde, g, f.omega};

    const auto [ts, te] = env.support();
    auto khat_at = [&](double tau, cplx J) {
        return -C * std::exp(cplx(0.0, -Delta * (tau - ts))) * J;
    };
    // e^{i Delta (t - ts)} as a panel constant times a local factor.
    auto carrier = [&](double lo, double t) {
        return std::exp(cplx(0.0, Delta * (lo - ts))) * std::exp(cplx(0.0, Delta * (t - lo)));
    };

    // Knots: envelope breakpoints plus requested times inside the support.
    std::vector<double> knots = env.breakpoints();
    for (double t : tau_grid)
        if (t > ts && t < te) knots.push_back(t);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const double span = te - ts;
    const double max_len = (Delta != 0.0) ? std::min(span, k::pi / std::abs(Delta)) : span;
    const double min_len = std::max(1e-13 * span,
        1e3 * std::numeric_limits<double>::epsilon() * std::max(std::abs(ts), std::abs(te)));
    const double tol_drift = 1e-2 * options.rel_tol * env.amplitude();

    // Cumulative values at knots, filled by one ordered sweep.
    std::vector<cplx> J_knot(knots.size());
    std::vector<double> phase_knot(knots.size());
    cplx J = 0.0;
    double phase = 0.0;
    double q_scale = 0.0;
    std::size_t panels = 0;

    std::array<cplx, quad::ChebyshevPanel::kNodes> g1{};
    std::array<cplx, quad::ChebyshevPanel::kNodes> qv{};
    std::array<cplx, quad::ChebyshevPanel::kNodes> rot{};
    std::array<double, quad::ChebyshevPanel::kNodes> amp{};

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const int pieces = static_cast<int>(std::ceil((b - a) / max_len));
        std::vector<std::pair<double, double>> stack;
        for (int j = pieces - 1; j >= 0; --j) {
            const double lo = a + (b - a) * j / pieces;
            const double hi = (j == pieces - 1) ? b : a + (b - a) * (j + 1) / pieces;
            stack.emplace_back(lo, hi);
        }
        while (!stack.empty()) {
            const auto [lo, hi] = stack.back();
            stack.pop_back();
            if (++panels > options.max_panels)
                throw QuadratureError("drift integral exceeded its panel budget", tol_drift);

            const quad::ChebyshevPanel panel(lo, hi);
            const auto t = panel.nodes();
            for (int j = 0; j < quad::ChebyshevPanel::kNodes; ++j) {
                amp[j] = env(t[j]);
                rot[j] = carrier(lo, t[j]);
                g1[j] = amp[j] * rot[j];
            }
            auto split = [&](double achieved) {
                if (hi - lo <= min_len)
                    throw QuadratureError("drift integral panel collapsed below resolution", achieved);
                const double mid = 0.5 * (lo + hi);
                stack.emplace_back(mid, hi);
                stack.emplace_back(lo, mid);
            };
            const double tail1 = panel.tail(g1);
            if (tail1 > tol_drift) {
                split(tail1);
                continue;
            }
            const auto cum1 = panel.cumulative(g1);
            double q_max = q_scale;
            for (int j = 0; j < quad::ChebyshevPanel::kNodes; ++j) {
                const cplx kh = -C * std::conj(rot[j]) * (J + cum1[j]);
                const cplx kh_dot = cplx(0.0, -Delta) * kh - C * amp[j];
                qv[j] = model(amp[j], kh, kh_dot);
                q_max = std::max(q_max, std::abs(qv[j]));
            }
            const double tail2 = panel.tail(qv);
            if (tail2 > 1e-2 * options.rel_tol * q_max) {
                split(tail2 / std::max(q_max, std::numeric_limits<double>::min()));
                continue;
            }
            const auto cum2 = panel.cumulative(qv);
            J += cum1.back();
            phase += cum2.back().real() / k::hbar;
            q_scale = q_max;
        }
        J_knot[i + 1] = J;
        phase_knot[i + 1] = phase;
    }

    // After the pulse |khat| is frozen and Q is constant.
    const cplx khat_end = khat_at(te, J);
    const double q_after = model(0.0, khat_end, cplx(0.0, -Delta) * khat_end);

    std::vector<DriftState> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        DriftState st;
        st.tau = tau;
        st.amplitude = env(tau);
        st.after_pulse = tau >= te;
        if (tau <= ts) {
            st.K = 0.0;
            st.phase_Q = 0.0;
        } else {
            cplx Jt;
            double ph;
            if (tau >= te) {
                Jt = J;
                ph = phase + q_after * (tau - te) / k::hbar;
            } else {
                const auto idx = static_cast<std::size_t>(
                    std::lower_bound(knots.begin(), knots.end(), tau) - knots.begin());
                Jt = J_knot[idx];
                ph = phase_knot[idx];
            }
            st.K = std::exp(cplx(0.0, g * f.omega * tau)) * khat_at(tau, Jt);
            st.phase_Q = ph;
        }
        out.push_back(st);
    }
    return out;
}

double asymptotic_displacement(std::span<const DriftState> states, double l_B) {
    if (states.empty()) throw InvalidInput("no drift states given");
    if (!(l_B > 0.0) || !std::isfinite(l_B)) throw InvalidInput("magnetic length must be positive");
    const auto last = std::max_element(states.begin(), states.end(),
        [](const DriftState& a, const DriftState& b) { return a.tau < b.tau; });
    if (!last->after_pulse)
        throw EnvelopeNotClosed("displacement is only defined after the envelope has switched off");
    const double shift = k::hbar * std::abs(last->K);
    return shift * shift / (2.0 * l_B * l_B);
}

double resonant_drift_magnitude(const ParticleState& p, const FieldConfig& f,
                                const DerivedScales& scales) {
    return p.charge * f.A_bar * k::c * f.T / (k::hbar * scales.E_par);
}

std::vector<double> support_grid(const PulseEnvelope& env, std::size_t count) {
    if (count == 0) throw InvalidInput("grid needs at least one point");
    const auto [lo, hi] = env.support();
    if (count == 1) return {hi};
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = (i + 1 == count) ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return grid;
}

}  // namespace cyclores
