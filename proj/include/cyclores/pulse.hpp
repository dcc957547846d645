#pragma once

// Pulse envelopes, the eikonal drift integral K(tau) and the accumulated
// phase for a circularly polarised wave in a medium.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclores/core.hpp"

namespace cyclores {

struct EnvelopeSample {
    double tau = 0.0;  // s
    double A = 0.0;    // G cm
};

/// Time profile A(tau) of the vector-potential amplitude in retarded time
/// tau = t - n z / c.
///
/// Every kind is normalised so that int A dtau = amplitude * duration:
///  - FlatTopRamped: half-amplitude points at start and start + duration,
///    sin^2 ramps of length `ramp` centred on them.
///  - Gaussian: peak `amplitude` at start + duration/2, sigma = duration/sqrt(2 pi),
///    truncated at +-9.5 sigma.
///  - Sampled: linear interpolation of samples, zero outside.
class PulseEnvelope {
public:
    enum class Kind { FlatTopRamped, Gaussian, Sampled };

    static PulseEnvelope flat_top(double amplitude, double duration, double ramp, double start = 0.0);
    static PulseEnvelope gaussian(double amplitude, double duration, double start = 0.0);
    static PulseEnvelope sampled(std::vector<EnvelopeSample> samples);

    double operator()(double tau) const;

    Kind kind() const noexcept { return kind_; }
    double amplitude() const noexcept { return amplitude_; }
    double duration() const noexcept { return duration_; }
    double ramp() const noexcept { return ramp_; }
    double start() const noexcept { return start_; }
    std::span<const EnvelopeSample> samples() const noexcept { return samples_; }

    /// Closed interval outside which A is exactly zero.
    std::pair<double, double> support() const;
    /// Points where A or its low derivatives are not smooth, including the support ends.
    std::vector<double> breakpoints() const;
    /// int A dtau.
    double area() const;
    /// Largest sample spacing for Sampled envelopes, 0 otherwise.
    double max_spacing() const;

    PulseEnvelope shifted(double dt) const;
    PulseEnvelope scaled(double factor) const;

private:
    PulseEnvelope() = default;

    Kind kind_ = Kind::FlatTopRamped;
    double amplitude_ = 0.0;
    double duration_ = 0.0;
    double ramp_ = 0.0;
    double start_ = 0.0;
    std::vector<EnvelopeSample> samples_;
};

/// Envelope duration in retarded time for a coherent interaction time T measured
/// along the particle trajectory: dtau/dt = 1 - n v_z / c.
double retarded_duration(double T, const DerivedScales& scales);

/// Flat-top envelope carrying the field's A_bar and T, with ramp = ramp_fraction * duration.
PulseEnvelope flat_top_for(const FieldConfig& f, const DerivedScales& scales, double ramp_fraction);

/// Reads a two-column CSV with header `tau_seconds,A_gauss_cm`.
std::vector<EnvelopeSample> read_envelope_csv(std::istream& in);
std::vector<EnvelopeSample> read_envelope_csv_file(const std::string& path);

struct DriftState {
    double tau = 0.0;
    std::complex<double> K;   // K_x + i K_y; hbar K is the guiding-centre shift in cm
    double phase_Q = 0.0;     // int Q dtau' / hbar, rad
    double amplitude = 0.0;   // A(tau)
    bool after_pulse = false; // tau at or beyond the end of the envelope support
};

struct DriftOptions {
    double rel_tol = 1e-9;
    std::size_t max_panels = 4'000'000;
};

/// K(tau) and the accumulated phase on tau_grid (any order; output follows it).
///
/// With the circular wave A_x + i A_y = i g A(tau) e^{i g w tau} the integrand of
/// the drift integral reduces to A(tau) e^{i Delta tau}, Delta = g w + q c H0 / E~,
/// E~ = E_par (1 - n v_z/c). It is integrated on adaptive Chebyshev-Lobatto panels
/// no longer than half a detuning period, split at envelope breakpoints and grid
/// points, refined until the highest series coefficients fall below rel_tol/100 of
/// the envelope peak. The phase integrand Q is built from the same nodes, so both
/// quantities come from one left-to-right sweep.
///
/// Throws CherenkovDegenerate when |1 - n v_z/c| <= 1e-12, InvalidInput for a
/// Sampled envelope coarser than 20 points per 2 pi / |w'|, and QuadratureError
/// when the panel budget is exhausted.
std::vector<DriftState> drift_integral(const ParticleState& p, const PulseEnvelope& env,
                                       const FieldConfig& f, const DerivedScales& scales,
                                       std::span<const double> tau_grid,
                                       const DriftOptions& options = {});

/// zeta_eff = (hbar |K|)^2 / (2 l_B^2) from the last state of a drift history.
/// Throws EnvelopeNotClosed unless that state lies after the pulse.
double asymptotic_displacement(std::span<const DriftState> states, double l_B);

/// |K| after a resonant pulse: |e| A_bar c T / (hbar E_par).
double resonant_drift_magnitude(const ParticleState& p, const FieldConfig& f,
                                const DerivedScales& scales);

/// Uniform grid over the envelope support with `count` points.
std::vector<double> support_grid(const PulseEnvelope& env, std::size_t count);

}  // namespace cyclores
