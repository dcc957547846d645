#include "cyclores/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"

namespace cyclores {

namespace {

namespace k = constants;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw InvalidInput(std::string(name) + " must be finite");
}

// Search range in rapidity; cosh(50) ~ 2.6e21 covers any realistic w/Omega.
constexpr double kMaxRapidity = 50.0;
constexpr int kScanPoints = 8001;

// Resonance residual in units of w, parameterised by rapidity eta = atanh(v_z/c).
struct RapidityResidual {
    double n;
    double omega_ratio;  // h * Omega_0 / w, Omega_0 = |e| c H0 / (m c^2)

    double operator()(double eta) const {
        // 1 - tanh(eta) evaluated without cancellation for eta > 0.
        double doppler;
        if (eta > 0.0) {
            const double x = std::exp(-2.0 * eta);
            doppler = (1.0 - n) + n * (2.0 * x / (1.0 + x));
        } else {
            doppler = 1.0 - n * std::tanh(eta);
        }
        return doppler - omega_ratio / std::cosh(eta);
    }
};

}  // namespace

Polarization polarization_from_int(int g) {
    if (g == 1) return Polarization::Right;
    if (g == -1) return Polarization::Left;
    throw InvalidInput("polarization sign g must be +1 or -1");
}

ParticleState ParticleState::electron(double p_z, int s) {
    return ParticleState{k::m_electron, k::e, -1, p_z, 0.0, s};
}

ParticleState ParticleState::proton(double p_z, int s) {
    return ParticleState{k::m_proton, k::e, +1, p_z, 0.0, s};
}

double ParticleState::rest_energy() const noexcept { return mass * k::c * k::c; }

const char* to_string(DopplerRegime regime) noexcept {
    switch (regime) {
        case DopplerRegime::Normal: return "normal";
        case DopplerRegime::Anomalous: return "anomalous";
        case DopplerRegime::NonResonant: return "non-resonant";
    }
    return "unknown";
}

void validate(const ParticleState& p) {
    require_finite(p.mass, "mass");
    require_finite(p.charge, "charge");
    require_finite(p.p_z, "p_z");
    require_finite(p.p_y, "p_y");
    if (p.mass <= 0.0) throw InvalidInput("mass must be positive");
    if (p.charge <= 0.0) throw InvalidInput("charge magnitude must be positive");
    if (p.charge_sign != 1 && p.charge_sign != -1)
        throw InvalidInput("charge sign must be +1 or -1");
    if (p.s < 0) throw InvalidInput("Landau index s must be non-negative");
}

void validate(const FieldConfig& f) {
    require_finite(f.H0, "H0");
    require_finite(f.n, "n");
    require_finite(f.omega, "omega");
    require_finite(f.A_bar, "A_bar");
    require_finite(f.T, "T");
    if (f.H0 <= 0.0) throw InvalidInput("H0 must be positive");
    if (f.n <= 0.0) throw InvalidInput("refraction index n must be positive");
    if (f.omega <= 0.0) throw InvalidInput("omega must be positive");
    if (f.A_bar < 0.0) throw InvalidInput("A_bar must be non-negative");
    if (f.T < 0.0) throw InvalidInput("T must be non-negative");
    (void)polarization_from_int(sign(f.g));
}

double landau_energy(const ParticleState& p, double H0) {
    validate(p);
    require_finite(H0, "H0");
    if (H0 <= 0.0) throw InvalidInput("H0 must be positive");
    const double mc2 = p.rest_energy();
    const double cp = k::c * p.p_z;
    const double magnetic = 2.0 * p.charge * k::c * H0 * k::hbar * (p.s + 0.5);
    return std::sqrt(mc2 * mc2 + cp * cp + magnetic);
}

DerivedScales derived_scales(const ParticleState& p, const FieldConfig& f) {
    validate(p);
    validate(f);
    DerivedScales d;
    d.E_par = std::hypot(p.rest_energy(), k::c * p.p_z);
    d.Omega = p.charge * k::c * f.H0 / d.E_par;
    d.l_B = std::sqrt(k::hbar * k::c / (p.charge * f.H0));
    const double beta = k::c * p.p_z / d.E_par;
    d.v_z = beta * k::c;
    d.doppler_factor = 1.0 - f.n * beta;
    d.omega_prime = d.doppler_factor * f.omega;
    return d;
}

double momentum_for_velocity(double mass, double beta) {
    require_finite(beta, "beta");
    if (!(std::abs(beta) < 1.0)) throw InvalidInput("|beta| must be below 1");
    if (!(mass > 0.0)) throw InvalidInput("mass must be positive");
    return mass * k::c * beta / std::sqrt((1.0 - beta) * (1.0 + beta));
}

DopplerRegime classify_doppler(double doppler_factor, int helicity) {
    require_finite(doppler_factor, "doppler factor");
    if (helicity != 1 && helicity != -1) throw InvalidInput("helicity must be +1 or -1");
    if (doppler_factor == 0.0)
        throw CherenkovDegenerate("1 - n v_z/c vanishes: Cherenkov-degenerate configuration");
    if (doppler_factor > 0.0 && helicity == 1) return DopplerRegime::Normal;
    if (doppler_factor < 0.0 && helicity == -1) return DopplerRegime::Anomalous;
    return DopplerRegime::NonResonant;
}

DopplerRegime classify_doppler(const DerivedScales& scales, Polarization g) {
    return classify_doppler(scales.doppler_factor, sign(g));
}

int resonance_helicity(const ParticleState& p, Polarization g) noexcept {
    return -p.charge_sign * sign(g);
}

double resonance_residual(const ParticleState& p, const FieldConfig& f) {
    const DerivedScales d = derived_scales(p, f);
    const int h = resonance_helicity(p, f.g);
    return std::abs(d.omega_prime - h * d.Omega) / f.omega;
}

ResonanceSolution resonant_momentum(const FieldConfig& f, const ParticleState& p_template) {
    validate(f);
    validate(p_template);

    const int h = resonance_helicity(p_template, f.g);
    const double omega0 = p_template.charge * k::c * f.H0 / p_template.rest_energy();
    const RapidityResidual residual{f.n, h * omega0 / f.omega};

    std::vector<double> eta(kScanPoints);
    std::vector<double> r(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) {
        eta[i] = -kMaxRapidity + 2.0 * kMaxRapidity * i / (kScanPoints - 1);
        r[i] = residual(eta[i]);
    }
    const auto [rmin, rmax] = std::minmax_element(r.begin(), r.end());

    // Candidate brackets [eta_lo, eta_hi] with a sign change of the residual.
    struct Bracket { double lo, hi, rlo; };
    std::vector<Bracket> brackets;
    for (int i = 0; i + 1 < kScanPoints; ++i) {
        if (r[i] == 0.0) {
            brackets.push_back({eta[i], eta[i], 0.0});
        } else if ((r[i] < 0.0) != (r[i + 1] < 0.0) && r[i + 1] != 0.0) {
            brackets.push_back({eta[i], eta[i + 1], r[i]});
        }
    }
    if (brackets.empty())
        throw NoRoot("resonance residual has no sign change for |v_z| < c", *rmin * f.omega,
                     *rmax * f.omega);

    const double mc = p_template.mass * k::c;
    const double eta_target = std::asinh(p_template.p_z / mc);
    const auto best = std::min_element(brackets.begin(), brackets.end(),
        [&](const Bracket& a, const Bracket& b) {
            return std::abs(0.5 * (a.lo + a.hi) - eta_target) <
                   std::abs(0.5 * (b.lo + b.hi) - eta_target);
        });

    double lo = best->lo;
    double hi = best->hi;
    const bool lo_negative = best->rlo < 0.0;
    while (hi > lo) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double rm = residual(mid);
        if (rm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((rm < 0.0) == lo_negative) lo = mid; else hi = mid;
    }

    ResonanceSolution best_solution;
    best_solution.residual = std::numeric_limits<double>::infinity();
    for (double e : {lo, hi}) {
        ParticleState p = p_template;
        p.p_z = mc * std::sinh(e);
        const double res = resonance_residual(p, f);
        if (res < best_solution.residual) {
            best_solution.p_z = p.p_z;
            best_solution.beta = std::tanh(e);
            best_solution.residual = res;
        }
    }
    ParticleState p = p_template;
    p.p_z = best_solution.p_z;
    best_solution.regime = classify_doppler(derived_scales(p, f).doppler_factor, h);
    return best_solution;
}

ValidityReport validity_report(const ParticleState& p, const FieldConfig& f,
                               double delta_E_estimate, double threshold) {
    require_finite(delta_E_estimate, "delta_E_estimate");
    require_finite(threshold, "threshold");
    if (delta_E_estimate < 0.0) throw InvalidInput("delta_E_estimate must be non-negative");
    const double E = landau_energy(p, f.H0);
    const DerivedScales d = derived_scales(p, f);

    ValidityReport report;
    report.threshold = threshold;
    report.photon.ratio = k::hbar * f.omega / E;
    report.photon.holds = report.photon.ratio <= threshold;
    report.landau.ratio = k::hbar * d.Omega * p.s / d.E_par;
    report.landau.holds = report.landau.ratio <= threshold;
    report.exchange_estimated = delta_E_estimate > 0.0;
    report.exchange.ratio = delta_E_estimate / E;
    report.exchange.holds = !report.exchange_estimated || report.exchange.ratio <= threshold;
    return report;
}

double displacement_parameter(const ParticleState& p, const FieldConfig& f,
                              const DerivedScales& scales) {
    const double eAT = p.charge * f.A_bar * f.T;
    return eAT * eAT * scales.Omega / (2.0 * k::hbar * scales.E_par);
}

double exchange_estimate_from_peak(int s, double zeta, double omega) {
    if (s < 0) throw InvalidInput("Landau index s must be non-negative");
    require_finite(zeta, "zeta");
    if (zeta < 0.0) throw InvalidInput("zeta must be non-negative");
    return 2.0 * std::sqrt(static_cast<double>(s) * zeta) * k::hbar * omega;
}

}  // namespace cyclores
