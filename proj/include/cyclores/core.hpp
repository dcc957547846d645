#pragma once

// Species, field configuration, Landau spectrum and cyclotron-resonance
// kinematics. Every public quantity is in Gaussian units.


namespace cyclores {

/// Wave polarization sign g of A_w = {-A sin(w tau), g A cos(w tau)}.
enum class Polarization : int { Right = +1, Left = -1 };

constexpr int sign(Polarization g) noexcept { return static_cast<int>(g); }

/// Parses +1 / -1; anything else throws InvalidInput.
Polarization polarization_from_int(int g);

/// Initial Landau state {s, p_y, p_z} plus species constants.
struct ParticleState {
    double mass = 0.0;      // g
    double charge = 0.0;    // esu, magnitude
    int charge_sign = -1;   // +1 or -1
    double p_z = 0.0;       // g cm/s
    double p_y = 0.0;       // g cm/s
    int s = 0;

    static ParticleState electron(double p_z = 0.0, int s = 0);
    static ParticleState proton(double p_z = 0.0, int s = 0);

    double signed_charge() const noexcept { return charge_sign * charge; }
    double rest_energy() const noexcept;
};

struct FieldConfig {
    double H0 = 0.0;      // G
    double n = 1.0;       // refraction index
    double omega = 0.0;   // rad/s
    Polarization g = Polarization::Right;
    double A_bar = 0.0;   // G cm, mean vector-potential amplitude
    double T = 0.0;       // s, coherent interaction time along the particle trajectory
};

/// Kinematic scales derived from the longitudinal energy E_par.
struct DerivedScales {
    double E_par = 0.0;           // sqrt(m^2 c^4 + c^2 p_z^2), erg
    double Omega = 0.0;           // |e| c H0 / E_par, rad/s
    double l_B = 0.0;             // sqrt(hbar c / (|e| H0)), cm
    double v_z = 0.0;             // c^2 p_z / E_par, cm/s
    double omega_prime = 0.0;     // (1 - n v_z / c) omega, rad/s
    double doppler_factor = 1.0;  // 1 - n v_z / c
};

enum class DopplerRegime { Normal, Anomalous, NonResonant };

const char* to_string(DopplerRegime regime) noexcept;

void validate(const ParticleState& p);
void validate(const FieldConfig& f);

/// Full Landau energy sqrt(m^2c^4 + c^2 p_z^2 + 2|e|c H0 hbar (s + 1/2)).
double landau_energy(const ParticleState& p, double H0);

DerivedScales derived_scales(const ParticleState& p, const FieldConfig& f);

/// Longitudinal momentum of a particle of the given mass moving at beta = v_z/c.
double momentum_for_velocity(double mass, double beta);

/// Classifies the resonance regime from the sign of 1 - n v_z/c and the
/// helicity. An exactly vanishing Doppler factor throws CherenkovDegenerate.
DopplerRegime classify_doppler(double doppler_factor, int helicity);
DopplerRegime classify_doppler(const DerivedScales& scales, Polarization g);

/// Helicity that enters the resonance condition (1 - n v_z/c) w = h Omega.
///
/// The wave of polarization g co-rotates with a negative charge when g = +1,
/// so h = g for electrons and h = -g for positive charges. Omega itself is
/// always positive.
int resonance_helicity(const ParticleState& p, Polarization g) noexcept;

/// Relative resonance residual |(1 - n v_z/c) w - h Omega| / w at p.p_z.
double resonance_residual(const ParticleState& p, const FieldConfig& f);

struct ResonanceSolution {
    double p_z = 0.0;
    double beta = 0.0;          // v_z / c
    double residual = 0.0;      // relative, recomputed from p_z
    DopplerRegime regime = DopplerRegime::NonResonant;
};

/// Solves the cyclotron resonance condition for p_z by bisection.
///
/// The residual is scanned over the rapidity range |v_z| < c to bracket sign
/// changes; when several roots exist the one closest to the template's p_z is
/// refined. Throws NoRoot (carrying the residual extrema) when the residual
/// never changes sign.
ResonanceSolution resonant_momentum(const FieldConfig& f, const ParticleState& p_template);

struct ValidityCheck {
    double ratio = 0.0;
    bool holds = true;
};

struct ValidityReport {
    ValidityCheck photon;     // hbar w / E
    ValidityCheck exchange;   // Delta E / E
    ValidityCheck landau;     // hbar Omega s / E_par
    bool exchange_estimated = false;
    double threshold = 1e-2;
};

/// Pure report on the small-parameter conditions; never throws on failing
/// conditions. A zero delta_E_estimate leaves the exchange check unevaluated.
ValidityReport validity_report(const ParticleState& p, const FieldConfig& f,
                               double delta_E_estimate, double threshold = 1e-2);

/// Displacement parameter of a resonant pulse, zeta = e^2 A_bar^2 T^2 Omega / (2 hbar E_par).
double displacement_parameter(const ParticleState& p, const FieldConfig& f,
                              const DerivedScales& scales);

/// Energy exchange proxy |s - s'|_max hbar w, with the most probable level
/// change 2 sqrt(s zeta) taken from the quasiclassical peak.
double exchange_estimate_from_peak(int s, double zeta, double omega);

}  // namespace cyclores
