#pragma once

// Multiphoton transition tables between Landau levels and their
// quasiclassical limit.

#include <cstddef>
#include <vector>

#include "cyclores/core.hpp"

namespace cyclores {

/// One final level s' of a transition row.
///
/// photons = s - s' counts emitted wave quanta (negative: absorbed). delta_E and
/// delta_pz are the energy and longitudinal momentum handed from the particle
/// to the wave, (s - s') g hbar w and (s - s') g hbar w n / c.
struct TransitionRecord {
    int s_prime = 0;
    double w = 0.0;
    int photons = 0;
    double delta_pz = 0.0;
    double delta_E = 0.0;
};

struct CutoffMeta {
    int scanned_max = 0;           // last s' evaluated; the scan always starts at 0
    double drop_threshold = 1e-16; // records with w below this are omitted
    std::size_t dropped_count = 0;
    double dropped_weight = 0.0;   // sum of omitted w
    double tail_bound = 0.0;       // bound on the weight beyond scanned_max
};

struct TransitionTable {
    int s = 0;
    double zeta = 0.0;
    std::vector<TransitionRecord> records;  // ascending s'
    double total = 0.0;                     // sum of w over records
    CutoffMeta cutoff;
};

inline constexpr double kUnitarityTolerance = 1e-8;

/// w_{ss'} = I_{ss'}(zeta)^2 for every s' above the drop threshold, with the
/// conservation-law bookkeeping for the wave in f.
TransitionTable transition_table(int s, double zeta, const FieldConfig& f);

/// total within [1 - tol, 1].
bool is_unitary(const TransitionTable& table, double tol = kUnitarityTolerance);

/// Mean number of quanta emitted into the wave, g * sum (s - s') w. Positive in
/// the anomalous Doppler regime, negative (absorption) in the normal one.
double net_emitted_quanta(const TransitionTable& table, Polarization g);

struct QuasiclassicalPrediction {
    double field_strength = 0.0;  // wave electric field w A_bar / c, statV/cm
    double v_tr = 0.0;            // c sqrt(2 hbar s Omega / E_par)
    double delta_eps_cl = 0.0;    // |e| E v_tr T, erg
    double predicted_shift = 0.0; // delta_eps_cl / (hbar w)
    double zeta_from_cl = 0.0;    // (delta_eps_cl / hbar w)^2 / (4 s)
    double band_lo = 0.0;         // s' with (sqrt(s') - sqrt(s))^2 = zeta, lower branch
    double band_hi = 0.0;         // upper branch
    bool below_quasiclassical = false;  // s < 100
};

/// Classical energy transfer estimate for the state p in the wave f. At s = 0 the
/// zeta identity is continued by its limit e^2 A_bar^2 T^2 Omega / (2 hbar E_par).
QuasiclassicalPrediction quasiclassical_predict(const ParticleState& p, const FieldConfig& f,
                                                const DerivedScales& scales);

struct PeakComparison {
    int argmax_s_prime = 0;
    int argmax_shift = 0;          // argmax_s_prime - s
    double predicted_shift = 0.0;  // 2 sqrt(s zeta)
    double relative_gap = 0.0;     // ||argmax_shift| - predicted| / predicted
    double band_lo = 0.0;
    double band_hi = 0.0;
};

/// Most probable level change of a transition row against 2 sqrt(s zeta),
/// scanning s' in [0, s + 4 (2 sqrt(s zeta) + sqrt(s))].
PeakComparison peak_compare(int s, double zeta);

}  // namespace cyclores
