#include "cyclores/transitions.hpp"

#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/special_functions.hpp"

namespace cyclores {

namespace {

namespace k = constants;

constexpr double kRowCutoff = 1e-20;  // |I| below which rows end: w < 1e-40
constexpr int kQuasiclassicalLevel = 100;

// Neumaier compensated sum.
template <typename Real>
struct Accumulator {
    Real sum = 0;
    Real comp = 0;
    void add(Real x) {
        const Real t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    Real value() const { return sum + comp; }
};

void check_args(int s, double zeta) {
    if (s < 0) throw InvalidInput("Landau index s must be non-negative");
    if (!std::isfinite(zeta) || zeta < 0.0) throw InvalidInput("zeta must be finite and >= 0");
}

std::pair<double, double> zeta_band(int s, double zeta) {
    const double rs = std::sqrt(static_cast<double>(s));
    const double rz = std::sqrt(zeta);
    const double lo = rs > rz ? (rs - rz) * (rs - rz) : 0.0;
    return {lo, (rs + rz) * (rs + rz)};
}

}  // namespace

TransitionTable transition_table(int s, double zeta, const FieldConfig& f) {
    check_args(s, zeta);
    validate(f);

    const LaguerreRow row = laguerre_row(s, zeta, kRowCutoff);
    TransitionTable table;
    table.s = s;
    table.zeta = zeta;
    table.cutoff.scanned_max = row.last();
    // Beyond the row end |I| < kRowCutoff and decays faster than geometrically.
    table.cutoff.tail_bound = 2.0 * kRowCutoff * kRowCutoff;

    const double quantum = sign(f.g) * k::hbar * f.omega;
    Accumulator<long double> kept;
    Accumulator<double> dropped;
    for (int sp = 0; sp <= row.last(); ++sp) {
        const long double w_precise = row.squares[sp];
        const double w = static_cast<double>(w_precise);
        if (w < table.cutoff.drop_threshold) {
            if (w > 0.0) {
                dropped.add(w);
                ++table.cutoff.dropped_count;
            }
            continue;
        }
        TransitionRecord r;
        r.s_prime = sp;
        r.w = w;
        r.photons = s - sp;
        if (r.photons != 0) {
            r.delta_E = r.photons * quantum;
            r.delta_pz = r.delta_E * f.n / k::c;
        }
        table.records.push_back(r);
        kept.add(w_precise);
    }
    table.total = static_cast<double>(kept.value());
    table.cutoff.dropped_weight = dropped.value();
    return table;
}

bool is_unitary(const TransitionTable& table, double tol) {
    return table.total >= 1.0 - tol && table.total <= 1.0;
}

double net_emitted_quanta(const TransitionTable& table, Polarization g) {
    Accumulator<double> acc;
    for (const auto& r : table.records) acc.add(r.photons * r.w);
    return sign(g) * acc.value();
}

QuasiclassicalPrediction quasiclassical_predict(const ParticleState& p, const FieldConfig& f,
                                                const DerivedScales& scales) {
    validate(p);
    validate(f);
    QuasiclassicalPrediction out;
    out.field_strength = f.omega * f.A_bar / k::c;
    out.v_tr = k::c * std::sqrt(2.0 * k::hbar * p.s * scales.Omega / scales.E_par);
    out.delta_eps_cl = p.charge * out.field_strength * out.v_tr * f.T;
    out.predicted_shift = out.delta_eps_cl / (k::hbar * f.omega);
    out.zeta_from_cl = p.s > 0
        ? out.predicted_shift * out.predicted_shift / (4.0 * p.s)
        : displacement_parameter(p, f, scales);
    std::tie(out.band_lo, out.band_hi) = zeta_band(p.s, out.zeta_from_cl);
    out.below_quasiclassical = p.s < kQuasiclassicalLevel;
    return out;
}

PeakComparison peak_compare(int s, double zeta) {
    check_args(s, zeta);
    PeakComparison out;
    out.predicted_shift = 2.0 * std::sqrt(static_cast<double>(s) * zeta);
    std::tie(out.band_lo, out.band_hi) = zeta_band(s, zeta);

    const LaguerreRow row = laguerre_row(s, zeta, kRowCutoff);
    const int scan_max = s + static_cast<int>(std::ceil(
        4.0 * (out.predicted_shift + std::sqrt(static_cast<double>(s)))));
    double best = -1.0;
    for (int sp = 0; sp <= std::min(scan_max, row.last()); ++sp) {
        const double w = row[sp] * row[sp];
        if (w > best) {
            best = w;
            out.argmax_s_prime = sp;
        }
    }
    out.argmax_shift = out.argmax_s_prime - s;
    const double shift = std::abs(static_cast<double>(out.argmax_shift));
    if (out.predicted_shift > 0.0)
        out.relative_gap = std::abs(shift - out.predicted_shift) / out.predicted_shift;
    else
        out.relative_gap = shift == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace cyclores
