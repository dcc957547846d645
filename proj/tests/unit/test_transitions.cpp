#include <doctest.h>

#include <cmath>
#include <vector>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/pulse.hpp"
#include "cyclores/transitions.hpp"
#include "support.hpp"

using namespace cyclores;

namespace {

FieldConfig optical_wave(double n = 1.5, Polarization g = Polarization::Right, double omega = 3e15) {
    FieldConfig f;
    f.H0 = 1e4;
    f.n = n;
    f.omega = omega;
    f.g = g;
    f.A_bar = 1e-3;
    f.T = 1e-12;
    return f;
}

struct Resonant {
    ParticleState p;
    FieldConfig f;
    DerivedScales sc;
};

Resonant at_resonance(FieldConfig f, int s = 0) {
    Resonant r;
    r.f = f;
    r.p = ParticleState::electron(0.0, s);
    r.p.p_z = resonant_momentum(r.f, r.p).p_z;
    r.sc = derived_scales(r.p, r.f);
    return r;
}

// Poisson weight zeta^k e^{-zeta} / k!, which is the s = 0 row in closed form.
long double poisson(int k, long double zeta) {
    return std::exp(k * std::log(zeta) - zeta - std::lgamma(static_cast<long double>(k) + 1));
}

}  // namespace

TEST_CASE("zero displacement leaves the level unchanged") {
    for (int s : {0, 1, 7, 500}) {
        const auto t = transition_table(s, 0.0, optical_wave());
        REQUIRE(t.records.size() == 1);
        CHECK(t.records[0].s_prime == s);
        CHECK(t.records[0].w == 1.0);
        CHECK(t.records[0].photons == 0);
        CHECK(t.records[0].delta_E == 0.0);
        CHECK(t.total == 1.0);
    }
}

TEST_CASE("ground-state row is a Poisson distribution") {
    const auto t = transition_table(0, 2.0, optical_wave());
    REQUIRE(!t.records.empty());
    CHECK(t.records[0].s_prime == 0);
    CHECK(t.records[0].w == doctest::Approx(0.1353352832366127).epsilon(1e-15));
    for (double zeta : {0.1, 2.0, 7.5, 20.0}) {
        const auto row = transition_table(0, zeta, optical_wave());
        for (const auto& r : row.records)
            CHECK(testing::rel_diff(r.w, static_cast<double>(poisson(r.s_prime, zeta))) < 1e-11);
        CHECK(net_emitted_quanta(row, Polarization::Right) == doctest::Approx(-zeta).epsilon(1e-12));
    }
}

TEST_CASE("transition rows are unitary") {
    const auto f = optical_wave();
    for (int s : {0, 1, 2, 5, 20, 100, 333, 1000})
        for (double zeta : {1e-6, 0.1, 1.0, 5.0, 20.0, 60.0}) {
            const auto t = transition_table(s, zeta, f);
            CAPTURE(s);
            CAPTURE(zeta);
            CHECK(is_unitary(t));
            CHECK(t.total <= 1.0);
            CHECK(t.cutoff.dropped_weight < 1e-13);
            for (std::size_t i = 1; i < t.records.size(); ++i)
                CHECK(t.records[i].s_prime > t.records[i - 1].s_prime);
        }
}

TEST_CASE("unitarity check is strict on both sides") {
    TransitionTable t;
    t.total = 1.0;
    CHECK(is_unitary(t));
    t.total = 1.0 - 5e-9;
    CHECK(is_unitary(t));
    t.total = 1.0 - 2e-8;
    CHECK_FALSE(is_unitary(t));
    t.total = std::nextafter(1.0, 2.0);
    CHECK_FALSE(is_unitary(t));
}

TEST_CASE("energy and momentum transfer obey the wave dispersion") {
    testing::Rng rng(0x7a11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto f = optical_wave(rng.uniform(0.5, 3.0), rng.coin() ? Polarization::Right : Polarization::Left,
                                    rng.log_uniform(1e10, 1e16));
        const auto t = transition_table(rng.integer(0, 60), rng.uniform(0.0, 15.0), f);
        for (const auto& r : t.records) {
            CHECK(r.photons == t.s - r.s_prime);
            const double quantum = sign(f.g) * constants::hbar * f.omega;
            CHECK(r.delta_E == doctest::Approx(r.photons * quantum).epsilon(1e-15));
            if (r.photons == 0) continue;
            const double lhs = r.delta_E * f.n;
            const double rhs = constants::c * r.delta_pz;
            CHECK(std::abs(lhs - rhs) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(lhs));
        }
    }
}

TEST_CASE("probabilities fall off monotonically beyond the allowed band") {
    for (auto [s, zeta] : std::vector<std::pair<int, double>>{{5, 1.0}, {20, 5.0}, {100, 9.0}, {400, 30.0}}) {
        const auto t = transition_table(s, zeta, optical_wave());
        const double rs = std::sqrt(static_cast<double>(s));
        const auto outside = [&](int sp) {
            const double d = std::sqrt(static_cast<double>(sp)) - rs;
            return d * d > zeta + std::sqrt(zeta);
        };
        for (std::size_t i = 1; i < t.records.size(); ++i) {
            const auto& a = t.records[i - 1];
            const auto& b = t.records[i];
            if (b.s_prime > s && outside(a.s_prime)) CHECK(b.w < a.w);
            if (a.s_prime < s && outside(b.s_prime)) CHECK(a.w < b.w);
        }
    }
}

TEST_CASE("mean emitted quanta follow the Doppler regime") {
    const double omega_anomalous = 2.0 * constants::e * 1e4 / (constants::m_electron * constants::c);
    const auto normal = at_resonance(optical_wave());
    const auto anomalous = at_resonance(optical_wave(2.0, Polarization::Left, omega_anomalous));
    REQUIRE(classify_doppler(normal.sc, normal.f.g) == DopplerRegime::Normal);
    REQUIRE(classify_doppler(anomalous.sc, anomalous.f.g) == DopplerRegime::Anomalous);

    for (int s : {0, 3, 40}) {
        for (double zeta : {0.5, 4.0}) {
            const auto tn = transition_table(s, zeta, normal.f);
            const auto ta = transition_table(s, zeta, anomalous.f);
            CHECK(net_emitted_quanta(tn, normal.f.g) < 0.0);
            CHECK(net_emitted_quanta(ta, anomalous.f.g) > 0.0);
            CHECK(net_emitted_quanta(ta, anomalous.f.g) == doctest::Approx(zeta).epsilon(1e-10));
        }
    }
}

TEST_CASE("transition tables reject invalid arguments") {
    CHECK_THROWS_AS(transition_table(-1, 1.0, optical_wave()), InvalidInput);
    CHECK_THROWS_AS(transition_table(0, -1.0, optical_wave()), InvalidInput);
    CHECK_THROWS_AS(transition_table(0, std::nan(""), optical_wave()), InvalidInput);
    auto bad = optical_wave();
    bad.H0 = 0.0;
    CHECK_THROWS_AS(transition_table(0, 1.0, bad), InvalidInput);
}

TEST_CASE("quasiclassical estimate agrees with the displacement parameter") {
    auto r = at_resonance(optical_wave(), 10000);
    const double zeta1 = displacement_parameter(r.p, r.f, r.sc);
    r.f.A_bar *= std::sqrt(25.0 / zeta1);
    CHECK(displacement_parameter(r.p, r.f, r.sc) == doctest::Approx(25.0).epsilon(1e-13));

    const auto q = quasiclassical_predict(r.p, r.f, r.sc);
    CHECK(q.predicted_shift == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(std::abs(q.zeta_from_cl / 25.0 - 1.0) < 1e-6);
    CHECK_FALSE(q.below_quasiclassical);

    namespace ref = testing::ref;
    const long double field = r.f.omega * static_cast<long double>(r.f.A_bar) / ref::c;
    const long double v_tr = ref::c * std::sqrt(2.0L * ref::hbar * 10000 * r.sc.Omega / r.sc.E_par);
    const long double d_eps = ref::e * field * v_tr * r.f.T;
    CHECK(testing::rel_diff(q.field_strength, static_cast<double>(field)) < 1e-14);
    CHECK(testing::rel_diff(q.v_tr, static_cast<double>(v_tr)) < 1e-14);
    CHECK(testing::rel_diff(q.delta_eps_cl, static_cast<double>(d_eps)) < 1e-13);
    CHECK(q.band_lo == doctest::Approx(9025.0));
    CHECK(q.band_hi == doctest::Approx(11025.0));
}

TEST_CASE("quasiclassical shift vanishes with the field") {
    auto r = at_resonance(optical_wave(), 400);
    for (double a : {1e-3, 1e-6, 1e-9}) {
        r.f.A_bar = a;
        const auto q = quasiclassical_predict(r.p, r.f, r.sc);
        CHECK(q.predicted_shift >= 0.0);
        CHECK(q.predicted_shift == doctest::Approx(2.0 * std::sqrt(400.0 * q.zeta_from_cl)).epsilon(1e-12));
    }
    r.f.A_bar = 0.0;
    const auto q = quasiclassical_predict(r.p, r.f, r.sc);
    CHECK(q.predicted_shift == 0.0);
    CHECK(q.zeta_from_cl == 0.0);

    auto ground = at_resonance(optical_wave(), 0);
    const auto g = quasiclassical_predict(ground.p, ground.f, ground.sc);
    CHECK(g.below_quasiclassical);
    CHECK(g.zeta_from_cl == doctest::Approx(displacement_parameter(ground.p, ground.f, ground.sc)));
}

TEST_CASE("most probable level change follows the classical energy transfer") {
    const auto a = peak_compare(2500, 1.0);
    CHECK(a.predicted_shift == 100.0);
    CHECK(a.argmax_shift < 0);
    CHECK(a.relative_gap <= 0.15);
    const auto b = peak_compare(10000, 25.0);
    CHECK(b.predicted_shift == 1000.0);
    CHECK(b.relative_gap <= 0.10);
    CHECK(b.relative_gap < a.relative_gap);
    CHECK(b.band_lo == doctest::Approx(9025.0));
}

TEST_CASE("below one quantum the row peaks at the initial level") {
    for (int s : {0, 1, 10, 200}) {
        const auto p = peak_compare(s, 1e-4);
        CHECK(p.argmax_shift == 0);
        CHECK(p.argmax_s_prime == s);
    }
    CHECK(peak_compare(0, 0.0).relative_gap == 0.0);
}

TEST_CASE("three routes to the displacement parameter give the same rows") {
    auto wave = optical_wave();
    wave.A_bar = 0.5;
    const auto r = at_resonance(wave, 12);
    const double direct = displacement_parameter(r.p, r.f, r.sc);
    REQUIRE(direct > 0.5);

    namespace ref = testing::ref;
    const long double from_inputs = ref::e * ref::e * r.f.A_bar * r.f.A_bar * r.f.T * r.f.T * r.sc.Omega /
                                    (2.0L * ref::hbar * r.sc.E_par);
    CHECK(testing::rel_diff(direct, static_cast<double>(from_inputs)) < 1e-13);

    const auto env = flat_top_for(r.f, r.sc, 1e-2);
    const auto states = drift_integral(r.p, env, r.f, r.sc, support_grid(env, 2));
    const double eff = asymptotic_displacement(states, r.sc.l_B);
    CHECK(std::abs(eff / direct - 1.0) < 1e-6);

    const auto t1 = transition_table(r.p.s, direct, r.f);
    const auto t2 = transition_table(r.p.s, eff, r.f);
    REQUIRE(t1.records.size() == t2.records.size());
    for (std::size_t i = 0; i < t1.records.size(); ++i) {
        CHECK(t1.records[i].s_prime == t2.records[i].s_prime);
        CHECK(std::abs(t1.records[i].w - t2.records[i].w) < 1e-5);
    }
}
