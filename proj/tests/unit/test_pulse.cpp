#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "cyclores/constants.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/pulse.hpp"
#include "support.hpp"

using namespace cyclores;

namespace {

struct Setup {
    ParticleState p;
    FieldConfig f;
    DerivedScales sc;
};

// Electron held at exact resonance with an optical wave in a medium.
Setup resonant(double n = 1.5, Polarization g = Polarization::Right, double omega = 3e15) {
    Setup s;
    s.p = ParticleState::electron(0.0, 0);
    s.f.H0 = 1e4;
    s.f.n = n;
    s.f.omega = omega;
    s.f.g = g;
    s.f.A_bar = 1e-3;
    s.f.T = 1e-12;
    s.p.p_z = resonant_momentum(s.f, s.p).p_z;
    s.sc = derived_scales(s.p, s.f);
    return s;
}

DriftState end_state(const Setup& s, const PulseEnvelope& env, const DriftOptions& opt = {}) {
    const auto grid = support_grid(env, 2);
    return drift_integral(s.p, env, s.f, s.sc, grid, opt).back();
}

double zeta_of(const Setup& s, const PulseEnvelope& env) {
    const auto grid = support_grid(env, 2);
    return asymptotic_displacement(drift_integral(s.p, env, s.f, s.sc, grid), s.sc.l_B);
}

}  // namespace

TEST_CASE("flat-top envelope shape and area") {
    const auto env = PulseEnvelope::flat_top(2.0, 10.0, 1.0, 5.0);
    CHECK(env(5.0) == doctest::Approx(1.0));
    CHECK(env(15.0) == doctest::Approx(1.0));
    CHECK(env(10.0) == 2.0);
    CHECK(env(4.4) == 0.0);
    CHECK(env(15.6) == 0.0);
    CHECK(env.support().first == 4.5);
    CHECK(env.support().second == 15.5);
    const auto area = testing::trapezoid([&](double t) { return static_cast<long double>(env(t)); }, 4.0, 16.0, 240000);
    CHECK(static_cast<double>(area) == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(env.area() == 20.0);
}

TEST_CASE("Gaussian envelope carries amplitude times duration") {
    const auto env = PulseEnvelope::gaussian(3.0, 2.0, -1.0);
    CHECK(env(0.0) == 3.0);
    const auto [lo, hi] = env.support();
    const auto area = testing::trapezoid([&](double t) { return static_cast<long double>(env(t)); }, lo, hi, 4000);
    CHECK(static_cast<double>(area) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(env(hi + 1e-9) == 0.0);
}

TEST_CASE("sampled envelopes interpolate linearly") {
    const auto env = PulseEnvelope::sampled({{0.0, 0.0}, {1.0, 2.0}, {3.0, 0.0}});
    CHECK(env(0.5) == 1.0);
    CHECK(env(2.0) == 1.0);
    CHECK(env(-0.1) == 0.0);
    CHECK(env(3.1) == 0.0);
    CHECK(env.area() == 3.0);
    CHECK(env.max_spacing() == 2.0);
    CHECK(env.amplitude() == 2.0);
}

TEST_CASE("envelope invariants are enforced") {
    CHECK_THROWS_AS(PulseEnvelope::flat_top(-1.0, 1.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::flat_top(1.0, 0.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::flat_top(1.0, 1.0, 0.6), InvalidInput);
    CHECK_NOTHROW(PulseEnvelope::flat_top(1.0, 1.0, 0.5));
    CHECK_THROWS_AS(PulseEnvelope::gaussian(1.0, -1.0), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::sampled({{0.0, 0.0}}), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::sampled({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::sampled({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}}), InvalidInput);
    CHECK_THROWS_AS(PulseEnvelope::sampled({{0.0, 0.0}, {1.0, -1.0}, {2.0, 0.0}}), InvalidInput);
}

TEST_CASE("envelope CSV ingestion") {
    std::istringstream good("tau_seconds,A_gauss_cm\n0,0\n1e-15, 2.5\n\n2e-15,0\n");
    const auto samples = read_envelope_csv(good);
    REQUIRE(samples.size() == 3);
    CHECK(samples[1].tau == 1e-15);
    CHECK(samples[1].A == 2.5);

    std::istringstream no_header("0,0\n1,1\n");
    CHECK_THROWS_AS(read_envelope_csv(no_header), InvalidInput);
    std::istringstream three("tau_seconds,A_gauss_cm\n0,0,1\n");
    CHECK_THROWS_AS(read_envelope_csv(three), InvalidInput);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_envelope_csv(empty), InvalidInput);
    std::istringstream bad("tau_seconds,A_gauss_cm\n0,0\n1,abc\n");
    try {
        read_envelope_csv(bad);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(read_envelope_csv_file("/nonexistent/envelope.csv"), InvalidInput);
}

TEST_CASE("zero field leaves the drift and the phase at zero") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2).scaled(0.0);
    for (const auto& st : drift_integral(s.p, env, s.f, s.sc, support_grid(env, 7))) {
        CHECK(st.K == std::complex<double>(0.0));
        CHECK(st.phase_Q == 0.0);
    }
}

TEST_CASE("resonant flat-top pulse reproduces the closed-form drift") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const auto st = end_state(s, env);
    const double Kc = resonant_drift_magnitude(s.p, s.f, s.sc);
    CHECK(Kc == doctest::Approx(static_cast<double>(
        testing::ref::e * s.f.A_bar * testing::ref::c * s.f.T / (testing::ref::hbar * s.sc.E_par))).epsilon(1e-14));
    CHECK(std::abs(std::abs(st.K) / Kc - 1.0) < 1e-6);
    CHECK(st.after_pulse);

    const double zeta = zeta_of(s, env);
    const double closed = displacement_parameter(s.p, s.f, s.sc);
    CHECK(std::abs(zeta / closed - 1.0) < 1e-6);
    // (hbar Kc)^2 / (2 l_B^2) and e^2 A^2 T^2 Omega / (2 hbar E_par) are the same number.
    const double via_K = std::pow(constants::hbar * Kc / s.sc.l_B, 2) / 2.0;
    CHECK(testing::rel_diff(via_K, closed) < 1e-14);
}

TEST_CASE("resonant drift rotates with the wave") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const auto [lo, hi] = env.support();
    std::vector<double> after;
    for (int i = 0; i < 5; ++i) after.push_back(hi + i * 1e-16);
    const auto st = drift_integral(s.p, env, s.f, s.sc, after);
    const double Kc = resonant_drift_magnitude(s.p, s.f, s.sc);
    for (const auto& x : st) {
        CHECK(std::abs(std::abs(x.K) / Kc - 1.0) < 1e-6);
        // Between samples K turns by g w dtau.
        const auto turn = x.K / st.front().K;
        CHECK(std::abs(std::arg(turn) - std::remainder(s.f.omega * (x.tau - st.front().tau), 2 * M_PI)) < 1e-6);
    }
}

TEST_CASE("doubling the interaction time doubles the resonant drift") {
    auto s = resonant();
    const double K1 = std::abs(end_state(s, flat_top_for(s.f, s.sc, 1e-2)).K);
    s.f.T *= 2.0;
    const double K2 = std::abs(end_state(s, flat_top_for(s.f, s.sc, 1e-2)).K);
    CHECK(K2 / K1 == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("anomalous-regime resonance obeys the same closed form") {
    auto s = resonant(2.0, Polarization::Left, 2.0 * constants::e * 1e4 / (constants::m_electron * constants::c));
    CHECK(s.sc.doppler_factor < 0.0);
    s.f.T = 1e-9;
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    CHECK(std::abs(std::abs(end_state(s, env).K) / resonant_drift_magnitude(s.p, s.f, s.sc) - 1.0) < 1e-6);
    CHECK(std::abs(zeta_of(s, env) / displacement_parameter(s.p, s.f, s.sc) - 1.0) < 1e-6);
}

TEST_CASE("Gaussian and sampled pulses at resonance depend only on the pulse area") {
    const auto s = resonant();
    const double duration = retarded_duration(s.f.T, s.sc);
    const double Kc = resonant_drift_magnitude(s.p, s.f, s.sc);
    const auto gauss = PulseEnvelope::gaussian(s.f.A_bar, duration, 7.0 * duration);
    CHECK(std::abs(std::abs(end_state(s, gauss).K) / Kc - 1.0) < 1e-6);

    std::vector<EnvelopeSample> samples;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double t = duration * i / n;
        samples.push_back({t, s.f.A_bar * std::pow(std::sin(M_PI * i / n), 2)});
    }
    const auto sampled = PulseEnvelope::sampled(samples);
    const double expected = Kc * sampled.area() / (s.f.A_bar * duration);
    CHECK(std::abs(std::abs(end_state(s, sampled).K) / expected - 1.0) < 1e-6);
}

TEST_CASE("detuned pulses follow the sinc^2 suppression") {
    const auto s = resonant();
    const double duration = retarded_duration(s.f.T, s.sc);
    const double z0 = zeta_of(s, PulseEnvelope::flat_top(s.f.A_bar, duration, 0.0));
    double previous_u = 0.0;
    for (double x : {0.5, 1.0, 3.0, 10.0, 30.0, 100.0}) {
        auto d = s;
        d.f.omega = s.f.omega + x / duration;
        d.sc = derived_scales(d.p, d.f);
        const double dur = retarded_duration(d.f.T, d.sc);
        const double ratio = zeta_of(d, PulseEnvelope::flat_top(d.f.A_bar, dur, 0.0)) / z0;
        const double u = 0.5 * (d.f.omega - d.sc.Omega / d.sc.doppler_factor) * dur;
        const double sinc2 = std::pow(std::sin(u) / u, 2);
        CAPTURE(x);
        CHECK(ratio == doctest::Approx(sinc2).epsilon(1e-6));
        // Suppression envelope 1/u^2 decreases along the scan.
        CHECK(ratio * u * u <= 1.0 + 1e-6);
        CHECK(std::abs(u) > previous_u);
        previous_u = std::abs(u);
    }
}

TEST_CASE("drift is linear in the field amplitude") {
    const auto s = resonant();
    testing::Rng rng(31);
    const auto env = flat_top_for(s.f, s.sc, 0.05);
    const auto grid = support_grid(env, 9);
    const auto base = drift_integral(s.p, env, s.f, s.sc, grid);
    const double z_base = asymptotic_displacement(base, s.sc.l_B);
    for (int i = 0; i < 5; ++i) {
        const double alpha = rng.log_uniform(1e-3, 1e3);
        const auto scaled = drift_integral(s.p, env.scaled(alpha), s.f, s.sc, grid);
        for (std::size_t j = 0; j < grid.size(); ++j)
            CHECK(std::abs(scaled[j].K - alpha * base[j].K) <= 1e-12 * alpha * std::abs(base.back().K));
        CHECK(asymptotic_displacement(scaled, s.sc.l_B) / z_base == doctest::Approx(alpha * alpha).epsilon(1e-12));
    }
}

TEST_CASE("drift is zero before the envelope switches on") {
    const auto s = resonant();
    const double duration = retarded_duration(s.f.T, s.sc);
    const std::vector<PulseEnvelope> envs = {
        flat_top_for(s.f, s.sc, 1e-2),
        PulseEnvelope::gaussian(s.f.A_bar, duration),
        PulseEnvelope::sampled({{0.0, 0.0}, {duration, s.f.A_bar}, {2 * duration, 0.0}}),
    };
    for (const auto& env : envs) {
        const double ts = env.support().first;
        const std::vector<double> early = {ts - 5 * duration, ts - 1e-3 * duration, ts};
        for (const auto& st : drift_integral(s.p, env, s.f, s.sc, early)) {
            CHECK(st.K == std::complex<double>(0.0));
            CHECK(st.phase_Q == 0.0);
            CHECK_FALSE(st.after_pulse);
        }
    }
}

TEST_CASE("shifting the envelope in time leaves the asymptotic drift unchanged") {
    auto s = resonant();
    s.f.omega *= 1.0 + 2e-5;  // slightly detuned so the phase matters
    s.sc = derived_scales(s.p, s.f);
    const auto env = flat_top_for(s.f, s.sc, 0.1);
    const double duration = env.duration();
    const auto ref_state = end_state(s, env);
    const double z_ref = zeta_of(s, env);
    for (double shift : {-3.0, 0.5, 7.25}) {
        const auto moved = env.shifted(shift * duration);
        CHECK(std::abs(end_state(s, moved).K) / std::abs(ref_state.K) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(zeta_of(s, moved) / z_ref == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("accumulated phase does not depend on the output grid") {
    auto s = resonant();
    s.f.omega *= 1.0 + 1e-5;
    s.sc = derived_scales(s.p, s.f);
    const auto env = flat_top_for(s.f, s.sc, 0.1);
    const auto coarse = drift_integral(s.p, env, s.f, s.sc, support_grid(env, 2));
    const auto fine = drift_integral(s.p, env, s.f, s.sc, support_grid(env, 301));
    CHECK(fine.back().phase_Q == doctest::Approx(coarse.back().phase_Q).epsilon(1e-9));
    CHECK(std::abs(fine.back().K - coarse.back().K) <= 1e-9 * std::abs(coarse.back().K));

    DriftOptions tight;
    tight.rel_tol = 1e-11;
    const auto refined = drift_integral(s.p, env, s.f, s.sc, support_grid(env, 2), tight);
    CHECK(refined.back().phase_Q == doctest::Approx(coarse.back().phase_Q).epsilon(1e-8));
}

TEST_CASE("phase vanishes smoothly with the field") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const double base = end_state(s, env).phase_Q;
    CHECK(std::isfinite(base));
    CHECK(base != 0.0);
    for (double alpha : {1e-1, 1e-2, 1e-4}) {
        const double ph = end_state(s, env.scaled(alpha)).phase_Q;
        CHECK(ph / base == doctest::Approx(alpha * alpha).epsilon(1e-9));
    }
}

TEST_CASE("phase keeps growing linearly after the pulse") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const double te = env.support().second;
    const double d = env.duration();
    const auto st = drift_integral(s.p, env, s.f, s.sc, std::vector<double>{te, te + d, te + 2 * d});
    CHECK(st[2].phase_Q - st[1].phase_Q == doctest::Approx(st[1].phase_Q - st[0].phase_Q).epsilon(1e-9));
}

TEST_CASE("drift integral error paths") {
    auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const auto grid = support_grid(env, 3);

    auto degenerate = s.sc;
    degenerate.doppler_factor = 1e-13;
    CHECK_THROWS_AS(drift_integral(s.p, env, s.f, degenerate, grid), CherenkovDegenerate);

    const double period = 2 * M_PI / std::abs(s.sc.omega_prime);
    const auto coarse = PulseEnvelope::sampled({{0.0, 0.0}, {period, 1.0}, {2 * period, 0.0}});
    CHECK_THROWS_AS(drift_integral(s.p, coarse, s.f, s.sc, grid), InvalidInput);

    DriftOptions starved;
    starved.max_panels = 1;
    auto detuned = s;
    detuned.f.omega *= 1.01;
    detuned.sc = derived_scales(detuned.p, detuned.f);
    const auto long_env = flat_top_for(detuned.f, detuned.sc, 1e-2);
    CHECK_THROWS_AS(drift_integral(detuned.p, long_env, detuned.f, detuned.sc, support_grid(long_env, 2), starved),
                    QuadratureError);

    const std::vector<double> bad_grid = {std::nan("")};
    CHECK_THROWS_AS(drift_integral(s.p, env, s.f, s.sc, bad_grid), InvalidInput);
}

TEST_CASE("displacement needs a closed envelope") {
    const auto s = resonant();
    const auto env = flat_top_for(s.f, s.sc, 1e-2);
    const double mid = 0.5 * (env.support().first + env.support().second);
    const auto st = drift_integral(s.p, env, s.f, s.sc, std::vector<double>{mid});
    CHECK_THROWS_AS(asymptotic_displacement(st, s.sc.l_B), EnvelopeNotClosed);
    CHECK_THROWS_AS(asymptotic_displacement({}, s.sc.l_B), InvalidInput);

    DriftState zero;
    zero.after_pulse = true;
    const std::vector<DriftState> closed = {zero};
    CHECK(asymptotic_displacement(closed, s.sc.l_B) == 0.0);
    CHECK_THROWS_AS(asymptotic_displacement(closed, 0.0), InvalidInput);
}

TEST_CASE("support grid spans the envelope") {
    const auto env = PulseEnvelope::flat_top(1.0, 4.0, 1.0);
    const auto grid = support_grid(env, 5);
    CHECK(grid.front() == -0.5);
    CHECK(grid.back() == 4.5);
    CHECK(grid[2] == 2.0);
    CHECK(support_grid(env, 1).front() == 4.5);
    CHECK_THROWS_AS(support_grid(env, 0), InvalidInput);
}
