#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "cyclores/core.hpp"
#include "cyclores/errors.hpp"
#include "cyclores/pulse.hpp"
#include "cyclores/transitions.hpp"

namespace cyclores::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kMaxSpectrumLevel = 10'000'000;
constexpr int kMaxGridPoints = 1'000'000;

struct Key {
    const char* name;
    const char* help;
    bool integral;
    bool sweepable;
};

const Key kKeys[] = {
    {"species", "electron or proton", false, false},
    {"mass", "particle mass, g", false, true},
    {"charge", "charge magnitude, esu", false, true},
    {"charge_sign", "+1 or -1", true, true},
    {"p_z", "longitudinal momentum, g cm/s, or `resonant`", false, true},
    {"s", "initial Landau level", true, true},
    {"s_max", "highest level listed by spectrum", true, true},
    {"H0", "magnetic field, G", false, true},
    {"n", "refraction index", false, true},
    {"omega", "wave angular frequency, rad/s", false, true},
    {"g", "polarization, +1 or -1", true, true},
    {"A_bar", "mean vector-potential amplitude, G cm", false, true},
    {"T", "interaction time along the trajectory, s", false, true},
    {"zeta", "displacement parameter", false, true},
    {"envelope", "flat_top or gaussian", false, false},
    {"envelope_file", "CSV envelope with header tau_seconds,A_gauss_cm", false, false},
    {"ramp", "flat-top ramp as a fraction of the duration", false, true},
    {"points", "samples in the pulse table", true, true},
    {"delta_E", "energy exchange estimate for validate, erg", false, true},
    {"threshold", "small-parameter threshold for validate", false, true},
};

const Key* find_key(const std::string& name) {
    for (const auto& k : kKeys)
        if (name == k.name) return &k;
    return nullptr;
}

const std::set<std::string> kParticleKeys = {"species", "mass", "charge", "charge_sign", "p_z", "s"};
const std::set<std::string> kFieldKeys = {"H0", "n", "omega", "g", "A_bar", "T"};
const std::set<std::string> kEnvelopeKeys = {"envelope", "envelope_file", "ramp"};

std::set<std::string> accepted_keys(const std::string& command) {
    std::set<std::string> keys = kParticleKeys;
    if (command == "spectrum") {
        keys.erase("s");
        keys.insert({"H0", "s_max"});
        return keys;
    }
    keys.insert(kFieldKeys.begin(), kFieldKeys.end());
    if (command == "transitions") {
        keys.insert("zeta");
        keys.insert(kEnvelopeKeys.begin(), kEnvelopeKeys.end());
    } else if (command == "resonance") {
        keys.erase("A_bar");
        keys.erase("T");
    } else if (command == "pulse") {
        keys.insert(kEnvelopeKeys.begin(), kEnvelopeKeys.end());
        keys.insert("points");
    } else if (command == "quasiclassical") {
        keys.insert("zeta");
    } else if (command == "validate") {
        keys.insert({"delta_E", "threshold"});
    }
    return keys;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Params {
public:
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double number(const std::string& key) const {
        const std::string& raw = require(key);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || end != raw.data() + raw.size())
            throw InvalidInput("--" + key + ": not a number: '" + raw + "'");
        return v;
    }
    double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) const {
        const std::string& raw = require(key);
        int v = 0;
        const char* first = raw.data() + (raw.size() > 1 && raw[0] == '+' ? 1 : 0);
        const auto [end, ec] = std::from_chars(first, raw.data() + raw.size(), v);
        if (ec != std::errc() || end != raw.data() + raw.size())
            throw InvalidInput("--" + key + ": not an integer: '" + raw + "'");
        return v;
    }
    int integer(const std::string& key, int fallback) const {
        return has(key) ? integer(key) : fallback;
    }

private:
    const std::string& require(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw InvalidInput("missing required option --" + key);
        return it->second;
    }

    std::map<std::string, std::string> values_;
};

// One CSV/JSON cell; monostate prints as an empty field / null.
using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Outcome {
    Table table;
    json doc;
    json summary;  // pulse only
    int code = kOk;
};

std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return "";
            else if constexpr (std::is_same_v<V, double>) return format_number(v);
            else if constexpr (std::is_same_v<V, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
            else return v;
        },
        c);
}

json json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
            else return v;
        },
        c);
}

json rows_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

json optional_number(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

// ---- model construction -------------------------------------------------------

ParticleState make_particle(const Params& p) {
    const std::string species = p.text("species", "electron");
    ParticleState st;
    if (species == "electron") st = ParticleState::electron();
    else if (species == "proton") st = ParticleState::proton();
    else throw InvalidInput("--species must be electron or proton, got '" + species + "'");
    st.mass = p.number("mass", st.mass);
    st.charge = p.number("charge", st.charge);
    st.charge_sign = p.integer("charge_sign", st.charge_sign);
    st.s = p.integer("s", 0);
    return st;
}

FieldConfig make_field(const Params& p) {
    FieldConfig f;
    f.H0 = p.number("H0");
    f.n = p.number("n", 1.0);
    f.omega = p.number("omega");
    f.g = polarization_from_int(p.integer("g", 1));
    f.A_bar = p.number("A_bar", 0.0);
    f.T = p.number("T", 0.0);
    validate(f);
    return f;
}

// p_z is either a number or `resonant`, which solves the resonance condition.
void place_particle(ParticleState& st, const FieldConfig& f, const Params& p) {
    if (p.text("p_z", "0") == "resonant") {
        st.p_z = 0.0;
        st.p_z = resonant_momentum(f, st).p_z;
    } else {
        st.p_z = p.number("p_z", 0.0);
    }
    validate(st);
}

struct Context {
    ParticleState particle;
    FieldConfig field;
    DerivedScales scales;
};

Context make_context(const Params& p) {
    Context c;
    c.field = make_field(p);
    c.particle = make_particle(p);
    place_particle(c.particle, c.field, p);
    c.scales = derived_scales(c.particle, c.field);
    return c;
}

bool has_envelope(const Params& p) { return p.has("envelope") || p.has("envelope_file"); }

PulseEnvelope make_envelope(const Params& p, const Context& c) {
    if (p.has("envelope_file")) {
        if (p.has("envelope")) throw InvalidInput("--envelope and --envelope_file are exclusive");
        if (p.has("ramp")) throw InvalidInput("--ramp does not apply to a sampled envelope");
        return PulseEnvelope::sampled(read_envelope_csv_file(p.text("envelope_file", "")));
    }
    if (!p.has("A_bar") || !p.has("T")) throw InvalidInput("the envelope needs --A_bar and --T");
    const std::string kind = p.text("envelope", "flat_top");
    if (kind == "flat_top") return flat_top_for(c.field, c.scales, p.number("ramp", 1e-2));
    if (kind == "gaussian") {
        if (p.has("ramp")) throw InvalidInput("--ramp does not apply to a gaussian envelope");
        return PulseEnvelope::gaussian(c.field.A_bar, retarded_duration(c.field.T, c.scales));
    }
    throw InvalidInput("--envelope must be flat_top or gaussian, got '" + kind + "'");
}

double effective_zeta(const PulseEnvelope& env, const Context& c) {
    const auto states = drift_integral(c.particle, env, c.field, c.scales, support_grid(env, 2));
    return asymptotic_displacement(states, c.scales.l_B);
}

// ---- commands -----------------------------------------------------------------

Outcome cmd_spectrum(const Params& p) {
    ParticleState st = make_particle(p);
    st.p_z = p.number("p_z", 0.0);
    const double H0 = p.number("H0");
    const int s_max = p.integer("s_max");
    if (s_max < 0 || s_max > kMaxSpectrumLevel)
        throw InvalidInput("--s_max must lie in [0, " + std::to_string(kMaxSpectrumLevel) + "]");
    validate(st);

    Outcome o;
    o.table.columns = {"s", "E_erg", "E_over_mc2"};
    for (int s = 0; s <= s_max; ++s) {
        st.s = s;
        const double E = landau_energy(st, H0);
        o.table.rows.push_back({static_cast<long long>(s), E, E / st.rest_energy()});
    }
    o.doc = {{"H0", H0}, {"p_z", st.p_z}, {"levels", rows_json(o.table)}};
    return o;
}

Outcome cmd_transitions(const Params& p) {
    const bool direct = p.has("zeta");
    const bool envelope = has_envelope(p);
    const bool inputs = !envelope && (p.has("A_bar") || p.has("T"));
    if (direct + envelope + inputs != 1)
        throw InvalidInput("give exactly one of --zeta, (--A_bar, --T) or an envelope");
    if (p.has("ramp") && !envelope) throw InvalidInput("--ramp needs an envelope");

    const int s = p.integer("s");
    double zeta = 0.0;
    std::string source;
    FieldConfig field;
    if (direct) {
        field = make_field(p);
        zeta = p.number("zeta");
        source = "zeta";
    } else {
        const Context c = make_context(p);
        field = c.field;
        if (inputs) {
            if (!p.has("A_bar") || !p.has("T")) throw InvalidInput("the (A_bar, T) route needs both");
            zeta = displacement_parameter(c.particle, c.field, c.scales);
            source = "A_bar_T";
        } else {
            zeta = effective_zeta(make_envelope(p, c), c);
            source = "envelope";
        }
    }

    const TransitionTable t = transition_table(s, zeta, field);
    Outcome o;
    o.table.columns = {"s_prime", "w", "photons", "delta_pz", "delta_E", "cumulative"};
    long double cumulative = 0.0L;
    for (const auto& r : t.records) {
        cumulative += r.w;
        o.table.rows.push_back({static_cast<long long>(r.s_prime), r.w, static_cast<long long>(r.photons),
                                r.delta_pz, r.delta_E, static_cast<double>(cumulative)});
    }
    o.doc = {
        {"s", t.s},
        {"zeta", t.zeta},
        {"zeta_source", source},
        {"total", t.total},
        {"unitary", is_unitary(t)},
        {"cutoff_meta",
         {{"scanned_max", t.cutoff.scanned_max},
          {"drop_threshold", t.cutoff.drop_threshold},
          {"dropped_count", t.cutoff.dropped_count},
          {"dropped_weight", t.cutoff.dropped_weight},
          {"tail_bound", t.cutoff.tail_bound}}},
        {"records", rows_json(o.table)},
    };
    if (!is_unitary(t)) o.code = kNotUnitary;
    return o;
}

Outcome cmd_resonance(const Params& p) {
    const FieldConfig f = make_field(p);
    ParticleState st = make_particle(p);
    if (p.text("p_z", "0") == "resonant") throw InvalidInput("resonance takes a numeric --p_z starting guess");
    st.p_z = p.number("p_z", 0.0);
    validate(st);

    Outcome o;
    o.table.columns = {"p_z", "v_z_over_c", "regime", "residual", "residual_min", "residual_max"};
    try {
        const auto r = resonant_momentum(f, st);
        o.table.rows.push_back({r.p_z, r.beta, std::string(to_string(r.regime)), r.residual, {}, {}});
        o.doc = {{"p_z", r.p_z}, {"v_z_over_c", r.beta}, {"regime", to_string(r.regime)}, {"residual", r.residual}};
    } catch (const NoRoot& e) {
        o.table.rows.push_back({{}, {}, std::string("no_root"), {}, e.residual_min(), e.residual_max()});
        o.doc = {{"error", "no_root"},
                 {"message", e.what()},
                 {"residual_min", e.residual_min()},
                 {"residual_max", e.residual_max()}};
        o.code = kNoRoot;
    }
    return o;
}

Outcome cmd_pulse(const Params& p) {
    const Context c = make_context(p);
    const PulseEnvelope env = make_envelope(p, c);
    const int points = p.integer("points", 101);
    if (points < 2 || points > kMaxGridPoints)
        throw InvalidInput("--points must lie in [2, " + std::to_string(kMaxGridPoints) + "]");

    const auto states = drift_integral(c.particle, env, c.field, c.scales, support_grid(env, points));
    const double zeta_eff = asymptotic_displacement(states, c.scales.l_B);

    Outcome o;
    o.table.columns = {"tau", "Kx", "Ky", "absK", "phase_Q"};
    for (const auto& st : states)
        o.table.rows.push_back({st.tau, st.K.real(), st.K.imag(), std::abs(st.K), st.phase_Q});

    double closed = NAN;
    double gap = NAN;
    if (env.kind() == PulseEnvelope::Kind::FlatTopRamped) {
        closed = displacement_parameter(c.particle, c.field, c.scales);
        if (closed > 0.0) gap = std::abs(zeta_eff - closed) / closed;
    }
    o.summary = {
        {"zeta_eff", zeta_eff},
        {"closed_form_zeta", optional_number(closed)},
        {"relative_gap", optional_number(gap)},
    };
    o.doc = {{"summary", o.summary}, {"samples", rows_json(o.table)}};
    return o;
}

Outcome cmd_quasiclassical(const Params& p, std::ostream& err) {
    const int s = p.integer("s");
    Outcome o;
    double zeta = 0.0;
    json classical = nullptr;
    if (p.has("zeta")) {
        for (const auto& k : {"A_bar", "T"})
            if (p.has(k)) throw InvalidInput("give either --zeta or (--A_bar, --T)");
        zeta = p.number("zeta");
    } else {
        if (!p.has("A_bar") || !p.has("T")) throw InvalidInput("give --zeta or both --A_bar and --T");
        const Context c = make_context(p);
        const auto q = quasiclassical_predict(c.particle, c.field, c.scales);
        zeta = q.zeta_from_cl;
        classical = {{"field_strength", q.field_strength},
                     {"v_tr", q.v_tr},
                     {"delta_eps_cl", q.delta_eps_cl},
                     {"classical_shift", q.predicted_shift}};
    }
    if (s < 100) err << "warning: s = " << s << " is below the quasiclassical range (s >= 100)\n";

    const auto pk = peak_compare(s, zeta);
    o.table.columns = {"s", "zeta", "predicted_shift", "argmax_shift", "relative_gap", "band_lo", "band_hi"};
    o.table.rows.push_back({static_cast<long long>(s), zeta, pk.predicted_shift,
                            static_cast<long long>(pk.argmax_shift), pk.relative_gap, pk.band_lo, pk.band_hi});
    o.doc = {
        {"s", s},
        {"zeta", zeta},
        {"predicted_shift", pk.predicted_shift},
        {"argmax_shift", pk.argmax_shift},
        {"relative_gap", optional_number(pk.relative_gap)},
        {"zeta_peak_band", {{"s_prime_lo", pk.band_lo}, {"s_prime_hi", pk.band_hi}}},
    };
    if (!classical.is_null()) o.doc["classical"] = classical;
    return o;
}

Outcome cmd_validate(const Params& p) {
    const Context c = make_context(p);
    const double delta_E = p.number("delta_E", 0.0);
    const double threshold = p.number("threshold", 1e-2);
    const auto r = validity_report(c.particle, c.field, delta_E, threshold);

    Outcome o;
    o.table.columns = {"condition", "ratio", "holds"};
    o.table.rows.push_back({std::string("photon"), r.photon.ratio, r.photon.holds});
    o.table.rows.push_back({std::string("exchange"), r.exchange_estimated ? Cell(r.exchange.ratio) : Cell(),
                            r.exchange_estimated ? Cell(r.exchange.holds) : Cell()});
    o.table.rows.push_back({std::string("landau"), r.landau.ratio, r.landau.holds});
    const auto check = [](const ValidityCheck& v) { return json{{"ratio", v.ratio}, {"holds", v.holds}}; };
    o.doc = {
        {"photon", check(r.photon)},
        {"exchange", r.exchange_estimated ? check(r.exchange) : json(nullptr)},
        {"landau", check(r.landau)},
        {"threshold", r.threshold},
    };
    return o;
}

Outcome evaluate(const std::string& command, const Params& p, std::ostream& err) {
    if (command == "spectrum") return cmd_spectrum(p);
    if (command == "transitions") return cmd_transitions(p);
    if (command == "resonance") return cmd_resonance(p);
    if (command == "pulse") return cmd_pulse(p);
    if (command == "quasiclassical") return cmd_quasiclassical(p, err);
    return cmd_validate(p);
}

// ---- sweeps -------------------------------------------------------------------

struct Axis {
    std::string name;
    std::vector<std::string> values;
    std::vector<double> numbers;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

Axis parse_axis(const std::string& axis_text, const std::set<std::string>& accepted) {
    const auto parts = split(axis_text, ':');
    if (parts.size() != 4 && parts.size() != 5)
        throw InvalidInput("--sweep expects name:min:max:count[:log], got '" + axis_text + "'");
    Axis axis;
    axis.name = parts[0];
    const Key* key = find_key(axis.name);
    if (!key || !accepted.count(axis.name) || !key->sweepable)
        throw InvalidInput("--sweep: '" + axis.name + "' is not a sweepable parameter of this command");

    Params bounds;
    bounds.set("min", parts[1]);
    bounds.set("max", parts[2]);
    bounds.set("count", parts[3]);
    const double lo = bounds.number("min");
    const double hi = bounds.number("max");
    const int count = bounds.integer("count");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidInput("--sweep bounds must be finite");
    if (count < 1) throw InvalidInput("--sweep count must be at least 1");
    bool log = false;
    if (parts.size() == 5) {
        if (parts[4] == "log") log = true;
        else if (parts[4] != "lin") throw InvalidInput("--sweep scale must be lin or log");
    }
    if (log && (lo <= 0.0 || hi <= 0.0)) throw InvalidInput("--sweep log scale needs positive bounds");

    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        double v = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
        if (i == 0) v = lo;
        else if (i == count - 1) v = hi;
        if (key->integral) {
            const double r = std::round(v);
            if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(r)))
                throw InvalidInput("--sweep " + axis.name + " takes integer values only");
            axis.values.push_back(std::to_string(static_cast<long long>(r)));
            axis.numbers.push_back(r);
        } else {
            axis.values.push_back(format_number(v));
            axis.numbers.push_back(v);
        }
    }
    return axis;
}

unsigned thread_count() {
    const char* env = std::getenv("CYCLORES_THREADS");
    if (env && *env) {
        Params p;
        p.set("CYCLORES_THREADS", env);
        const int n = p.integer("CYCLORES_THREADS");
        if (n < 1) throw InvalidInput("CYCLORES_THREADS must be a positive integer");
        return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int exit_code_of(const std::exception_ptr& e, std::ostream& err) {
    try {
        std::rethrow_exception(e);
    } catch (const InvalidInput& x) {
        err << "error: " << x.what() << '\n';
        return kInvalid;
    } catch (const CherenkovDegenerate& x) {
        err << "error: " << x.what() << '\n';
        return kInvalid;
    } catch (const NoRoot& x) {
        err << "error: " << x.what() << " (residual range [" << format_number(x.residual_min()) << ", "
            << format_number(x.residual_max()) << "])\n";
        return kNoRoot;
    } catch (const QuadratureError& x) {
        err << "error: " << x.what() << " (achieved error " << format_number(x.achieved_error()) << ")\n";
        return kQuadrature;
    } catch (const std::exception& x) {
        err << "error: " << x.what() << '\n';
        return kFailure;
    }
}

// ---- output -------------------------------------------------------------------

struct Point {
    std::vector<std::pair<std::string, double>> coords;
    Params params;
};

void write_csv(std::ostream& os, const std::vector<Point>& points, const std::vector<Outcome>& results,
               bool swept) {
    const auto& first = results.front().table;
    bool header = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (header) {
            std::string line;
            if (swept)
                for (const auto& [name, v] : points[i].coords) line += name + ",";
            for (std::size_t c = 0; c < first.columns.size(); ++c) line += (c ? "," : "") + first.columns[c];
            os << line << '\n';
            header = false;
        }
        for (const auto& row : results[i].table.rows) {
            std::string line;
            if (swept)
                for (const auto& [name, v] : points[i].coords) line += points[i].params.text(name, "") + ",";
            for (std::size_t c = 0; c < row.size(); ++c) line += (c ? "," : "") + csv_cell(row[c]);
            os << line << '\n';
        }
    }
}

json point_json(const Point& p) {
    json obj = json::object();
    for (const auto& [name, v] : p.coords) obj[name] = v;
    return obj;
}

json collect(const std::vector<Point>& points, const std::vector<Outcome>& results, bool swept,
             json Outcome::*member) {
    if (!swept) return results.front().*member;
    json arr = json::array();
    for (std::size_t i = 0; i < results.size(); ++i)
        arr.push_back({{"point", point_json(points[i])}, {"result", results[i].*member}});
    return json{{"sweep", arr}};
}

bool write_to(const std::string& path, std::ostream& fallback, std::ostream& err,
              const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(fallback);
        return true;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        err << "error: cannot open " << path << " for writing\n";
        return false;
    }
    body(file);
    file.flush();
    if (!file) {
        err << "error: failed writing " << path << '\n';
        return false;
    }
    return true;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cyclotron-resonance transitions between Landau levels in a circularly polarised wave."};
    app.name("cyclores");
    app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    std::string command;
    std::string output = "-";
    std::string format = "csv";
    std::string summary_path;
    std::vector<std::string> sweeps;
    app.add_option("command", command, "spectrum | transitions | resonance | pulse | quasiclassical | validate")
        ->required()
        ->check(CLI::IsMember({"spectrum", "transitions", "resonance", "pulse", "quasiclassical", "validate"}));
    app.add_option("--output,-o", output, "output file, - for stdout");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--summary", summary_path, "pulse: JSON summary file when --format csv");
    app.add_option("--sweep", sweeps, "name:min:max:count[:log]; repeat for a product grid");

    std::map<std::string, std::string> raw;
    for (const auto& k : kKeys) app.add_option(std::string("--") + k.name, raw[k.name], k.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    Params base;
    for (const auto& k : kKeys)
        if (app.get_option(std::string("--") + k.name)->count() > 0) base.set(k.name, raw[k.name]);

    std::vector<Point> points;
    unsigned threads = 1;
    try {
        const auto accepted = accepted_keys(command);
        for (const auto& [key, value] : base.values())
            if (!accepted.count(key)) throw InvalidInput("--" + key + " does not apply to " + command);
        if (!summary_path.empty() && command != "pulse") throw InvalidInput("--summary applies to pulse only");

        std::vector<Axis> axes;
        for (const auto& axis_text : sweeps) {
            axes.push_back(parse_axis(axis_text, accepted));
            for (std::size_t i = 0; i + 1 < axes.size(); ++i)
                if (axes[i].name == axes.back().name) throw InvalidInput("--sweep repeats " + axes.back().name);
        }
        points.push_back({{}, base});
        for (const auto& axis : axes) {
            std::vector<Point> next;
            for (const auto& p : points)
                for (std::size_t i = 0; i < axis.values.size(); ++i) {
                    Point q = p;
                    q.coords.emplace_back(axis.name, axis.numbers[i]);
                    q.params.set(axis.name, axis.values[i]);
                    next.push_back(std::move(q));
                }
            points = std::move(next);
        }
        if (!axes.empty()) threads = std::min<unsigned>(thread_count(), static_cast<unsigned>(points.size()));
    } catch (...) {
        return exit_code_of(std::current_exception(), err);
    }
    const bool swept = !sweeps.empty();

    std::vector<Outcome> results(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    std::vector<std::ostringstream> warnings(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                results[i] = evaluate(command, points[i].params, warnings[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int code = kOk;
    for (std::size_t i = 0; i < points.size(); ++i) {
        err << warnings[i].str();
        if (failures[i]) return exit_code_of(failures[i], err);
        if (code == kOk) code = results[i].code;
    }

    const bool written = write_to(output, out, err, [&](std::ostream& os) {
        if (format == "json") os << collect(points, results, swept, &Outcome::doc).dump(2) << '\n';
        else write_csv(os, points, results, swept);
    });
    if (!written) return kInvalid;
    if (!summary_path.empty()) {
        const bool ok = write_to(summary_path, out, err, [&](std::ostream& os) {
            os << collect(points, results, swept, &Outcome::summary).dump(2) << '\n';
        });
        if (!ok) return kInvalid;
    }
    return code;
}

}  // namespace cyclores::cli
