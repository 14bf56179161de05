#include "qpa/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qpa/constants.hpp"
#include "qpa/errors.hpp"

namespace qpa {

using nlohmann::json;

std::string_view to_string(Representation r) {
    switch (r) {
        case Representation::fock: return "fock";
        case Representation::gaussian: return "gaussian";
        case Representation::both: return "both";
    }
    return "both";
}

namespace {

constexpr double kOmegaRefDefault = constants::two_pi * 5.2e9;
constexpr double kMatchLow = 0.95;
constexpr double kMatchHigh = 1.05;

TransistorParams default_transistor() {
    TransistorParams t;
    t.width_um = 42.0;
    t.C_pg = 13.65e-15;
    t.C_pd = 12.11e-15;
    t.L_g = 32.13e-12;
    t.L_d = 32.24e-12;
    t.L_s = 45.22e-12;
    t.R_g = 25.78;
    t.R_d = 2.62;
    t.R_s = 0.36;
    t.C_gs = 42e-15;
    t.C_gd = 15e-15;
    t.g_m = 2e-3;
    t.gamma_noise = 2.0 / 3.0;
    return t;
}

EnvironmentParams default_environment_base() {
    EnvironmentParams e;
    e.T_em = 0.3;
    e.V_RF = 1e-7;
    e.omega_ref = kOmegaRefDefault;
    return e;
}

// One documented key. `number` and `integer` point into the config.
struct Key {
    std::string name;
    std::string unit;
    double* number = nullptr;
    int* integer = nullptr;
    std::string* text = nullptr;
    std::vector<std::string> choices;
    std::string alias;
};

Key number(std::string name, std::string unit, double* field, std::string alias = {}) {
    Key k;
    k.name = std::move(name);
    k.unit = std::move(unit);
    k.number = field;
    k.alias = std::move(alias);
    return k;
}

Key count(std::string name, int* field) {
    Key k;
    k.name = std::move(name);
    k.unit = "count";
    k.integer = field;
    return k;
}

Key choice(std::string name, std::string* field, std::vector<std::string> choices) {
    Key k;
    k.name = std::move(name);
    k.text = field;
    k.unit = "one of ";
    for (std::size_t i = 0; i < choices.size(); ++i) k.unit += (i ? "|" : "") + choices[i];
    k.choices = std::move(choices);
    return k;
}

struct Schema {
    std::map<std::string, std::vector<Key>> sections;
};

struct TextChoices {
    std::string representation = "both";
    std::string mode = "standard";
};

Schema make_schema(CircuitConfig& c, TextChoices& text) {
    TransistorParams& t = c.transistor;
    EnvironmentParams& e = c.environment;
    SweepConfig& s = c.sweep;
    Schema schema;
    schema.sections["transistor"] = {
        number("width_micrometers", "micrometers", &t.width_um),
        number("C_pg_farads", "farads", &t.C_pg),
        number("C_pd_farads", "farads", &t.C_pd),
        number("L_g_henries", "henries", &t.L_g, "L_1_henries"),
        number("L_d_henries", "henries", &t.L_d, "L_2_henries"),
        number("L_s_henries", "henries", &t.L_s),
        number("R_g_ohms", "ohms", &t.R_g),
        number("R_d_ohms", "ohms", &t.R_d),
        number("R_s_ohms", "ohms", &t.R_s),
        number("C_gs_farads", "farads", &t.C_gs),
        number("C_gd_farads", "farads", &t.C_gd),
        number("C_ds_farads", "farads", &t.C_ds),
        number("g_m_siemens", "siemens", &t.g_m),
        number("gamma_noise", "dimensionless", &t.gamma_noise),
    };
    schema.sections["environment"] = {
        number("T_em_kelvin", "kelvin", &e.T_em),
        number("kappa1_per_second", "1/s", &e.kappa1),
        number("kappa2_per_second", "1/s", &e.kappa2),
        number("V_RF_volts", "volts", &e.V_RF),
        number("C_in_farads", "farads", &e.C_in),
        number("omega_ref_rad_per_second", "rad/s", &e.omega_ref),
    };
    schema.sections["sweep"] = {
        number("omega_min_over_omega0", "dimensionless", &s.omega_min_over_omega0),
        number("omega_max_over_omega0", "dimensionless", &s.omega_max_over_omega0),
        count("omega_points", &s.omega_points),
        number("gm_min_siemens", "siemens", &s.gm_min),
        number("gm_max_siemens", "siemens", &s.gm_max),
        count("gm_points", &s.gm_points),
        number("t_end_seconds", "seconds", &s.t_end_seconds),
        count("t_samples", &s.t_samples),
    };
    schema.sections["dynamics"] = {
        count("n_trunc", &c.dynamics.fock.n_trunc),
        choice("representation", &text.representation, {"fock", "gaussian", "both"}),
    };
    schema.sections["correlations"] = {
        choice("mode", &text.mode, {"paper", "standard"}),
    };
    return schema;
}

double key_value(const Key& k) {
    if (k.number) return *k.number;
    if (k.integer) return *k.integer;
    return std::nan("");
}

void read_key(const Key& k, const std::string& path, const json& v) {
    const std::string expected = "expected " + k.unit;
    if (k.number) {
        if (!v.is_number()) throw SchemaError(path + ": " + expected + " as a number");
        *k.number = v.get<double>();
    } else if (k.integer) {
        if (!v.is_number_integer()) throw SchemaError(path + ": " + expected + " as an integer");
        const auto n = v.get<long long>();
        if (n < 0 || n > 1'000'000'000) throw UnitError(path + " out of range");
        *k.integer = static_cast<int>(n);
    } else {
        if (!v.is_string()) throw SchemaError(path + ": " + expected + " as a string");
        const std::string s = v.get<std::string>();
        if (std::find(k.choices.begin(), k.choices.end(), s) == k.choices.end()) {
            throw SchemaError(path + ": " + expected + ", got \"" + s + "\"");
        }
        *k.text = s;
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw UnitError(message);
}

// Applies the derived defaults for whatever the file left out. `present`
// holds the dotted paths that were given explicitly.
void resolve_derived(CircuitConfig& c, const std::map<std::string, bool>& present) {
    auto given = [&](const std::string& key) { return present.count(key) > 0; };
    auto note = [&](const std::string& key, double value, const std::string& rule) {
        c.defaults_applied.push_back({key, value, rule});
    };

    const bool has_cds = given("transistor.C_ds_farads");
    const bool has_cin = given("environment.C_in_farads");
    if (!has_cds || !has_cin) {
        c.transistor.validate_without_matching();
        const MatchingCaps m = calibrate_matching(c.transistor, kMatchLow * c.environment.omega_ref,
                                                  kMatchHigh * c.environment.omega_ref);
        const std::string rule = "matched so omega_1, omega_2 = 0.95, 1.05 omega_ref";
        if (!has_cds) {
            c.transistor.C_ds = m.C_ds;
            note("transistor.C_ds_farads", m.C_ds, rule);
        }
        if (!has_cin) {
            c.environment.C_in = m.C_in;
            note("environment.C_in_farads", m.C_in, rule);
        }
    }

    const bool has_k1 = given("environment.kappa1_per_second");
    const bool has_k2 = given("environment.kappa2_per_second");
    if (!has_k1 || !has_k2) {
        c.transistor.validate();
        c.environment.validate_without_kappa();
        const CoefficientSet coeffs = derive_coefficients(c.transistor, c.environment);
        if (!has_k1) {
            c.environment.kappa1 = coeffs.hamiltonian.omega_1 / 100.0;
            note("environment.kappa1_per_second", c.environment.kappa1, "omega_1 / 100 (Q = 100)");
        }
        if (!has_k2) {
            c.environment.kappa2 = coeffs.hamiltonian.omega_2 / 100.0;
            note("environment.kappa2_per_second", c.environment.kappa2, "omega_2 / 100 (Q = 100)");
        }
    }

    if (!given("sweep.t_end_seconds")) {
        const double kmin = std::min(c.environment.kappa1, c.environment.kappa2);
        c.sweep.t_end_seconds = 20.0 / kmin;
        note("sweep.t_end_seconds", c.sweep.t_end_seconds, "20 / min(kappa1, kappa2)");
    }
}

CircuitConfig parse_json(const json& root) {
    if (!root.is_object()) throw SchemaError("config root must be a JSON object");

    CircuitConfig c;
    c.transistor = default_transistor();
    c.environment = default_environment_base();
    TextChoices text;
    const Schema schema = make_schema(c, text);

    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!schema.sections.count(it.key())) throw SchemaError("unknown section \"" + it.key() + "\"");
        if (!it.value().is_object()) throw SchemaError(it.key() + ": expected an object");
    }

    std::map<std::string, bool> present;
    // Defaults that need no other value are recorded here; derived ones
    // (matching capacitors, decay rates, time window) in resolve_derived.
    static const std::set<std::string> derived = {
        "transistor.C_ds_farads",
        "environment.C_in_farads",
        "environment.kappa1_per_second",
        "environment.kappa2_per_second",
        "sweep.t_end_seconds",
    };

    for (const auto& [section, keys] : schema.sections) {
        const json empty = json::object();
        const json& obj = root.contains(section) ? root.at(section) : empty;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const Key& k) {
                return k.name == it.key() || (!k.alias.empty() && k.alias == it.key());
            });
            if (!known) throw SchemaError("unknown key " + section + "." + it.key());
        }
        for (const Key& k : keys) {
            const std::string path = section + "." + k.name;
            const bool has_main = obj.contains(k.name);
            const bool has_alias = !k.alias.empty() && obj.contains(k.alias);
            if (has_main && has_alias) {
                throw SchemaError(path + " given twice (also as " + section + "." + k.alias + ")");
            }
            if (has_main || has_alias) {
                read_key(k, has_main ? path : section + "." + k.alias, obj.at(has_main ? k.name : k.alias));
                present[path] = true;
            } else if (!derived.count(path)) {
                c.defaults_applied.push_back(
                    {path, key_value(k), k.text ? "default " + *k.text : "documented default"});
            }
        }
    }
    c.dynamics.representation = text.representation == "fock"       ? Representation::fock
                                : text.representation == "gaussian" ? Representation::gaussian
                                                                    : Representation::both;
    c.mode = text.mode == "paper" ? FormulaMode::paper : FormulaMode::standard;

    resolve_derived(c, present);
    c.validate();
    return c;
}

}  // namespace

void CircuitConfig::validate() const {
    transistor.validate();
    environment.validate();
    const SweepConfig& s = sweep;
    require(s.omega_min_over_omega0 > 0.0, "sweep.omega_min_over_omega0 must be positive");
    require(s.omega_max_over_omega0 > s.omega_min_over_omega0,
            "sweep.omega_max_over_omega0 must exceed sweep.omega_min_over_omega0");
    require(s.omega_points >= 3, "sweep.omega_points must be at least 3");
    require(s.gm_min >= 0.0, "sweep.gm_min must be non-negative");
    require(s.gm_max >= s.gm_min, "sweep.gm_max must not be below sweep.gm_min");
    require(s.gm_points >= 0, "sweep.gm_points must be non-negative");
    require(s.gm_points <= 1 || s.gm_max > s.gm_min,
            "sweep.gm_max must exceed sweep.gm_min for more than one point");
    require(std::isfinite(s.t_end_seconds) && s.t_end_seconds > 0.0,
            "sweep.t_end must be positive");
    require(s.t_samples >= 2, "sweep.t_samples must be at least 2");
    require(dynamics.fock.n_trunc >= 2, "dynamics.n_trunc must be at least 2");
}

CircuitConfig default_config() { return parse_json(json::object()); }

CircuitConfig parse_config_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_json(root);
}

CircuitConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string emit_config(const CircuitConfig& c) {
    CircuitConfig copy = c;
    TextChoices text;
    text.representation = std::string(to_string(c.dynamics.representation));
    text.mode = std::string(to_string(c.mode));
    const Schema schema = make_schema(copy, text);
    json root = json::object();
    for (const auto& [section, keys] : schema.sections) {
        json obj = json::object();
        for (const Key& k : keys) {
            if (k.number) obj[k.name] = *k.number;
            else if (k.integer) obj[k.name] = *k.integer;
            else obj[k.name] = *k.text;
        }
        root[section] = obj;
    }
    return root.dump(2) + "\n";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        v[static_cast<std::size_t>(i)] = i == n - 1 ? hi : lo + (hi - lo) * f;
    }
    return v;
}

std::vector<double> omega_grid(const SweepConfig& s) {
    return linspace(s.omega_min_over_omega0, s.omega_max_over_omega0, s.omega_points);
}

std::vector<double> gm_grid(const SweepConfig& s) { return linspace(s.gm_min, s.gm_max, s.gm_points); }

std::vector<double> time_grid_seconds(const SweepConfig& s) {
    return linspace(0.0, s.t_end_seconds, s.t_samples);
}

}  // namespace qpa
