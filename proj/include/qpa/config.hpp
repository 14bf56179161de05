#pragma once

// Run configuration: JSON with one object per section and flat,
// unit-suffixed keys (`C_gs_farads`, `T_em_kelvin`, ...). Every key is
// optional; each default that parse_config fills in is recorded.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qpa/circuit_model.hpp"
#include "qpa/correlations.hpp"
#include "qpa/fock.hpp"

namespace qpa {

enum class Representation { fock, gaussian, both };

std::string_view to_string(Representation r);

struct SweepConfig {
    double omega_min_over_omega0 = 0.8;
    double omega_max_over_omega0 = 1.2;
    int omega_points = 2001;
    double gm_min = 1e-3;  // siemens
    double gm_max = 4e-3;
    int gm_points = 10;    // 0 disables the g_m surface
    double t_end_seconds = 0.0;
    int t_samples = 201;
};

struct DynamicsConfig {
    FockSpaceSpec fock;
    Representation representation = Representation::both;
};

struct AppliedDefault {
    std::string key;  // e.g. "environment.kappa1_per_second"
    double value = 0.0;
    std::string rule;
};

struct CircuitConfig {
    TransistorParams transistor;
    EnvironmentParams environment;
    SweepConfig sweep;
    DynamicsConfig dynamics;
    FormulaMode mode = FormulaMode::standard;
    std::vector<AppliedDefault> defaults_applied;

    /// Throws UnitError or SchemaError naming the offending key.
    void validate() const;
};

/// Device table, intrinsic transistor defaults, and matching capacitors
/// that put the resonances at 0.95 and 1.05 omega_ref.
CircuitConfig default_config();

CircuitConfig parse_config(const std::filesystem::path& path);
CircuitConfig parse_config_text(std::string_view text);

/// Canonical JSON (sorted keys, every key present, round-trip doubles).
/// parse_config_text(emit_config(c)) reproduces c without new defaults.
std::string emit_config(const CircuitConfig& c);

std::vector<double> linspace(double lo, double hi, int n);
std::vector<double> omega_grid(const SweepConfig& s);
std::vector<double> gm_grid(const SweepConfig& s);
std::vector<double> time_grid_seconds(const SweepConfig& s);

}  // namespace qpa
