#pragma once

// Subcommand drivers. Each writes its files plus manifest.json into
// `out_dir`; CSV bodies depend only on the config, never on `jobs`.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpa/config.hpp"
#include "qpa/correlations.hpp"
#include "qpa/emit.hpp"
#include "qpa/spectral.hpp"
#include "qpa/states.hpp"

namespace qpa {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned jobs = 1;
};

struct RunResult {
    std::vector<std::string> files;     // relative to out_dir, manifest last
    std::vector<std::string> warnings;
};

RunResult run_coeffs(const CircuitConfig& c, const RunOptions& opt);
RunResult run_gain(const CircuitConfig& c, const RunOptions& opt);
RunResult run_evolve(const CircuitConfig& c, const RunOptions& opt);
RunResult run_correlations(const CircuitConfig& c, const RunOptions& opt);
RunResult run_sweep(const CircuitConfig& c, const RunOptions& opt);

// Building blocks, exposed for tests.

/// Coefficient report: {"coefficients": [{name, value, unit}], "unused_inputs": [...]}.
std::string coefficient_report_json(const CircuitConfig& c);

GainTrace default_gain_trace(const CircuitConfig& c, unsigned jobs = 1);

struct TrajectorySample {
    double t = 0.0;  // units of 1/omega_ref
    MomentSet moments;
    double purity = 0.0;
    double leakage = 0.0;
};

struct EvolutionResult {
    std::vector<double> t_grid;  // units of 1/omega_ref
    std::vector<TrajectorySample> fock;      // truncated at a leakage abort
    std::vector<TrajectorySample> gaussian;
    std::vector<GaussianState> gaussian_states;
    bool unstable = false;
    std::optional<std::string> fock_abort;
    /// Largest |fock - gaussian| / max(|gaussian|, 1e-9) over n1, n2, |c12|,
    /// |m12| on samples with leakage < 1e-6. NaN unless both paths ran.
    double max_relative_deviation = 0.0;
    std::size_t compared_samples = 0;
};

inline constexpr double kCompareLeakage = 1e-6;

EvolutionResult simulate_evolution(const CircuitConfig& c, unsigned jobs = 1);

inline const std::vector<std::string> kGainColumns = {
    "omega_over_omega0", "gain1_norm", "gain2_norm", "gain1_raw", "gain2_raw", "singular_flag"};
inline const std::vector<std::string> kTrajectoryColumns = {
    "t", "n1", "n2", "re_c12", "im_c12", "re_m12", "im_m12", "purity", "leakage", "flag_unstable"};
inline const std::vector<std::string> kCorrelationColumns = {
    "t_or_gm", "nu_plus", "nu_minus", "nu_tilde_minus", "entangled",
    "discord", "classical_corr", "purity", "mode"};

std::vector<CsvRow> gain_rows(const GainTrace& trace);
CsvRow trajectory_row(const TrajectorySample& s, bool unstable);
CsvRow correlation_row(double t_or_gm, const CorrelationReport& r);
/// A row of NaN values for a point where no report could be formed.
CsvRow correlation_gap_row(double t_or_gm, FormulaMode mode);

}  // namespace qpa
