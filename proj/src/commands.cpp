#include "qpa/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "qpa/errors.hpp"
#include "qpa/fock.hpp"
#include "qpa/frame.hpp"
#include "qpa/gaussian.hpp"
#include "qpa/parallel.hpp"

namespace qpa {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string flag(bool b) { return b ? "1" : "0"; }

json manifest_base(const CircuitConfig& c, const std::string& subcommand) {
    json m;
    m["tool"] = "qpa";
    m["tool_version"] = QPA_VERSION;
    m["subcommand"] = subcommand;
    m["timestamp"] = utc_timestamp();
    m["config_sha256"] = sha256_hex(emit_config(c));
    json defaults = json::array();
    for (const AppliedDefault& d : c.defaults_applied) {
        defaults.push_back({{"key", d.key}, {"value", d.value}, {"rule", d.rule}});
    }
    m["defaults_applied"] = defaults;
    return m;
}

void finish(RunResult& r, json manifest, const RunOptions& opt) {
    r.files.push_back("manifest.json");
    manifest["files"] = r.files;
    manifest["warnings"] = r.warnings;
    write_text(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_csv(RunResult& r, const RunOptions& opt, const std::string& name,
               const std::vector<std::string>& header, const std::vector<CsvRow>& rows) {
    emit_csv(header, rows, opt.out_dir / name);
    r.files.push_back(name);
}

FrameParameters frame_for(const CircuitConfig& c) {
    return to_reference_frame(derive_coefficients(c.transistor, c.environment), c.environment);
}

std::vector<double> scaled_time_grid(const CircuitConfig& c) {
    std::vector<double> t = time_grid_seconds(c.sweep);
    for (double& x : t) x *= c.environment.omega_ref;
    return t;
}

double gaussian_purity(const CovarianceMatrix& cm) { return 1.0 / std::sqrt(cm.determinant()); }

TrajectorySample gaussian_sample(double t, const GaussianState& s) {
    return {t, moments_from_gaussian(s), gaussian_purity(s.cm), 0.0};
}

CsvRow correlation_row_or_gap(double x, const CovarianceMatrix& cm, FormulaMode mode,
                              std::vector<std::string>* warnings) {
    try {
        return correlation_row(x, correlation_report(cm, mode));
    } catch (const Error& e) {
        if (warnings) warnings->push_back("correlations at " + format_double(x) + ": " + e.what());
        return correlation_gap_row(x, mode);
    }
}

// Gaussian-path correlation time series for one config.
std::vector<CsvRow> gaussian_correlation_series(const CircuitConfig& c,
                                                std::vector<std::string>* warnings) {
    const FrameParameters f = frame_for(c);
    const std::vector<double> t = scaled_time_grid(c);
    const GaussianTrajectory traj =
        evolve_gaussian(GaussianState{}, langevin_dynamics(f), t, rk4_step_bound(f));
    std::vector<CsvRow> rows;
    rows.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        rows.push_back(correlation_row_or_gap(t[i], traj.states[i].cm, c.mode, warnings));
    }
    return rows;
}

struct SurfaceTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
    std::vector<double> peak_raw;
};

// One row per g_m: the raw peak of max(|S11|^2, |S33|^2), where it sits,
// then that envelope over the omega grid divided by the surface maximum.
SurfaceTable surface_table(const CircuitConfig& c, unsigned jobs) {
    const std::vector<double> grid = omega_grid(c.sweep);
    const GainSurface s =
        gm_gain_surface(gm_grid(c.sweep), c.transistor, c.environment, grid, jobs);
    SurfaceTable table;
    table.header = {"g_m_siemens", "peak_gain_raw", "peak_omega_over_omega0"};
    for (double w : grid) table.header.push_back("omega_" + format_short(w));

    std::vector<std::vector<double>> envelope(s.rows.size());
    double global = 0.0;
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        const GainTrace& g = s.rows[r];
        envelope[r].resize(g.size(), kNaN);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.singular[i]) {
                envelope[r][i] = std::max(g.gain1_raw[i], g.gain2_raw[i]);
                global = std::max(global, envelope[r][i]);
            }
        }
    }
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        double peak = kNaN;
        double where = kNaN;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = envelope[r][i];
            if (!std::isnan(v) && (std::isnan(peak) || v > peak)) {
                peak = v;
                where = grid[i];
            }
        }
        table.peak_raw.push_back(peak);
        CsvRow row = {format_double(s.gm_grid[r]), format_double(peak), format_double(where)};
        for (double v : envelope[r]) row.push_back(format_double(global > 0.0 ? v / global : kNaN));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace

std::vector<CsvRow> gain_rows(const GainTrace& trace) {
    std::vector<CsvRow> rows;
    rows.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        rows.push_back({format_double(trace.omega_over_omega0[i]), format_double(trace.gain1[i]),
                        format_double(trace.gain2[i]), format_double(trace.gain1_raw[i]),
                        format_double(trace.gain2_raw[i]), flag(trace.singular[i] != 0)});
    }
    return rows;
}

CsvRow trajectory_row(const TrajectorySample& s, bool unstable) {
    const MomentSet& m = s.moments;
    return {format_double(s.t),         format_double(m.n1),        format_double(m.n2),
            format_double(m.c12.real()), format_double(m.c12.imag()), format_double(m.m12.real()),
            format_double(m.m12.imag()), format_double(s.purity),    format_double(s.leakage),
            flag(unstable)};
}

CsvRow correlation_row(double t_or_gm, const CorrelationReport& r) {
    return {format_double(t_or_gm),       format_double(r.nu_plus), format_double(r.nu_minus),
            format_double(r.nu_tilde_minus), flag(r.entangled),     format_double(r.discord),
            format_double(r.classical_corr), format_double(r.purity), std::string(to_string(r.mode))};
}

CsvRow correlation_gap_row(double t_or_gm, FormulaMode mode) {
    const std::string nan = format_double(kNaN);
    return {format_double(t_or_gm), nan, nan, nan, nan, nan, nan, nan, std::string(to_string(mode))};
}

std::string coefficient_report_json(const CircuitConfig& c) {
    const CoefficientSet s = derive_coefficients(c.transistor, c.environment);
    const PartialCaps& p = s.partial;
    const AppendixCoeffs& a = s.appendix;
    const HamiltonianCoefficients& h = s.hamiltonian;
    const NoisePSDs& n = s.noise;
    const FrameParameters f = to_reference_frame(s, c.environment);

    json list = json::array();
    auto add = [&](const char* name, double value, const char* unit) {
        list.push_back({{"name", name}, {"value", value}, {"unit", unit}});
    };
    add("C_p1", p.C_p1, "F");
    add("C_p2", p.C_p2, "F");
    add("D_M", p.D_M, "F^2");
    add("inv2C_1p", a.inv2C_1p, "1/F");
    add("inv2C_2p", a.inv2C_2p, "1/F");
    add("invC_12p", a.invC_12p, "1/F");
    add("g_12p", a.g_12p, "1/s");
    add("g_22p", a.g_22p, "1/s");
    add("V_q1p", a.V_q1p, "1");
    add("V_q2p", a.V_q2p, "1");
    add("G_1", a.G_1, "S");
    add("C_1", h.C_1, "F");
    add("C_2", h.C_2, "F");
    add("invC_12", h.invC_12, "1/F");
    add("g_12", h.g_12, "1/s");
    add("g_22", h.g_22, "1/s");
    add("V_q1", h.V_q1, "V");
    add("V_q2", h.V_q2, "V");
    add("Z_1", h.Z_1, "ohm");
    add("Z_2", h.Z_2, "ohm");
    add("omega_1", h.omega_1, "rad/s");
    add("omega_2", h.omega_2, "rad/s");
    add("g_q1q2", h.g_q1q2, "rad/s");
    add("g_q1p2", h.g_q1p2, "rad/s");
    add("g_q2p2", h.g_q2p2, "rad/s");
    add("gamma_q1", h.gamma_q1, "1/s");
    add("gamma_q2", h.gamma_q2, "1/s");
    add("gamma_phi1", h.gamma_phi1, "1/s");
    add("gamma_phi2", h.gamma_phi2, "1/s");
    add("i_g_sq", n.i_g_sq, "A^2/Hz");
    add("i_d_sq", n.i_d_sq, "A^2/Hz");
    add("i_ds_sq", n.i_ds_sq, "A^2/Hz");
    add("n_bar_1", n.n_bar_1, "1");
    add("n_bar_2", n.n_bar_2, "1");
    add("kappa1", c.environment.kappa1, "1/s");
    add("kappa2", c.environment.kappa2, "1/s");
    add("Omega_1_frame", f.Omega_1, "omega_ref");
    add("Omega_2_frame", f.Omega_2, "omega_ref");

    json unused = json::array();
    const char* reason = "recorded for the device table; no coefficient depends on it";
    unused.push_back({{"name", "transistor.width_micrometers"}, {"value", c.transistor.width_um}, {"note", reason}});
    unused.push_back({{"name", "transistor.C_pg_farads"}, {"value", c.transistor.C_pg}, {"note", reason}});
    unused.push_back({{"name", "transistor.C_pd_farads"}, {"value", c.transistor.C_pd}, {"note", reason}});
    unused.push_back({{"name", "transistor.L_s_henries"}, {"value", c.transistor.L_s}, {"note", reason}});
    unused.push_back({{"name", "transistor.R_s_ohms"}, {"value", c.transistor.R_s}, {"note", reason}});

    json report;
    report["coefficients"] = list;
    report["unused_inputs"] = unused;
    return report.dump(2) + "\n";
}

GainTrace default_gain_trace(const CircuitConfig& c, unsigned jobs) {
    return gain_spectrum(make_spectral_request(frame_for(c), omega_grid(c.sweep)), jobs);
}

EvolutionResult simulate_evolution(const CircuitConfig& c, unsigned jobs) {
    const FrameParameters f = frame_for(c);
    const QuadratureDynamics dyn = langevin_dynamics(f);
    const double max_step = rk4_step_bound(f);
    const Representation rep = c.dynamics.representation;
    const bool run_fock = rep != Representation::gaussian;
    const bool run_gauss = rep != Representation::fock;

    EvolutionResult out;
    out.t_grid = scaled_time_grid(c);
    out.unstable = spectral_abscissa(dyn.drift) > kUnstableAbscissa;

    auto fock_path = [&] {
        const FockSpaceSpec& spec = c.dynamics.fock;
        const FockOperators ops = build_fock_operators(spec);
        const LindbladGenerator gen(build_hamiltonian_matrix(f, spec),
                                    build_collapse_ops(f.kappa1, f.kappa2, f.n_bar_1, f.n_bar_2, spec));
        try {
            evolve_density(vacuum_density(spec), gen, out.t_grid, max_step,
                           [&](std::size_t, double t, const DensityMatrix& rho, double leak) {
                               out.fock.push_back({t, expectations(rho, ops), purity_fock(rho), leak});
                           });
        } catch (const TruncationLeakage& e) {
            out.fock_abort = std::string(e.what()) + " (dynamics.n_trunc = " +
                             std::to_string(spec.n_trunc) + ")";
        }
    };
    auto gauss_path = [&] {
        const GaussianTrajectory traj = evolve_gaussian(GaussianState{}, dyn, out.t_grid, max_step);
        out.gaussian_states = traj.states;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            out.gaussian.push_back(gaussian_sample(traj.times[i], traj.states[i]));
        }
    };
    parallel_for(2, jobs, [&](std::size_t i) {
        if (i == 0 && run_fock) fock_path();
        if (i == 1 && run_gauss) gauss_path();
    });

    if (!(run_fock && run_gauss)) {
        out.max_relative_deviation = kNaN;
        return out;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < out.fock.size(); ++i) {
        if (!(out.fock[i].leakage < kCompareLeakage)) continue;
        const MomentSet& a = out.fock[i].moments;
        const MomentSet& b = out.gaussian[i].moments;
        const double pairs[4][2] = {{a.n1, b.n1},
                                    {a.n2, b.n2},
                                    {std::abs(a.c12), std::abs(b.c12)},
                                    {std::abs(a.m12), std::abs(b.m12)}};
        for (const auto& pr : pairs) {
            worst = std::max(worst, std::abs(pr[0] - pr[1]) / std::max(std::abs(pr[1]), 1e-9));
        }
        ++out.compared_samples;
    }
    out.max_relative_deviation = worst;
    return out;
}

RunResult run_coeffs(const CircuitConfig& c, const RunOptions& opt) {
    RunResult r;
    write_text(opt.out_dir / "coeffs.json", coefficient_report_json(c));
    r.files.push_back("coeffs.json");
    finish(r, manifest_base(c, "coeffs"), opt);
    return r;
}

RunResult run_gain(const CircuitConfig& c, const RunOptions& opt) {
    RunResult r;
    const GainTrace trace = default_gain_trace(c, opt.jobs);
    write_csv(r, opt, "gain.csv", kGainColumns, gain_rows(trace));

    const CoefficientSet s = derive_coefficients(c.transistor, c.environment);
    const double w0 = c.environment.omega_ref;
    json peaks = json::array();
    double top = 0.0;
    for (const Peak& pk : find_peaks(trace)) {
        top = std::max(top, pk.height);
        peaks.push_back({{"omega_over_omega0", pk.omega},
                         {"envelope_norm", pk.height},
                         {"gain1_raw", trace.gain1_raw[pk.index]},
                         {"gain2_raw", trace.gain2_raw[pk.index]}});
    }
    std::size_t singular = 0;
    for (auto sflag : trace.singular) singular += sflag;
    if (singular) r.warnings.push_back(std::to_string(singular) + " singular grid points left as gaps");
    json report;
    report["peaks"] = peaks;
    report["resonances_over_omega0"] = {s.hamiltonian.omega_1 / w0, s.hamiltonian.omega_2 / w0};
    report["linewidths_over_omega0"] = {c.environment.kappa1 / w0, c.environment.kappa2 / w0};
    report["singular_points"] = singular;
    write_text(opt.out_dir / "peaks.json", report.dump(2) + "\n");
    r.files.push_back("peaks.json");

    if (c.sweep.gm_points > 0) {
        const SurfaceTable table = surface_table(c, opt.jobs);
        write_csv(r, opt, "surface.csv", table.header, table.rows);
    }
    finish(r, manifest_base(c, "gain"), opt);
    return r;
}

RunResult run_evolve(const CircuitConfig& c, const RunOptions& opt) {
    RunResult r;
    const EvolutionResult ev = simulate_evolution(c, opt.jobs);
    const bool has_fock = c.dynamics.representation != Representation::gaussian;
    const bool has_gauss = c.dynamics.representation != Representation::fock;

    auto rows_of = [&](const std::vector<TrajectorySample>& samples) {
        std::vector<CsvRow> rows;
        for (const TrajectorySample& s : samples) rows.push_back(trajectory_row(s, ev.unstable));
        return rows;
    };
    write_csv(r, opt, "trajectory.csv", kTrajectoryColumns, rows_of(has_fock ? ev.fock : ev.gaussian));
    if (has_fock && has_gauss) {
        write_csv(r, opt, "trajectory_gaussian.csv", kTrajectoryColumns, rows_of(ev.gaussian));
    }

    std::vector<CsvRow> corr;
    if (has_gauss) {
        for (std::size_t i = 0; i < ev.gaussian_states.size(); ++i) {
            corr.push_back(correlation_row_or_gap(ev.t_grid[i], ev.gaussian_states[i].cm, c.mode,
                                                  &r.warnings));
        }
    } else {
        for (const TrajectorySample& s : ev.fock) {
            CovarianceMatrix cm;
            try {
                cm = cm_from_moments(s.moments);
            } catch (const Error& e) {
                r.warnings.push_back("correlations at " + format_double(s.t) + ": " + e.what());
                corr.push_back(correlation_gap_row(s.t, c.mode));
                continue;
            }
            corr.push_back(correlation_row_or_gap(s.t, cm, c.mode, &r.warnings));
        }
    }
    write_csv(r, opt, "correlations.csv", kCorrelationColumns, corr);

    std::vector<CsvRow> axis;
    const std::vector<double> seconds = time_grid_seconds(c.sweep);
    for (std::size_t i = 0; i < seconds.size(); ++i) {
        axis.push_back({format_double(ev.t_grid[i]), format_double(seconds[i])});
    }
    write_csv(r, opt, "time_axis.csv", {"t", "t_seconds"}, axis);

    if (ev.unstable) r.warnings.push_back("drift has an eigenvalue with positive real part");
    if (ev.fock_abort) r.warnings.push_back("Fock path aborted: " + *ev.fock_abort);

    json m = manifest_base(c, "evolve");
    json xv;
    xv["representations"] = std::string(to_string(c.dynamics.representation));
    xv["max_relative_moment_deviation"] =
        std::isnan(ev.max_relative_deviation) ? json(nullptr) : json(ev.max_relative_deviation);
    xv["compared_samples"] = ev.compared_samples;
    xv["leakage_threshold"] = kCompareLeakage;
    xv["fock_aborted"] = ev.fock_abort.has_value();
    m["cross_validation"] = xv;
    finish(r, m, opt);
    return r;
}

RunResult run_correlations(const CircuitConfig& c, const RunOptions& opt) {
    RunResult r;
    const std::vector<double> gms =
        c.sweep.gm_points > 0 ? gm_grid(c.sweep) : std::vector<double>{c.transistor.g_m};
    std::vector<CsvRow> rows(gms.size());
    std::vector<std::vector<std::string>> notes(gms.size());
    parallel_for(gms.size(), opt.jobs, [&](std::size_t i) {
        CircuitConfig row = c;
        row.transistor.g_m = gms[i];
        try {
            const GaussianState s = steady_state_gaussian(langevin_dynamics(frame_for(row)));
            rows[i] = correlation_row_or_gap(gms[i], s.cm, c.mode, &notes[i]);
        } catch (const UnstableDrift& e) {
            notes[i].push_back("g_m = " + format_double(gms[i]) + ": " + e.what());
            rows[i] = correlation_gap_row(gms[i], c.mode);
        }
    });
    for (const auto& n : notes) r.warnings.insert(r.warnings.end(), n.begin(), n.end());
    write_csv(r, opt, "correlations.csv", kCorrelationColumns, rows);
    finish(r, manifest_base(c, "correlations"), opt);
    return r;
}

RunResult run_sweep(const CircuitConfig& c, const RunOptions& opt) {
    RunResult r;
    if (c.sweep.gm_points < 1) throw UnitError("sweep.gm_points must be at least 1 for a sweep");
    const SurfaceTable table = surface_table(c, opt.jobs);
    write_csv(r, opt, "surface.csv", table.header, table.rows);

    const std::vector<double> gms = gm_grid(c.sweep);
    std::vector<std::vector<CsvRow>> blocks(gms.size());
    std::vector<std::vector<std::string>> notes(gms.size());
    parallel_for(gms.size(), opt.jobs, [&](std::size_t i) {
        CircuitConfig row = c;
        row.transistor.g_m = gms[i];
        blocks[i] = gaussian_correlation_series(row, &notes[i]);
    });
    std::vector<std::string> header = {"g_m_siemens"};
    header.insert(header.end(), kCorrelationColumns.begin(), kCorrelationColumns.end());
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < gms.size(); ++i) {
        for (CsvRow& row : blocks[i]) {
            row.insert(row.begin(), format_double(gms[i]));
            rows.push_back(std::move(row));
        }
        r.warnings.insert(r.warnings.end(), notes[i].begin(), notes[i].end());
    }
    write_csv(r, opt, "sweep_correlations.csv", header, rows);
    finish(r, manifest_base(c, "sweep"), opt);
    return r;
}

}  // namespace qpa
