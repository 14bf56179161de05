#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <system_error>

#include <CLI11.hpp>

#include "qpa/commands.hpp"
#include "qpa/config.hpp"
#include "qpa/errors.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out_dir = ".";
    int points = 0;
    double gm_min = -1.0;
    double gm_max = -1.0;
    int gm_points = -1;
    int truncation = 0;
    std::string mode;
    unsigned jobs = 1;
};

qpa::CircuitConfig load(const Overrides& o) {
    qpa::CircuitConfig c = o.config_path.empty() ? qpa::default_config() : qpa::parse_config(o.config_path);
    if (o.points > 0) c.sweep.omega_points = o.points;
    if (o.gm_min >= 0.0) c.sweep.gm_min = o.gm_min;
    if (o.gm_max >= 0.0) c.sweep.gm_max = o.gm_max;
    if (o.gm_points >= 0) c.sweep.gm_points = o.gm_points;
    if (o.truncation > 0) c.dynamics.fock.n_trunc = o.truncation;
    if (o.mode == "paper") c.mode = qpa::FormulaMode::paper;
    if (o.mode == "standard") c.mode = qpa::FormulaMode::standard;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transistor-coupled oscillator parametric amplifier model"};
    app.require_subcommand(1);
    Overrides o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config (defaults if omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--points", o.points, "Number of omega grid points");
        sub->add_option("--gm-min", o.gm_min, "Lowest g_m of the sweep [S]");
        sub->add_option("--gm-max", o.gm_max, "Highest g_m of the sweep [S]");
        sub->add_option("--gm-points", o.gm_points, "Number of g_m points (0 disables)");
        sub->add_option("--truncation", o.truncation, "Fock levels per mode");
        sub->add_option("--mode", o.mode, "Correlation formulas")
            ->check(CLI::IsMember({"paper", "standard"}));
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    };

    using Runner = qpa::RunResult (*)(const qpa::CircuitConfig&, const qpa::RunOptions&);
    Runner runner = nullptr;
    struct Entry {
        const char* name;
        const char* help;
        Runner run;
    };
    const Entry entries[] = {
        {"coeffs", "Derived circuit and Hamiltonian coefficients", qpa::run_coeffs},
        {"gain", "Gain spectrum, peaks and g_m surface", qpa::run_gain},
        {"evolve", "Fock and Gaussian time evolution", qpa::run_evolve},
        {"correlations", "Steady-state correlations across the g_m grid", qpa::run_correlations},
        {"sweep", "Gain surface and correlation time series per g_m", qpa::run_sweep},
    };
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        common(sub);
        sub->callback([&runner, run = e.run] { runner = run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const qpa::CircuitConfig c = load(o);
        std::filesystem::create_directories(o.out_dir);
        const qpa::RunResult r = runner(c, {o.out_dir, o.jobs});
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : r.files) std::cout << (std::filesystem::path(o.out_dir) / f).string() << "\n";
        return 0;
    } catch (const qpa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
