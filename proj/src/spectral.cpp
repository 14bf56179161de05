#include "qpa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qpa/errors.hpp"
#include "qpa/parallel.hpp"

namespace qpa {

void SpectralRequest::validate() const {
    if (omega_grid.empty()) throw std::invalid_argument("omega grid is empty");
    for (std::size_t i = 1; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > omega_grid[i - 1])) {
            throw std::invalid_argument("omega grid must be strictly increasing");
        }
    }
}

SpectralRequest make_spectral_request(const FrameParameters& f,
                                      std::vector<double> omega_over_omega0) {
    SpectralRequest req;
    req.omega_grid = std::move(omega_over_omega0);
    req.omega_ref = 1.0;
    req.Omega_1 = f.Omega_1;
    req.Omega_2 = f.Omega_2;
    req.kappa1 = f.kappa1;
    req.kappa2 = f.kappa2;
    req.couplings = {f.g_q1q2, f.g_q1p2, f.g_q2p2};
    return req;
}

ScatteringMatrix build_scattering_matrix(const SpectralRequest& req, double nu) {
    const Couplings& g = req.couplings;
    return scattering_matrix<double>(g.g_q1q2, g.g_q1p2, g.g_q2p2, req.Omega_1, req.Omega_2,
                                     req.kappa1, req.kappa2, nu);
}

namespace {

void require_well_conditioned(const ScatteringMatrix& A) {
    const Eigen::JacobiSVD<ScatteringMatrix> svd(A);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= kSingularCondition)) {
        throw SingularAtFrequency("scattering matrix condition number " + std::to_string(cond) +
                                      " exceeds 1e14",
                                  cond);
    }
}

}  // namespace

Eigen::Vector4cd solve_intracavity(const ScatteringMatrix& A, const Eigen::Vector4cd& input) {
    require_well_conditioned(A);
    return A.fullPivLu().solve(input);
}

Eigen::Matrix4cd output_map(const ScatteringMatrix& A, double kappa1, double kappa2) {
    require_well_conditioned(A);
    Eigen::Vector4cd root_kappa;
    root_kappa << std::sqrt(kappa1), std::sqrt(kappa1), std::sqrt(kappa2), std::sqrt(kappa2);
    const Eigen::Matrix4cd K = root_kappa.asDiagonal();
    return Eigen::Matrix4cd::Identity() + A.fullPivLu().solve(K);
}

GainTrace gain_spectrum(const SpectralRequest& req, unsigned jobs) {
    req.validate();
    const std::size_t n = req.omega_grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    GainTrace trace;
    trace.omega_over_omega0.resize(n);
    trace.gain1_raw.assign(n, nan);
    trace.gain2_raw.assign(n, nan);
    trace.singular.assign(n, 0);

    parallel_for(n, jobs, [&](std::size_t i) {
        const double omega = req.omega_grid[i];
        trace.omega_over_omega0[i] = omega / req.omega_ref;
        try {
            const Eigen::Matrix4cd S =
                output_map(build_scattering_matrix(req, req.omega_ref - omega), req.kappa1,
                           req.kappa2);
            trace.gain1_raw[i] = std::norm(S(0, 0));
            trace.gain2_raw[i] = std::norm(S(2, 2));
        } catch (const SingularAtFrequency&) {
            trace.singular[i] = 1;
        }
    });

    auto normalize = [&](const std::vector<double>& raw) {
        double peak = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!trace.singular[i]) peak = std::max(peak, raw[i]);
        }
        std::vector<double> out(n, nan);
        for (std::size_t i = 0; i < n; ++i) {
            if (!trace.singular[i] && peak > 0.0) out[i] = raw[i] / peak;
        }
        return out;
    };
    trace.gain1 = normalize(trace.gain1_raw);
    trace.gain2 = normalize(trace.gain2_raw);
    trace.normalized = true;
    return trace;
}

GainSurface gm_gain_surface(const std::vector<double>& gm_grid, const TransistorParams& t,
                            const EnvironmentParams& e,
                            const std::vector<double>& omega_over_omega0, unsigned jobs) {
    for (std::size_t i = 0; i < gm_grid.size(); ++i) {
        if (!(gm_grid[i] >= 0.0) || (i > 0 && !(gm_grid[i] > gm_grid[i - 1]))) {
            throw std::invalid_argument("g_m grid must be non-negative and strictly increasing");
        }
    }
    GainSurface surface;
    surface.gm_grid = gm_grid;
    surface.rows.resize(gm_grid.size());
    parallel_for(gm_grid.size(), jobs, [&](std::size_t i) {
        TransistorParams row = t;
        row.g_m = gm_grid[i];
        const FrameParameters f = to_reference_frame(derive_coefficients(row, e), e);
        surface.rows[i] = gain_spectrum(make_spectral_request(f, omega_over_omega0));
    });
    return surface;
}

std::vector<Peak> find_peaks(const std::vector<double>& grid, const std::vector<double>& values) {
    std::vector<Peak> peaks;
    const std::size_t n = std::min(grid.size(), values.size());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = values[i];
        if (std::isnan(v) || std::isnan(values[i - 1]) || std::isnan(values[i + 1])) continue;
        if (v > values[i - 1] && v > values[i + 1]) peaks.push_back({grid[i], v, i});
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

std::vector<Peak> find_peaks(const GainTrace& trace) {
    std::vector<double> envelope(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        envelope[i] = std::isnan(trace.gain1[i]) || std::isnan(trace.gain2[i])
                          ? std::numeric_limits<double>::quiet_NaN()
                          : std::max(trace.gain1[i], trace.gain2[i]);
    }
    return find_peaks(trace.omega_over_omega0, envelope);
}

}  // namespace qpa
