#pragma once

// Frequency-domain linear response of the intra-cavity modes and the
// input-output gain built on it. Mode ordering is (a1, a1+, a2, a2+).

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qpa/circuit_model.hpp"
#include "qpa/frame.hpp"

namespace qpa {

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
template <typename Scalar>
using Vector4c = Eigen::Matrix<std::complex<Scalar>, 4, 1>;

using ScatteringMatrix = Matrix4c<double>;

struct Couplings {
    double g_q1q2 = 0.0;
    double g_q1p2 = 0.0;
    double g_q2p2 = 0.0;
};

/// All frequencies and rates share one unit chosen by the caller (the
/// harness uses units of omega_ref). `omega_grid` holds probe frequencies;
/// the Fourier variable of the scattering matrix at probe omega is
/// nu = omega_ref - omega, because the matrix is written for the e^{+j nu t}
/// transform of the Langevin equations.
struct SpectralRequest {
    std::vector<double> omega_grid;
    double omega_ref = 1.0;
    double Omega_1 = 0.0;
    double Omega_2 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    Couplings couplings;

    /// Throws std::invalid_argument unless the grid is nonempty and
    /// strictly increasing.
    void validate() const;
};

/// Request in units of omega_ref, frame at omega_ref, grid given as omega/omega_ref.
SpectralRequest make_spectral_request(const FrameParameters& f,
                                      std::vector<double> omega_over_omega0);

/// Equation-of-motion matrix A(nu) with A [a] = [a_in]:
///
///   | j(W1+nu)+k1/2        0              0         j g1 + g2 |
///   |      0          j(nu-W1)+k1/2   -j g1 + g2        0     |
///   |      0           j g1 + g2     j(W2+nu)+k2/2    2 g3    |
///   | -j g1 + g2           0            2 g3     j(nu-W2)+k2/2|
///
/// g1 = g_q1q2, g2 = g_q1p2, g3 = g_q2p2, W = detuning, k = decay rate.
template <typename Scalar>
Matrix4c<Scalar> scattering_matrix(Scalar g1, Scalar g2, Scalar g3, Scalar W1, Scalar W2,
                                   Scalar k1, Scalar k2, Scalar nu) {
    using C = std::complex<Scalar>;
    const C j(0, 1);
    Matrix4c<Scalar> A = Matrix4c<Scalar>::Zero();
    A(0, 0) = j * (W1 + nu) + k1 / Scalar(2);
    A(0, 3) = j * g1 + g2;
    A(1, 1) = j * (nu - W1) + k1 / Scalar(2);
    A(1, 2) = -j * g1 + g2;
    A(2, 1) = j * g1 + g2;
    A(2, 2) = j * (W2 + nu) + k2 / Scalar(2);
    A(2, 3) = C(Scalar(2) * g3);
    A(3, 0) = -j * g1 + g2;
    A(3, 2) = C(Scalar(2) * g3);
    A(3, 3) = j * (nu - W2) + k2 / Scalar(2);
    return A;
}

ScatteringMatrix build_scattering_matrix(const SpectralRequest& req, double nu);

inline constexpr double kSingularCondition = 1e14;

/// Solves A x = input. Throws SingularAtFrequency when cond(A) > 1e14.
Eigen::Vector4cd solve_intracavity(const ScatteringMatrix& A, const Eigen::Vector4cd& input);

/// S = I + A^{-1} diag(sqrt k1, sqrt k1, sqrt k2, sqrt k2), so that
/// [a_out] = S [a_in]. Propagates SingularAtFrequency.
Eigen::Matrix4cd output_map(const ScatteringMatrix& A, double kappa1, double kappa2);

struct GainTrace {
    std::vector<double> omega_over_omega0;
    std::vector<double> gain1;      // normalized |S11|^2 (NaN at gaps)
    std::vector<double> gain2;      // normalized |S33|^2
    std::vector<double> gain1_raw;
    std::vector<double> gain2_raw;
    std::vector<std::uint8_t> singular;  // 1 where the grid point is a gap
    bool normalized = true;

    std::size_t size() const { return omega_over_omega0.size(); }
};

/// |S11|^2 and |S33|^2 over the grid, each trace normalized by its own
/// maximum over the non-singular points. Singular points become NaN gaps.
GainTrace gain_spectrum(const SpectralRequest& req, unsigned jobs = 1);

struct GainSurface {
    std::vector<double> gm_grid;
    std::vector<GainTrace> rows;
};

/// For each g_m the coefficients are re-derived from the circuit, then the
/// spectrum is evaluated on `omega_over_omega0`. The decay rates in `e` must
/// already be set. Rows are evaluated concurrently when jobs > 1.
GainSurface gm_gain_surface(const std::vector<double>& gm_grid, const TransistorParams& t,
                            const EnvironmentParams& e,
                            const std::vector<double>& omega_over_omega0, unsigned jobs = 1);

struct Peak {
    double omega = 0.0;
    double height = 0.0;
    std::size_t index = 0;
};

/// Strict 3-point local maxima, highest first. NaN samples never qualify
/// and never count as neighbours.
std::vector<Peak> find_peaks(const std::vector<double>& grid, const std::vector<double>& values);

/// Peaks of the envelope max(gain1, gain2) of the normalized traces.
std::vector<Peak> find_peaks(const GainTrace& trace);

}  // namespace qpa
