#pragma once

// Linear (Heisenberg-Langevin) dynamics of first and second moments.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qpa/frame.hpp"
#include "qpa/states.hpp"

namespace qpa {

/// The intra-cavity Langevin equations in the ladder basis
/// (a1, a1^+, a2, a2^+), transcribed term by term:
///   d/dt v = matrix * v + drive  (+ input noise, omitted)
/// Relation to the scattering matrix: A(nu) = j nu I - matrix.
struct LadderDrift {
    Eigen::Matrix4cd matrix;
    Eigen::Vector4cd drive;
};

LadderDrift drift_matrix(const FrameParameters& f);

/// Quadrature-basis dynamics dR/dt = drift R + drive, dV/dt = drift V +
/// V drift^T + diffusion.
struct QuadratureDynamics {
    Eigen::Matrix4d drift;
    Eigen::Vector4d drive;
    Eigen::Matrix4d diffusion;
};

/// Derived from the same quadratic Hamiltonian the Fock integrator uses,
/// written as H = R^T G R / 2 + h^T R with [R_k, R_l] = 2 j Omega_kl, so
/// drift = 2 Omega G - diag(k/2) and drive = 2 Omega h. Note this keeps the
/// beam-splitter parts of the couplings that LadderDrift omits.
QuadratureDynamics langevin_dynamics(const FrameParameters& f);

/// diag(k1 (2 n1 + 1), k1 (2 n1 + 1), k2 (2 n2 + 1), k2 (2 n2 + 1)).
Eigen::Matrix4d thermal_diffusion(double kappa1, double kappa2, double n_bar_1, double n_bar_2);

/// Maps a ladder-basis drift onto quadratures: T M T^{-1} with x = a + a^+,
/// p = -j (a - a^+). The result is real when M is a physical drift.
Eigen::Matrix4cd ladder_to_quadrature(const Eigen::Matrix4cd& ladder);

/// Standard two-mode symplectic form, blocks [[0, 1], [-1, 0]].
const Eigen::Matrix4d& symplectic_form();

/// Smallest eigenvalue of cm + j Omega (non-negative for physical states).
double uncertainty_margin(const CovarianceMatrix& cm);

inline bool is_physical(const CovarianceMatrix& cm, double tol = 1e-8) {
    return (cm - cm.transpose()).cwiseAbs().maxCoeff() <= tol && uncertainty_margin(cm) >= -tol;
}

/// Largest real part among the drift eigenvalues.
double spectral_abscissa(const Eigen::Matrix4d& drift);

inline constexpr double kUnstableAbscissa = 1e-9;

struct GaussianTrajectory {
    std::vector<double> times;
    std::vector<GaussianState> states;
    bool unstable = false;  // drift has an eigenvalue with Re > 1e-9
};

/// Fixed-step RK4 with the same step subdivision as evolve_density.
GaussianTrajectory evolve_gaussian(const GaussianState& state0, const QuadratureDynamics& dyn,
                                   std::span<const double> t_grid, double max_step);

/// Solves drift V + V drift^T + diffusion = 0 through the vectorized 16x16
/// system, and drift mean + drive = 0. Throws UnstableDrift.
GaussianState steady_state_gaussian(const QuadratureDynamics& dyn);

/// Mean-subtracted quadrature covariance built from raw moments. Throws
/// Nonphysical when the uncertainty margin is below -1e-6.
CovarianceMatrix cm_from_moments(const MomentSet& m);

/// Quadrature means (2 Re alpha, 2 Im alpha) for both modes.
Eigen::Vector4d mean_from_moments(const MomentSet& m);

/// Inverse of cm_from_moments/mean_from_moments.
MomentSet moments_from_gaussian(const GaussianState& s);

}  // namespace qpa
