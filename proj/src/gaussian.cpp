#include "qpa/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qpa/errors.hpp"

namespace qpa {

using cd = std::complex<double>;

LadderDrift drift_matrix(const FrameParameters& f) {
    const cd j(0.0, 1.0);
    const double g1 = f.g_q1q2;
    const double g2 = f.g_q1p2;
    const double g3 = f.g_q2p2;
    LadderDrift d;
    d.matrix.setZero();
    d.matrix(0, 0) = -j * f.Omega_1 - f.kappa1 / 2.0;
    d.matrix(0, 3) = -j * g1 - g2;
    d.matrix(1, 1) = j * f.Omega_1 - f.kappa1 / 2.0;
    d.matrix(1, 2) = j * g1 - g2;
    d.matrix(2, 2) = -j * f.Omega_2 - f.kappa2 / 2.0;
    d.matrix(2, 1) = -j * g1 - g2;
    d.matrix(2, 3) = -2.0 * g3;
    d.matrix(3, 3) = j * f.Omega_2 - f.kappa2 / 2.0;
    d.matrix(3, 0) = j * g1 - g2;
    d.matrix(3, 2) = -2.0 * g3;
    d.drive << -f.gamma_q1 - j * f.gamma_phi1, -f.gamma_q1 + j * f.gamma_phi1,
        -f.gamma_q2 - j * f.gamma_phi2, -f.gamma_q2 + j * f.gamma_phi2;
    return d;
}

const Eigen::Matrix4d& symplectic_form() {
    static const Eigen::Matrix4d omega = [] {
        Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
        w(0, 1) = 1.0;
        w(1, 0) = -1.0;
        w(2, 3) = 1.0;
        w(3, 2) = -1.0;
        return w;
    }();
    return omega;
}

Eigen::Matrix4d thermal_diffusion(double kappa1, double kappa2, double n_bar_1, double n_bar_2) {
    Eigen::Vector4d d;
    d << kappa1 * (2.0 * n_bar_1 + 1.0), kappa1 * (2.0 * n_bar_1 + 1.0),
        kappa2 * (2.0 * n_bar_2 + 1.0), kappa2 * (2.0 * n_bar_2 + 1.0);
    return d.asDiagonal();
}

QuadratureDynamics langevin_dynamics(const FrameParameters& f) {
    // Index order x1, p1, x2, p2.
    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    G(0, 0) = G(1, 1) = f.Omega_1 / 2.0;
    G(2, 2) = G(3, 3) = f.Omega_2 / 2.0;
    // -g1 (a1 - a1^+)(a2 - a2^+) = g1 p1 p2
    G(1, 3) = G(3, 1) = f.g_q1q2;
    // j g2 (a1 - a1^+)(a2 + a2^+) = -g2 p1 x2
    G(1, 2) = G(2, 1) = -f.g_q1p2;
    // j g3 {a2 - a2^+, a2 + a2^+}/2 = -g3 (x2 p2 + p2 x2)/2
    G(2, 3) = G(3, 2) = -f.g_q2p2;

    Eigen::Vector4d h;
    h << f.gamma_phi1, -f.gamma_q1, f.gamma_phi2, -f.gamma_q2;

    const Eigen::Matrix4d& W = symplectic_form();
    QuadratureDynamics q;
    Eigen::Vector4d damping;
    damping << f.kappa1, f.kappa1, f.kappa2, f.kappa2;
    q.drift = 2.0 * W * G;
    q.drift.diagonal() -= 0.5 * damping;
    q.drive = 2.0 * W * h;
    q.diffusion = thermal_diffusion(f.kappa1, f.kappa2, f.n_bar_1, f.n_bar_2);
    return q;
}

Eigen::Matrix4cd ladder_to_quadrature(const Eigen::Matrix4cd& ladder) {
    const cd j(0.0, 1.0);
    Eigen::Matrix4cd T = Eigen::Matrix4cd::Zero();
    for (int m = 0; m < 2; ++m) {
        T(2 * m, 2 * m) = 1.0;
        T(2 * m, 2 * m + 1) = 1.0;
        T(2 * m + 1, 2 * m) = -j;
        T(2 * m + 1, 2 * m + 1) = j;
    }
    return T * ladder * T.inverse();
}

double uncertainty_margin(const CovarianceMatrix& cm) {
    const cd j(0.0, 1.0);
    const Eigen::Matrix4cd M = cm.cast<cd>() + j * symplectic_form().cast<cd>();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(0.5 * (M + M.adjoint()),
                                                              Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

double spectral_abscissa(const Eigen::Matrix4d& drift) {
    const Eigen::EigenSolver<Eigen::Matrix4d> eig(drift, false);
    return eig.eigenvalues().real().maxCoeff();
}

GaussianTrajectory evolve_gaussian(const GaussianState& state0, const QuadratureDynamics& dyn,
                                   std::span<const double> t_grid, double max_step) {
    if (!(max_step > 0.0)) throw std::invalid_argument("RK4 step must be positive");
    GaussianTrajectory traj;
    traj.unstable = spectral_abscissa(dyn.drift) > kUnstableAbscissa;
    if (t_grid.empty()) return traj;

    const Eigen::Matrix4d& M = dyn.drift;
    auto mean_rate = [&](const Eigen::Vector4d& mu) -> Eigen::Vector4d { return M * mu + dyn.drive; };
    auto cm_rate = [&](const Eigen::Matrix4d& V) -> Eigen::Matrix4d {
        return M * V + V * M.transpose() + dyn.diffusion;
    };

    GaussianState s = state0;
    traj.times.push_back(t_grid[0]);
    traj.states.push_back(s);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        if (!(span > 0.0)) throw std::invalid_argument("time grid must be strictly increasing");
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / max_step - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (long k = 0; k < steps; ++k) {
            const Eigen::Vector4d m1 = mean_rate(s.mean);
            const Eigen::Vector4d m2 = mean_rate(s.mean + 0.5 * h * m1);
            const Eigen::Vector4d m3 = mean_rate(s.mean + 0.5 * h * m2);
            const Eigen::Vector4d m4 = mean_rate(s.mean + h * m3);
            s.mean += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);

            const Eigen::Matrix4d v1 = cm_rate(s.cm);
            const Eigen::Matrix4d v2 = cm_rate(s.cm + 0.5 * h * v1);
            const Eigen::Matrix4d v3 = cm_rate(s.cm + 0.5 * h * v2);
            const Eigen::Matrix4d v4 = cm_rate(s.cm + h * v3);
            s.cm += (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
            s.cm = 0.5 * (s.cm + s.cm.transpose()).eval();
        }
        traj.times.push_back(t_grid[i]);
        traj.states.push_back(s);
    }
    return traj;
}

GaussianState steady_state_gaussian(const QuadratureDynamics& dyn) {
    const double abscissa = spectral_abscissa(dyn.drift);
    if (abscissa > -kUnstableAbscissa) {
        throw UnstableDrift("drift has an eigenvalue with real part " + std::to_string(abscissa) +
                            "; no steady state");
    }
    const Eigen::Matrix4d& M = dyn.drift;
    const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
    // vec(M V + V M^T) = (I (x) M + M (x) I) vec(V), column-major vec.
    Eigen::Matrix<double, 16, 16> L;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            L.block<4, 4>(4 * r, 4 * c) = I(r, c) * M + M(r, c) * I;
        }
    }
    const Eigen::Matrix<double, 16, 1> rhs =
        -Eigen::Map<const Eigen::Matrix<double, 16, 1>>(dyn.diffusion.data());
    const Eigen::Matrix<double, 16, 1> vecV = L.fullPivLu().solve(rhs);

    GaussianState s;
    s.cm = Eigen::Map<const Eigen::Matrix4d>(vecV.data());
    s.cm = 0.5 * (s.cm + s.cm.transpose()).eval();
    s.mean = M.fullPivLu().solve(-dyn.drive);

    const double residual = (M * s.cm + s.cm * M.transpose() + dyn.diffusion).cwiseAbs().maxCoeff();
    const double scale = std::max(dyn.diffusion.cwiseAbs().maxCoeff(), 1e-300);
    if (residual > 1e-10 * scale) {
        throw UnstableDrift("Lyapunov residual " + std::to_string(residual) + " too large");
    }
    return s;
}

Eigen::Vector4d mean_from_moments(const MomentSet& m) {
    Eigen::Vector4d mu;
    mu << 2.0 * m.alpha1.real(), 2.0 * m.alpha1.imag(), 2.0 * m.alpha2.real(),
        2.0 * m.alpha2.imag();
    return mu;
}

CovarianceMatrix cm_from_moments(const MomentSet& m) {
    const Eigen::Vector4d mu = mean_from_moments(m);
    CovarianceMatrix raw;
    // Single-mode blocks: <x^2> = 2 Re<a^2> + 2n + 1, <p^2> = -2 Re<a^2> + 2n + 1,
    // <{x, p}>/2 = 2 Im<a^2>.
    auto local = [&](int o, double n, std::complex<double> s) {
        raw(o, o) = 2.0 * s.real() + 2.0 * n + 1.0;
        raw(o + 1, o + 1) = -2.0 * s.real() + 2.0 * n + 1.0;
        raw(o, o + 1) = raw(o + 1, o) = 2.0 * s.imag();
    };
    local(0, m.n1, m.squeeze1);
    local(2, m.n2, m.squeeze2);
    raw(0, 2) = 2.0 * (m.m12.real() + m.c12.real());  // <x1 x2>
    raw(0, 3) = 2.0 * (m.m12.imag() + m.c12.imag());  // <x1 p2>
    raw(1, 2) = 2.0 * (m.m12.imag() - m.c12.imag());  // <p1 x2>
    raw(1, 3) = 2.0 * (m.c12.real() - m.m12.real());  // <p1 p2>
    raw(2, 0) = raw(0, 2);
    raw(3, 0) = raw(0, 3);
    raw(2, 1) = raw(1, 2);
    raw(3, 1) = raw(1, 3);

    CovarianceMatrix cm = raw - mu * mu.transpose();
    const double margin = uncertainty_margin(cm);
    if (margin < -1e-6) {
        throw Nonphysical("moments give a covariance matrix violating the uncertainty relation "
                          "(margin " + std::to_string(margin) + ")");
    }
    return cm;
}

MomentSet moments_from_gaussian(const GaussianState& s) {
    const Eigen::Matrix4d raw = s.cm + s.mean * s.mean.transpose();
    const std::complex<double> j(0.0, 1.0);
    MomentSet m;
    m.alpha1 = 0.5 * std::complex<double>(s.mean(0), s.mean(1));
    m.alpha2 = 0.5 * std::complex<double>(s.mean(2), s.mean(3));
    m.n1 = 0.25 * (raw(0, 0) + raw(1, 1) - 2.0);
    m.n2 = 0.25 * (raw(2, 2) + raw(3, 3) - 2.0);
    m.squeeze1 = 0.25 * (raw(0, 0) - raw(1, 1) + 2.0 * j * raw(0, 1));
    m.squeeze2 = 0.25 * (raw(2, 2) - raw(3, 3) + 2.0 * j * raw(2, 3));
    m.c12 = 0.25 * (raw(0, 2) + j * raw(0, 3) - j * raw(1, 2) + raw(1, 3));
    m.m12 = 0.25 * (raw(0, 2) + j * raw(0, 3) + j * raw(1, 2) - raw(1, 3));
    return m;
}

}  // namespace qpa
