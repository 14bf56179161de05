#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qpa {

/// Two-mode density matrix on the truncated Fock space, basis index
/// n1 * n_trunc + n2 (mode 1 major).
using DensityMatrix = Eigen::MatrixXcd;

/// Quadrature covariance matrix over (x1, p1, x2, p2) with x = a + a^+,
/// p = -j (a - a^+); the vacuum is the identity.
using CovarianceMatrix = Eigen::Matrix4d;

struct GaussianState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    CovarianceMatrix cm = CovarianceMatrix::Identity();
};

/// Raw (not mean-subtracted) first and second moments.
struct MomentSet {
    double n1 = 0.0;  // <a1^+ a1>
    double n2 = 0.0;
    std::complex<double> m12;  // <a1 a2>
    std::complex<double> c12;  // <a1^+ a2>
    std::complex<double> alpha1;
    std::complex<double> alpha2;
    std::complex<double> squeeze1;  // <a1^2>
    std::complex<double> squeeze2;
};

}  // namespace qpa
