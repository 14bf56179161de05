#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qpa/circuit_model.hpp"
#include "qpa/config.hpp"
#include "qpa/states.hpp"

namespace qpa::test {

inline Eigen::Matrix2d rotation(double th) {
    Eigen::Matrix2d r;
    r << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    return r;
}

inline Eigen::Matrix4d local_symplectic(double th1, double r1, double th2, double r2) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s.block<2, 2>(0, 0) = rotation(th1) * Eigen::Vector2d(std::exp(-r1), std::exp(r1)).asDiagonal();
    s.block<2, 2>(2, 2) = rotation(th2) * Eigen::Vector2d(std::exp(-r2), std::exp(r2)).asDiagonal();
    return s;
}

inline Eigen::Matrix4d beam_splitter(double th) {
    const double c = std::cos(th), s = std::sin(th);
    Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
    b.block<2, 2>(0, 0) = c * Eigen::Matrix2d::Identity();
    b.block<2, 2>(2, 2) = c * Eigen::Matrix2d::Identity();
    b.block<2, 2>(0, 2) = s * Eigen::Matrix2d::Identity();
    b.block<2, 2>(2, 0) = -s * Eigen::Matrix2d::Identity();
    return b;
}

inline Eigen::Matrix4d two_mode_squeezer(double r) {
    const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s.block<2, 2>(0, 0) = std::cosh(r) * Eigen::Matrix2d::Identity();
    s.block<2, 2>(2, 2) = std::cosh(r) * Eigen::Matrix2d::Identity();
    s.block<2, 2>(0, 2) = std::sinh(r) * z;
    s.block<2, 2>(2, 0) = std::sinh(r) * z;
    return s;
}

/// Two-mode squeezed vacuum, vacuum = identity.
inline CovarianceMatrix two_mode_squeezed_cm(double r) {
    const Eigen::Matrix4d s = two_mode_squeezer(r);
    return s * s.transpose();
}

inline CovarianceMatrix thermal_cm(double n1, double n2) {
    return Eigen::Vector4d(2 * n1 + 1, 2 * n1 + 1, 2 * n2 + 1, 2 * n2 + 1).asDiagonal();
}

/// S diag(nu1, nu1, nu2, nu2) S^T with a random symplectic S built from
/// local squeezers/rotations, a beam splitter and a two-mode squeezer.
template <typename Rng>
CovarianceMatrix random_physical_cm(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    std::uniform_real_distribution<double> sq(-0.8, 0.8);
    std::uniform_real_distribution<double> occ(0.0, 2.0);
    const Eigen::Matrix4d S = local_symplectic(angle(rng), sq(rng), angle(rng), sq(rng)) *
                              beam_splitter(angle(rng)) * two_mode_squeezer(sq(rng)) *
                              local_symplectic(angle(rng), sq(rng), angle(rng), sq(rng));
    const CovarianceMatrix w = thermal_cm(occ(rng), occ(rng));
    CovarianceMatrix v = S * w * S.transpose();
    return 0.5 * (v + v.transpose());
}

template <typename Rng>
CovarianceMatrix random_product_cm(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    std::uniform_real_distribution<double> sq(-0.8, 0.8);
    std::uniform_real_distribution<double> occ(0.0, 2.0);
    const Eigen::Matrix4d S = local_symplectic(angle(rng), sq(rng), angle(rng), sq(rng));
    CovarianceMatrix v = S * thermal_cm(occ(rng), occ(rng)) * S.transpose();
    return 0.5 * (v + v.transpose());
}

/// C_in = C_gs = C_gd = C_ds = `unit`, so C_p1 = 3, C_p2 = 2, D_M = 5 units.
inline void unit_capacitances(TransistorParams& t, EnvironmentParams& e, double unit, double gm) {
    t.C_gs = unit;
    t.C_gd = unit;
    t.C_ds = unit;
    e.C_in = unit;
    t.g_m = gm;
}

inline CircuitConfig unit_capacitance_config() {
    CircuitConfig c = default_config();
    unit_capacitances(c.transistor, c.environment, 1e-15, 1.0);
    return c;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace qpa::test
