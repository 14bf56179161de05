#pragma once

// Correlation measures of two-mode Gaussian states. Covariance matrices use
// the vacuum = identity convention over (x1, p1, x2, p2).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#include "qpa/errors.hpp"
#include "qpa/states.hpp"

namespace qpa {

/// `paper` feeds h the printed arguments; `standard` evaluates entropies as
/// f(nu) = h(nu / 2), which is zero on the vacuum of this convention.
enum class FormulaMode { paper, standard };

inline std::string_view to_string(FormulaMode m) {
    return m == FormulaMode::paper ? "paper" : "standard";
}

/// h(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2), h(1/2) = 0.
/// Throws DomainError for x < 1/2 - 1e-9.
template <typename Scalar>
Scalar entropy_h(Scalar x) {
    using std::log2;
    const Scalar half(0.5);
    if (!(x >= half - Scalar(1e-9))) {
        throw DomainError("entropy argument " + std::to_string(static_cast<double>(x)) +
                          " is below 1/2");
    }
    const Scalar up = x + half;
    const Scalar down = x - half;
    if (!(down > Scalar(0))) return Scalar(0);
    return up * log2(up) - down * log2(down);
}

template <typename Scalar>
Scalar entropy(Scalar x, FormulaMode mode) {
    return mode == FormulaMode::paper ? entropy_h(x) : entropy_h(x / Scalar(2));
}

template <typename Scalar>
struct StandardFormCM {
    Scalar a_loc;
    Scalar b_loc;
    Scalar c_plus;
    Scalar c_minus;  // carries the sign of det C
    Scalar d_o12;    // sign(det C) sqrt|det C|

    Scalar det_cm() const {
        return (a_loc * b_loc - c_plus * c_plus) * (a_loc * b_loc - c_minus * c_minus);
    }
    /// a^2 + b^2 + 2 c+ c- = det A + det B + 2 det C.
    Scalar seralian() const { return a_loc * a_loc + b_loc * b_loc + Scalar(2) * c_plus * c_minus; }
};

template <typename Scalar>
struct SymplecticPair {
    Scalar nu_plus;
    Scalar nu_minus;
};

namespace detail {

template <typename Scalar>
void require_scalar_tolerance(Scalar value, Scalar floor, const char* what) {
    if (!(value >= floor)) {
        throw Nonphysical(std::string(what) + " = " + std::to_string(static_cast<double>(value)));
    }
}

/// Closed form from Delta and det; nu_-^2 = 2 det / (Delta + sqrt(disc)) to
/// avoid cancellation when nu_- << nu_+.
template <typename Scalar>
SymplecticPair<Scalar> symplectic_from_invariants(Scalar delta, Scalar det) {
    using std::sqrt;
    const Scalar scale = std::max(Scalar(1), delta * delta);
    Scalar disc = delta * delta - Scalar(4) * det;
    if (disc < -Scalar(1e-10) * scale) {
        throw Nonphysical("symplectic discriminant Delta^2 - 4 det is negative");
    }
    disc = std::max(disc, Scalar(0));
    const Scalar root = sqrt(disc);
    const Scalar plus_sq = (delta + root) / Scalar(2);
    const Scalar minus_sq = plus_sq > Scalar(0) ? det / plus_sq : Scalar(0);
    if (minus_sq < Scalar(0)) throw Nonphysical("covariance matrix has negative determinant");
    return {sqrt(plus_sq), sqrt(minus_sq)};
}

// Invariants lose precision by cancellation when nu_+ ~ nu_-; doubles are
// evaluated in extended precision.
template <typename Scalar>
using Wide = std::conditional_t<std::is_same_v<Scalar, double>, long double, Scalar>;

template <typename Scalar>
SymplecticPair<Scalar> symplectic_from_blocks(const Eigen::Matrix<Scalar, 4, 4>& cm,
                                              Scalar cross_sign) {
    using W = Wide<Scalar>;
    const Eigen::Matrix<W, 4, 4> V = cm.template cast<W>();
    const W delta = V.template block<2, 2>(0, 0).determinant() +
                    V.template block<2, 2>(2, 2).determinant() +
                    W(2) * W(cross_sign) * V.template block<2, 2>(0, 2).determinant();
    const SymplecticPair<W> p = symplectic_from_invariants(delta, V.determinant());
    return {Scalar(p.nu_plus), Scalar(p.nu_minus)};
}

}  // namespace detail

template <typename Derived>
StandardFormCM<typename Derived::Scalar> standard_form(const Eigen::MatrixBase<Derived>& cm) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using std::sqrt;
    const Eigen::Matrix<Scalar, 4, 4> V = cm;
    const Scalar asym = (V - V.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-9) * std::max(Scalar(1), V.cwiseAbs().maxCoeff())) {
        throw Nonphysical("covariance matrix is not symmetric");
    }
    const Scalar detA = V.template block<2, 2>(0, 0).determinant();
    const Scalar detB = V.template block<2, 2>(2, 2).determinant();
    const Eigen::Matrix<Scalar, 2, 2> C = V.template block<2, 2>(0, 2);
    const Scalar detC = C.determinant();
    detail::require_scalar_tolerance(detA, Scalar(1) - Scalar(1e-8), "local determinant det A");
    detail::require_scalar_tolerance(detB, Scalar(1) - Scalar(1e-8), "local determinant det B");

    StandardFormCM<Scalar> sf;
    sf.a_loc = sqrt(detA);
    sf.b_loc = sqrt(detB);
    // A / a and B / b have unit determinant, so their inverse square roots are
    // local symplectic maps that bring the diagonal blocks to a I and b I.
    using M2 = Eigen::Matrix<Scalar, 2, 2>;
    const Eigen::SelfAdjointEigenSolver<M2> ea(V.template block<2, 2>(0, 0) / sf.a_loc);
    const Eigen::SelfAdjointEigenSolver<M2> eb(V.template block<2, 2>(2, 2) / sf.b_loc);
    const M2 Cn = ea.operatorInverseSqrt() * C * eb.operatorInverseSqrt();
    const Eigen::JacobiSVD<M2> svd(Cn);
    const Scalar sign = detC < Scalar(0) ? Scalar(-1) : Scalar(1);
    sf.c_plus = svd.singularValues()(0);
    sf.c_minus = sign * svd.singularValues()(1);
    sf.d_o12 = sign * sqrt(abs(detC));
    return sf;
}

/// Moduli of the eigenvalues of j Omega V, sorted descending, deduplicated
/// pairwise. Independent of the closed form below.
template <typename Derived>
SymplecticPair<typename Derived::Scalar> symplectic_eigenvalues_numeric(
    const Eigen::MatrixBase<Derived>& cm) {
    using Scalar = typename Derived::Scalar;
    using Complex = std::complex<Scalar>;
    Eigen::Matrix<Scalar, 4, 4> W = Eigen::Matrix<Scalar, 4, 4>::Zero();
    W(0, 1) = W(2, 3) = Scalar(1);
    W(1, 0) = W(3, 2) = Scalar(-1);
    const Eigen::Matrix<Complex, 4, 4> M = Complex(0, 1) * (W * cm).template cast<Complex>();
    const Eigen::ComplexEigenSolver<Eigen::Matrix<Complex, 4, 4>> eig(M, false);
    std::array<Scalar, 4> mod;
    for (int i = 0; i < 4; ++i) mod[i] = std::abs(eig.eigenvalues()(i));
    std::sort(mod.begin(), mod.end(), std::greater<>());
    return {(mod[0] + mod[1]) / Scalar(2), (mod[2] + mod[3]) / Scalar(2)};
}

/// nu_pm^2 = (Delta +- sqrt(Delta^2 - 4 det V)) / 2 with
/// Delta = det A + det B + 2 det C. Cross-checked against the eigenvalues
/// of j Omega V; throws Nonphysical if nu_- < 1 - 1e-8 or they disagree.
template <typename Derived>
SymplecticPair<typename Derived::Scalar> symplectic_eigenvalues(
    const Eigen::MatrixBase<Derived>& cm) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    const Eigen::Matrix<Scalar, 4, 4> V = cm;
    const SymplecticPair<Scalar> pair = detail::symplectic_from_blocks(V, Scalar(1));
    detail::require_scalar_tolerance(pair.nu_minus, Scalar(1) - Scalar(1e-8),
                                     "smallest symplectic eigenvalue");
    const SymplecticPair<Scalar> check = symplectic_eigenvalues_numeric(V);
    const Scalar tol = Scalar(1e-7) * std::max(Scalar(1), pair.nu_plus);
    if (abs(check.nu_plus - pair.nu_plus) > tol || abs(check.nu_minus - pair.nu_minus) > tol) {
        throw Nonphysical("closed-form symplectic eigenvalues disagree with j Omega V spectrum");
    }
    return pair;
}

template <typename Scalar>
struct PartialTransposeResult {
    Scalar nu_tilde_minus;
    bool entangled;
};

/// Partial transposition flips the sign of det C in Delta.
template <typename Derived>
PartialTransposeResult<typename Derived::Scalar> pt_smallest_symplectic(
    const Eigen::MatrixBase<Derived>& cm) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Matrix<Scalar, 4, 4> V = cm;
    const SymplecticPair<Scalar> pair = detail::symplectic_from_blocks(V, Scalar(-1));
    return {pair.nu_minus, pair.nu_minus < Scalar(1) - Scalar(1e-9)};
}

/// tau + eta with tau = d^2/(b^2 - 1), eta = a - b d^2/(b^2 - 1); equals
/// a - d^2/(b + 1). Vacuum-adjacent B with vanishing d takes tau = 0.
template <typename Scalar>
Scalar conditional_invariant(const StandardFormCM<Scalar>& sf) {
    const Scalar d2 = sf.d_o12 * sf.d_o12;
    if (sf.b_loc - Scalar(1) < Scalar(1e-9) && d2 < Scalar(1e-18)) return sf.a_loc;
    const Scalar denom = sf.b_loc * sf.b_loc - Scalar(1);
    if (!(denom > Scalar(0))) {
        throw DomainError("b_loc = 1 with nonzero cross-correlation; tau undefined");
    }
    const Scalar tau = d2 / denom;
    const Scalar eta = sf.a_loc - sf.b_loc * d2 / denom;
    return tau + eta;
}

template <typename Scalar>
struct DiscordValue {
    Scalar value;  // clamped at 0 in standard mode
    Scalar raw;
};

/// D = h(b) - h(nu_-) - h(nu_+) + h(tau + eta).
template <typename Scalar>
DiscordValue<Scalar> quantum_discord(const StandardFormCM<Scalar>& sf, FormulaMode mode) {
    const SymplecticPair<Scalar> nu = detail::symplectic_from_invariants(sf.seralian(), sf.det_cm());
    const Scalar raw = entropy(sf.b_loc, mode) - entropy(nu.nu_minus, mode) -
                       entropy(nu.nu_plus, mode) + entropy(conditional_invariant(sf), mode);
    const Scalar value = mode == FormulaMode::standard ? std::max(raw, Scalar(0)) : raw;
    return {value, raw};
}

template <typename Scalar>
struct ClassicalValue {
    Scalar literal;   // h(a) - h(nu_-) - h(nu_+) as printed
    Scalar standard;  // J = f(a) - f(tau + eta), standard mode only (else = literal)

    Scalar reported(FormulaMode mode) const {
        return mode == FormulaMode::standard ? standard : literal;
    }
};

template <typename Scalar>
ClassicalValue<Scalar> classical_discord(const StandardFormCM<Scalar>& sf, FormulaMode mode) {
    const SymplecticPair<Scalar> nu = detail::symplectic_from_invariants(sf.seralian(), sf.det_cm());
    ClassicalValue<Scalar> c;
    c.literal = entropy(sf.a_loc, mode) - entropy(nu.nu_minus, mode) - entropy(nu.nu_plus, mode);
    c.standard = mode == FormulaMode::standard
                     ? entropy(sf.a_loc, mode) - entropy(conditional_invariant(sf), mode)
                     : c.literal;
    return c;
}

/// mu = 1 / sqrt(det V). Throws Nonphysical when det V < 1 - 1e-9.
template <typename Derived>
typename Derived::Scalar purity_gaussian(const Eigen::MatrixBase<Derived>& cm) {
    using Scalar = typename Derived::Scalar;
    using std::sqrt;
    const Scalar det = Eigen::Matrix<Scalar, 4, 4>(cm).determinant();
    detail::require_scalar_tolerance(det, Scalar(1) - Scalar(1e-9), "covariance determinant");
    return Scalar(1) / sqrt(det);
}

/// Tr rho^2.
double purity_fock(const DensityMatrix& rho);

struct CorrelationReport {
    double nu_plus = 0.0;
    double nu_minus = 0.0;
    double nu_tilde_minus = 0.0;
    double discord = 0.0;
    double discord_raw = 0.0;
    double classical_corr = 0.0;
    double classical_corr_literal = 0.0;
    bool entangled = false;
    double purity = 0.0;
    FormulaMode mode = FormulaMode::standard;
};

CorrelationReport correlation_report(const CovarianceMatrix& cm, FormulaMode mode);

}  // namespace qpa
