#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qpa/correlations.hpp"
#include "qpa/errors.hpp"
#include "qpa/gaussian.hpp"
#include "support.hpp"

using namespace qpa;

namespace {

// Symplectic spectrum from the real eigenvalues of -(Omega V)^2, which are
// nu_+^2 and nu_-^2, each twice.
std::pair<double, double> oracle_symplectic(const CovarianceMatrix& V) {
    const Eigen::Matrix4d W = symplectic_form() * V;
    const Eigen::EigenSolver<Eigen::Matrix4d> es(-(W * W), false);
    std::array<double, 4> ev;
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()(i).real();
    std::sort(ev.begin(), ev.end());
    return {std::sqrt(0.5 * (ev[2] + ev[3])), std::sqrt(0.5 * (ev[0] + ev[1]))};
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& V) {
    const Eigen::Vector4d flip(1, 1, 1, -1);
    return flip.asDiagonal() * V * flip.asDiagonal();
}

// Standard-mode entropy of a thermal mode with symplectic eigenvalue nu.
double thermal_entropy(double nu) {
    const double n = (nu - 1.0) / 2.0;
    return n > 0 ? (n + 1) * std::log2(n + 1) - n * std::log2(n) : 0.0;
}

}  // namespace

TEST_SUITE("correlations") {

TEST_CASE("entropy function") {
    CHECK(entropy_h(0.5) == 0.0);
    CHECK(entropy_h(1.5) == 2.0);
    CHECK(std::abs(entropy_h(2.5) - (3.0 * std::log2(3.0) - 2.0)) < 1e-12);
    CHECK(std::abs(entropy_h(2.5L) - (3.0L * std::log2(3.0L) - 2.0L)) < 1e-15L);
    CHECK(entropy_h(0.5 - 5e-10) == 0.0);
    CHECK_THROWS_AS(entropy_h(0.4), DomainError);
    CHECK(std::abs(entropy_h(1.0) - (1.5 * std::log2(1.5) - 0.5 * std::log2(0.5))) < 1e-15);
    for (double nu : {1.0, 1.7, 3.0, 10.0}) {
        CHECK(std::abs(entropy(nu, FormulaMode::standard) - thermal_entropy(nu)) < 1e-12);
    }
}

TEST_CASE("standard form") {
    StandardFormCM<double> sf = standard_form(CovarianceMatrix::Identity());
    CHECK(sf.a_loc == 1.0);
    CHECK(sf.b_loc == 1.0);
    CHECK(sf.d_o12 == 0.0);
    sf = standard_form(test::thermal_cm(1.0, 0.0));
    CHECK(sf.a_loc == 3.0);
    CHECK(sf.b_loc == 1.0);
    const double r = 0.5;
    sf = standard_form(test::two_mode_squeezed_cm(r));
    CHECK(std::abs(sf.a_loc - std::cosh(2 * r)) < 1e-12);
    CHECK(std::abs(sf.b_loc - std::cosh(2 * r)) < 1e-12);
    CHECK(std::abs(std::abs(sf.c_plus) - std::sinh(2 * r)) < 1e-12);
    CHECK(std::abs(std::abs(sf.c_minus) - std::sinh(2 * r)) < 1e-12);
    CHECK(sf.d_o12 < 0.0);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const CovarianceMatrix V = test::random_physical_cm(rng);
        const StandardFormCM<double> s = standard_form(V);
        const double delta = V.block<2, 2>(0, 0).determinant() + V.block<2, 2>(2, 2).determinant() +
                             2 * V.block<2, 2>(0, 2).determinant();
        CHECK(std::abs(s.seralian() - delta) < 1e-10 * delta);
        CHECK(std::abs(s.det_cm() - V.determinant()) < 1e-10 * V.determinant());
        CHECK(s.a_loc >= 1.0 - 1e-12);
        CHECK(s.b_loc >= 1.0 - 1e-12);
    }
    CovarianceMatrix bad = CovarianceMatrix::Identity();
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(standard_form(bad), Nonphysical);
}

TEST_CASE("symplectic eigenvalues") {
    auto nu = symplectic_eigenvalues(CovarianceMatrix::Identity());
    CHECK(nu.nu_plus == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu.nu_minus == doctest::Approx(1.0).epsilon(1e-14));
    nu = symplectic_eigenvalues(test::thermal_cm(1.0, 0.0));
    CHECK(nu.nu_plus == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(nu.nu_minus == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const CovarianceMatrix V = test::random_physical_cm(rng);
        const auto got = symplectic_eigenvalues(V);
        const auto [p, m] = oracle_symplectic(V);
        worst = std::max({worst, std::abs(got.nu_plus - p) / p, std::abs(got.nu_minus - m) / m});
        CHECK(got.nu_plus >= got.nu_minus);
        CHECK(got.nu_minus >= 1.0 - 1e-8);
    }
    CHECK(worst < 1e-10);

    CovarianceMatrix squeezed_too_far = CovarianceMatrix::Identity();
    squeezed_too_far(0, 0) = 0.5;
    squeezed_too_far(1, 1) = 1.5;  // det A = 0.75 < 1
    CHECK_THROWS_AS(symplectic_eigenvalues(squeezed_too_far), Nonphysical);
}

TEST_CASE("partial transposition") {
    auto pt = pt_smallest_symplectic(CovarianceMatrix::Identity());
    CHECK(pt.nu_tilde_minus == doctest::Approx(1.0));
    CHECK(!pt.entangled);

    const CovarianceMatrix tms = test::two_mode_squeezed_cm(0.5);
    pt = pt_smallest_symplectic(tms);
    CHECK(std::abs(pt.nu_tilde_minus - std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(pt.nu_tilde_minus - oracle_symplectic(partial_transpose(tms)).second) < 1e-10);
    CHECK(pt.entangled);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const CovarianceMatrix V = test::random_product_cm(rng);
        const auto p = pt_smallest_symplectic(V);
        CHECK(std::abs(p.nu_tilde_minus - symplectic_eigenvalues(V).nu_minus) < 1e-10);
        CHECK(!p.entangled);
    }
    for (int i = 0; i < 200; ++i) {
        const CovarianceMatrix V = test::random_physical_cm(rng);
        CHECK(std::abs(pt_smallest_symplectic(V).nu_tilde_minus -
                       oracle_symplectic(partial_transpose(V)).second) < 1e-9);
    }
}

TEST_CASE("convex mixtures of product thermal states are never entangled") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> occ(0.0, 3.0);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::uniform_real_distribution<double> mean(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        // Mixture of displaced products: covariance sum of weighted cms plus
        // the spread of the means.
        const int k = 2 + i % 3;
        std::vector<double> p(k);
        double total = 0.0;
        for (double& x : p) total += (x = w(rng) + 1e-3);
        Eigen::Vector4d avg = Eigen::Vector4d::Zero();
        std::vector<Eigen::Vector4d> mu(k);
        CovarianceMatrix V = CovarianceMatrix::Zero();
        for (int j = 0; j < k; ++j) {
            mu[j] << mean(rng), mean(rng), mean(rng), mean(rng);
            V += p[j] / total * test::thermal_cm(occ(rng), occ(rng));
            avg += p[j] / total * mu[j];
        }
        for (int j = 0; j < k; ++j) V += p[j] / total * (mu[j] - avg) * (mu[j] - avg).transpose();
        CHECK(!pt_smallest_symplectic(V).entangled);
    }
}

TEST_CASE("discord") {
    for (FormulaMode mode : {FormulaMode::standard, FormulaMode::paper}) {
        CHECK(quantum_discord(standard_form(CovarianceMatrix::Identity()), mode).raw == 0.0);
        std::mt19937_64 rng(5);
        for (int i = 0; i < 1000; ++i) {
            const auto d = quantum_discord(standard_form(test::random_product_cm(rng)), mode);
            CHECK(std::abs(d.raw) < 1e-10);
        }
    }
    // Two-mode squeezed vacuum: conditional invariant through a - d^2/(b + 1).
    const double r = 0.5;
    const StandardFormCM<double> sf = standard_form(test::two_mode_squeezed_cm(r));
    const double a = std::cosh(2 * r), d2 = std::sinh(2 * r) * std::sinh(2 * r);
    const double cond = a - d2 / (a + 1.0);
    CHECK(std::abs(conditional_invariant(sf) - cond) < 1e-12);
    const auto D = quantum_discord(sf, FormulaMode::standard);
    // Pure state: nu_+ = nu_- = 1, so D = f(b) + f(cond).
    CHECK(std::abs(D.raw - (thermal_entropy(a) + thermal_entropy(cond))) < 1e-10);
    CHECK(D.value > 0.0);

    double prev_d = -1.0, prev_inv = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double rr = (i + 1) / 20.0;
        const CovarianceMatrix V = test::two_mode_squeezed_cm(rr);
        const double dv = quantum_discord(standard_form(V), FormulaMode::standard).value;
        const double inv = 1.0 / pt_smallest_symplectic(V).nu_tilde_minus;
        CHECK(dv > prev_d);
        CHECK(inv > prev_inv);
        prev_d = dv;
        prev_inv = inv;
    }
}

TEST_CASE("tau guard") {
    StandardFormCM<double> sf{2.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(conditional_invariant(sf) == 2.0);
    sf.d_o12 = 0.1;
    CHECK_THROWS_AS(conditional_invariant(sf), DomainError);
}

TEST_CASE("classical correlation") {
    const StandardFormCM<double> vac = standard_form(CovarianceMatrix::Identity());
    CHECK(std::abs(classical_discord(vac, FormulaMode::paper).literal + entropy_h(1.0)) < 1e-15);
    CHECK(std::abs(entropy_h(1.0) - 1.3774) < 1e-4);
    CHECK(classical_discord(vac, FormulaMode::standard).standard == 0.0);

    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        const StandardFormCM<double> sf = standard_form(test::random_product_cm(rng));
        for (FormulaMode mode : {FormulaMode::standard, FormulaMode::paper}) {
            const auto c = classical_discord(sf, mode);
            CHECK(std::abs(c.literal + entropy(sf.b_loc, mode)) < 1e-10);
        }
        CHECK(std::abs(classical_discord(sf, FormulaMode::standard).standard) < 1e-10);
    }
}

TEST_CASE("purity") {
    CHECK(std::abs(purity_gaussian(CovarianceMatrix::Identity()) - 1.0) < 1e-12);
    CHECK(std::abs(purity_gaussian(test::thermal_cm(1.0, 0.0)) - 1.0 / 3.0) < 1e-12);
    CovarianceMatrix bad = 0.5 * CovarianceMatrix::Identity();
    CHECK_THROWS_AS(purity_gaussian(bad), Nonphysical);

    // Pure state, maximally mixed state, truncated thermal mode.
    const int d = 7;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(d);
    psi.normalize();
    CHECK(std::abs(purity_fock(psi * psi.adjoint()) - 1.0) < 1e-12);
    CHECK(std::abs(purity_fock(DensityMatrix::Identity(d, d) / d) - 1.0 / d) < 1e-15);
    const int n = 30;
    DensityMatrix th = DensityMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) th(k, k) = std::pow(0.5, k + 1);  // n_bar = 1
    // sum_k (1/2)^(2k+2) = 1/3 up to the truncated tail.
    CHECK(std::abs(purity_fock(th) - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("local symplectic invariance") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int i = 0; i < 100; ++i) {
        const CovarianceMatrix V = test::random_physical_cm(rng);
        const Eigen::Matrix4d R = test::local_symplectic(angle(rng), 0.0, angle(rng), 0.0);
        const CovarianceMatrix U = R * V * R.transpose();
        for (FormulaMode mode : {FormulaMode::standard, FormulaMode::paper}) {
            const CorrelationReport a = correlation_report(V, mode);
            const CorrelationReport b = correlation_report(U, mode);
            CHECK(std::abs(a.nu_plus - b.nu_plus) < 1e-10);
            CHECK(std::abs(a.nu_minus - b.nu_minus) < 1e-10);
            CHECK(std::abs(a.nu_tilde_minus - b.nu_tilde_minus) < 1e-10);
            CHECK(std::abs(a.discord_raw - b.discord_raw) < 1e-10);
            CHECK(std::abs(a.classical_corr - b.classical_corr) < 1e-10);
            CHECK(std::abs(a.purity - b.purity) < 1e-10);
        }
    }
}

TEST_CASE("report") {
    const CorrelationReport r = correlation_report(test::two_mode_squeezed_cm(0.5), FormulaMode::standard);
    CHECK(r.entangled);
    CHECK(r.mode == FormulaMode::standard);
    CHECK(std::abs(r.purity - 1.0) < 1e-12);
    CHECK(r.discord == r.discord_raw);
    CHECK(to_string(FormulaMode::paper) == "paper");
}

}  // TEST_SUITE
