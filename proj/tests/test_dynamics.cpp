#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "qpa/commands.hpp"
#include "qpa/correlations.hpp"
#include "qpa/errors.hpp"
#include "qpa/fock.hpp"
#include "qpa/gaussian.hpp"
#include "support.hpp"

using namespace qpa;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd dense(const SparseMatrixC& m) { return Eigen::MatrixXcd(m); }

FrameParameters quiet_modes(double W1 = 0.05, double W2 = -0.03) {
    FrameParameters f;
    f.Omega_1 = W1;
    f.Omega_2 = W2;
    return f;
}

DensityMatrix fock_state(int n_trunc, int n1, int n2) {
    DensityMatrix rho = DensityMatrix::Zero(n_trunc * n_trunc, n_trunc * n_trunc);
    rho(n1 * n_trunc + n2, n1 * n_trunc + n2) = 1.0;
    return rho;
}

std::vector<double> grid(double t_end, int n) { return linspace(0.0, t_end, n); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("ladder operators") {
    const FockOperators two = build_fock_operators({2});
    const Eigen::MatrixXcd a1 = dense(two.a1);
    CHECK(a1.cwiseAbs().sum() == 2.0);  // a (x) 1 for the 2-level a = [[0, 1], [0, 0]]
    CHECK(a1(0, 2) == cd(1.0));
    CHECK(a1(1, 3) == cd(1.0));

    const int n = 6;
    const FockOperators ops = build_fock_operators({n});
    const Eigen::MatrixXcd a = dense(ops.a1), b = dense(ops.a2);
    const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
    for (int n1 = 0; n1 < n; ++n1) {
        for (int n2 = 0; n2 < n; ++n2) {
            const int k = n1 * n + n2;
            CHECK(std::abs(comm(k, k) - cd(n1 == n - 1 ? 1.0 - n : 1.0)) < 1e-12);
        }
    }
    CHECK((comm - Eigen::MatrixXcd(comm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a * b - b * a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a * b.adjoint() - b.adjoint() * a).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(build_fock_operators({1}));
}

TEST_CASE("free Hamiltonian is diagonal") {
    const int n = 5;
    const FrameParameters f = quiet_modes(0.3, 0.7);
    const Eigen::MatrixXcd H = dense(build_hamiltonian_matrix(f, {n}));
    for (int n1 = 0; n1 < n; ++n1) {
        for (int n2 = 0; n2 < n; ++n2) {
            const int k = n1 * n + n2;
            CHECK(H(k, k).real() == doctest::Approx(0.3 * (n1 + 0.5) + 0.7 * (n2 + 0.5)));
        }
    }
    CHECK((H - Eigen::MatrixXcd(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("self charge-flux coupling acts on mode 2 alone") {
    const int n = 6;
    FrameParameters f = quiet_modes();
    const Eigen::MatrixXcd H0 = dense(build_hamiltonian_matrix(f, {n}));
    f.g_q2p2 = 0.013;
    const Eigen::MatrixXcd H = dense(build_hamiltonian_matrix(f, {n}));
    const FockOperators ops = build_fock_operators({n});
    const Eigen::MatrixXcd n1 = dense(ops.a1).adjoint() * dense(ops.a1);
    const Eigen::MatrixXcd V = H - H0;
    CHECK((V * n1 - n1 * V).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(V.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("symmetrized ordering is Hermitian where the printed product is not") {
    const int n = 6;
    const FockOperators ops = build_fock_operators({n});
    const Eigen::MatrixXcd a = dense(ops.a2);
    const cd j(0, 1);
    const Eigen::MatrixXcd printed = j * (a - a.adjoint()) * (a + a.adjoint());
    CHECK((printed - printed.adjoint()).cwiseAbs().maxCoeff() > 0.5);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    FrameParameters f;
    f.Omega_1 = u(rng); f.Omega_2 = u(rng);
    f.g_q1q2 = u(rng); f.g_q1p2 = u(rng); f.g_q2p2 = u(rng);
    f.gamma_q1 = u(rng); f.gamma_q2 = u(rng); f.gamma_phi1 = u(rng); f.gamma_phi2 = u(rng);
    const Eigen::MatrixXcd H = dense(build_hamiltonian_matrix(f, {n}));
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("collapse operators") {
    const FockSpaceSpec spec{4};
    CHECK(build_collapse_ops(0.1, 0.2, 0.0, 0.0, spec).size() == 2);
    CHECK(build_collapse_ops(0.0, 0.0, 0.5, 0.5, spec).empty());
    CHECK(build_collapse_ops(0.1, 0.0, 0.5, 0.5, spec).size() == 2);
    const double nb = 0.771;
    const auto ops = build_collapse_ops(0.1, 0.1, nb, nb, spec);
    REQUIRE(ops.size() == 4);
    const double down = std::abs(dense(ops[0])(0, spec.n_trunc));  // sqrt(k(n+1)) <0|a|1>
    const double up = std::abs(dense(ops[1])(spec.n_trunc, 0));    // sqrt(k n) <1|a^+|0>
    CHECK(down / up == doctest::Approx(std::sqrt(1.771 / 0.771)).epsilon(1e-14));
}

TEST_CASE("zero generator leaves the state untouched") {
    const int n = 4;
    const LindbladGenerator gen(SparseMatrixC(n * n, n * n), {});
    DensityMatrix rho = fock_state(n, 1, 2);
    rho(1, 2) = rho(2, 1) = 0.0;  // already diagonal; add coherence
    rho(5, 6) = cd(0.1, 0.05);
    rho(6, 5) = std::conj(rho(5, 6));
    const auto traj = evolve_density(rho, gen, grid(10.0, 5), 0.1);
    for (const auto& r : traj) CHECK((r - rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vacuum is dark under pure decay") {
    const FockSpaceSpec spec{5};
    FrameParameters f = quiet_modes();
    const LindbladGenerator gen(build_hamiltonian_matrix(f, spec),
                                build_collapse_ops(0.02, 0.03, 0.0, 0.0, spec));
    const FockOperators ops = build_fock_operators(spec);
    for (const auto& r : evolve_density(vacuum_density(spec), gen, grid(100.0, 6), 0.2)) {
        const MomentSet m = expectations(r, ops);
        CHECK(m.n1 == 0.0);
        CHECK(m.n2 == 0.0);
    }
}

TEST_CASE("driven damped mode follows the scalar linear ODE") {
    // d alpha/dt = -(j W + k/2) alpha - gamma, alpha(0) = 0.
    const FockSpaceSpec spec{8};
    FrameParameters f = quiet_modes(0.05, 0.1);
    f.kappa1 = 0.02;
    f.gamma_q1 = 1e-3;
    const LindbladGenerator gen(build_hamiltonian_matrix(f, spec),
                                build_collapse_ops(f.kappa1, 0.0, 0.0, 0.0, spec));
    const FockOperators ops = build_fock_operators(spec);
    const std::vector<double> t = grid(300.0, 31);
    const cd lam(f.kappa1 / 2, f.Omega_1);
    const auto traj = evolve_density(vacuum_density(spec), gen, t, rk4_step_bound(f));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const cd oracle = -f.gamma_q1 / lam * (1.0 - std::exp(-lam * t[i]));
        const MomentSet m = expectations(traj[i], ops);
        CHECK(std::abs(m.alpha1 - oracle) < 1e-6);
        CHECK(std::abs(m.n1 - std::norm(oracle)) < 1e-8);  // coherent state
        CHECK(m.n2 == doctest::Approx(0.0));
    }
    // The Gaussian path obeys the same equation.
    const GaussianTrajectory g = evolve_gaussian(GaussianState{}, langevin_dynamics(f), t, rk4_step_bound(f));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const cd oracle = -f.gamma_q1 / lam * (1.0 - std::exp(-lam * t[i]));
        CHECK(std::abs(moments_from_gaussian(g.states[i]).alpha1 - oracle) < 1e-6);
    }
}

TEST_CASE("density matrix stays valid and energy is conserved without loss") {
    const FockSpaceSpec spec{8};
    FrameParameters f = quiet_modes(0.05, 0.04);
    f.g_q1q2 = 0.004;
    f.g_q1p2 = -0.003;
    f.g_q2p2 = 0.002;
    const SparseMatrixC H = build_hamiltonian_matrix(f, spec);
    const LindbladGenerator gen(H, {});
    DensityMatrix rho = fock_state(spec.n_trunc, 1, 0);
    const std::vector<double> t = grid(2000.0, 11);  // 10^4 steps of 0.2
    const Eigen::MatrixXcd Hd = dense(H);
    const double e0 = (Hd * rho).trace().real();
    for (const auto& r : evolve_density(rho, gen, t, 0.2)) {
        CHECK_NOTHROW(validate_density(r));
        CHECK(std::abs((Hd * r).trace().real() - e0) <= 1e-6 * std::abs(e0));
    }
}

TEST_CASE("density validation") {
    DensityMatrix rho = fock_state(2, 0, 0);
    CHECK_NOTHROW(validate_density(rho));
    rho(0, 0) = 0.5;
    CHECK_THROWS_AS(validate_density(rho), std::invalid_argument);
    rho = fock_state(2, 0, 0);
    rho(0, 1) = 0.3;
    CHECK_THROWS_AS(validate_density(rho), std::invalid_argument);
}

TEST_CASE("leakage aborts once the top level fills") {
    const FockSpaceSpec spec{3};
    FrameParameters f = quiet_modes();
    f.gamma_q1 = 0.05;
    f.kappa1 = 0.01;
    const LindbladGenerator gen(build_hamiltonian_matrix(f, spec),
                                build_collapse_ops(f.kappa1, 0.0, 0.0, 0.0, spec));
    std::size_t seen = 0;
    try {
        evolve_density(vacuum_density(spec), gen, grid(200.0, 21), 0.1,
                       [&](std::size_t, double, const DensityMatrix&, double) { ++seen; });
        FAIL("expected TruncationLeakage");
    } catch (const TruncationLeakage& e) {
        CHECK(e.leakage() > kLeakageAbort);
        CHECK(seen >= 2);
    }
}

TEST_CASE("ladder drift transcription") {
    FrameParameters f = quiet_modes(0.05, -0.02);
    f.kappa1 = 0.01;
    f.kappa2 = 0.03;
    const Eigen::Matrix4cd M = drift_matrix(f).matrix;
    const cd j(0, 1);
    CHECK(M(0, 0) == -j * 0.05 - 0.005);
    CHECK(M(1, 1) == j * 0.05 - 0.005);
    CHECK(M(2, 2) == j * 0.02 - 0.015);
    CHECK(M(3, 3) == -j * 0.02 - 0.015);
    CHECK((M - Eigen::Matrix4cd(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

    FrameParameters g;
    g.g_q2p2 = 0.7;
    const Eigen::Matrix4cd N = drift_matrix(g).matrix;
    CHECK(N(2, 3) == cd(-1.4));
    CHECK(N(3, 2) == cd(-1.4));
    CHECK(N.cwiseAbs().sum() == doctest::Approx(2.8));
}

TEST_CASE("quadrature drift agrees with the ladder drift without charge couplings") {
    // Without g_q1q2 and g_q1p2 both descriptions reduce to the same single-mode terms.
    FrameParameters f = quiet_modes(0.05, -0.02);
    f.kappa1 = 0.01;
    f.kappa2 = 0.03;
    f.g_q2p2 = 0.004;
    const Eigen::Matrix4cd q = ladder_to_quadrature(drift_matrix(f).matrix);
    CHECK(q.imag().cwiseAbs().maxCoeff() < 1e-15);
    CHECK((q.real() - langevin_dynamics(f).drift).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("thermal relaxation matches the closed form") {
    FrameParameters f = quiet_modes(0.05, -0.02);
    f.kappa1 = 0.01;
    f.kappa2 = 0.03;
    f.n_bar_1 = 0.8;
    f.n_bar_2 = 0.3;
    const std::vector<double> t = grid(3000.0, 61);
    const GaussianTrajectory g = evolve_gaussian(GaussianState{}, langevin_dynamics(f), t, rk4_step_bound(f));
    double prev = -1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const MomentSet m = moments_from_gaussian(g.states[i]);
        CHECK(std::abs(m.n1 - f.n_bar_1 * (1.0 - std::exp(-f.kappa1 * t[i]))) < 1e-6);
        CHECK(std::abs(m.n2 - f.n_bar_2 * (1.0 - std::exp(-f.kappa2 * t[i]))) < 1e-6);
        CHECK(m.n1 > prev);
        prev = m.n1;
        CHECK(is_physical(g.states[i].cm));
    }
    CHECK(!g.unstable);
}

TEST_CASE("Gaussian steady states") {
    FrameParameters f = quiet_modes(0.05, -0.02);
    f.kappa1 = 0.01;
    f.kappa2 = 0.03;
    CHECK((steady_state_gaussian(langevin_dynamics(f)).cm - CovarianceMatrix::Identity())
              .cwiseAbs().maxCoeff() < 1e-12);
    f.n_bar_1 = 0.8;
    f.n_bar_2 = 0.3;
    CHECK((steady_state_gaussian(langevin_dynamics(f)).cm - test::thermal_cm(0.8, 0.3))
              .cwiseAbs().maxCoeff() < 1e-12);

    FrameParameters bad = f;
    bad.g_q1p2 = 0.5;  // far beyond the damping
    CHECK_THROWS_AS(steady_state_gaussian(langevin_dynamics(bad)), UnstableDrift);
}

TEST_CASE("default steady state agrees with long-time integration") {
    const CircuitConfig c = default_config();
    const FrameParameters f =
        to_reference_frame(derive_coefficients(c.transistor, c.environment), c.environment);
    const QuadratureDynamics dyn = langevin_dynamics(f);
    const GaussianState ss = steady_state_gaussian(dyn);
    const double t_end = 30.0 / std::min(f.kappa1, f.kappa2);
    const GaussianTrajectory g = evolve_gaussian(GaussianState{}, dyn, grid(t_end, 2), rk4_step_bound(f));
    CHECK((g.states.back().cm - ss.cm).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((g.states.back().mean - ss.mean).cwiseAbs().maxCoeff() < 1e-6);
    const Eigen::Matrix4d res = dyn.drift * ss.cm + ss.cm * dyn.drift.transpose() + dyn.diffusion;
    CHECK(res.norm() < 1e-10 * dyn.diffusion.norm());
}

TEST_CASE("covariance from moments") {
    MomentSet m;
    CHECK((cm_from_moments(m) - CovarianceMatrix::Identity()).cwiseAbs().maxCoeff() == 0.0);
    m.n1 = 1.0;
    CHECK((cm_from_moments(m) - test::thermal_cm(1.0, 0.0)).cwiseAbs().maxCoeff() == 0.0);
    MomentSet bad;
    bad.n1 = 0.0;
    bad.squeeze1 = 0.6;  // |<a^2>|^2 > n (n + 1)
    CHECK_THROWS_AS(cm_from_moments(bad), Nonphysical);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        GaussianState s;
        s.cm = test::random_physical_cm(rng);
        s.mean = Eigen::Vector4d::Random();
        const MomentSet back = moments_from_gaussian(s);
        CHECK((cm_from_moments(back) - s.cm).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((mean_from_moments(back) - s.mean).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Fock moments match the Gaussian flow at low temperature") {
    CircuitConfig c = default_config();
    c.environment.T_em = 0.05;
    c.sweep.t_end_seconds = 2.0 / std::min(c.environment.kappa1, c.environment.kappa2);
    c.sweep.t_samples = 21;
    const EvolutionResult r = simulate_evolution(c);
    CHECK(!r.fock_abort);
    CHECK(r.compared_samples == 21);
    CHECK(r.max_relative_deviation < 1e-2);

    // Purity of both paths and the moment-built covariance.
    const TrajectorySample& f = r.fock.back();
    CHECK(std::abs(f.purity - r.gaussian.back().purity) < 1e-3);
    CHECK((cm_from_moments(f.moments) - r.gaussian_states.back().cm).cwiseAbs().maxCoeff() <
          1e-2 * r.gaussian_states.back().cm.cwiseAbs().maxCoeff());

    // Two more levels per mode barely move the moments.
    CircuitConfig wider = c;
    wider.dynamics.fock.n_trunc = 12;
    wider.dynamics.representation = Representation::fock;
    const EvolutionResult w = simulate_evolution(wider);
    const MomentSet& a = r.fock.back().moments;
    const MomentSet& b = w.fock.back().moments;
    CHECK(std::abs(a.n1 - b.n1) < 1e-3 * b.n1);
    CHECK(std::abs(a.n2 - b.n2) < 1e-3 * b.n2);
    CHECK(std::abs(std::abs(a.c12) - std::abs(b.c12)) < 1e-3 * std::abs(b.c12));
}

TEST_CASE("step bound") {
    FrameParameters f = quiet_modes(0.05, -0.02);
    f.kappa1 = 0.01;
    f.kappa2 = 0.5;
    CHECK(rk4_step_bound(f) == doctest::Approx(0.1));
    f.kappa2 = 0.01;
    CHECK(rk4_step_bound(f) == doctest::Approx(0.2));
    f.g_q1p2 = 0.1;
    CHECK(rk4_step_bound(f) == doctest::Approx(0.1));
}

}  // TEST_SUITE
