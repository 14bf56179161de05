#include "qpa/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qpa/errors.hpp"

namespace qpa {

using cd = std::complex<double>;

void FockSpaceSpec::validate() const {
    if (n_trunc < 2) throw std::invalid_argument("n_trunc must be at least 2");
}

namespace {

SparseMatrixC single_mode_annihilation(int n) {
    std::vector<Eigen::Triplet<cd>> entries;
    for (int k = 1; k < n; ++k) entries.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
    SparseMatrixC a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

SparseMatrixC sparse_identity(int n) {
    SparseMatrixC id(n, n);
    id.setIdentity();
    return id;
}

SparseMatrixC kron(const SparseMatrixC& A, const SparseMatrixC& B) {
    std::vector<Eigen::Triplet<cd>> entries;
    entries.reserve(static_cast<std::size_t>(A.nonZeros() * B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka) {
        for (SparseMatrixC::InnerIterator ia(A, ka); ia; ++ia) {
            for (int kb = 0; kb < B.outerSize(); ++kb) {
                for (SparseMatrixC::InnerIterator ib(B, kb); ib; ++ib) {
                    entries.emplace_back(ia.row() * B.rows() + ib.row(),
                                         ia.col() * B.cols() + ib.col(), ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrixC out(A.rows() * B.rows(), A.cols() * B.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

SparseMatrixC adjoint(const SparseMatrixC& A) { return SparseMatrixC(A.adjoint()); }

}  // namespace

FockOperators build_fock_operators(const FockSpaceSpec& spec) {
    spec.validate();
    const int n = spec.n_trunc;
    const SparseMatrixC a = single_mode_annihilation(n);
    const SparseMatrixC id = sparse_identity(n);
    FockOperators ops;
    ops.n_trunc = n;
    ops.a1 = kron(a, id);
    ops.a2 = kron(id, a);
    ops.identity = sparse_identity(n * n);
    return ops;
}

SparseMatrixC build_hamiltonian_matrix(const FrameParameters& f, const FockSpaceSpec& spec) {
    const FockOperators ops = build_fock_operators(spec);
    const cd j(0.0, 1.0);
    const SparseMatrixC& a1 = ops.a1;
    const SparseMatrixC& a2 = ops.a2;
    const SparseMatrixC& I = ops.identity;
    const SparseMatrixC a1d = adjoint(a1);
    const SparseMatrixC a2d = adjoint(a2);

    const SparseMatrixC q1 = a1 - a1d;  // anti-Hermitian charge factor
    const SparseMatrixC q2 = a2 - a2d;
    const SparseMatrixC phi2 = a2 + a2d;

    SparseMatrixC H = cd(f.Omega_1) * (a1d * a1 + 0.5 * I) + cd(f.Omega_2) * (a2d * a2 + 0.5 * I);
    H += cd(-f.g_q1q2) * SparseMatrixC(q1 * q2);
    H += (j * f.g_q1p2) * SparseMatrixC(q1 * phi2);
    H += (j * f.g_q2p2 * 0.5) * SparseMatrixC(q2 * phi2 + phi2 * q2);
    H += (j * f.gamma_q1) * q1 + (j * f.gamma_q2) * q2;
    H += cd(f.gamma_phi1) * SparseMatrixC(a1 + a1d) + cd(f.gamma_phi2) * phi2;
    H.prune(cd(0.0));

    const SparseMatrixC residual = H - adjoint(H);
    double worst = 0.0;
    for (int k = 0; k < residual.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(residual, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    if (worst > 1e-10) {
        throw NonHermitian("Hamiltonian Hermiticity residual " + std::to_string(worst));
    }
    return H;
}

std::vector<SparseMatrixC> build_collapse_ops(double kappa1, double kappa2, double n_bar_1,
                                              double n_bar_2, const FockSpaceSpec& spec) {
    if (kappa1 < 0.0 || kappa2 < 0.0 || n_bar_1 < 0.0 || n_bar_2 < 0.0) {
        throw std::invalid_argument("decay rates and occupations must be non-negative");
    }
    const FockOperators ops = build_fock_operators(spec);
    std::vector<SparseMatrixC> out;
    auto add_mode = [&](const SparseMatrixC& a, double kappa, double n_bar) {
        if (kappa == 0.0) return;
        out.push_back(cd(std::sqrt(kappa * (n_bar + 1.0))) * a);
        if (n_bar > 0.0) out.push_back(cd(std::sqrt(kappa * n_bar)) * adjoint(a));
    };
    add_mode(ops.a1, kappa1, n_bar_1);
    add_mode(ops.a2, kappa2, n_bar_2);
    return out;
}

LindbladGenerator::LindbladGenerator(const SparseMatrixC& hamiltonian,
                                     std::vector<SparseMatrixC> collapse) {
    const cd j(0.0, 1.0);
    SparseMatrixC k = -j * hamiltonian;
    for (const auto& c : collapse) k -= cd(0.5) * SparseMatrixC(adjoint(c) * c);
    k.prune(cd(0.0));
    k_adj_ = adjoint(k);
    dim_ = static_cast<int>(k.rows());
    for (const auto& c : collapse) collapse_adj_.push_back(adjoint(c));
}

namespace {

// out += X S for dense X and sparse S, one column axpy per nonzero. Much
// faster than the generic product for the ~10 nonzeros per column here.
void accumulate_dense_sparse(DensityMatrix& out, const DensityMatrix& X, const SparseMatrixC& S) {
    for (int col = 0; col < S.outerSize(); ++col) {
        for (SparseMatrixC::InnerIterator it(S, col); it; ++it) {
            out.col(col) += it.value() * X.col(it.index());
        }
    }
}

}  // namespace

void LindbladGenerator::apply(const DensityMatrix& rho, DensityMatrix& out) const {
    // With rho Hermitian, rho K^+ = (K rho)^+ and (C rho) C^+ = (rho C^+)^+ C^+.
    out.setZero(rho.rows(), rho.cols());
    accumulate_dense_sparse(out, rho, k_adj_);
    out += out.adjoint().eval();
    scratch_.resize(rho.rows(), rho.cols());
    for (const auto& c_adj : collapse_adj_) {
        scratch_.setZero();
        accumulate_dense_sparse(scratch_, rho, c_adj);
        scratch_.adjointInPlace();
        accumulate_dense_sparse(out, scratch_, c_adj);
    }
}

DensityMatrix LindbladGenerator::operator()(const DensityMatrix& rho) const {
    DensityMatrix out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
}

DensityMatrix vacuum_density(const FockSpaceSpec& spec) {
    spec.validate();
    DensityMatrix rho = DensityMatrix::Zero(spec.dimension(), spec.dimension());
    rho(0, 0) = 1.0;
    return rho;
}

double leakage(const DensityMatrix& rho, int n_trunc) {
    const int top = n_trunc - 1;
    double mode1 = 0.0;
    double mode2 = 0.0;
    for (int k = 0; k < n_trunc; ++k) {
        mode1 += rho(top * n_trunc + k, top * n_trunc + k).real();
        mode2 += rho(k * n_trunc + top, k * n_trunc + top).real();
    }
    return std::max(mode1, mode2);
}

void evolve_density(const DensityMatrix& rho0, const LindbladGenerator& generator,
                    std::span<const double> t_grid, double max_step,
                    const DensityObserver& observe) {
    if (t_grid.empty()) return;
    if (!(max_step > 0.0)) throw std::invalid_argument("RK4 step must be positive");
    const int dim = generator.dimension();
    if (rho0.rows() != dim || rho0.cols() != dim) {
        throw std::invalid_argument("initial state dimension does not match the generator");
    }
    const int n_trunc = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));

    DensityMatrix rho = rho0;
    DensityMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);

    auto emit = [&](std::size_t index, double t) {
        const double leak = leakage(rho, n_trunc);
        if (observe) observe(index, t, rho, leak);
        if (leak > kLeakageAbort) {
            throw TruncationLeakage("top Fock level population " + std::to_string(leak) +
                                        " exceeds 1e-4 at t = " + std::to_string(t) +
                                        "; raise n_trunc",
                                    t, leak);
        }
    };

    emit(0, t_grid[0]);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        if (!(span > 0.0)) throw std::invalid_argument("time grid must be strictly increasing");
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / max_step - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            generator.apply(rho, k1);
            tmp = rho + (0.5 * h) * k1;
            generator.apply(tmp, k2);
            tmp = rho + (0.5 * h) * k2;
            generator.apply(tmp, k3);
            tmp = rho + h * k3;
            generator.apply(tmp, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            // Keep the Hermitian structure the generator relies on.
            tmp = 0.5 * (rho + rho.adjoint());
            rho.swap(tmp);
        }
        emit(i, t_grid[i]);
    }
}

std::vector<DensityMatrix> evolve_density(const DensityMatrix& rho0,
                                          const LindbladGenerator& generator,
                                          std::span<const double> t_grid, double max_step) {
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    evolve_density(rho0, generator, t_grid, max_step,
                   [&](std::size_t, double, const DensityMatrix& rho, double) {
                       out.push_back(rho);
                   });
    return out;
}

namespace {

// Tr(rho X) for sparse X.
cd trace_product(const DensityMatrix& rho, const SparseMatrixC& X) {
    cd sum = 0.0;
    for (int k = 0; k < X.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(X, k); it; ++it) {
            sum += rho(it.col(), it.row()) * it.value();
        }
    }
    return sum;
}

}  // namespace

MomentSet expectations(const DensityMatrix& rho, const FockOperators& ops) {
    const SparseMatrixC a1d = adjoint(ops.a1);
    MomentSet m;
    m.n1 = trace_product(rho, SparseMatrixC(a1d * ops.a1)).real();
    m.n2 = trace_product(rho, SparseMatrixC(adjoint(ops.a2) * ops.a2)).real();
    m.m12 = trace_product(rho, SparseMatrixC(ops.a1 * ops.a2));
    m.c12 = trace_product(rho, SparseMatrixC(a1d * ops.a2));
    m.alpha1 = trace_product(rho, ops.a1);
    m.alpha2 = trace_product(rho, ops.a2);
    m.squeeze1 = trace_product(rho, SparseMatrixC(ops.a1 * ops.a1));
    m.squeeze2 = trace_product(rho, SparseMatrixC(ops.a2 * ops.a2));
    return m;
}

void validate_density(const DensityMatrix& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix is not square");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) {
        throw std::invalid_argument("density matrix not Hermitian (residual " +
                                    std::to_string(herm) + ")");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw std::invalid_argument("density matrix trace " + std::to_string(tr) + " != 1");
    }
    const Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(0.5 * (rho + rho.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-8) {
        throw std::invalid_argument("density matrix has a negative eigenvalue " +
                                    std::to_string(eig.eigenvalues().minCoeff()));
    }
}

double rk4_step_bound(const FrameParameters& f) {
    const double coherent = std::max({std::abs(f.Omega_1), std::abs(f.Omega_2),
                                      std::abs(f.g_q1q2), std::abs(f.g_q1p2),
                                      std::abs(f.g_q2p2)});
    const double decay = std::max(f.kappa1, f.kappa2);
    double h = 0.01 / std::max(coherent, 1e-300);
    if (decay > 0.0) h = std::min(h, 0.05 / decay);
    if (coherent == 0.0 && decay == 0.0) h = 0.01;
    return h;
}

}  // namespace qpa
