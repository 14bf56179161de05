#pragma once

// Lindblad master equation on a truncated two-mode Fock space.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qpa/frame.hpp"
#include "qpa/states.hpp"

namespace qpa {

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

struct FockSpaceSpec {
    int n_trunc = 10;  // levels per mode

    int dimension() const { return n_trunc * n_trunc; }
    void validate() const;
};

struct FockOperators {
    int n_trunc = 0;
    SparseMatrixC a1;
    SparseMatrixC a2;
    SparseMatrixC identity;
};

/// a|n> = sqrt(n)|n-1> per mode, embedded as a (x) 1 and 1 (x) a.
FockOperators build_fock_operators(const FockSpaceSpec& spec);

/// H/hbar in the frame of `f`:
///   W1 (n1 + 1/2) + W2 (n2 + 1/2)
///   - g1 (a1 - a1^+)(a2 - a2^+) + j g2 (a1 - a1^+)(a2 + a2^+)
///   + j g3 {(a2 - a2^+), (a2 + a2^+)}/2
///   + j gq1 (a1 - a1^+) + j gq2 (a2 - a2^+) + gphi1 (a1 + a1^+) + gphi2 (a2 + a2^+)
/// The g3 product is symmetrized; as printed it is not Hermitian.
/// Throws NonHermitian if ||H - H^+||_max > 1e-10.
SparseMatrixC build_hamiltonian_matrix(const FrameParameters& f, const FockSpaceSpec& spec);

/// Per mode: sqrt(k (n+1)) a and, when n > 0, sqrt(k n) a^+. Modes with
/// k = 0 contribute nothing.
std::vector<SparseMatrixC> build_collapse_ops(double kappa1, double kappa2, double n_bar_1,
                                              double n_bar_2, const FockSpaceSpec& spec);

/// drho/dt = -j [H, rho] + sum_n (C rho C^+ - {C^+ C, rho}/2), evaluated as
/// K rho + (K rho)^+ + sum_n C rho C^+ with K = -j H - sum_n C^+ C / 2.
class LindbladGenerator {
public:
    LindbladGenerator(const SparseMatrixC& hamiltonian, std::vector<SparseMatrixC> collapse);

    int dimension() const { return dim_; }
    /// `rho` must be Hermitian. Not thread-safe: uses an internal buffer.
    void apply(const DensityMatrix& rho, DensityMatrix& out) const;
    DensityMatrix operator()(const DensityMatrix& rho) const;

private:
    int dim_ = 0;
    SparseMatrixC k_adj_;
    std::vector<SparseMatrixC> collapse_adj_;
    mutable DensityMatrix scratch_;
};

DensityMatrix vacuum_density(const FockSpaceSpec& spec);

/// Largest top-level marginal population over the two modes.
double leakage(const DensityMatrix& rho, int n_trunc);

inline constexpr double kLeakageAbort = 1e-4;

/// Called at every grid time, including the first.
using DensityObserver =
    std::function<void(std::size_t index, double t, const DensityMatrix& rho, double leakage)>;

/// Fixed-step RK4 from t_grid[0]. Each grid interval is split into the
/// fewest equal steps not exceeding max_step. Throws TruncationLeakage once
/// a sample's leakage exceeds 1e-4 (after that sample was observed).
void evolve_density(const DensityMatrix& rho0, const LindbladGenerator& generator,
                    std::span<const double> t_grid, double max_step,
                    const DensityObserver& observe);

std::vector<DensityMatrix> evolve_density(const DensityMatrix& rho0,
                                          const LindbladGenerator& generator,
                                          std::span<const double> t_grid, double max_step);

MomentSet expectations(const DensityMatrix& rho, const FockOperators& ops);

/// Throws std::invalid_argument describing the first violated property
/// (Hermiticity 1e-10, unit trace 1e-8, eigenvalues >= -1e-8).
void validate_density(const DensityMatrix& rho);

/// min(0.01 / fastest coherent rate, 0.05 / largest decay rate). The
/// coherent rates are |W1|, |W2| and the coupling magnitudes.
double rk4_step_bound(const FrameParameters& f);

}  // namespace qpa
