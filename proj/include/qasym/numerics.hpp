// numerics.hpp — Dense complex linear-algebra kernels with explicit tolerance contracts
//
// Conventions used throughout the library:
//   * vec() is column-stacking, so vec(AXB) = (Bᵀ ⊗ A) vec(X).
//   * Eigenvector phases are deterministic: the largest-magnitude entry of each
//     vector is rotated to the positive real axis (ties broken by lowest index).
//   * Eigenvalue clustering uses an absolute gap (Tolerances::degeneracy_gap).

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qasym/errors.hpp"

namespace qasym {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerance knobs shared by every module.
struct Tolerances {
    double eig_residual = 1e-10;   // relative eigenpair residual
    double peripheral_cut = 1e-8;  // | |lambda| - 1 | below this is peripheral
    double psd_cut = 1e-10;        // positivity / isometry slack
    double recon = 1e-8;           // reconstruction and verification tolerance
    double degeneracy_gap = 1e-6;  // absolute eigenvalue clustering gap

    // All knobs strictly positive and peripheral_cut > eig_residual.
    void validate() const;
};

// ---------------------------------------------------------------- helpers ---

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& X);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);
Matrix unvec_square(const Vector& v);

Matrix kron(const Matrix& A, const Matrix& B);

// Partial traces on C^{d1} ⊗ C^{d2} with the first factor slow (row index
// a*d2 + mu). partial_trace_first returns a d2×d2 matrix, _second a d1×d1.
Matrix partial_trace_first(const Matrix& Y, Eigen::Index d1, Eigen::Index d2);
Matrix partial_trace_second(const Matrix& Y, Eigen::Index d1, Eigen::Index d2);

inline Matrix hermitize(const Matrix& A) { return 0.5 * (A + A.adjoint()); }

// Require finite entries and (optionally) squareness.
void check_finite(const Matrix& A, const char* what);
void check_square(const Matrix& A, const char* what);

// Rotate v so its largest-magnitude entry is real positive (lowest index wins ties).
void fix_phase(Eigen::Ref<Vector> v);
void fix_phase(Matrix& columns);

// Partition values into groups whose members are pairwise reachable through
// steps of size <= gap (single-linkage clustering).
std::vector<std::vector<Eigen::Index>> cluster_by_gap(const Vector& values, double gap);

// ----------------------------------------------------------- eig_general ---

// Right/left eigenpairs of a general square matrix. Left and right vectors are
// biorthonormalized per eigenvalue cluster (l_i† r_j = δ_ij within a cluster);
// cross-cluster orthogonality is as good as the spectral separation allows.
struct Eigensystem {
    Vector values;   // sorted: descending |lambda|, then ascending arg in [0, 2π)
    Matrix right;    // columns r_i, unit norm, deterministic phase
    Matrix left;     // columns l_i, scaled so l_i† r_i = 1 inside each cluster
    std::vector<std::vector<Eigen::Index>> clusters;
    double max_gram_condition = 1.0;  // worst per-cluster biorthogonalization condition

    // Riesz spectral projector of one cluster: Σ r_i l_i† over the cluster.
    Matrix cluster_projector(const std::vector<Eigen::Index>& cluster) const;
};

Eigensystem eig_general(const Matrix& A, const Tolerances& tol = {});

// --------------------------------------------------------- eig_hermitian ---

struct HermitianEigensystem {
    RealVector values;  // ascending
    Matrix vectors;     // orthonormal columns, deterministic phase
};

HermitianEigensystem eig_hermitian(const Matrix& A, const Tolerances& tol = {});

// ------------------------------------------------------------ herm_power ---

// Functional calculus sigma^z = Σ λ_j^z P_j for Hermitian positive-definite
// sigma (principal real log of each positive eigenvalue). sigma^{it} is
// unitary for real t.
Matrix herm_power(const Matrix& sigma, Complex z, const Tolerances& tol = {});

// log of a Hermitian positive-definite matrix via the same eigenbasis route.
Matrix herm_log(const Matrix& sigma, const Tolerances& tol = {});

// --------------------------------------------------------- principal_log ---

// Principal matrix logarithm: exp(result) = A, eigenvalue imaginary parts in
// (−π, π). Throws BranchCut when an eigenvalue of A lies within
// degeneracy_gap of the closed negative real axis (which includes 0).
Matrix principal_log(const Matrix& A, const Tolerances& tol = {});

// Matrix exponential (used to build semigroup test channels and to verify
// principal_log round trips).
Matrix expm(const Matrix& A);

} // namespace qasym
