// structure.hpp — Block decomposition of the adjoint attractor algebra and the
// peripheral action (unitaries + permutation) on it
//
// For a faithful channel the adjoint attractor Attr(Φ†) is a unital *-algebra
// and decomposes as ⊕_k M_{d_k} ⊗ I_{m_k}; the Schrödinger attractor then
// factorizes as ⊕_k M_{d_k} ⊗ ρ_k with positive definite trace-one states
// ρ_k, and the channel acts on it as X = ⊕ x_k ⊗ ρ_k ↦ ⊕ U_k x_{π(k)} U_k† ⊗ ρ_k.

#pragma once

#include <cstdint>
#include <vector>

#include "qasym/channel.hpp"
#include "qasym/spectral.hpp"

namespace qasym {

struct Block {
    Eigen::Index d = 0;  // dim of the matrix factor H_{k,1}
    Eigen::Index m = 0;  // multiplicity, dim of H_{k,2}
    Matrix W;            // d0 x (d*m) isometry, first tensor factor slow
    Matrix rho;          // m x m, PD, trace 1 (filled by extract_rho)
};

struct BlockDecomposition {
    Eigen::Index d0 = 0;
    std::vector<Block> blocks;

    Eigen::Index M() const { return static_cast<Eigen::Index>(blocks.size()); }
};

struct PeripheralAction {
    // pi[k] = source block: the channel maps block pi[k] content onto block k.
    std::vector<Eigen::Index> pi;
    std::vector<Matrix> U;  // U[k] is d_k x d_k, unitary, deterministic phase

    bool trivial() const {
        for (std::size_t k = 0; k < pi.size(); ++k) {
            if (pi[k] != static_cast<Eigen::Index>(k)) return false;
        }
        return true;
    }
};

// Peripheral right-eigenvector basis of the adjoint channel, verified to be a
// unital *-algebra (contains I, closed under adjoints and products).
std::vector<Matrix> adjoint_attractor_algebra(const Channel& reduced,
                                              const Tolerances& tol = {});

// Wedderburn-style skeleton (W_k, d_k, m_k) of a unital *-algebra via seeded
// randomized splitting: minimal central projections from a random Hermitian
// center element, multiplicities from a random Hermitian block element, matrix
// units from partial isometries connecting its eigenprojections.
BlockDecomposition decompose_algebra(const std::vector<Matrix>& algebra_basis,
                                     std::uint64_t seed, const Tolerances& tol = {});

// Fill rho_k = normalize(tr_{H_{k,1}}(W_k† sigma* W_k)) from the full-rank
// fixed state sigma* = P(I)/tr, validate the x_k ⊗ rho_k factorization over
// the whole attractor basis, and put blocks into canonical order.
BlockDecomposition extract_rho(const Channel& reduced, const BlockDecomposition& skeleton,
                               const SpectralData& reduced_spec,
                               const Tolerances& tol = {});

PeripheralAction extract_action(const Channel& reduced, const BlockDecomposition& D,
                                const Tolerances& tol = {});

// Distorted product A ⋆ B = A · pinv(P(I)) · B making Attr(Φ) an algebra;
// pinv inverts on H0 only. Operands are checked for attractor membership.
Matrix star_product(const Matrix& A, const Matrix& B, const Matrix& PI_image,
                    const AttractorBasis& attractor, const Tolerances& tol = {});

// The peripheral action as a superoperator on H0: X ↦ Σ_k W_k (U_k x_{π(k)} U_k†
// ⊗ ρ_k) W_k† with x_j the least-squares first factor of W_j† X W_j against ρ_j.
Matrix reconstruct_peripheral(const BlockDecomposition& D, const PeripheralAction& A);

// --- shared span/factorization helpers (also used by asymptotics/modular) ---

// Orthonormal basis of span{vec(elements)}; throws if the elements are
// linearly dependent at tolerance.
Matrix orthonormal_span(const std::vector<Matrix>& elements, double rank_cut = 1e-10);

// Least-squares expansion of X in the column span; returns the residual norm.
double span_residual(const Matrix& onb, const Matrix& X);

// Least-squares first factor x of Y ≈ x ⊗ rho (Y on C^{d} ⊗ C^{m}).
Matrix first_factor_against(const Matrix& Y, const Matrix& rho, Eigen::Index d,
                            Eigen::Index m);

} // namespace qasym
