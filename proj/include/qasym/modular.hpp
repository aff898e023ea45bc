// modular.hpp — Fixed states from the peripheral action, modular flow, modular
// operator / involution, KMS states, and the cycle-power identity
//
// For each cycle (k1 .. kL) of pi the holonomy V = U_{k1} U_{k2} ... U_{kL}
// is diagonalized, the first-block state is the bicommutant choice
// sigma_1 = Σ e^{θ_j} P_j with phases θ_j in [0, 2π), and the remaining block
// states are transported along the cycle. The resulting sigma is a faithful
// fixed state; conjugation by sigma^{i} reproduces Φ_P^{M} on the attractor,
// with M the least common multiple of the cycle lengths.

#pragma once

#include <vector>

#include "qasym/channel.hpp"
#include "qasym/structure.hpp"

namespace qasym {

struct CycleData {
    std::vector<Eigen::Index> blocks;  // cycle order: pi(blocks[t]) = blocks[t+1 mod L]
    Matrix holonomy;                   // V at the first block of the cycle
    RealVector thetas;                 // holonomy eigenphases in [0, 2π), one per sector
    RealVector lambdas;                // e^{theta_j} > 0
    // projectors[t][j] = P_j transported to cycle position t (block blocks[t]).
    std::vector<std::vector<Matrix>> projectors;
};

struct ModularData {
    Matrix sigma;          // d0 x d0, faithful fixed state, trace 1
    Matrix delta_superop;  // A ↦ sigma A sigma^{-1} as a superoperator on H0
    Matrix hamiltonian;    // H = −log sigma
    long M_lcm = 1;        // lcm of the cycle lengths of pi
};

struct FixedStateResult {
    std::vector<CycleData> cycles;
    ModularData modular;
};

FixedStateResult build_fixed_state(const BlockDecomposition& D,
                                   const PeripheralAction& A,
                                   const Tolerances& tol = {});

// flow(t): X ↦ sigma^{-it} X sigma^{it}; a *-automorphism group independent
// of the normalization of sigma.
Matrix modular_flow(const ModularData& md, double t, const Matrix& X,
                    const Tolerances& tol = {});

// Coordinate tables of the modular objects on span(algebra_basis), computed
// in the sigma-inner-product ⟨A|B⟩_sigma = tr(sigma A† B). Antilinear maps
// (S, J) act on coordinates as c ↦ M conj(c); Delta = S*S is linear.
struct ModularOperator {
    std::vector<Matrix> onb;  // sigma-orthonormal basis of the algebra span
    Matrix S;                 // involution table: A ↦ A†
    Matrix Delta;             // Hermitian positive (the modular operator)
    Matrix J;                 // modular conjugation table, antiunitary, J² = 1
    double polar_residual = 0.0;        // defect of S = J Δ^{1/2} (incl. J checks)
    double conjugation_residual = 0.0;  // max ‖Δ(A) − sigma A sigma^{-1}‖ over basis
};

ModularOperator modular_operator(const ModularData& md,
                                 const std::vector<Matrix>& algebra_basis,
                                 const Tolerances& tol = {});

// sigma_beta = sigma^beta / tr(sigma^beta) = e^{−βH}/Z.
Matrix kms_state(const ModularData& md, double beta, const Tolerances& tol = {});

Complex sigma_inner_product(const Matrix& sigma, const Matrix& A, const Matrix& B);

// Compare Φ_P^{M_lcm} with the modular conjugation X ↦ sigma^{i} X sigma^{-i}
// on a spanning set of the attractor. one_step_residual tracks how far a
// single application of Φ_P is from that conjugation (nonzero permutations
// make it large).
struct CyclePowerReport {
    double max_residual = 0.0;
    long M_lcm = 1;
    bool matches = false;
    double one_step_residual = 0.0;
};

CyclePowerReport verify_cycle_power(const Channel& reduced, const BlockDecomposition& D,
                                    const PeripheralAction& A, const ModularData& md,
                                    const Tolerances& tol = {});

} // namespace qasym
