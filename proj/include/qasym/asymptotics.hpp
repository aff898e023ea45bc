// asymptotics.hpp — Peripheral channel, unitarity certification, semigroup and
// idempotency tests, and synthesis of a channel extending a prescribed
// peripheral action
//
// The peripheral channel is unitary iff rho_k and rho_{pi(k)} are unitarily
// equivalent for every k (equal spectra with multiplicity); the witness is
// U = Σ_k W_k (U_k ⊗ V_k) W_{pi(k)}† with V_k matching the rho eigenbases.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qasym/channel.hpp"
#include "qasym/spectral.hpp"
#include "qasym/structure.hpp"

namespace qasym {

struct UnitarityViolation {
    Eigen::Index block = 0;
    enum class Reason { multiplicity_mismatch, spectrum_mismatch } reason;
    std::string detail;
};

struct UnitarityCertificate {
    bool unitary = false;
    Matrix witness;  // d0 x d0, present iff unitary
    std::vector<UnitarityViolation> violations;
    double witness_residual = 0.0;  // max conjugation defect over the attractor span
};

// Φ_P = superop(Φ) · P_Attr; satisfies Φ_P^n = superop^n · P_Attr for n >= 1.
Matrix peripheral_channel(const Channel& phi, const SpectralData& S);

UnitarityCertificate certify_unitary(const BlockDecomposition& D,
                                     const PeripheralAction& A,
                                     const Tolerances& tol = {});

bool is_idempotent(const Channel& phi, const Tolerances& tol = {});

enum class MarkovVerdict { markovian, not_principal_branch, inconclusive };

// Sufficient test only: a failure on the principal branch is NOT a proof of
// non-Markovianity (other logarithm branches are untested).
struct MarkovReport {
    MarkovVerdict verdict = MarkovVerdict::inconclusive;
    std::optional<Matrix> generator;  // superoperator of the GKLS generator
    std::string detail;
    double herm_defect = 0.0;   // max ‖L(X†) − L(X)†‖ over matrix units
    double trace_defect = 0.0;  // ‖L†(I)‖
    double ccp_min_eig = 0.0;   // min eig of (1−ω) Choi(L) (1−ω)
};

MarkovReport markov_principal_branch_test(const Channel& phi, const Tolerances& tol = {});

// Build a channel on C^total_dim whose attractor contains the prescribed
// blocks and whose peripheral action there is (D, A): Φ = Φ_P ∘ E with E the
// block trace-out conditional map plus a measure-and-prepare term on the
// orthogonal complement. Blocks may carry explicit W (total_dim x d_k*m_k
// isometries); otherwise the canonical embedding in block order is used.
Channel synthesize_extension(const BlockDecomposition& D, const PeripheralAction& A,
                             Eigen::Index total_dim, const Tolerances& tol = {});

// rho(n) = Φ^n(rho0) for n = 0..n_max, each output re-validated.
std::vector<Matrix> trajectory(const Channel& phi, const Matrix& rho0, long n_max,
                               const Tolerances& tol = {});

} // namespace qasym
