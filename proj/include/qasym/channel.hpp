// channel.hpp — Quantum channel representations, conversions, validation, algebra
//
// A channel is held in up to three interconvertible representations:
//   * Kraus set {K_i}         Φ(X) = Σ K_i X K_i†
//   * Choi matrix             C = Σ_{ij} E_ij ⊗ Φ(E_ij)   (unnormalized)
//   * superoperator matrix    vec(Φ(X)) = S vec(X), column-stacking vec
// Each representation is derived on demand and cached; the canonical one for
// comparisons is the superoperator (Kraus sets are gauge-dependent).

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qasym/numerics.hpp"

namespace qasym {

struct ValidationReport {
    bool cp = false;
    bool tp = false;
    double min_choi_eig = 0.0;  // of the Hermitized Choi
    double tp_defect = 0.0;     // ‖tr_out(Choi) − I‖

    bool ok() const { return cp && tp; }
};

class Channel {
public:
    Channel();  // the trivial channel on C^1

    static Channel from_kraus(std::vector<Matrix> kraus);
    static Channel from_choi(Matrix choi);
    static Channel from_superop(Matrix superop);
    static Channel identity(Eigen::Index dim);

    Eigen::Index dim() const;

    const std::vector<Matrix>& kraus() const;  // throws NotPositiveDefinite if not CP
    const Matrix& choi() const;
    const Matrix& superop() const;

    Matrix apply(const Matrix& X) const;

private:
    struct Repr;
    explicit Channel(std::shared_ptr<Repr> repr) : repr_(std::move(repr)) {}
    std::shared_ptr<Repr> repr_;
};

// The Heisenberg-picture map Φ†, unital instead of trace-preserving; its
// superoperator is the conjugate transpose of Φ's, its Kraus operators the
// adjoints of Φ's.
struct AdjointChannel {
    Eigen::Index dim = 0;
    Matrix superop;
    std::vector<Matrix> kraus;

    Matrix apply(const Matrix& X) const;
};

ValidationReport validate(const Channel& phi, const Tolerances& tol = {});

AdjointChannel adjoint(const Channel& phi);

// compose(a, b) = a ∘ b (apply b first).
Channel compose(const Channel& a, const Channel& b);
Channel channel_power(const Channel& phi, long n);

// Superoperator power by repeated squaring (n >= 0).
Matrix superop_power(const Matrix& S, long n);

// Stinespring sample: a (dim*kraus_rank)×dim Gaussian matrix is
// orthonormalized into an isometry and sliced into kraus_rank Kraus blocks.
// Deterministic in seed.
Channel random_channel(Eigen::Index dim, Eigen::Index kraus_rank, std::uint64_t seed);

// Representation conversions under the fixed conventions.
Matrix kraus_to_superop(const std::vector<Matrix>& kraus);
Matrix superop_to_choi(const Matrix& S);  // reshuffle; involutive
Matrix choi_to_superop(const Matrix& C);
std::vector<Matrix> choi_to_kraus(const Matrix& C, double psd_cut = Tolerances{}.psd_cut);

} // namespace qasym
