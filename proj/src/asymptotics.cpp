// asymptotics.cpp — Unitarity certification and the extension construction

#include "qasym/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qasym {

Matrix peripheral_channel(const Channel& phi, const SpectralData& S) {
    return phi.superop() * S.attractor_projector;
}

// --------------------------------------------------------- certify_unitary ---

UnitarityCertificate certify_unitary(const BlockDecomposition& D,
                                     const PeripheralAction& A,
                                     const Tolerances& tol) {
    tol.validate();
    UnitarityCertificate cert;

    const Eigen::Index M = D.M();
    std::vector<Matrix> Vk(static_cast<std::size_t>(M));
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& dst = D.blocks[static_cast<std::size_t>(k)];
        const Block& src =
            D.blocks[static_cast<std::size_t>(A.pi[static_cast<std::size_t>(k)])];
        if (dst.m != src.m) {
            cert.violations.push_back(
                {k, UnitarityViolation::Reason::multiplicity_mismatch,
                 "m_k = " + std::to_string(dst.m) +
                     " vs m_pi(k) = " + std::to_string(src.m)});
            continue;
        }
        const HermitianEigensystem hd = eig_hermitian(dst.rho, tol);
        const HermitianEigensystem hs = eig_hermitian(src.rho, tol);
        double gap = 0.0;
        for (Eigen::Index i = 0; i < dst.m; ++i) {
            gap = std::max(gap, std::abs(hd.values(i) - hs.values(i)));
        }
        if (gap > tol.degeneracy_gap) {
            cert.violations.push_back({k, UnitarityViolation::Reason::spectrum_mismatch,
                                       "sorted rho spectra differ by " +
                                           std::to_string(gap)});
            continue;
        }
        // Match eigenbases by descending eigenvalue; any orthonormal choice
        // works inside a degenerate group.
        Matrix Ed(dst.m, dst.m), Es(src.m, src.m);
        for (Eigen::Index i = 0; i < dst.m; ++i) {
            Ed.col(i) = hd.vectors.col(dst.m - 1 - i);
            Es.col(i) = hs.vectors.col(src.m - 1 - i);
        }
        Vk[static_cast<std::size_t>(k)] = Ed * Es.adjoint();
    }
    if (!cert.violations.empty()) {
        cert.unitary = false;
        return cert;
    }

    // U = Σ_k W_k (U_k ⊗ V_k) W_{pi(k)}†, unitary on H0 by construction.
    Matrix U = Matrix::Zero(D.d0, D.d0);
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& dst = D.blocks[static_cast<std::size_t>(k)];
        const Block& src =
            D.blocks[static_cast<std::size_t>(A.pi[static_cast<std::size_t>(k)])];
        U += dst.W * kron(A.U[static_cast<std::size_t>(k)], Vk[static_cast<std::size_t>(k)]) *
             src.W.adjoint();
    }

    // Verify the conjugation against the prescribed action on a spanning set
    // of the attractor.
    double residual = 0.0;
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& dst = D.blocks[static_cast<std::size_t>(k)];
        const Block& src =
            D.blocks[static_cast<std::size_t>(A.pi[static_cast<std::size_t>(k)])];
        const Matrix& Uk = A.U[static_cast<std::size_t>(k)];
        for (Eigen::Index b = 0; b < src.d; ++b) {
            for (Eigen::Index a = 0; a < src.d; ++a) {
                Matrix Eab = Matrix::Zero(src.d, src.d);
                Eab(a, b) = 1.0;
                const Matrix X = src.W * kron(Eab, src.rho) * src.W.adjoint();
                const Matrix target =
                    dst.W * kron(Uk * Eab * Uk.adjoint(), dst.rho) * dst.W.adjoint();
                residual = std::max(residual,
                                    (U * X * U.adjoint() - target).norm() / X.norm());
            }
        }
    }
    cert.witness_residual = residual;
    if (residual > tol.recon) {
        throw Error("certify_unitary: witness verification failed (residual " +
                    std::to_string(residual) + "); decomposition inconsistent");
    }
    cert.unitary = true;
    cert.witness = std::move(U);
    return cert;
}

bool is_idempotent(const Channel& phi, const Tolerances& tol) {
    const Matrix& S = phi.superop();
    return (S * S - S).norm() <= tol.recon;
}

// ------------------------------------------- markov_principal_branch_test ---

MarkovReport markov_principal_branch_test(const Channel& phi, const Tolerances& tol) {
    tol.validate();
    MarkovReport rep;
    const Matrix& S = phi.superop();
    const Eigen::Index d = phi.dim();

    const Vector lambdas = S.eigenvalues();
    double min_mod = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        min_mod = std::min(min_mod, std::abs(lambdas(i)));
    }
    if (min_mod <= tol.degeneracy_gap) {
        rep.verdict = MarkovVerdict::inconclusive;
        rep.detail = "SingularChannel: superoperator is not invertible";
        return rep;
    }

    Matrix L;
    try {
        L = principal_log(S, tol);
    } catch (const BranchCut& e) {
        rep.verdict = MarkovVerdict::inconclusive;
        rep.detail = std::string("BranchCut: ") + e.what();
        return rep;
    }

    const double scale = std::max(1.0, L.norm());
    auto apply_L = [&](const Matrix& X) { return unvec(L * vec(X), d, d); };

    // (a) Hermiticity preservation on the matrix-unit basis.
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            Matrix Eab = Matrix::Zero(d, d);
            Eab(a, b) = 1.0;
            const double defect =
                (apply_L(Eab.adjoint().eval()) - apply_L(Eab).adjoint()).norm();
            rep.herm_defect = std::max(rep.herm_defect, defect);
        }
    }

    // (b) The adjoint of L annihilates the identity (trace preservation of e^{tL}).
    rep.trace_defect = (L.adjoint() * vec(Matrix::Identity(d, d))).norm();

    // (c) Conditional complete positivity off the maximally entangled vector.
    const Vector omega_vec = vec(Matrix::Identity(d, d)) / std::sqrt(double(d));
    const Matrix Pomega = omega_vec * omega_vec.adjoint();
    const Matrix Poff = Matrix::Identity(d * d, d * d) - Pomega;
    const Matrix C = hermitize(superop_to_choi(L));
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(Poff * C * Poff));
    rep.ccp_min_eig = es.eigenvalues()(0);

    const bool herm_ok = rep.herm_defect <= tol.recon * scale;
    const bool trace_ok = rep.trace_defect <= tol.recon * scale;
    const bool ccp_ok = rep.ccp_min_eig >= -tol.psd_cut;
    if (herm_ok && trace_ok && ccp_ok) {
        rep.verdict = MarkovVerdict::markovian;
        rep.generator = L;
        rep.detail = "principal-branch logarithm is a GKLS generator";
    } else {
        rep.verdict = MarkovVerdict::not_principal_branch;
        rep.detail = "principal-branch logarithm is not GKLS (herm ok: " +
                     std::to_string(herm_ok) + ", trace ok: " + std::to_string(trace_ok) +
                     ", ccp ok: " + std::to_string(ccp_ok) +
                     "); other branches untested";
    }
    return rep;
}

// ---------------------------------------------------- synthesize_extension ---

namespace {

// Canonical embedding of block k at the given row offset.
Matrix canonical_embedding(Eigen::Index total_dim, Eigen::Index offset,
                           Eigen::Index nk) {
    Matrix W = Matrix::Zero(total_dim, nk);
    W.block(offset, 0, nk, nk) = Matrix::Identity(nk, nk);
    return W;
}

} // namespace

Channel synthesize_extension(const BlockDecomposition& D, const PeripheralAction& A,
                             Eigen::Index total_dim, const Tolerances& tol) {
    tol.validate();
    const Eigen::Index M = D.M();
    if (M < 1) {
        throw InvalidSpec("synthesize_extension: no blocks");
    }
    if (A.pi.size() != static_cast<std::size_t>(M) ||
        A.U.size() != static_cast<std::size_t>(M)) {
        throw InvalidSpec("synthesize_extension: action size does not match blocks");
    }

    Eigen::Index d0 = 0;
    for (const Block& b : D.blocks) {
        if (b.d < 1 || b.m < 1) {
            throw InvalidSpec("synthesize_extension: block dimensions must be positive");
        }
        d0 += b.d * b.m;
    }
    if (d0 > total_dim) {
        throw InvalidSpec("synthesize_extension: blocks do not fit in total_dim");
    }

    // Permutation sanity: bijection acting on blocks of equal matrix order.
    std::vector<bool> hit(static_cast<std::size_t>(M), false);
    for (Eigen::Index k = 0; k < M; ++k) {
        const Eigen::Index j = A.pi[static_cast<std::size_t>(k)];
        if (j < 0 || j >= M || hit[static_cast<std::size_t>(j)]) {
            throw InvalidSpec("synthesize_extension: pi is not a permutation");
        }
        hit[static_cast<std::size_t>(j)] = true;
        if (D.blocks[static_cast<std::size_t>(j)].d !=
            D.blocks[static_cast<std::size_t>(k)].d) {
            throw InvalidSpec("synthesize_extension: pi connects blocks of different order");
        }
        const Matrix& Uk = A.U[static_cast<std::size_t>(k)];
        const Eigen::Index dk = D.blocks[static_cast<std::size_t>(k)].d;
        if (Uk.rows() != dk || Uk.cols() != dk) {
            throw InvalidSpec("synthesize_extension: U_k shape mismatch");
        }
        if ((Uk * Uk.adjoint() - Matrix::Identity(dk, dk)).norm() >
            100.0 * tol.psd_cut * static_cast<double>(dk)) {
            throw InvalidSpec("synthesize_extension: U_k is not unitary");
        }
    }

    // Block states: Hermitian, positive definite, trace one.
    std::vector<Matrix> rho(static_cast<std::size_t>(M));
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& b = D.blocks[static_cast<std::size_t>(k)];
        Matrix r = b.rho;
        if (r.rows() != b.m || r.cols() != b.m) {
            throw InvalidSpec("synthesize_extension: rho_k shape mismatch");
        }
        if ((r - r.adjoint()).norm() > 1e-8 * std::max(1.0, r.norm())) {
            throw InvalidSpec("synthesize_extension: rho_k is not Hermitian");
        }
        r = hermitize(r);
        const double tr = r.trace().real();
        if (std::abs(tr - 1.0) > 1e-6) {
            throw InvalidSpec("synthesize_extension: rho_k trace differs from 1");
        }
        r /= tr;
        Eigen::SelfAdjointEigenSolver<Matrix> es(r);
        if (es.eigenvalues()(0) <= tol.psd_cut) {
            throw InvalidSpec("synthesize_extension: rho_k is not positive definite");
        }
        rho[static_cast<std::size_t>(k)] = std::move(r);
    }

    // Embedding isometries: explicit W or canonical block layout.
    std::vector<Matrix> W(static_cast<std::size_t>(M));
    bool have_W = true;
    for (const Block& b : D.blocks) {
        have_W = have_W && b.W.size() > 0;
    }
    if (have_W) {
        for (Eigen::Index k = 0; k < M; ++k) {
            const Block& b = D.blocks[static_cast<std::size_t>(k)];
            if (b.W.rows() != total_dim || b.W.cols() != b.d * b.m) {
                throw InvalidSpec("synthesize_extension: W_k shape mismatch");
            }
            W[static_cast<std::size_t>(k)] = b.W;
        }
        for (Eigen::Index k = 0; k < M; ++k) {
            for (Eigen::Index l = 0; l <= k; ++l) {
                const Matrix G = W[static_cast<std::size_t>(k)].adjoint() *
                                 W[static_cast<std::size_t>(l)];
                const Matrix target =
                    (k == l) ? Matrix::Identity(G.rows(), G.cols())
                             : Matrix::Zero(G.rows(), G.cols()).eval();
                if ((G - target).norm() > 1e-8 * static_cast<double>(total_dim)) {
                    throw InvalidSpec(
                        "synthesize_extension: W_k are not orthonormal isometries");
                }
            }
        }
    } else {
        Eigen::Index offset = 0;
        for (Eigen::Index k = 0; k < M; ++k) {
            const Block& b = D.blocks[static_cast<std::size_t>(k)];
            W[static_cast<std::size_t>(k)] =
                canonical_embedding(total_dim, offset, b.d * b.m);
            offset += b.d * b.m;
        }
    }

    Matrix Pperp = Matrix::Identity(total_dim, total_dim);
    for (Eigen::Index k = 0; k < M; ++k) {
        Pperp -= W[static_cast<std::size_t>(k)] * W[static_cast<std::size_t>(k)].adjoint();
    }

    // Φ = Φ_P ∘ E column by column on matrix units.
    auto apply_synth = [&](const Matrix& X) {
        std::vector<Matrix> y(static_cast<std::size_t>(M));
        for (Eigen::Index j = 0; j < M; ++j) {
            const Block& b = D.blocks[static_cast<std::size_t>(j)];
            const Matrix& Wj = W[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(j)] =
                partial_trace_second(Wj.adjoint() * X * Wj, b.d, b.m);
        }
        // Orphaned weight is measured on H0⊥ and prepared in block 1.
        const Complex orphan = (Pperp * X).trace();
        y[0] += (orphan / static_cast<double>(D.blocks[0].d)) *
                Matrix::Identity(D.blocks[0].d, D.blocks[0].d);

        Matrix out = Matrix::Zero(total_dim, total_dim);
        for (Eigen::Index k = 0; k < M; ++k) {
            const Matrix& Uk = A.U[static_cast<std::size_t>(k)];
            const Eigen::Index j = A.pi[static_cast<std::size_t>(k)];
            out += W[static_cast<std::size_t>(k)] *
                   kron(Uk * y[static_cast<std::size_t>(j)] * Uk.adjoint(),
                        rho[static_cast<std::size_t>(k)]) *
                   W[static_cast<std::size_t>(k)].adjoint();
        }
        return out;
    };

    Matrix S(total_dim * total_dim, total_dim * total_dim);
    for (Eigen::Index b = 0; b < total_dim; ++b) {
        for (Eigen::Index a = 0; a < total_dim; ++a) {
            Matrix Eab = Matrix::Zero(total_dim, total_dim);
            Eab(a, b) = 1.0;
            S.col(b * total_dim + a) = vec(apply_synth(Eab));
        }
    }
    Channel phi = Channel::from_superop(std::move(S));

    const ValidationReport rep = validate(phi, tol);
    if (!rep.ok()) {
        throw InvalidSpec("synthesize_extension: output failed CPTP validation");
    }
    // The prescribed attractor must be reproduced pointwise with the
    // prescribed action.
    for (Eigen::Index k = 0; k < M; ++k) {
        const Eigen::Index j = A.pi[static_cast<std::size_t>(k)];
        const Block& src = D.blocks[static_cast<std::size_t>(j)];
        const Matrix& Uk = A.U[static_cast<std::size_t>(k)];
        for (Eigen::Index q = 0; q < src.d; ++q) {
            for (Eigen::Index p = 0; p < src.d; ++p) {
                Matrix Epq = Matrix::Zero(src.d, src.d);
                Epq(p, q) = 1.0;
                const Matrix X = W[static_cast<std::size_t>(j)] *
                                 kron(Epq, rho[static_cast<std::size_t>(j)]) *
                                 W[static_cast<std::size_t>(j)].adjoint();
                const Matrix target = W[static_cast<std::size_t>(k)] *
                                      kron(Uk * Epq * Uk.adjoint(),
                                           rho[static_cast<std::size_t>(k)]) *
                                      W[static_cast<std::size_t>(k)].adjoint();
                if ((phi.apply(X) - target).norm() > tol.recon * std::max(1.0, X.norm())) {
                    throw InvalidSpec(
                        "synthesize_extension: prescribed action not reproduced");
                }
            }
        }
    }
    return phi;
}

// --------------------------------------------------------------- trajectory ---

std::vector<Matrix> trajectory(const Channel& phi, const Matrix& rho0, long n_max,
                               const Tolerances& tol) {
    tol.validate();
    if (rho0.rows() != phi.dim() || rho0.cols() != phi.dim()) {
        throw DimensionMismatch("trajectory: state dimension mismatch");
    }
    auto check_state = [&](const Matrix& r, long n) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(r));
        if (es.eigenvalues()(0) < -10.0 * tol.psd_cut ||
            std::abs(r.trace().real() - 1.0) > 10.0 * tol.psd_cut) {
            throw Error("trajectory: state left the density-matrix set at step " +
                        std::to_string(n));
        }
    };
    check_state(rho0, 0);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    out.push_back(rho0);
    for (long n = 1; n <= n_max; ++n) {
        out.push_back(phi.apply(out.back()));
        check_state(out.back(), n);
    }
    return out;
}

} // namespace qasym
