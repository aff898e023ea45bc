// structure.cpp — Randomized Wedderburn splitting of the adjoint attractor
// algebra, state extraction, and the peripheral permutation/unitaries

#include "qasym/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SVD>

namespace qasym {

// ---------------------------------------------------------------- helpers ---

Matrix orthonormal_span(const std::vector<Matrix>& elements, double rank_cut) {
    if (elements.empty()) {
        throw Error("orthonormal_span: empty element list");
    }
    Matrix B(elements.front().size(), static_cast<Eigen::Index>(elements.size()));
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i].size() != elements.front().size()) {
            throw DimensionMismatch("orthonormal_span: mixed element shapes");
        }
        B.col(static_cast<Eigen::Index>(i)) = vec(elements[i]);
    }
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
    const double smax = svd.singularValues()(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > rank_cut * std::max(1.0, smax)) ++rank;
    }
    if (rank < B.cols()) {
        throw Error("orthonormal_span: elements are linearly dependent at tolerance");
    }
    return svd.matrixU().leftCols(rank);
}

double span_residual(const Matrix& onb, const Matrix& X) {
    const Vector v = vec(X);
    const Vector r = v - onb * (onb.adjoint() * v);
    return r.norm();
}

Matrix first_factor_against(const Matrix& Y, const Matrix& rho, Eigen::Index d,
                            Eigen::Index m) {
    if (Y.rows() != d * m || Y.cols() != d * m || rho.rows() != m || rho.cols() != m) {
        throw DimensionMismatch("first_factor_against: shape mismatch");
    }
    const double w = rho.squaredNorm();
    Matrix x(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            x(i, j) = (rho.adjoint() * Y.block(i * m, j * m, m, m)).trace() / w;
        }
    }
    return x;
}

// ------------------------------------------------ adjoint_attractor_algebra ---

std::vector<Matrix> adjoint_attractor_algebra(const Channel& reduced,
                                              const Tolerances& tol) {
    tol.validate();
    const Eigen::Index d0 = reduced.dim();
    const Matrix adj_superop = reduced.superop().adjoint();
    const Eigensystem es = eig_general(adj_superop, tol);

    std::vector<Matrix> basis;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        if (std::abs(std::abs(es.values(i)) - 1.0) <= tol.peripheral_cut) {
            basis.push_back(unvec(es.right.col(i), d0, d0));
        }
    }
    if (basis.empty()) {
        throw AlgebraClosureViolation("adjoint_attractor_algebra: empty periphery");
    }

    const Matrix onb = orthonormal_span(basis);
    const Matrix I = Matrix::Identity(d0, d0);
    if (span_residual(onb, I / I.norm()) > tol.recon) {
        throw AlgebraClosureViolation(
            "adjoint_attractor_algebra: identity is not in the span");
    }
    const double closure_cut = 100.0 * tol.recon;
    for (const Matrix& A : basis) {
        if (span_residual(onb, A.adjoint()) > closure_cut) {
            throw AlgebraClosureViolation(
                "adjoint_attractor_algebra: not closed under adjoints");
        }
        for (const Matrix& B : basis) {
            const Matrix P = A * B;
            if (span_residual(onb, P) > closure_cut * std::max(1.0, P.norm())) {
                throw AlgebraClosureViolation(
                    "adjoint_attractor_algebra: not closed under products");
            }
        }
    }
    return basis;
}

// ------------------------------------------------------- decompose_algebra ---

namespace {

struct GapSplit {
    std::vector<std::vector<Eigen::Index>> groups;  // contiguous in ascending order
    bool ambiguous = false;
};

// Split ascending values at gaps > gap; flag gaps inside (gap, safety*gap] as
// ambiguous so the caller can retry with a fresh random element.
GapSplit split_by_gaps(const RealVector& vals, double gap, double safety = 50.0) {
    GapSplit out;
    if (vals.size() == 0) return out;
    out.groups.push_back({0});
    for (Eigen::Index i = 1; i < vals.size(); ++i) {
        const double diff = vals(i) - vals(i - 1);
        if (diff > gap && diff <= safety * gap) {
            out.ambiguous = true;
        }
        if (diff > gap) {
            out.groups.push_back({});
        }
        out.groups.back().push_back(i);
    }
    return out;
}

} // namespace

BlockDecomposition decompose_algebra(const std::vector<Matrix>& algebra_basis,
                                     std::uint64_t seed, const Tolerances& tol) {
    tol.validate();
    if (algebra_basis.empty()) {
        throw Error("decompose_algebra: empty basis");
    }
    const Eigen::Index d0 = algebra_basis.front().rows();
    for (const Matrix& A : algebra_basis) {
        if (A.rows() != d0 || A.cols() != d0) {
            throw DimensionMismatch("decompose_algebra: mixed shapes");
        }
    }
    const auto n = static_cast<Eigen::Index>(algebra_basis.size());

    // Re-express the algebra on an orthonormal basis for conditioning.
    const Matrix onb = orthonormal_span(algebra_basis);
    std::vector<Matrix> F;
    F.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < onb.cols(); ++c) {
        F.push_back(unvec(onb.col(c), d0, d0));
    }

    // Center = algebra ∩ commutant: kernel of c ↦ ([Σ c_i F_i, F_j])_j.
    Matrix stack(n * d0 * d0, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            stack.block(j * d0 * d0, i, d0 * d0, 1) = vec(F[static_cast<std::size_t>(i)] * F[static_cast<std::size_t>(j)] -
                                                          F[static_cast<std::size_t>(j)] * F[static_cast<std::size_t>(i)]);
        }
    }
    Eigen::BDCSVD<Matrix> svd(stack, Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double kernel_cut = 1e-8 * std::max(1.0, smax);
    std::vector<Matrix> center;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) <= kernel_cut) {
            Matrix Z = Matrix::Zero(d0, d0);
            for (Eigen::Index t = 0; t < n; ++t) {
                Z += svd.matrixV()(t, i) * F[static_cast<std::size_t>(t)];
            }
            center.push_back(Z);
        }
    }
    if (center.empty()) {
        throw DecompositionFailure("decompose_algebra: no central elements found");
    }
    const auto center_dim = static_cast<Eigen::Index>(center.size());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_combo = [&](const std::vector<Matrix>& els) {
        Matrix Z = Matrix::Zero(els.front().rows(), els.front().cols());
        for (const Matrix& E : els) {
            Z += Complex(gauss(rng), gauss(rng)) * E;
        }
        return Z;
    };

    constexpr int kMaxRetries = 8;
    std::string last_reason = "unknown";
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        // (2) minimal central projections from a random Hermitian center element.
        const Matrix Zc = hermitize(random_combo(center));
        const HermitianEigensystem hz = eig_hermitian(Zc, tol);
        const GapSplit split = split_by_gaps(hz.values, tol.degeneracy_gap);
        if (split.ambiguous) {
            last_reason = "ambiguous central eigenvalue gap";
            continue;
        }
        if (static_cast<Eigen::Index>(split.groups.size()) != center_dim) {
            last_reason = "central cluster count differs from center dimension";
            continue;
        }

        BlockDecomposition D;
        D.d0 = d0;
        bool ok = true;
        for (const auto& group : split.groups) {
            const auto nk = static_cast<Eigen::Index>(group.size());
            Matrix Qk(d0, nk);
            for (Eigen::Index c = 0; c < nk; ++c) {
                Qk.col(c) = hz.vectors.col(group[static_cast<std::size_t>(c)]);
            }

            // (3) multiplicity split inside the block.
            std::vector<Matrix> comp;
            comp.reserve(F.size());
            for (const Matrix& Fi : F) {
                comp.push_back(Qk.adjoint() * Fi * Qk);
            }
            const Matrix X = hermitize(random_combo(comp));
            const HermitianEigensystem hx = eig_hermitian(X, tol);
            const GapSplit bsplit = split_by_gaps(hx.values, tol.degeneracy_gap);
            if (bsplit.ambiguous) {
                ok = false;
                last_reason = "ambiguous block eigenvalue gap";
                break;
            }
            const auto m = static_cast<Eigen::Index>(bsplit.groups.front().size());
            bool uniform = true;
            for (const auto& g : bsplit.groups) {
                uniform = uniform && static_cast<Eigen::Index>(g.size()) == m;
            }
            const auto dk = static_cast<Eigen::Index>(bsplit.groups.size());
            if (!uniform || dk * m != nk) {
                ok = false;
                last_reason = "non-uniform eigenprojection ranks inside a block";
                break;
            }

            // Orthonormal bases of the eigenprojection ranges.
            std::vector<Matrix> V;
            V.reserve(static_cast<std::size_t>(dk));
            for (const auto& g : bsplit.groups) {
                Matrix Va(nk, m);
                for (Eigen::Index c = 0; c < m; ++c) {
                    Va.col(c) = hx.vectors.col(g[static_cast<std::size_t>(c)]);
                }
                V.push_back(std::move(Va));
            }

            // Matrix units via partial isometries p_a (algebra) p_1; the polar
            // factor of the compressed map V_a† a V_1 is the connecting unitary.
            Matrix B(nk, nk);
            B.block(0, 0, nk, m) = V.front();
            for (Eigen::Index a = 1; a < dk && ok; ++a) {
                bool connected = false;
                for (int draw = 0; draw < kMaxRetries; ++draw) {
                    const Matrix conn = random_combo(comp);
                    const Matrix w =
                        V[static_cast<std::size_t>(a)].adjoint() * conn * V.front();
                    Eigen::JacobiSVD<Matrix> wsvd(
                        w, Eigen::ComputeFullU | Eigen::ComputeFullV);
                    const double wmax = wsvd.singularValues()(0);
                    const double wmin = wsvd.singularValues()(m - 1);
                    if (wmax <= 0 || wmin <= 1e-6 * wmax) {
                        continue;  // nearly singular draw, try another element
                    }
                    const Matrix u = wsvd.matrixU() * wsvd.matrixV().adjoint();
                    B.block(0, a * m, nk, m) = V[static_cast<std::size_t>(a)] * u;
                    connected = true;
                    break;
                }
                if (!connected) {
                    ok = false;
                    last_reason = "failed to connect eigenprojections inside a block";
                }
            }
            if (!ok) break;

            Matrix Wk = Qk * B;
            if ((Wk.adjoint() * Wk - Matrix::Identity(nk, nk)).norm() >
                tol.psd_cut * static_cast<double>(nk)) {
                ok = false;
                last_reason = "W_k lost isometry";
                break;
            }

            // The compressed algebra must be exactly M_{d_k} ⊗ I_{m_k}.
            for (const Matrix& A : algebra_basis) {
                const Matrix Y = Wk.adjoint() * A * Wk;
                const Matrix b = partial_trace_second(Y, dk, m) / static_cast<double>(m);
                if ((Y - kron(b, Matrix::Identity(m, m))).norm() >
                    tol.recon * std::max(1.0, A.norm())) {
                    ok = false;
                    last_reason = "compressed algebra is not M_d ⊗ I_m at tolerance";
                    break;
                }
            }
            if (!ok) break;

            D.blocks.push_back(Block{dk, m, std::move(Wk), Matrix()});
        }
        if (!ok) continue;

        Eigen::Index total = 0;
        for (const Block& b : D.blocks) total += b.d * b.m;
        if (total != d0) {
            last_reason = "block dimensions do not sum to d0";
            continue;
        }
        return D;
    }
    throw DecompositionFailure("decompose_algebra: retries exhausted (" + last_reason +
                               ")");
}

// ------------------------------------------------------------ extract_rho ---

namespace {

double max_eigenvalue(const Matrix& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(H);
    return s.eigenvalues().maxCoeff();
}

// Deterministic tie-break for canonical block ordering.
bool lex_less(const Matrix& A, const Matrix& B) {
    if (A.size() != B.size()) return A.size() < B.size();
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        const Complex a = A(i), b = B(i);
        if (a.real() != b.real()) return a.real() < b.real();
        if (a.imag() != b.imag()) return a.imag() < b.imag();
    }
    return false;
}

} // namespace

BlockDecomposition extract_rho(const Channel& reduced, const BlockDecomposition& skeleton,
                               const SpectralData& reduced_spec, const Tolerances& tol) {
    tol.validate();
    Matrix sigma = max_rank_fixed_point(reduced_spec, tol);
    sigma /= sigma.trace().real();
    if ((reduced.apply(sigma) - sigma).norm() > tol.recon) {
        throw FactorizationResidual(
            "extract_rho: the full-rank state is not fixed by the channel");
    }

    BlockDecomposition D = skeleton;
    for (Block& blk : D.blocks) {
        const Matrix Y = blk.W.adjoint() * sigma * blk.W;
        Matrix rho = hermitize(partial_trace_first(Y, blk.d, blk.m));
        const double tr = rho.trace().real();
        if (tr <= 0) {
            throw FactorizationResidual("extract_rho: block state has nonpositive trace");
        }
        rho /= tr;
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        if (es.eigenvalues()(0) <= tol.psd_cut) {
            throw FactorizationResidual(
                "extract_rho: block state is not positive definite");
        }
        blk.rho = std::move(rho);
    }

    // Every attractor element must factor as x_k ⊗ rho_k on every block; the
    // mean least-squares residual is the acceptance statistic.
    const AttractorBasis attr = attractor_basis(reduced_spec);
    for (const Block& blk : D.blocks) {
        double total = 0.0;
        for (const Matrix& X : attr.elements) {
            const Matrix Y = blk.W.adjoint() * X * blk.W;
            const Matrix x = first_factor_against(Y, blk.rho, blk.d, blk.m);
            total += (Y - kron(x, blk.rho)).norm();
        }
        const double mean = total / static_cast<double>(attr.elements.size());
        if (mean > tol.recon) {
            throw FactorizationResidual(
                "extract_rho: factorization residual above recon (mean " +
                std::to_string(mean) + ")");
        }
    }

    // Canonical block order: (d, m, descending top rho eigenvalue, W fingerprint).
    std::sort(D.blocks.begin(), D.blocks.end(), [](const Block& a, const Block& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.m != b.m) return a.m < b.m;
        const double la = max_eigenvalue(a.rho), lb = max_eigenvalue(b.rho);
        if (la != lb) return la > lb;
        return lex_less(a.W, b.W);
    });
    return D;
}

// --------------------------------------------------------- extract_action ---

PeripheralAction extract_action(const Channel& reduced, const BlockDecomposition& D,
                                const Tolerances& tol) {
    tol.validate();
    const Eigen::Index M = D.M();

    // pi: push a block-local probe through the channel and find where it lands.
    std::vector<Eigen::Index> target_of(static_cast<std::size_t>(M), -1);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Block& src = D.blocks[static_cast<std::size_t>(j)];
        Matrix e00 = Matrix::Zero(src.d, src.d);
        e00(0, 0) = 1.0;
        const Matrix X = src.W * kron(e00, src.rho) * src.W.adjoint();
        const Matrix Y = reduced.apply(X);
        Eigen::Index hit = -1;
        for (Eigen::Index k = 0; k < M; ++k) {
            const Block& dst = D.blocks[static_cast<std::size_t>(k)];
            if ((dst.W.adjoint() * Y * dst.W).norm() > tol.recon) {
                if (hit >= 0) {
                    throw PermutationAmbiguity(
                        "extract_action: output mass in multiple blocks");
                }
                hit = k;
            }
        }
        if (hit < 0) {
            throw PermutationAmbiguity("extract_action: output mass vanished");
        }
        target_of[static_cast<std::size_t>(j)] = hit;
    }

    PeripheralAction A;
    A.pi.assign(static_cast<std::size_t>(M), -1);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Eigen::Index k = target_of[static_cast<std::size_t>(j)];
        if (A.pi[static_cast<std::size_t>(k)] >= 0) {
            throw PermutationAmbiguity("extract_action: pi is not a bijection");
        }
        A.pi[static_cast<std::size_t>(k)] = j;
    }
    for (Eigen::Index k = 0; k < M; ++k) {
        const Eigen::Index j = A.pi[static_cast<std::size_t>(k)];
        if (D.blocks[static_cast<std::size_t>(k)].d !=
            D.blocks[static_cast<std::size_t>(j)].d) {
            throw PermutationAmbiguity(
                "extract_action: cycle connects blocks of different order");
        }
    }

    // U_k: the induced map x ↦ compress(Φ(embed(x ⊗ rho_{pi(k)}))) against
    // rho_k is a *-isomorphism of M_{d_k}; its Choi matrix is rank one with
    // top eigenvector vec(U_k).
    A.U.reserve(static_cast<std::size_t>(M));
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& dst = D.blocks[static_cast<std::size_t>(k)];
        const Block& src = D.blocks[static_cast<std::size_t>(A.pi[static_cast<std::size_t>(k)])];
        const Eigen::Index d = dst.d;
        Matrix T(d * d, d * d);
        for (Eigen::Index b = 0; b < d; ++b) {
            for (Eigen::Index a = 0; a < d; ++a) {
                Matrix Eab = Matrix::Zero(d, d);
                Eab(a, b) = 1.0;
                const Matrix X = src.W * kron(Eab, src.rho) * src.W.adjoint();
                const Matrix Z = dst.W.adjoint() * reduced.apply(X) * dst.W;
                T.col(b * d + a) = vec(first_factor_against(Z, dst.rho, d, dst.m));
            }
        }
        const Matrix C = hermitize(superop_to_choi(T));
        Eigen::SelfAdjointEigenSolver<Matrix> es(C);
        const Eigen::Index top = C.rows() - 1;
        const double lam = es.eigenvalues()(top);
        const double next = (top > 0) ? std::abs(es.eigenvalues()(top - 1)) : 0.0;
        if (next > tol.degeneracy_gap * static_cast<double>(d)) {
            throw PermutationAmbiguity(
                "extract_action: induced block map is not a conjugation (Choi rank > 1)");
        }
        Vector u = std::sqrt(std::max(lam, 0.0)) * es.eigenvectors().col(top);
        fix_phase(u);
        Matrix Uk = unvec(u, d, d);
        if ((Uk * Uk.adjoint() - Matrix::Identity(d, d)).norm() >
            100.0 * tol.psd_cut * static_cast<double>(d)) {
            throw PermutationAmbiguity(
                "extract_action: induced conjugation is not unitary at tolerance");
        }
        A.U.push_back(std::move(Uk));
    }
    return A;
}

// ------------------------------------------------------------ star_product ---

Matrix star_product(const Matrix& A, const Matrix& B, const Matrix& PI_image,
                    const AttractorBasis& attractor, const Tolerances& tol) {
    tol.validate();
    const Matrix onb = orthonormal_span(attractor.elements);
    if (span_residual(onb, A) > tol.recon * std::max(1.0, A.norm()) ||
        span_residual(onb, B) > tol.recon * std::max(1.0, B.norm())) {
        throw NotInAttractor("star_product: operand outside the attractor span");
    }

    const HermitianEigensystem h = eig_hermitian(hermitize(PI_image), tol);
    const double cut = tol.psd_cut * static_cast<double>(PI_image.rows());
    Matrix pinv = Matrix::Zero(PI_image.rows(), PI_image.cols());
    for (Eigen::Index i = 0; i < h.values.size(); ++i) {
        if (h.values(i) > cut) {
            pinv += (1.0 / h.values(i)) * h.vectors.col(i) * h.vectors.col(i).adjoint();
        }
    }
    const Matrix R = A * pinv * B;
    if (span_residual(onb, R) > tol.recon * std::max(1.0, R.norm())) {
        throw NotInAttractor("star_product: product left the attractor span");
    }
    return R;
}

// -------------------------------------------------- reconstruct_peripheral ---

Matrix reconstruct_peripheral(const BlockDecomposition& D, const PeripheralAction& A) {
    const Eigen::Index d0 = D.d0;
    Matrix S(d0 * d0, d0 * d0);
    for (Eigen::Index b = 0; b < d0; ++b) {
        for (Eigen::Index a = 0; a < d0; ++a) {
            Matrix Eab = Matrix::Zero(d0, d0);
            Eab(a, b) = 1.0;
            Matrix out = Matrix::Zero(d0, d0);
            for (Eigen::Index k = 0; k < D.M(); ++k) {
                const Block& dst = D.blocks[static_cast<std::size_t>(k)];
                const Block& src =
                    D.blocks[static_cast<std::size_t>(A.pi[static_cast<std::size_t>(k)])];
                const Matrix xj = first_factor_against(
                    src.W.adjoint() * Eab * src.W, src.rho, src.d, src.m);
                const Matrix& Uk = A.U[static_cast<std::size_t>(k)];
                out += dst.W * kron(Uk * xj * Uk.adjoint(), dst.rho) * dst.W.adjoint();
            }
            S.col(b * d0 + a) = vec(out);
        }
    }
    return S;
}

} // namespace qasym
