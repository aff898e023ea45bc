// modular.cpp — Tomita–Takesaki machinery on the attractor

#include "qasym/modular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace qasym {

namespace {

double arg_in_2pi(Complex z) {
    double a = std::arg(z);
    if (a < 0) a += 2.0 * M_PI;
    return a;
}

} // namespace

FixedStateResult build_fixed_state(const BlockDecomposition& D,
                                   const PeripheralAction& A, const Tolerances& tol) {
    tol.validate();
    const Eigen::Index M = D.M();
    Eigen::Index total = 0;
    for (const Block& b : D.blocks) {
        if (b.rho.size() == 0) {
            throw NotFaithfulDecomposition("build_fixed_state: rho_k missing");
        }
        total += b.d * b.m;
    }
    if (total != D.d0) {
        throw NotFaithfulDecomposition(
            "build_fixed_state: decomposition does not cover H0");
    }

    // Cycle decomposition of pi, following k -> pi(k).
    std::vector<bool> visited(static_cast<std::size_t>(M), false);
    FixedStateResult result;
    std::vector<Matrix> sigma_block(static_cast<std::size_t>(M));
    long mlcm = 1;

    for (Eigen::Index start = 0; start < M; ++start) {
        if (visited[static_cast<std::size_t>(start)]) continue;
        CycleData cycle;
        Eigen::Index k = start;
        do {
            visited[static_cast<std::size_t>(k)] = true;
            cycle.blocks.push_back(k);
            k = A.pi[static_cast<std::size_t>(k)];
        } while (k != start);
        const auto L = static_cast<Eigen::Index>(cycle.blocks.size());
        const Eigen::Index dk = D.blocks[static_cast<std::size_t>(start)].d;

        // Holonomy along the cycle.
        Matrix V = Matrix::Identity(dk, dk);
        for (Eigen::Index t = 0; t < L; ++t) {
            V = V * A.U[static_cast<std::size_t>(cycle.blocks[static_cast<std::size_t>(t)])];
        }
        cycle.holonomy = V;

        // Schur vectors of a unitary matrix are orthonormal eigenvectors.
        Eigen::ComplexSchur<Matrix> schur(V, /*computeU=*/true);
        if (schur.info() != Eigen::Success) {
            throw NonConvergence("build_fixed_state: Schur of holonomy failed");
        }
        Vector phases(dk);
        for (Eigen::Index i = 0; i < dk; ++i) {
            phases(i) = schur.matrixT()(i, i);
        }
        // Sectors: eigenvalues merged on the circle within degeneracy_gap, so
        // sigma_1 stays a function of the holonomy.
        const auto sectors = cluster_by_gap(phases, tol.degeneracy_gap);
        const auto nsec = static_cast<Eigen::Index>(sectors.size());
        cycle.thetas.resize(nsec);
        cycle.lambdas.resize(nsec);
        std::vector<Matrix> P1(static_cast<std::size_t>(nsec));
        RealVector raw_angle(nsec);
        for (Eigen::Index s = 0; s < nsec; ++s) {
            Complex mean = 0.0;
            Matrix P = Matrix::Zero(dk, dk);
            for (Eigen::Index idx : sectors[static_cast<std::size_t>(s)]) {
                mean += phases(idx);
                P += schur.matrixU().col(idx) * schur.matrixU().col(idx).adjoint();
            }
            mean /= static_cast<double>(sectors[static_cast<std::size_t>(s)].size());
            raw_angle(s) = arg_in_2pi(mean);
            P1[static_cast<std::size_t>(s)] = std::move(P);
        }
        // Branch origin: cut the circle inside the largest angular gap. This
        // removes the global-phase gauge of the U_k from the theta values
        // (any consistent branch satisfies the cycle-power identity).
        std::vector<Eigen::Index> order(static_cast<std::size_t>(nsec));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return raw_angle(a) < raw_angle(b); });
        double origin = 0.0;
        if (nsec > 0) {
            double best_gap = -1.0;
            for (Eigen::Index t = 0; t < nsec; ++t) {
                const double lo = raw_angle(order[static_cast<std::size_t>(t)]);
                const double hi = (t + 1 < nsec)
                                      ? raw_angle(order[static_cast<std::size_t>(t + 1)])
                                      : raw_angle(order[0]) + 2.0 * M_PI;
                if (hi - lo > best_gap) {
                    best_gap = hi - lo;
                    origin = (t + 1 < nsec)
                                 ? raw_angle(order[static_cast<std::size_t>(t + 1)])
                                 : raw_angle(order[0]);
                }
            }
        }
        for (Eigen::Index s = 0; s < nsec; ++s) {
            double theta = raw_angle(s) - origin;
            if (theta < -0.5 * tol.degeneracy_gap) theta += 2.0 * M_PI;
            if (theta < 0.0) theta = 0.0;
            cycle.thetas(s) = theta;
            cycle.lambdas(s) = std::exp(theta);
        }

        // sigma at the first block: bicommutant choice Σ λ_j P_j.
        Matrix sigma1 = Matrix::Zero(dk, dk);
        for (Eigen::Index s = 0; s < nsec; ++s) {
            sigma1 += cycle.lambdas(s) * P1[static_cast<std::size_t>(s)];
        }
        if ((sigma1 * V - V * sigma1).norm() > tol.recon * sigma1.norm()) {
            throw Error("build_fixed_state: sigma_1 fails to commute with the holonomy");
        }

        // Transport along the cycle: sigma_{t+1} = U_{k_t}† sigma_t U_{k_t}.
        cycle.projectors.resize(static_cast<std::size_t>(L));
        cycle.projectors[0] = P1;
        sigma_block[static_cast<std::size_t>(cycle.blocks[0])] = sigma1;
        Matrix carried = sigma1;
        std::vector<Matrix> carried_P = P1;
        for (Eigen::Index t = 1; t < L; ++t) {
            const Matrix& Uprev =
                A.U[static_cast<std::size_t>(cycle.blocks[static_cast<std::size_t>(t - 1)])];
            carried = (Uprev.adjoint() * carried * Uprev).eval();
            for (Matrix& P : carried_P) {
                P = (Uprev.adjoint() * P * Uprev).eval();
            }
            sigma_block[static_cast<std::size_t>(cycle.blocks[static_cast<std::size_t>(t)])] =
                carried;
            cycle.projectors[static_cast<std::size_t>(t)] = carried_P;
        }

        mlcm = std::lcm(mlcm, static_cast<long>(L));
        result.cycles.push_back(std::move(cycle));
    }

    // Assemble sigma = ⊕ W_k (sigma_k ⊗ rho_k) W_k†, normalized to trace one.
    Matrix sigma = Matrix::Zero(D.d0, D.d0);
    for (Eigen::Index k = 0; k < M; ++k) {
        const Block& b = D.blocks[static_cast<std::size_t>(k)];
        sigma += b.W * kron(sigma_block[static_cast<std::size_t>(k)], b.rho) * b.W.adjoint();
    }
    sigma = hermitize(sigma);
    sigma /= sigma.trace().real();

    // Fixed-point check against the prescribed peripheral action.
    const Matrix S_rec = reconstruct_peripheral(D, A);
    const double fixed_defect =
        (unvec(S_rec * vec(sigma), D.d0, D.d0) - sigma).norm();
    if (fixed_defect > tol.recon) {
        throw Error("build_fixed_state: sigma is not fixed by the peripheral action "
                    "(defect " + std::to_string(fixed_defect) + ")");
    }

    ModularData md;
    md.sigma = sigma;
    const Matrix sigma_inv = herm_power(sigma, Complex(-1.0, 0.0), tol);
    md.delta_superop = kron(sigma_inv.transpose(), sigma);
    md.hamiltonian = -herm_log(sigma, tol);
    md.M_lcm = mlcm;
    result.modular = std::move(md);
    return result;
}

Matrix modular_flow(const ModularData& md, double t, const Matrix& X,
                    const Tolerances& tol) {
    const Matrix left = herm_power(md.sigma, Complex(0.0, -t), tol);
    const Matrix right = herm_power(md.sigma, Complex(0.0, t), tol);
    return left * X * right;
}

Complex sigma_inner_product(const Matrix& sigma, const Matrix& A, const Matrix& B) {
    if (sigma.rows() != A.rows() || A.rows() != B.rows() || A.cols() != B.cols() ||
        sigma.rows() != sigma.cols()) {
        throw DimensionMismatch("sigma_inner_product: shape mismatch");
    }
    return (sigma * A.adjoint() * B).trace();
}

ModularOperator modular_operator(const ModularData& md,
                                 const std::vector<Matrix>& algebra_basis,
                                 const Tolerances& tol) {
    tol.validate();
    if (algebra_basis.empty()) {
        throw Error("modular_operator: empty basis");
    }
    const auto n = static_cast<Eigen::Index>(algebra_basis.size());
    const Matrix& sigma = md.sigma;

    // Orthonormalize in the sigma geometry: F = B G^{-1/2}.
    Matrix G(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            G(a, b) = sigma_inner_product(sigma, algebra_basis[static_cast<std::size_t>(a)],
                                          algebra_basis[static_cast<std::size_t>(b)]);
        }
    }
    const HermitianEigensystem hg = eig_hermitian(hermitize(G), tol);
    if (hg.values(0) <= tol.psd_cut) {
        throw Error("modular_operator: basis is degenerate in the sigma inner product");
    }
    Matrix Ginvsqrt = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Ginvsqrt += (1.0 / std::sqrt(hg.values(i))) * hg.vectors.col(i) *
                    hg.vectors.col(i).adjoint();
    }

    ModularOperator mo;
    mo.onb.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index b = 0; b < n; ++b) {
        Matrix F = Matrix::Zero(sigma.rows(), sigma.cols());
        for (Eigen::Index a = 0; a < n; ++a) {
            F += Ginvsqrt(a, b) * algebra_basis[static_cast<std::size_t>(a)];
        }
        mo.onb.push_back(std::move(F));
    }

    // Tables in the orthonormal coordinates.
    const Matrix sigma_inv = herm_power(sigma, Complex(-1.0, 0.0), tol);
    Matrix Smat(n, n), Dconj(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const Matrix Fa_dag = mo.onb[static_cast<std::size_t>(a)].adjoint();
        const Matrix sigma_conj =
            sigma * mo.onb[static_cast<std::size_t>(a)] * sigma_inv;
        for (Eigen::Index b = 0; b < n; ++b) {
            Smat(b, a) = sigma_inner_product(sigma, mo.onb[static_cast<std::size_t>(b)],
                                             Fa_dag);
            Dconj(b, a) = sigma_inner_product(sigma, mo.onb[static_cast<std::size_t>(b)],
                                              sigma_conj);
        }
    }
    mo.S = Smat;
    // Delta = S*S; for an antilinear table the adjoint is the transpose.
    mo.Delta = Smat.transpose() * Smat.conjugate();

    // Verify Delta(A) = sigma A sigma^{-1} at the operator level.
    double conj_res = (mo.Delta - Dconj).norm();
    for (Eigen::Index a = 0; a < n; ++a) {
        Matrix img = Matrix::Zero(sigma.rows(), sigma.cols());
        for (Eigen::Index b = 0; b < n; ++b) {
            img += mo.Delta(b, a) * mo.onb[static_cast<std::size_t>(b)];
        }
        const Matrix direct = sigma * mo.onb[static_cast<std::size_t>(a)] * sigma_inv;
        conj_res = std::max(conj_res, (img - direct).norm());
    }
    mo.conjugation_residual = conj_res;

    // Polar part: J = S Δ^{-1/2}, antiunitary with J² = 1.
    const HermitianEigensystem hd = eig_hermitian(hermitize(mo.Delta), tol);
    if (hd.values(0) <= tol.psd_cut) {
        throw Error("modular_operator: Delta is not positive definite");
    }
    Matrix sqrtD = Matrix::Zero(n, n), invsqrtD = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Matrix proj = hd.vectors.col(i) * hd.vectors.col(i).adjoint();
        sqrtD += std::sqrt(hd.values(i)) * proj;
        invsqrtD += (1.0 / std::sqrt(hd.values(i))) * proj;
    }
    mo.J = Smat * invsqrtD.conjugate();

    const Matrix I = Matrix::Identity(n, n);
    const double polar = (Smat - mo.J * sqrtD.conjugate()).norm();
    const double involutive = (mo.J * mo.J.conjugate() - I).norm();
    const double antiunitary = (mo.J.adjoint() * mo.J - I).norm();
    const double s_involutive = (Smat * Smat.conjugate() - I).norm();
    mo.polar_residual = std::max({polar, involutive, antiunitary, s_involutive});
    return mo;
}

Matrix kms_state(const ModularData& md, double beta, const Tolerances& tol) {
    Matrix s = herm_power(md.sigma, Complex(beta, 0.0), tol);
    s /= s.trace().real();
    return s;
}

CyclePowerReport verify_cycle_power(const Channel& reduced, const BlockDecomposition& D,
                                    const PeripheralAction& A, const ModularData& md,
                                    const Tolerances& tol) {
    tol.validate();
    CyclePowerReport rep;
    rep.M_lcm = md.M_lcm;

    // sigma^{i} X sigma^{-i} is modular_flow at t = −1; this is the
    // orientation under which Φ_P^{M} equals the flow with λ_j = e^{θ_j}.
    const Matrix P = herm_power(md.sigma, Complex(0.0, 1.0), tol);
    const Matrix Pdag = P.adjoint();

    for (Eigen::Index j = 0; j < D.M(); ++j) {
        const Block& b = D.blocks[static_cast<std::size_t>(j)];
        for (Eigen::Index q = 0; q < b.d; ++q) {
            for (Eigen::Index p = 0; p < b.d; ++p) {
                Matrix Epq = Matrix::Zero(b.d, b.d);
                Epq(p, q) = 1.0;
                Matrix X = b.W * kron(Epq, b.rho) * b.W.adjoint();
                X /= X.norm();
                const Matrix flow = P * X * Pdag;
                Matrix iter = X;
                for (long t = 0; t < rep.M_lcm; ++t) {
                    iter = reduced.apply(iter);
                    if (t == 0) {
                        rep.one_step_residual =
                            std::max(rep.one_step_residual, (iter - flow).norm());
                    }
                }
                rep.max_residual = std::max(rep.max_residual, (iter - flow).norm());
            }
        }
    }
    rep.matches = rep.max_residual <= tol.recon;

    // Structural cross-check: M_lcm = 1 exactly when pi has no nontrivial cycles.
    if ((rep.M_lcm == 1) != A.trivial()) {
        throw Error("verify_cycle_power: M_lcm inconsistent with the permutation");
    }
    return rep;
}

} // namespace qasym
