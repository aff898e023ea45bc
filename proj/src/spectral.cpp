// spectral.cpp — Spectrum of the channel superoperator and the asymptotic projector

#include "qasym/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace qasym {

SpectralData spectrum(const Channel& phi, const Tolerances& tol) {
    tol.validate();
    const Matrix& S = phi.superop();
    const Eigensystem es = eig_general(S, tol);

    SpectralData sd;
    sd.dim = phi.dim();
    sd.eigenvalues = es.values;

    auto is_peripheral = [&](Complex z) {
        return std::abs(std::abs(z) - 1.0) <= tol.peripheral_cut;
    };

    double max_mod = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        const double mod = std::abs(es.values(i));
        max_mod = std::max(max_mod, mod);
        if (is_peripheral(es.values(i))) {
            sd.peripheral_indices.push_back(i);
        } else {
            sd.subperipheral_radius = std::max(sd.subperipheral_radius, mod);
        }
    }
    if (max_mod > 1.0 + tol.peripheral_cut) {
        throw Error("spectrum: eigenvalue modulus exceeds 1 + peripheral_cut; "
                    "input is not a channel at tolerance");
    }

    // lambda = 1 must be present (trace preservation).
    Eigen::Index one_idx = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : sd.peripheral_indices) {
        const double dist = std::abs(es.values(i) - Complex(1.0, 0.0));
        if (dist < best) {
            best = dist;
            one_idx = i;
        }
    }
    if (one_idx < 0 || best > tol.peripheral_cut) {
        throw Error("spectrum: eigenvalue 1 not found within peripheral_cut");
    }

    // Keep clusters made entirely of peripheral eigenvalues; a mixed cluster
    // means a subperipheral eigenvalue sits inside the degeneracy gap of a
    // peripheral one and no exact projector exists at this tolerance.
    const Eigen::Index n = S.rows();
    sd.attractor_projector = Matrix::Zero(n, n);
    std::vector<Eigen::Index> column_of(static_cast<std::size_t>(n), -1);
    for (std::size_t t = 0; t < sd.peripheral_indices.size(); ++t) {
        column_of[static_cast<std::size_t>(sd.peripheral_indices[t])] =
            static_cast<Eigen::Index>(t);
    }
    sd.right_peripheral.resize(n, static_cast<Eigen::Index>(sd.peripheral_indices.size()));
    sd.left_peripheral.resize(n, static_cast<Eigen::Index>(sd.peripheral_indices.size()));
    for (const auto& cluster : es.clusters) {
        bool any = false, all = true;
        for (Eigen::Index i : cluster) {
            if (is_peripheral(es.values(i))) {
                any = true;
            } else {
                all = false;
            }
        }
        if (!any) continue;
        if (!all) {
            throw Error("spectrum: peripheral eigenvalue cluster is not separated "
                        "from the subperipheral spectrum at degeneracy_gap");
        }
        sd.peripheral_clusters.push_back(cluster);
        sd.attractor_projector += es.cluster_projector(cluster);
        for (Eigen::Index i : cluster) {
            const Eigen::Index col = column_of[static_cast<std::size_t>(i)];
            sd.right_peripheral.col(col) = es.right.col(i);
            sd.left_peripheral.col(col) = es.left.col(i);
        }
        if (std::find(cluster.begin(), cluster.end(), one_idx) != cluster.end()) {
            sd.fixed_projector = es.cluster_projector(cluster);
        }
    }
    sd.gram_condition = es.max_gram_condition;

    const Matrix& P = sd.attractor_projector;
    const double idem = (P * P - P).norm();
    const double comm = (P * S - S * P).norm();
    const Matrix& F = sd.fixed_projector;
    const double idem_fix = (F * F - F).norm();
    if (idem > tol.recon || comm > tol.recon || idem_fix > tol.recon) {
        throw Error("spectrum: projector residuals exceed recon (gram condition " +
                    std::to_string(es.max_gram_condition) + ")");
    }
    return sd;
}

AttractorBasis attractor_basis(const SpectralData& S) {
    AttractorBasis basis;
    basis.indices = S.peripheral_indices;
    const Eigen::Index np = S.right_peripheral.cols();
    basis.elements.reserve(static_cast<std::size_t>(np));
    for (Eigen::Index c = 0; c < np; ++c) {
        basis.elements.push_back(unvec(S.right_peripheral.col(c), S.dim, S.dim));
    }
    if (np > 0) {
        Eigen::JacobiSVD<Matrix> svd(S.right_peripheral);
        const double smin = svd.singularValues()(np - 1);
        const double smax = svd.singularValues()(0);
        const double c = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
        basis.gram_condition = c * c;  // Gram matrix is B†B
    }
    return basis;
}

Matrix max_rank_fixed_point(const SpectralData& S, const Tolerances& tol) {
    const Eigen::Index d = S.dim;
    const Matrix I = Matrix::Identity(d, d);
    // Eigenprojection arithmetic leaves O(eig_residual) anti-Hermitian noise.
    const Matrix X = hermitize(unvec(S.fixed_projector * vec(I), d, d));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(X);
    if (solver.eigenvalues()(0) < -tol.psd_cut) {
        throw Error("max_rank_fixed_point: P(I) is not PSD at tolerance");
    }
    if (X.trace().real() <= 0) {
        throw ZeroSupport("max_rank_fixed_point: P(I) has nonpositive trace");
    }

    // Support must contain the support and range of every fixed point.
    Matrix Q = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (solver.eigenvalues()(i) > tol.psd_cut * static_cast<double>(d)) {
            Q += solver.eigenvectors().col(i) * solver.eigenvectors().col(i).adjoint();
        }
    }
    for (std::size_t c = 0; c < S.peripheral_indices.size(); ++c) {
        const Eigen::Index idx = S.peripheral_indices[c];
        if (std::abs(S.eigenvalues(idx) - Complex(1.0, 0.0)) > tol.peripheral_cut) {
            continue;
        }
        const Matrix Y = unvec(S.right_peripheral.col(static_cast<Eigen::Index>(c)), d, d);
        if ((Y - Q * Y * Q).norm() > tol.recon * Y.norm()) {
            throw Error("max_rank_fixed_point: a fixed point escapes supp(P(I))");
        }
    }
    return X;
}

Matrix cesaro_fixed_oracle(const Channel& phi, long iterations) {
    if (iterations < 1) {
        throw Error("cesaro_fixed_oracle: need at least one iteration");
    }
    const Matrix& S = phi.superop();
    Matrix power = Matrix::Identity(S.rows(), S.cols());
    Matrix acc = Matrix::Zero(S.rows(), S.cols());
    for (long n = 1; n <= iterations; ++n) {
        power = power * S;
        acc += power;
    }
    return acc / static_cast<double>(iterations);
}

} // namespace qasym
