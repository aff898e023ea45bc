// reduction.cpp — Faithful reduction onto supp(P(I))

#include "qasym/reduction.hpp"

#include <algorithm>
#include <vector>

namespace qasym {

Reduction reduce(const Channel& phi, const SpectralData& S, const Tolerances& tol) {
    tol.validate();
    const Eigen::Index d = phi.dim();
    const Matrix PI = max_rank_fixed_point(S, tol);

    const HermitianEigensystem h = eig_hermitian(PI, tol);
    // Columns of V: eigenvectors above the dimension-scaled rank cut, ordered
    // by descending eigenvalue (stable within exact ties).
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < h.values.size(); ++i) {
        if (h.values(i) > tol.psd_cut * static_cast<double>(d)) {
            keep.push_back(i);
        }
    }
    std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
        return h.values(a) > h.values(b);
    });
    if (keep.empty()) {
        throw ZeroSupport("reduce: P(I) is numerically zero");
    }

    Matrix V(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        V.col(static_cast<Eigen::Index>(c)) = h.vectors.col(keep[c]);
    }

    Reduction R{.d0 = V.cols(),
                .V = V,
                .Q = V * V.adjoint(),
                .reduced = Channel::identity(1),
                .faithful = V.cols() == d};

    std::vector<Matrix> compressed;
    compressed.reserve(phi.kraus().size());
    for (const Matrix& K : phi.kraus()) {
        compressed.push_back(V.adjoint() * K * V);
    }
    R.reduced = Channel::from_kraus(std::move(compressed));

    const ValidationReport check = validate(R.reduced, tol);
    if (!check.ok()) {
        throw Error("reduce: reduced channel failed validation (tp defect " +
                    std::to_string(check.tp_defect) + ", min choi eig " +
                    std::to_string(check.min_choi_eig) + ")");
    }
    return R;
}

Matrix embed(const Reduction& R, const Matrix& X0) {
    if (X0.rows() != R.d0 || X0.cols() != R.d0) {
        throw DimensionMismatch("embed: operand is not d0 x d0");
    }
    return R.V * X0 * R.V.adjoint();
}

} // namespace qasym
