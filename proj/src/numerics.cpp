// numerics.cpp — Eigen-backed kernels behind the tolerance contracts

#include "qasym/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace qasym {

void Tolerances::validate() const {
    const bool positive = eig_residual > 0 && peripheral_cut > 0 && psd_cut > 0 &&
                          recon > 0 && degeneracy_gap > 0;
    if (!positive) {
        throw Error("Tolerances: all knobs must be strictly positive");
    }
    if (!(peripheral_cut > eig_residual)) {
        throw Error("Tolerances: peripheral_cut must exceed eig_residual");
    }
}

// ---------------------------------------------------------------- helpers ---

Vector vec(const Matrix& X) {
    return Eigen::Map<const Vector>(X.data(), X.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw DimensionMismatch("unvec: vector length does not match target shape");
    }
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix unvec_square(const Vector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size()) {
        throw DimensionMismatch("unvec_square: length is not a perfect square");
    }
    return unvec(v, d, d);
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return K;
}

Matrix partial_trace_first(const Matrix& Y, Eigen::Index d1, Eigen::Index d2) {
    if (Y.rows() != d1 * d2 || Y.cols() != d1 * d2) {
        throw DimensionMismatch("partial_trace_first: shape mismatch");
    }
    Matrix out = Matrix::Zero(d2, d2);
    for (Eigen::Index a = 0; a < d1; ++a) {
        out += Y.block(a * d2, a * d2, d2, d2);
    }
    return out;
}

Matrix partial_trace_second(const Matrix& Y, Eigen::Index d1, Eigen::Index d2) {
    if (Y.rows() != d1 * d2 || Y.cols() != d1 * d2) {
        throw DimensionMismatch("partial_trace_second: shape mismatch");
    }
    Matrix out = Matrix::Zero(d1, d1);
    for (Eigen::Index a = 0; a < d1; ++a) {
        for (Eigen::Index b = 0; b < d1; ++b) {
            Complex s = 0.0;
            for (Eigen::Index mu = 0; mu < d2; ++mu) {
                s += Y(a * d2 + mu, b * d2 + mu);
            }
            out(a, b) = s;
        }
    }
    return out;
}

void check_finite(const Matrix& A, const char* what) {
    if (!A.allFinite()) {
        throw Error(std::string(what) + ": non-finite entries");
    }
}

void check_square(const Matrix& A, const char* what) {
    if (A.rows() != A.cols()) {
        throw DimensionMismatch(std::string(what) + ": matrix must be square");
    }
}

void fix_phase(Eigen::Ref<Vector> v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v(imax)) / best;
}

void fix_phase(Matrix& columns) {
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        fix_phase(columns.col(c));
    }
}

std::vector<std::vector<Eigen::Index>> cluster_by_gap(const Vector& values, double gap) {
    const Eigen::Index n = values.size();
    std::vector<Eigen::Index> parent(n);
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(values(i) - values(j)) <= gap) {
                parent[find(i)] = find(j);
            }
        }
    }
    std::vector<std::vector<Eigen::Index>> groups;
    std::vector<Eigen::Index> root_to_group(n, -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        if (root_to_group[r] < 0) {
            root_to_group[r] = static_cast<Eigen::Index>(groups.size());
            groups.emplace_back();
        }
        groups[root_to_group[r]].push_back(i);
    }
    return groups;
}

// ----------------------------------------------------------- eig_general ---

namespace {

double arg_2pi(Complex z) {
    double a = std::arg(z);
    if (a < 0) a += 2.0 * M_PI;
    return a;
}

struct GeneralSolve {
    Vector values;
    Matrix vectors;
};

GeneralSolve solve_sorted(const Matrix& A) {
    Eigen::ComplexEigenSolver<Matrix> solver(A, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("eig_general: dense eigensolver did not converge");
    }
    const Eigen::Index n = A.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Vector& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ma = std::abs(vals(a)), mb = std::abs(vals(b));
        if (ma != mb) return ma > mb;
        const double aa = arg_2pi(vals(a)), ab = arg_2pi(vals(b));
        if (aa != ab) return aa < ab;
        return a < b;
    });
    GeneralSolve out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = vals(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i).normalize();
    }
    fix_phase(out.vectors);
    return out;
}

} // namespace

Matrix Eigensystem::cluster_projector(const std::vector<Eigen::Index>& cluster) const {
    Matrix P = Matrix::Zero(right.rows(), right.rows());
    for (Eigen::Index idx : cluster) {
        P += right.col(idx) * left.col(idx).adjoint();
    }
    return P;
}

Eigensystem eig_general(const Matrix& A, const Tolerances& tol) {
    check_square(A, "eig_general");
    check_finite(A, "eig_general");
    tol.validate();

    const GeneralSolve rs = solve_sorted(A);
    const GeneralSolve ls = solve_sorted(A.adjoint());

    Eigensystem es;
    es.values = rs.values;
    es.right = rs.vectors;
    es.left.resize(A.rows(), A.cols());
    es.clusters = cluster_by_gap(es.values, tol.degeneracy_gap);

    // Assign each adjoint eigenpair (a left eigenvector candidate, eigenvalue
    // conj(lambda)) to the nearest right-spectrum cluster.
    const Eigen::Index n = A.rows();
    std::vector<std::vector<Eigen::Index>> left_members(es.clusters.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex target = std::conj(ls.values(j));
        std::size_t best_cluster = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < es.clusters.size(); ++c) {
            for (Eigen::Index m : es.clusters[c]) {
                const double d = std::abs(es.values(m) - target);
                if (d < best_dist) {
                    best_dist = d;
                    best_cluster = c;
                }
            }
        }
        left_members[best_cluster].push_back(j);
    }

    es.max_gram_condition = 1.0;
    for (std::size_t c = 0; c < es.clusters.size(); ++c) {
        const auto& members = es.clusters[c];
        if (left_members[c].size() != members.size()) {
            throw NonConvergence(
                "eig_general: left/right eigenvalue clusters failed to match");
        }
        const auto m = static_cast<Eigen::Index>(members.size());
        Matrix Rc(n, m), Lc(n, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            Rc.col(i) = es.right.col(members[static_cast<std::size_t>(i)]);
            Lc.col(i) = ls.vectors.col(left_members[c][static_cast<std::size_t>(i)]);
        }
        const Matrix G = Lc.adjoint() * Rc;
        Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(m - 1);
        const double cond = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
        es.max_gram_condition = std::max(es.max_gram_condition, cond);
        // L' = Lc * pinv(G)^dagger so that L'^dagger Rc = I on the cluster.
        const double cutoff = smax * 1e-14;
        Matrix pinv = Matrix::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double s = svd.singularValues()(i);
            if (s > cutoff) {
                pinv += (1.0 / s) * svd.matrixV().col(i) * svd.matrixU().col(i).adjoint();
            }
        }
        const Matrix Lfixed = Lc * pinv.adjoint();
        for (Eigen::Index i = 0; i < m; ++i) {
            es.left.col(members[static_cast<std::size_t>(i)]) = Lfixed.col(i);
        }
    }
    return es;
}

// --------------------------------------------------------- eig_hermitian ---

HermitianEigensystem eig_hermitian(const Matrix& A, const Tolerances& tol) {
    check_square(A, "eig_hermitian");
    check_finite(A, "eig_hermitian");
    const double scale = A.norm();
    if ((A - A.adjoint()).norm() > tol.eig_residual * scale) {
        throw NotHermitian("eig_hermitian: input is not Hermitian at tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(A));
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("eig_hermitian: solver did not converge");
    }
    HermitianEigensystem h;
    h.values = solver.eigenvalues();
    h.vectors = solver.eigenvectors();
    fix_phase(h.vectors);
    return h;
}

// ------------------------------------------------------------ herm_power ---

namespace {

Matrix hermitian_calculus(const Matrix& sigma, const Tolerances& tol,
                          const std::function<Complex(double)>& f, const char* what) {
    const HermitianEigensystem h = eig_hermitian(sigma, tol);
    if (h.values(0) <= tol.psd_cut) {
        throw NotPositiveDefinite(std::string(what) +
                                  ": smallest eigenvalue is not above psd_cut");
    }
    Vector fvals(h.values.size());
    for (Eigen::Index i = 0; i < h.values.size(); ++i) {
        fvals(i) = f(h.values(i));
    }
    return h.vectors * fvals.asDiagonal() * h.vectors.adjoint();
}

} // namespace

Matrix herm_power(const Matrix& sigma, Complex z, const Tolerances& tol) {
    return hermitian_calculus(
        sigma, tol, [z](double lam) { return std::exp(z * std::log(lam)); }, "herm_power");
}

Matrix herm_log(const Matrix& sigma, const Tolerances& tol) {
    return hermitian_calculus(
        sigma, tol, [](double lam) { return Complex(std::log(lam), 0.0); }, "herm_log");
}

// --------------------------------------------------------- principal_log ---

Matrix principal_log(const Matrix& A, const Tolerances& tol) {
    check_square(A, "principal_log");
    check_finite(A, "principal_log");
    const Vector lambdas = A.eigenvalues();
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        const Complex z = lambdas(i);
        // Distance to the closed negative real axis {x <= 0, y = 0}.
        const double dist = (z.real() <= 0.0) ? std::abs(z.imag()) : std::abs(z);
        if (dist <= tol.degeneracy_gap) {
            throw BranchCut("principal_log: eigenvalue within degeneracy_gap of the "
                            "closed negative real axis");
        }
    }
    const Matrix L = A.log();
    const double scale = std::max(A.norm(), 1.0);
    if ((L.exp() - A).norm() > 1e-8 * scale) {
        throw NonConvergence("principal_log: exp(log(A)) failed to reproduce A");
    }
    return L;
}

Matrix expm(const Matrix& A) {
    check_square(A, "expm");
    check_finite(A, "expm");
    return A.exp();
}

} // namespace qasym
