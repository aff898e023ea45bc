// channel.cpp — Representation caching, conversions, validation, random sampling

#include "qasym/channel.hpp"

#include <cmath>
#include <mutex>
#include <optional>
#include <random>

#include <Eigen/QR>

namespace qasym {

// ------------------------------------------------------------ conversions ---

Matrix kraus_to_superop(const std::vector<Matrix>& kraus) {
    if (kraus.empty()) {
        throw DimensionMismatch("kraus_to_superop: empty Kraus set");
    }
    const Eigen::Index d = kraus.front().rows();
    Matrix S = Matrix::Zero(d * d, d * d);
    for (const Matrix& K : kraus) {
        if (K.rows() != d || K.cols() != d) {
            throw DimensionMismatch("kraus_to_superop: inconsistent Kraus shapes");
        }
        S += kron(K.conjugate(), K);
    }
    return S;
}

// Reshuffle between superoperator and Choi indices:
//   C[(i*d+r),(j*d+s)] = S[(s*d+r),(j*d+i)].
// The map is an involution, so it serves both directions.
namespace {

Matrix reshuffle(const Matrix& M) {
    check_square(M, "reshuffle");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(M.rows()))));
    if (d * d != M.rows()) {
        throw DimensionMismatch("reshuffle: side is not a perfect square");
    }
    Matrix out(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index j = 0; j < d; ++j) {
                for (Eigen::Index s = 0; s < d; ++s) {
                    out(i * d + r, j * d + s) = M(s * d + r, j * d + i);
                }
            }
        }
    }
    return out;
}

} // namespace

Matrix superop_to_choi(const Matrix& S) { return reshuffle(S); }
Matrix choi_to_superop(const Matrix& C) { return reshuffle(C); }

std::vector<Matrix> choi_to_kraus(const Matrix& C, double psd_cut) {
    check_square(C, "choi_to_kraus");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(C.rows()))));
    if (d * d != C.rows()) {
        throw DimensionMismatch("choi_to_kraus: side is not a perfect square");
    }
    if ((C - C.adjoint()).norm() > psd_cut * std::max(1.0, C.norm())) {
        throw NotPositiveDefinite("choi_to_kraus: Choi matrix is not Hermitian");
    }
    Tolerances tol;
    tol.eig_residual = std::max(tol.eig_residual, psd_cut);
    const HermitianEigensystem h = eig_hermitian(hermitize(C), tol);
    if (h.values(0) < -psd_cut) {
        throw NotPositiveDefinite("choi_to_kraus: Choi matrix has a negative eigenvalue");
    }
    std::vector<Matrix> kraus;
    const double keep = std::max(psd_cut, 1e-12 * std::max(1.0, h.values.maxCoeff()));
    for (Eigen::Index i = h.values.size() - 1; i >= 0; --i) {
        if (h.values(i) > keep) {
            kraus.push_back(std::sqrt(h.values(i)) *
                            unvec(h.vectors.col(i), d, d));
        }
    }
    if (kraus.empty()) {
        kraus.push_back(Matrix::Zero(d, d));
    }
    return kraus;
}

// ---------------------------------------------------------------- Channel ---

struct Channel::Repr {
    Eigen::Index d = 0;
    mutable std::mutex mu;
    mutable std::optional<std::vector<Matrix>> kraus;
    mutable std::optional<Matrix> choi;
    mutable std::optional<Matrix> superop;
};

Channel::Channel() {
    auto repr = std::make_shared<Repr>();
    repr->d = 1;
    repr->superop = Matrix::Identity(1, 1);
    repr_ = std::move(repr);
}

Channel Channel::from_kraus(std::vector<Matrix> kraus) {
    if (kraus.empty()) {
        throw DimensionMismatch("Channel::from_kraus: empty Kraus set");
    }
    const Eigen::Index d = kraus.front().rows();
    for (const Matrix& K : kraus) {
        check_finite(K, "Channel::from_kraus");
        if (K.rows() != d || K.cols() != d) {
            throw DimensionMismatch("Channel::from_kraus: inconsistent shapes");
        }
    }
    auto repr = std::make_shared<Repr>();
    repr->d = d;
    repr->kraus = std::move(kraus);
    return Channel(std::move(repr));
}

Channel Channel::from_choi(Matrix choi) {
    check_square(choi, "Channel::from_choi");
    check_finite(choi, "Channel::from_choi");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(choi.rows()))));
    if (d * d != choi.rows()) {
        throw DimensionMismatch("Channel::from_choi: side is not a perfect square");
    }
    auto repr = std::make_shared<Repr>();
    repr->d = d;
    repr->choi = std::move(choi);
    return Channel(std::move(repr));
}

Channel Channel::from_superop(Matrix superop) {
    check_square(superop, "Channel::from_superop");
    check_finite(superop, "Channel::from_superop");
    const auto d =
        static_cast<Eigen::Index>(std::llround(std::sqrt(double(superop.rows()))));
    if (d * d != superop.rows()) {
        throw DimensionMismatch("Channel::from_superop: side is not a perfect square");
    }
    auto repr = std::make_shared<Repr>();
    repr->d = d;
    repr->superop = std::move(superop);
    return Channel(std::move(repr));
}

Channel Channel::identity(Eigen::Index dim) {
    return from_superop(Matrix::Identity(dim * dim, dim * dim));
}

Eigen::Index Channel::dim() const { return repr_->d; }

const Matrix& Channel::superop() const {
    std::scoped_lock lock(repr_->mu);
    if (!repr_->superop) {
        if (repr_->kraus) {
            repr_->superop = kraus_to_superop(*repr_->kraus);
        } else {
            repr_->superop = choi_to_superop(*repr_->choi);
        }
    }
    return *repr_->superop;
}

const Matrix& Channel::choi() const {
    std::scoped_lock lock(repr_->mu);
    if (!repr_->choi) {
        if (!repr_->superop) {
            repr_->superop = kraus_to_superop(*repr_->kraus);
        }
        repr_->choi = superop_to_choi(*repr_->superop);
    }
    return *repr_->choi;
}

const std::vector<Matrix>& Channel::kraus() const {
    choi();  // ensure present
    std::scoped_lock lock(repr_->mu);
    if (!repr_->kraus) {
        repr_->kraus = choi_to_kraus(*repr_->choi);
    }
    return *repr_->kraus;
}

Matrix Channel::apply(const Matrix& X) const {
    if (X.rows() != repr_->d || X.cols() != repr_->d) {
        throw DimensionMismatch("Channel::apply: operand shape mismatch");
    }
    return unvec(superop() * vec(X), repr_->d, repr_->d);
}

Matrix AdjointChannel::apply(const Matrix& X) const {
    if (X.rows() != dim || X.cols() != dim) {
        throw DimensionMismatch("AdjointChannel::apply: operand shape mismatch");
    }
    return unvec(superop * vec(X), dim, dim);
}

// ------------------------------------------------------------- operations ---

ValidationReport validate(const Channel& phi, const Tolerances& tol) {
    tol.validate();
    const Matrix& C = phi.choi();
    const Eigen::Index d = phi.dim();

    ValidationReport rep;
    const double herm_defect = (C - C.adjoint()).norm();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(C));
    rep.min_choi_eig = solver.eigenvalues()(0);
    rep.cp = herm_defect <= tol.psd_cut * std::max(1.0, C.norm()) &&
             rep.min_choi_eig >= -tol.psd_cut;

    Matrix tr_out = Matrix::Zero(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                tr_out(i, j) += C(i * d + r, j * d + r);
            }
        }
    }
    // Operator norm of the Hermitian defect.
    Eigen::SelfAdjointEigenSolver<Matrix> defect(
        hermitize(tr_out - Matrix::Identity(d, d)));
    rep.tp_defect = defect.eigenvalues().cwiseAbs().maxCoeff();
    rep.tp = rep.tp_defect <= tol.psd_cut;
    return rep;
}

AdjointChannel adjoint(const Channel& phi) {
    AdjointChannel adj;
    adj.dim = phi.dim();
    adj.superop = phi.superop().adjoint();
    for (const Matrix& K : phi.kraus()) {
        adj.kraus.push_back(K.adjoint());
    }
    return adj;
}

Channel compose(const Channel& a, const Channel& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("compose: channel dims differ");
    }
    return Channel::from_superop(a.superop() * b.superop());
}

Matrix superop_power(const Matrix& S, long n) {
    check_square(S, "superop_power");
    if (n < 0) {
        throw Error("superop_power: negative exponent");
    }
    Matrix result = Matrix::Identity(S.rows(), S.cols());
    Matrix base = S;
    long k = n;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

Channel channel_power(const Channel& phi, long n) {
    return Channel::from_superop(superop_power(phi.superop(), n));
}

Channel random_channel(Eigen::Index dim, Eigen::Index kraus_rank, std::uint64_t seed) {
    if (dim < 1 || kraus_rank < 1 || kraus_rank > dim * dim) {
        throw DimensionMismatch("random_channel: need 1 <= rank <= dim^2");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G(dim * kraus_rank, dim);
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
        for (Eigen::Index i = 0; i < G.rows(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            G(i, j) = Complex(re, im) / std::sqrt(2.0);
        }
    }
    // Orthonormalize the columns into a Stinespring isometry.
    Eigen::HouseholderQR<Matrix> qr(G);
    const Matrix V =
        qr.householderQ() * Matrix::Identity(dim * kraus_rank, dim);
    std::vector<Matrix> kraus;
    kraus.reserve(static_cast<std::size_t>(kraus_rank));
    for (Eigen::Index i = 0; i < kraus_rank; ++i) {
        kraus.push_back(V.middleRows(i * dim, dim));
    }
    return Channel::from_kraus(std::move(kraus));
}

} // namespace qasym
