// fixtures.hpp — Shared channels, generators, and matrix helpers for the tests

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "qasym/asymptotics.hpp"
#include "qasym/channel.hpp"
#include "qasym/numerics.hpp"
#include "qasym/structure.hpp"

namespace qasym::testing {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

inline Matrix pauli_x() { return mat2(0, 1, 1, 0); }
inline Matrix pauli_y() { return mat2(0, Complex(0, -1), Complex(0, 1), 0); }
inline Matrix pauli_z() { return mat2(1, 0, 0, -1); }

inline Channel unitary_channel(const Matrix& U) {
    return Channel::from_kraus({U});
}

// diag(1, e^{i pi/3}) conjugation; two peripheral phases, pi = id.
inline Channel unitary_fixture() {
    return unitary_channel(mat2(1, 0, 0, std::polar(1.0, M_PI / 3.0)));
}

// Φ(X) = P0 X P0 + P1 X P1; idempotent, attractor = diagonal matrices.
inline Channel dephasing_fixture() {
    return Channel::from_kraus({mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)});
}

// Φ(X) = (1-p) X + p tr(X) I/2.
inline Channel depolarizing_fixture(double p) {
    const double w0 = std::sqrt(1.0 - 3.0 * p / 4.0);
    const double w = std::sqrt(p / 4.0);
    return Channel::from_kraus({w0 * Matrix::Identity(2, 2), w * pauli_x(),
                                w * pauli_y(), w * pauli_z()});
}

inline Channel amplitude_damping_fixture(double gamma) {
    return Channel::from_kraus(
        {mat2(1, 0, 0, std::sqrt(1.0 - gamma)), mat2(0, std::sqrt(gamma), 0, 0)});
}

// Swaps the two diagonal blocks and kills coherences: Φ(X) = X00 E11 + X11 E00.
// Two singleton blocks with pi = (0 1); unital; peripheral spectrum {1, −1}.
inline Channel swap_block_fixture() {
    return Channel::from_kraus({mat2(0, 0, 1, 0), mat2(0, 1, 0, 0)});
}

// Φ(X) = tr(X) rho; idempotent with a one-dimensional attractor.
inline Channel prepare_state_fixture(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Matrix S = vec(rho) * vec(Matrix::Identity(d, d)).adjoint();
    return Channel::from_superop(std::move(S));
}

// The canonical non-unitary-asymptotics regression fixture: a two-cycle on
// C¹ ⊕ C² with maximally mixed block states of multiplicities 1 and 2.
inline Channel two_cycle_mismatch_fixture() {
    BlockDecomposition D;
    D.d0 = 3;
    D.blocks.push_back(Block{1, 1, Matrix(), Matrix::Identity(1, 1)});
    D.blocks.push_back(Block{1, 2, Matrix(), 0.5 * Matrix::Identity(2, 2)});
    PeripheralAction A;
    A.pi = {1, 0};
    A.U = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    return synthesize_extension(D, A, 3);
}

// A two-cycle with matching multiplicities (certifiably unitary asymptotics).
inline Channel two_cycle_matched_fixture() {
    BlockDecomposition D;
    D.d0 = 2;
    D.blocks.push_back(Block{1, 1, Matrix(), Matrix::Identity(1, 1)});
    D.blocks.push_back(Block{1, 1, Matrix(), Matrix::Identity(1, 1)});
    PeripheralAction A;
    A.pi = {1, 0};
    A.U = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    return synthesize_extension(D, A, 2);
}

// --------------------------------------------------------------- sampling ---

inline Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            G(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
        }
    }
    return G;
}

inline Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
    const Matrix G = random_gaussian(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    return qr.householderQ() * Matrix::Identity(d, d);
}

inline Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
    return hermitize(random_gaussian(d, d, rng));
}

// Positive definite, trace one, eigenvalues bounded away from zero.
inline Matrix random_density(Eigen::Index d, std::mt19937_64& rng) {
    const Matrix G = random_gaussian(d, d, rng);
    Matrix rho = G * G.adjoint() + 0.3 * Matrix::Identity(d, d);
    rho /= rho.trace().real();
    return rho;
}

// GKLS generator superoperator: L = -i[H, ·] + Σ (A X A† − ½{A†A, X}).
inline Matrix gkls_superop(const Matrix& H, const std::vector<Matrix>& jumps) {
    const Eigen::Index d = H.rows();
    const Matrix I = Matrix::Identity(d, d);
    Matrix L = Complex(0, -1) * (kron(I, H) - kron(H.transpose(), I));
    for (const Matrix& A : jumps) {
        const Matrix AdA = A.adjoint() * A;
        L += kron(A.conjugate(), A) - 0.5 * kron(I, AdA) -
             0.5 * kron(AdA.transpose(), I);
    }
    return L;
}

// Dephasing generator rate gamma: L(X) = gamma (Z X Z − X).
inline Matrix dephasing_generator(double gamma) {
    return gamma * gkls_superop(Matrix::Zero(2, 2), {pauli_z()});
}

// Random GKLS generator scaled so the principal branch recovers it exactly.
inline Matrix random_gkls(Eigen::Index d, std::mt19937_64& rng) {
    Matrix L = gkls_superop(random_hermitian(d, rng),
                            {random_gaussian(d, d, rng), random_gaussian(d, d, rng)});
    const double scale = L.norm();
    if (scale > 1.0) L /= scale;
    return L;
}

} // namespace qasym::testing
