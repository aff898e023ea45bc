// test_structure.cpp — Algebra decomposition, block states, peripheral action

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "qasym/pipeline.hpp"
#include "qasym/reduction.hpp"
#include "qasym/structure.hpp"

using namespace qasym;
using namespace qasym::testing;

namespace {

// Run the pipeline up to the action for an already-faithful channel.
struct Pieces {
    SpectralData spec;
    std::vector<Matrix> algebra;
    BlockDecomposition D;
    PeripheralAction A;
};

Pieces run_structure(const Channel& phi, std::uint64_t seed = 0) {
    Pieces p;
    p.spec = spectrum(phi);
    p.algebra = adjoint_attractor_algebra(phi);
    const BlockDecomposition skeleton = decompose_algebra(p.algebra, seed);
    p.D = extract_rho(phi, skeleton, p.spec);
    p.A = extract_action(phi, p.D);
    return p;
}

std::vector<Matrix> matrix_units(Eigen::Index d) {
    std::vector<Matrix> basis;
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            Matrix E = Matrix::Zero(d, d);
            E(a, b) = 1.0;
            basis.push_back(E);
        }
    }
    return basis;
}

} // namespace

TEST_CASE("adjoint_attractor_algebra: unitary, dephasing, depolarizing") {
    CHECK(adjoint_attractor_algebra(unitary_fixture()).size() == 4);

    const auto deph = adjoint_attractor_algebra(dephasing_fixture());
    REQUIRE(deph.size() == 2);
    const Matrix onb = orthonormal_span(deph);
    CHECK(span_residual(onb, mat2(1, 0, 0, 0)) < 1e-9);
    CHECK(span_residual(onb, mat2(0, 0, 0, 1)) < 1e-9);

    const Channel dep = depolarizing_fixture(0.5);
    const auto triv = adjoint_attractor_algebra(dep);
    REQUIRE(triv.size() == 1);
    CHECK((triv[0] * std::sqrt(2.0) - Matrix::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("decompose_algebra: full matrix algebra") {
    const BlockDecomposition D = decompose_algebra(matrix_units(2), 0);
    REQUIRE(D.M() == 1);
    CHECK(D.blocks[0].d == 2);
    CHECK(D.blocks[0].m == 1);
    CHECK((D.blocks[0].W.adjoint() * D.blocks[0].W - Matrix::Identity(2, 2)).norm() <
          1e-10);
}

TEST_CASE("decompose_algebra: abelian diagonal algebra") {
    const BlockDecomposition D =
        decompose_algebra({mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)}, 0);
    REQUIRE(D.M() == 2);
    for (const Block& b : D.blocks) {
        CHECK(b.d == 1);
        CHECK(b.m == 1);
    }
}

TEST_CASE("decompose_algebra: M_2 ⊗ I_2 on C^4") {
    std::vector<Matrix> basis;
    for (const Matrix& E : matrix_units(2)) {
        basis.push_back(kron(E, Matrix::Identity(2, 2)) / std::sqrt(2.0));
    }
    const BlockDecomposition D = decompose_algebra(basis, 1);
    REQUIRE(D.M() == 1);
    CHECK(D.blocks[0].d == 2);
    CHECK(D.blocks[0].m == 2);
    // Compressions factor with an identity second factor.
    const Matrix& W = D.blocks[0].W;
    for (const Matrix& B : basis) {
        const Matrix Y = W.adjoint() * B * W;
        const Matrix b = partial_trace_second(Y, 2, 2) / 2.0;
        CHECK((Y - kron(b, Matrix::Identity(2, 2))).norm() < 1e-9);
    }
}

TEST_CASE("adjoint algebra: empty periphery and closure violations throw") {
    // No peripheral eigenvalues at all.
    CHECK_THROWS_AS(
        adjoint_attractor_algebra(Channel::from_superop(Matrix::Identity(4, 4) * 0.5)),
        AlgebraClosureViolation);

    // A peripheral span {I, E01} that is not closed under adjoints.
    const Matrix I = Matrix::Identity(2, 2);
    const Vector v1 = vec(I) / std::sqrt(2.0);
    const Vector v2 = vec(mat2(0, 1, 0, 0));
    const Matrix P = v1 * v1.adjoint() + v2 * v2.adjoint();
    CHECK_THROWS_AS(adjoint_attractor_algebra(Channel::from_superop(P)),
                    AlgebraClosureViolation);
}

TEST_CASE("extract_rho: unital gives maximally mixed block states") {
    // Depolarizing: M=1 block with d=1, m=2, rho = I/2.
    const Pieces p = run_structure(depolarizing_fixture(0.5));
    REQUIRE(p.D.M() == 1);
    CHECK(p.D.blocks[0].d == 1);
    CHECK(p.D.blocks[0].m == 2);
    CHECK((p.D.blocks[0].rho - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-9);

    // Dephasing: singleton blocks carry scalar rho = 1.
    const Pieces q = run_structure(dephasing_fixture());
    REQUIRE(q.D.M() == 2);
    for (const Block& b : q.D.blocks) {
        CHECK(b.m == 1);
        CHECK(std::abs(b.rho(0, 0) - 1.0) < 1e-10);
    }
}

TEST_CASE("extract_rho: engineered diag(0.7, 0.3) block state") {
    const Channel prep = prepare_state_fixture(mat2(0.7, 0, 0, 0.3));
    const Pieces p = run_structure(prep);
    REQUIRE(p.D.M() == 1);
    CHECK(p.D.blocks[0].d == 1);
    CHECK(p.D.blocks[0].m == 2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.D.blocks[0].rho);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("extract_action: unitary conjugation recovers U up to phase") {
    std::mt19937_64 rng(31);
    const Matrix V = random_unitary(2, rng);
    const Pieces p = run_structure(unitary_channel(V), 3);
    REQUIRE(p.D.M() == 1);
    CHECK(p.A.pi[0] == 0);
    // Compare conjugation superoperators (phase drops out).
    const Matrix& W = p.D.blocks[0].W;
    const Matrix U_global = W * p.A.U[0] * W.adjoint();
    CHECK((kron(U_global.conjugate(), U_global) - kron(V.conjugate(), V)).norm() <
          1e-8);
}

TEST_CASE("extract_action: dephasing is the identity action") {
    const Pieces p = run_structure(dephasing_fixture());
    CHECK(p.A.trivial());
    for (const Matrix& U : p.A.U) {
        CHECK(std::abs(U(0, 0) - 1.0) < 1e-9);
    }
}

TEST_CASE("extract_action: swap channel is a two-cycle") {
    const Pieces p = run_structure(swap_block_fixture());
    REQUIRE(p.D.M() == 2);
    CHECK(p.A.pi[0] == 1);
    CHECK(p.A.pi[1] == 0);
    CHECK(pi_cycle_notation(p.A) == "(0 1)");
}

TEST_CASE("star_product: identity element, unital case, dephasing zero divisor") {
    const Channel deph = dephasing_fixture();
    const SpectralData sd = spectrum(deph);
    const AttractorBasis attr = attractor_basis(sd);
    const Matrix PI = max_rank_fixed_point(sd);

    // P(I) is the star identity.
    CHECK((star_product(PI, PI, PI, attr) - PI).norm() < 1e-10);

    // Unital channel: star product = ordinary product.
    const Matrix e00 = mat2(1, 0, 0, 0), e11 = mat2(0, 0, 0, 1);
    CHECK((star_product(e00, e00, PI, attr) - e00).norm() < 1e-10);
    CHECK(star_product(e00, e11, PI, attr).norm() < 1e-10);

    // Operands must live in the attractor.
    CHECK_THROWS_AS(star_product(mat2(0, 1, 0, 0), e00, PI, attr), NotInAttractor);
}

TEST_CASE("star closure on a non-unital fixture") {
    const Channel phi = two_cycle_mismatch_fixture();
    const SpectralData sd = spectrum(phi);
    const AttractorBasis attr = attractor_basis(sd);
    const Matrix PI = max_rank_fixed_point(sd);
    const Matrix onb = orthonormal_span(attr.elements);
    for (const Matrix& A : attr.elements) {
        for (const Matrix& B : attr.elements) {
            const Matrix R = star_product(A, B, PI, attr);
            CHECK(span_residual(onb, R) < 1e-8 * std::max(1.0, R.norm()));
        }
    }
}

TEST_CASE("reconstruct_peripheral: identity action and unitary channel") {
    // Unitary channel: reconstruction reproduces the superoperator on all of B(H).
    std::mt19937_64 rng(37);
    const Matrix V = random_unitary(3, rng);
    const Channel phi = unitary_channel(V);
    const Pieces p = run_structure(phi, 11);
    const Matrix S_rec = reconstruct_peripheral(p.D, p.A);
    CHECK((S_rec - phi.superop()).norm() < 1e-8);
}

TEST_CASE("reconstruct_peripheral: random faithful channel end to end") {
    // dim-3 random channel reduced to its support; reconstruction must agree
    // with the channel on the attractor basis.
    const Channel phi = random_channel(3, 5, 12345);
    const SpectralData sd = spectrum(phi);
    const Reduction R = reduce(phi, sd);
    const Pieces p = run_structure(R.reduced, 7);
    const Matrix S_rec = reconstruct_peripheral(p.D, p.A);
    const AttractorBasis attr = attractor_basis(p.spec);
    for (const Matrix& X : attr.elements) {
        const Matrix lhs = R.reduced.apply(X);
        const Matrix rhs = unvec(S_rec * vec(X), R.d0, R.d0);
        CHECK((lhs - rhs).norm() <= 1e-8 * X.norm());
    }
}

TEST_CASE("W_k orthogonality and permutation preserves block order") {
    const Pieces p = run_structure(swap_block_fixture());
    // Completeness: the blocks tile H0.
    Matrix resolution = Matrix::Zero(p.D.d0, p.D.d0);
    for (const Block& b : p.D.blocks) {
        resolution += b.W * b.W.adjoint();
    }
    CHECK((resolution - Matrix::Identity(p.D.d0, p.D.d0)).norm() < 1e-10);
    for (Eigen::Index k = 0; k < p.D.M(); ++k) {
        for (Eigen::Index l = 0; l < p.D.M(); ++l) {
            const Matrix G = p.D.blocks[static_cast<std::size_t>(k)].W.adjoint() *
                             p.D.blocks[static_cast<std::size_t>(l)].W;
            if (k == l) {
                CHECK((G - Matrix::Identity(G.rows(), G.cols())).norm() < 1e-10);
            } else {
                CHECK(G.norm() < 1e-10);
            }
        }
    }
    for (Eigen::Index k = 0; k < p.D.M(); ++k) {
        CHECK(p.D.blocks[static_cast<std::size_t>(k)].d ==
              p.D.blocks[static_cast<std::size_t>(p.A.pi[static_cast<std::size_t>(k)])].d);
    }
}

TEST_CASE("compressed adjoint algebra is M_d ⊗ I_m for every basis element") {
    const Channel phi = two_cycle_mismatch_fixture();
    const std::vector<Matrix> algebra = adjoint_attractor_algebra(phi);
    const BlockDecomposition D = decompose_algebra(algebra, 0);
    for (const Block& blk : D.blocks) {
        for (const Matrix& B : algebra) {
            const Matrix Y = blk.W.adjoint() * B * blk.W;
            const Matrix b = partial_trace_second(Y, blk.d, blk.m) /
                             static_cast<double>(blk.m);
            CHECK((Y - kron(b, Matrix::Identity(blk.m, blk.m))).norm() < 1e-8);
        }
    }
}

TEST_CASE("decomposition JSON round trip") {
    const Pieces p = run_structure(swap_block_fixture());
    const Json j = decomposition_to_json(p.D, p.A);
    auto [D2, A2] = decomposition_from_json(j);
    REQUIRE(D2.M() == p.D.M());
    CHECK(D2.d0 == p.D.d0);
    for (Eigen::Index k = 0; k < p.D.M(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        CHECK(D2.blocks[ks].d == p.D.blocks[ks].d);
        CHECK(D2.blocks[ks].m == p.D.blocks[ks].m);
        CHECK((D2.blocks[ks].rho - p.D.blocks[ks].rho).norm() < 1e-12);
        CHECK((D2.blocks[ks].W - p.D.blocks[ks].W).norm() < 1e-12);
        CHECK(A2.pi[ks] == p.A.pi[ks]);
        CHECK((A2.U[ks] - p.A.U[ks]).norm() < 1e-12);
    }
}
