// test_pipeline.cpp — End-to-end analyze() on the fixture set and report schema

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "qasym/pipeline.hpp"

using namespace qasym;
using namespace qasym::testing;

TEST_CASE("analyze: dephasing has two singleton blocks, trivial pi, unitary") {
    const Analysis a = analyze(dephasing_fixture());
    CHECK(a.validation.ok());
    CHECK(a.reduction.faithful);
    CHECK(a.decomposition.M() == 2);
    CHECK(pi_cycle_notation(a.action) == "(0)(1)");
    CHECK(a.certificate.unitary);
    CHECK(a.idempotent);
    CHECK(a.modular.M_lcm == 1);
    CHECK(a.cycle_power.matches);
    CHECK(a.reconstruction_residual <= 1e-8);
}

TEST_CASE("analyze: amplitude damping reduces to a trivial attractor") {
    const Analysis a = analyze(amplitude_damping_fixture(0.5));
    CHECK(a.reduction.d0 == 1);
    CHECK_FALSE(a.reduction.faithful);
    CHECK(a.decomposition.M() == 1);
    CHECK(a.decomposition.blocks[0].d == 1);
    CHECK(a.decomposition.blocks[0].m == 1);
    CHECK(a.certificate.unitary);
    CHECK(a.spectral.peripheral_indices.size() == 1);
}

TEST_CASE("analyze: unitary fixture is Markovian with matching flow") {
    const Analysis a = analyze(unitary_fixture());
    CHECK(a.markov.verdict == MarkovVerdict::markovian);
    CHECK(a.generator_roundtrip_error >= 0.0);
    CHECK(a.generator_roundtrip_error <= 1e-8);
    CHECK(a.modular.M_lcm == 1);
    CHECK(a.cycle_power.matches);
    CHECK(a.cycle_power.one_step_residual <= 1e-8);
}

TEST_CASE("analyze: two-cycle fixture fails certification, needs Phi_P^2") {
    const Analysis a = analyze(two_cycle_mismatch_fixture());
    CHECK(a.decomposition.M() == 2);
    CHECK(pi_cycle_notation(a.action) == "(0 1)");
    CHECK_FALSE(a.certificate.unitary);
    CHECK(a.modular.M_lcm == 2);
    CHECK(a.cycle_power.matches);
    CHECK(a.cycle_power.one_step_residual > 0.1);
}

TEST_CASE("analyze consistency: sum of d_k^2 equals peripheral multiplicity") {
    for (int trial = 0; trial < 6; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        const Analysis a =
            analyze(random_channel(d, 1 + trial % (d * d), 3100 + trial));
        Eigen::Index total = 0;
        for (const Block& b : a.decomposition.blocks) total += b.d * b.d;
        CHECK(total == static_cast<Eigen::Index>(a.spectral.peripheral_indices.size()));
    }
}

TEST_CASE("analyze rejects non-CPTP input") {
    const Channel bad =
        Channel::from_kraus({Matrix::Identity(2, 2), pauli_x()});
    CHECK_THROWS_AS(analyze(bad), Error);
}

TEST_CASE("report JSON: stable schema and finite numbers") {
    const Analysis a = analyze(swap_block_fixture());
    const Json j = analysis_to_json(a);
    for (const char* key : {"validation", "spectrum", "reduction", "decomposition",
                            "action", "unitarity", "sufficient_conditions", "modular",
                            "reconstruction_residual", "timings_ms"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["decomposition"]["M"] == 2);
    CHECK(j["action"]["cycles"] == "(0 1)");
    CHECK(j["unitarity"]["unitary"] == true);
    CHECK(j["modular"]["M_lcm"] == 2);

    // Every numeric leaf is finite.
    std::function<void(const Json&)> walk = [&](const Json& node) {
        if (node.is_number_float()) {
            CHECK(std::isfinite(node.get<double>()));
        } else if (node.is_object() || node.is_array()) {
            for (const auto& child : node) walk(child);
        }
    };
    walk(j);

    const std::string text = analysis_to_text(a);
    CHECK(text.find("pi = (0 1)") != std::string::npos);
}

TEST_CASE("analyze: scrambled-basis structured channel recovers its skeleton") {
    // Build a channel with two d=1 blocks of multiplicities 1 and 2, then hide
    // the block structure behind a random unitary conjugation.
    BlockDecomposition D;
    D.d0 = 3;
    D.blocks.push_back(Block{1, 1, Matrix(), Matrix::Identity(1, 1)});
    D.blocks.push_back(Block{1, 2, Matrix(), mat2(0.6, 0, 0, 0.4)});
    PeripheralAction A0;
    A0.pi = {1, 0};
    A0.U = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    const Channel plain = synthesize_extension(D, A0, 3);

    std::mt19937_64 rng(2024);
    const Matrix G = random_unitary(3, rng);
    const Channel scrambled = compose(
        compose(unitary_channel(G), plain), unitary_channel(G.adjoint().eval()));
    REQUIRE(validate(scrambled).ok());

    const Analysis a = analyze(scrambled);
    REQUIRE(a.decomposition.M() == 2);
    CHECK(pi_cycle_notation(a.action) == "(0 1)");
    CHECK(a.decomposition.blocks[0].m + a.decomposition.blocks[1].m == 3);
    CHECK_FALSE(a.certificate.unitary);  // spectra {1} vs {0.6, 0.4} cannot match
    CHECK(a.modular.M_lcm == 2);
    CHECK(a.cycle_power.matches);
    CHECK(a.reconstruction_residual <= 1e-8);
}

TEST_CASE("analyze: unitary block with transient leakage") {
    // C^3 = C^2 ⊕ C: the surviving block rotates by V, the complement leaks.
    std::mt19937_64 rng(55);
    const Matrix V = random_unitary(2, rng);
    Matrix K1 = Matrix::Zero(3, 3);
    K1.topLeftCorner(2, 2) = V;
    Matrix K2 = Matrix::Zero(3, 3);
    K2(0, 2) = 1.0;
    const Channel phi = Channel::from_kraus({K1, K2});
    REQUIRE(validate(phi).ok());

    const Analysis a = analyze(phi);
    CHECK(a.reduction.d0 == 2);
    REQUIRE(a.decomposition.M() == 1);
    CHECK(a.decomposition.blocks[0].d == 2);
    CHECK(a.decomposition.blocks[0].m == 1);
    CHECK(a.certificate.unitary);
    CHECK(a.cycle_power.matches);
    // The witness implements V on the reduced space.
    const Matrix& W = a.certificate.witness;
    const Matrix Vred = a.reduction.V.adjoint() * K1 * a.reduction.V;
    CHECK((kron(W.conjugate(), W) - kron(Vred.conjugate(), Vred)).norm() < 1e-8);
}

TEST_CASE("analyze: two-cycle over d=2 blocks with nontrivial holonomy") {
    std::mt19937_64 rng(321);
    BlockDecomposition D;
    D.d0 = 4;
    D.blocks.push_back(Block{2, 1, Matrix(), Matrix::Identity(1, 1)});
    D.blocks.push_back(Block{2, 1, Matrix(), Matrix::Identity(1, 1)});
    PeripheralAction A0;
    A0.pi = {1, 0};
    A0.U = {random_unitary(2, rng), random_unitary(2, rng)};
    const Channel phi = synthesize_extension(D, A0, 4);

    const Analysis a = analyze(phi);
    REQUIRE(a.decomposition.M() == 2);
    CHECK(a.decomposition.blocks[0].d == 2);
    CHECK(pi_cycle_notation(a.action) == "(0 1)");
    CHECK(a.certificate.unitary);  // m = 1 on both blocks
    CHECK(a.modular.M_lcm == 2);
    // The square of the action matches the modular conjugation even though
    // the holonomy has two distinct generic phases.
    CHECK(a.cycle_power.matches);
    CHECK(a.cycle_power.max_residual <= 1e-8);
    CHECK(a.cycle_power.one_step_residual > 0.1);
}

TEST_CASE("desk-scale smoke: dimension 8 analysis stays within tolerances") {
    const Channel phi = random_channel(8, 16, 888);
    const Analysis a = analyze(phi);
    CHECK(a.validation.ok());
    CHECK(a.reconstruction_residual <= 1e-8);
    CHECK(a.cycle_power.matches);
}

TEST_CASE("invariants agree across decomposition seeds") {
    const Channel phi = two_cycle_mismatch_fixture();
    const Analysis a = analyze(phi, {.tol = {}, .seed = 1});
    const Analysis b = analyze(phi, {.tol = {}, .seed = 99});
    CHECK(a.decomposition.M() == b.decomposition.M());
    for (Eigen::Index k = 0; k < a.decomposition.M(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        CHECK(a.decomposition.blocks[ks].d == b.decomposition.blocks[ks].d);
        CHECK(a.decomposition.blocks[ks].m == b.decomposition.blocks[ks].m);
    }
    CHECK(pi_cycle_notation(a.action) == pi_cycle_notation(b.action));
    CHECK(a.certificate.unitary == b.certificate.unitary);
    CHECK(a.modular.M_lcm == b.modular.M_lcm);
    CHECK((a.modular.sigma - b.modular.sigma).norm() < 1e-9);
}

TEST_CASE("analysis is deterministic for a fixed seed") {
    const Channel phi = random_channel(3, 3, 314);
    AnalysisOptions opts;
    opts.seed = 9;
    const Analysis a = analyze(phi, opts);
    const Analysis b = analyze(phi, opts);
    REQUIRE(a.decomposition.M() == b.decomposition.M());
    for (Eigen::Index k = 0; k < a.decomposition.M(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        CHECK((a.decomposition.blocks[ks].W - b.decomposition.blocks[ks].W).norm() ==
              0.0);
        CHECK((a.action.U[ks] - b.action.U[ks]).norm() == 0.0);
    }
}
