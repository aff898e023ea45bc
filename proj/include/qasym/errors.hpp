// errors.hpp — Exception taxonomy for the channel-asymptotics library

#pragma once

#include <stdexcept>
#include <string>

namespace qasym {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or size disagreement between operands.
struct DimensionMismatch : Error {
    using Error::Error;
};

// Dense eigensolver exhausted its iteration budget (numerically pathological input).
struct NonConvergence : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

// An eigenvalue sits on (or within the degeneracy gap of) the closed negative
// real axis, so the principal matrix logarithm is not defined there.
struct BranchCut : Error {
    using Error::Error;
};

// The channel superoperator is not invertible (log-based tests inconclusive).
struct SingularChannel : Error {
    using Error::Error;
};

// The candidate basis failed to close under products/adjoints at tolerance;
// signals a faithfulness or tolerance failure upstream.
struct AlgebraClosureViolation : Error {
    using Error::Error;
};

// Randomized block decomposition exhausted its seeded retries.
struct DecompositionFailure : Error {
    using Error::Error;
};

// The extracted rho_k is inconsistent across attractor elements.
struct FactorizationResidual : Error {
    using Error::Error;
};

// A pushed block element landed in zero or several target blocks.
struct PermutationAmbiguity : Error {
    using Error::Error;
};

struct NotInAttractor : Error {
    using Error::Error;
};

// The lambda=1 eigenprojection applied to the identity vanished; impossible
// for a valid channel, so something upstream is broken.
struct ZeroSupport : Error {
    using Error::Error;
};

struct NotFaithfulDecomposition : Error {
    using Error::Error;
};

// Synthesis prescription is internally inconsistent.
struct InvalidSpec : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace qasym
