// reduction.hpp — Restriction to the support of the maximum-rank fixed point
//
// With V the partial isometry onto H0 = supp(P(I)), the reduced channel
// X -> V† Φ(V X V†) V is faithful (full-rank fixed point) and carries the
// whole attractor: Attr(Φ) = 0 ⊕ Attr(reduced).

#pragma once

#include "qasym/channel.hpp"
#include "qasym/spectral.hpp"

namespace qasym {

struct Reduction {
    Eigen::Index d0 = 0;
    Matrix V;         // d x d0, V†V = I
    Matrix Q;         // V V†, projection onto H0
    Channel reduced;  // faithful channel on H0
    bool faithful = false;  // true iff d0 == d
};

Reduction reduce(const Channel& phi, const SpectralData& S, const Tolerances& tol = {});

// V X0 V† : embeds an operator on H0 back as the 0 ⊕ X0 block.
Matrix embed(const Reduction& R, const Matrix& X0);

} // namespace qasym
