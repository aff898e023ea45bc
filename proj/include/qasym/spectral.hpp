// spectral.hpp — Peripheral spectrum, attractor subspace, asymptotic projector
//
// The attractor of a channel is the direct sum of the eigenspaces with
// |lambda| = 1; the fixed-point space is the lambda = 1 eigenspace. Peripheral
// eigenvalues of a channel are semisimple, so per-cluster biorthogonalized
// left/right pairs give exact spectral projectors there.

#pragma once

#include <vector>

#include "qasym/channel.hpp"
#include "qasym/numerics.hpp"

namespace qasym {

struct SpectralData {
    Eigen::Index dim = 0;           // channel dimension d
    Vector eigenvalues;             // all d^2, descending |lambda|
    std::vector<Eigen::Index> peripheral_indices;
    std::vector<std::vector<Eigen::Index>> peripheral_clusters;
    Matrix right_peripheral;        // d^2 x n_p, columns follow peripheral_indices
    Matrix left_peripheral;         // biorthogonal partners (l_i† r_j = δ_ij per cluster)
    Matrix attractor_projector;     // P_Attr = Σ_clusters Σ r l†
    Matrix fixed_projector;         // the lambda = 1 cluster projector
    double gram_condition = 1.0;    // worst peripheral biorthogonalization condition
    double subperipheral_radius = 0.0;  // max |lambda| outside the peripheral set
};

SpectralData spectrum(const Channel& phi, const Tolerances& tol = {});

struct AttractorBasis {
    std::vector<Matrix> elements;        // unvectorized right eigenvectors, unit HS norm
    std::vector<Eigen::Index> indices;   // positions in SpectralData::eigenvalues
    double gram_condition = 1.0;         // ‖·‖ condition of the element Gram matrix
};

AttractorBasis attractor_basis(const SpectralData& S);

// Hermitized image of the identity under the fixed-point eigenprojection; its
// support carries the support and range of every fixed point.
Matrix max_rank_fixed_point(const SpectralData& S, const Tolerances& tol = {});

// Independent oracle for the fixed projector: (1/N) Σ_{n=1..N} superop^n.
Matrix cesaro_fixed_oracle(const Channel& phi, long iterations);

} // namespace qasym
