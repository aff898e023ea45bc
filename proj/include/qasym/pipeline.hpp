// pipeline.hpp — End-to-end analysis: validate → spectrum → reduce → decompose
// → action → certify → sufficient-condition tests → modular machinery, plus reports

#pragma once

#include <map>
#include <string>
#include <vector>

#include "qasym/asymptotics.hpp"
#include "qasym/channel.hpp"
#include "qasym/io.hpp"
#include "qasym/modular.hpp"
#include "qasym/reduction.hpp"
#include "qasym/spectral.hpp"
#include "qasym/structure.hpp"

namespace qasym {

struct AnalysisOptions {
    Tolerances tol;
    std::uint64_t seed = 0;
};

struct Analysis {
    ValidationReport validation;
    SpectralData spectral;
    Reduction reduction;
    SpectralData reduced_spectral;
    AttractorBasis reduced_attractor;
    std::vector<Matrix> adjoint_algebra;
    BlockDecomposition decomposition;
    PeripheralAction action;
    UnitarityCertificate certificate;
    bool idempotent = false;
    MarkovReport markov;
    double generator_roundtrip_error = -1.0;  // set when markov verdict is markovian
    std::vector<CycleData> cycles;
    ModularData modular;
    CyclePowerReport cycle_power;
    double reconstruction_residual = 0.0;  // max over the reduced attractor basis
    std::map<std::string, double> timings_ms;
};

// Runs the whole pipeline; throws on validation failure or any stage error.
Analysis analyze(const Channel& phi, const AnalysisOptions& opts = {});

// Permutation in cycle notation with canonical 0-based block labels, e.g. "(0 1)(2)".
std::string pi_cycle_notation(const PeripheralAction& A);

Json analysis_to_json(const Analysis& a);
std::string analysis_to_text(const Analysis& a);

} // namespace qasym
